use num_complex::Complex64;

use super::vector::ComplexVector;
use crate::error::{domain, Error, Result};

/// Relative pivot threshold for [`ComplexMatrix::inverse`].
pub const SINGULARITY_THRESHOLD: f64 = 1e-12;

/// Dense row-major complex matrix.
#[derive(Clone, Debug, PartialEq)]
pub struct ComplexMatrix {
    rows: usize,
    cols: usize,
    data: Vec<Complex64>,
}

impl ComplexMatrix {
    pub fn new(rows: usize, cols: usize, data: Vec<Complex64>) -> Result<Self> {
        if rows == 0 || cols == 0 {
            return Err(domain("matrix dimensions must be positive"));
        }
        if data.len() != rows * cols {
            return Err(domain(format!(
                "{} entries cannot fill a {rows}x{cols} matrix",
                data.len()
            )));
        }
        Ok(Self { rows, cols, data })
    }

    pub fn from_real(rows: usize, cols: usize, data: &[f64]) -> Result<Self> {
        Self::new(rows, cols, data.iter().map(|&x| Complex64::new(x, 0.0)).collect())
    }

    pub fn zeros(rows: usize, cols: usize) -> Self {
        Self { rows, cols, data: vec![Complex64::new(0.0, 0.0); rows * cols] }
    }

    pub fn identity(n: usize) -> Self {
        let mut m = Self::zeros(n, n);
        for i in 0..n {
            m.data[i * n + i] = Complex64::new(1.0, 0.0);
        }
        m
    }

    pub fn diagonal(entries: &[Complex64]) -> Self {
        let n = entries.len();
        let mut m = Self::zeros(n, n);
        for (i, &d) in entries.iter().enumerate() {
            m.data[i * n + i] = d;
        }
        m
    }

    /// Stacks `vectors[i]†` as row `i`. This is how a channel matrix is built
    /// from per-user channel vectors: `(G x)_i = g_i† x`.
    pub fn from_adjoint_rows(vectors: &[ComplexVector]) -> Result<Self> {
        let cols = vectors.first().map(ComplexVector::dim).unwrap_or(0);
        if vectors.iter().any(|v| v.dim() != cols) {
            return Err(domain("row vectors have inconsistent dimensions"));
        }
        let data = vectors.iter().flat_map(|v| v.iter().map(|z| z.conj())).collect();
        Self::new(vectors.len(), cols, data)
    }

    #[inline]
    pub fn rows(&self) -> usize {
        self.rows
    }

    #[inline]
    pub fn cols(&self) -> usize {
        self.cols
    }

    #[inline]
    pub fn is_square(&self) -> bool {
        self.rows == self.cols
    }

    #[inline]
    pub fn get(&self, i: usize, j: usize) -> Complex64 {
        self.data[i * self.cols + j]
    }

    #[inline]
    pub fn set(&mut self, i: usize, j: usize, z: Complex64) {
        self.data[i * self.cols + j] = z;
    }

    pub fn row(&self, i: usize) -> &[Complex64] {
        &self.data[i * self.cols..(i + 1) * self.cols]
    }

    pub fn column(&self, j: usize) -> ComplexVector {
        ComplexVector::from_vec_unchecked((0..self.rows).map(|i| self.get(i, j)).collect())
    }

    pub fn adjoint(&self) -> Self {
        let mut out = Self::zeros(self.cols, self.rows);
        for i in 0..self.rows {
            for j in 0..self.cols {
                out.data[j * self.rows + i] = self.get(i, j).conj();
            }
        }
        out
    }

    pub fn matmul(&self, rhs: &ComplexMatrix) -> Result<Self> {
        if self.cols != rhs.rows {
            return Err(domain(format!(
                "cannot multiply {}x{} by {}x{}",
                self.rows, self.cols, rhs.rows, rhs.cols
            )));
        }
        let mut out = Self::zeros(self.rows, rhs.cols);
        for i in 0..self.rows {
            for k in 0..self.cols {
                let a = self.get(i, k);
                if a == Complex64::new(0.0, 0.0) {
                    continue;
                }
                for j in 0..rhs.cols {
                    out.data[i * rhs.cols + j] += a * rhs.get(k, j);
                }
            }
        }
        Ok(out)
    }

    /// Matrix-vector product.
    pub fn apply(&self, x: &ComplexVector) -> Result<ComplexVector> {
        if x.dim() != self.cols {
            return Err(domain("vector dimension does not match matrix columns"));
        }
        let out = (0..self.rows)
            .map(|i| self.row(i).iter().zip(x.iter()).map(|(a, b)| a * b).sum())
            .collect();
        Ok(ComplexVector::from_vec_unchecked(out))
    }

    /// `self + s I` for square matrices.
    pub fn add_scaled_identity(&self, s: f64) -> Result<Self> {
        if !self.is_square() {
            return Err(domain("identity shift needs a square matrix"));
        }
        let mut out = self.clone();
        for i in 0..self.rows {
            out.data[i * self.cols + i] += Complex64::new(s, 0.0);
        }
        Ok(out)
    }

    /// Maximum absolute row sum.
    pub fn norm_inf(&self) -> f64 {
        (0..self.rows)
            .map(|i| self.row(i).iter().map(|z| z.norm()).sum::<f64>())
            .fold(0.0, f64::max)
    }

    /// Inverse by LU factorization with partial pivoting.
    ///
    /// Fails with [`Error::SingularMatrix`] when a pivot magnitude drops below
    /// `1e-12 · ‖A‖∞`.
    pub fn inverse(&self) -> Result<Self> {
        if !self.is_square() {
            return Err(domain(format!("cannot invert a {}x{} matrix", self.rows, self.cols)));
        }
        let n = self.rows;
        let threshold = SINGULARITY_THRESHOLD * self.norm_inf();
        let mut lu = self.data.clone();
        let mut perm: Vec<usize> = (0..n).collect();

        for k in 0..n {
            let (p, pivot_mag) = (k..n)
                .map(|i| (i, lu[i * n + k].norm()))
                .fold((k, -1.0), |best, cur| if cur.1 > best.1 { cur } else { best });
            if pivot_mag < threshold || pivot_mag == 0.0 {
                return Err(Error::SingularMatrix { pivot: pivot_mag, threshold });
            }
            if p != k {
                for j in 0..n {
                    lu.swap(k * n + j, p * n + j);
                }
                perm.swap(k, p);
            }
            let pivot = lu[k * n + k];
            for i in (k + 1)..n {
                let factor = lu[i * n + k] / pivot;
                lu[i * n + k] = factor;
                for j in (k + 1)..n {
                    let u = lu[k * n + j];
                    lu[i * n + j] -= factor * u;
                }
            }
        }

        // Solve L U x = P e_j column by column.
        let mut inv = Self::zeros(n, n);
        let mut x = vec![Complex64::new(0.0, 0.0); n];
        for j in 0..n {
            for i in 0..n {
                x[i] = if perm[i] == j { Complex64::new(1.0, 0.0) } else { Complex64::new(0.0, 0.0) };
            }
            for i in 0..n {
                let mut s = x[i];
                for k in 0..i {
                    s -= lu[i * n + k] * x[k];
                }
                x[i] = s;
            }
            for i in (0..n).rev() {
                let mut s = x[i];
                for k in (i + 1)..n {
                    s -= lu[i * n + k] * x[k];
                }
                x[i] = s / lu[i * n + i];
            }
            for i in 0..n {
                inv.data[i * n + j] = x[i];
            }
        }
        Ok(inv)
    }
}
