//! Complex linear-algebra primitives, seeded random streams, special
//! functions and quadrature shared by every other module.

mod matrix;
mod quad;
mod rng;
mod special;
mod vector;

pub use matrix::ComplexMatrix;
pub use quad::{integrate, integrate_to_infinity};
pub use rng::RngStream;
pub use special::{beta_fn, digamma, harmonic, ln_beta, ln_gamma};
pub use vector::{angle_sin2, ComplexVector};
pub(crate) use vector::inner_slices;

pub use num_complex::Complex64;

use rand::Rng;
use rand_distr::StandardNormal;

/// Draws a vector with iid CN(0, 1) entries (variance 1/2 per real component).
pub fn sample_complex_gaussian<R: Rng + ?Sized>(dim: usize, rng: &mut R) -> ComplexVector {
    assert!(dim >= 1, "dimension must be positive");
    ComplexVector::from_vec_unchecked((0..dim).map(|_| complex_gaussian(rng)).collect())
}

/// One CN(0, 1) scalar.
#[inline]
pub fn complex_gaussian<R: Rng + ?Sized>(rng: &mut R) -> Complex64 {
    let re: f64 = rng.sample(StandardNormal);
    let im: f64 = rng.sample(StandardNormal);
    Complex64::new(re * std::f64::consts::FRAC_1_SQRT_2, im * std::f64::consts::FRAC_1_SQRT_2)
}

/// Draws a unit vector uniformly from the complex unit sphere in `dim` dimensions.
pub fn sample_isotropic_unit<R: Rng + ?Sized>(dim: usize, rng: &mut R) -> ComplexVector {
    loop {
        let g = sample_complex_gaussian(dim, rng);
        // A CN draw is nonzero with probability one; the loop only guards
        // against the floating-point underflow case.
        if let Ok(u) = g.normalized() {
            return u;
        }
    }
}

/// Haar-distributed unitary matrix: Gram-Schmidt orthonormalization of an iid
/// CN(0, 1) matrix. Returned columns are the orthonormal basis vectors.
pub fn sample_haar_unitary<R: Rng + ?Sized>(dim: usize, rng: &mut R) -> Vec<ComplexVector> {
    'retry: loop {
        let mut basis: Vec<ComplexVector> = Vec::with_capacity(dim);
        for _ in 0..dim {
            let mut g = sample_complex_gaussian(dim, rng);
            // Two passes of modified Gram-Schmidt keep the basis orthogonal to
            // working precision.
            for _ in 0..2 {
                for q in &basis {
                    let c = q.inner(&g);
                    g.axpy(-c, q);
                }
            }
            match g.normalized() {
                Ok(q) => basis.push(q),
                Err(_) => continue 'retry,
            }
        }
        return basis;
    }
}

/// Kahan-Babuska (Neumaier) compensated sum. The result depends only on the
/// order of the input, so ordered per-trial results reduce identically no
/// matter how they were computed.
pub fn compensated_sum<I: IntoIterator<Item = f64>>(values: I) -> f64 {
    let mut sum = 0.0_f64;
    let mut comp = 0.0_f64;
    for v in values {
        let t = sum + v;
        if sum.abs() >= v.abs() {
            comp += (sum - t) + v;
        } else {
            comp += (v - t) + sum;
        }
        sum = t;
    }
    sum + comp
}

/// Sample mean and standard error of the mean (unbiased variance / n).
pub fn mean_and_std_err(values: &[f64]) -> (f64, f64) {
    let n = values.len();
    if n == 0 {
        return (f64::NAN, f64::NAN);
    }
    let mean = compensated_sum(values.iter().copied()) / n as f64;
    if n == 1 {
        return (mean, 0.0);
    }
    let ss = compensated_sum(values.iter().map(|v| (v - mean) * (v - mean)));
    let var = ss / (n - 1) as f64;
    (mean, (var / n as f64).sqrt())
}

/// Converts decibels to a linear power ratio.
#[inline]
pub fn db_to_linear(db: f64) -> f64 {
    10f64.powf(db / 10.0)
}

/// Converts a linear power ratio to decibels.
#[inline]
pub fn linear_to_db(x: f64) -> f64 {
    10.0 * x.log10()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn complex_gaussian_has_unit_power() {
        let mut rng = RngStream::new(11, 0);
        let n = 100_000;
        let power: f64 =
            (0..n).map(|_| complex_gaussian(&mut rng).norm_sqr()).sum::<f64>() / n as f64;
        assert!((power - 1.0).abs() < 0.02, "E|x|^2 = {power}");
    }

    #[test]
    fn gaussian_vector_energy_matches_dimension() {
        let mut rng = RngStream::new(3, 9);
        let n = 20_000;
        let e: f64 =
            (0..n).map(|_| sample_complex_gaussian(4, &mut rng).norm_sqr()).sum::<f64>() / n as f64;
        assert!((e - 4.0).abs() < 0.06, "E||h||^2 = {e}");
    }

    #[test]
    fn sampling_is_reproducible_per_stream() {
        let a = sample_complex_gaussian(5, &mut RngStream::new(7, 3));
        let b = sample_complex_gaussian(5, &mut RngStream::new(7, 3));
        let c = sample_complex_gaussian(5, &mut RngStream::new(7, 4));
        assert_eq!(a, b);
        assert_ne!(a, c);
    }

    #[test]
    fn isotropic_draws_are_unit_norm() {
        let mut rng = RngStream::new(1, 1);
        for dim in 1..6 {
            let v = sample_isotropic_unit(dim, &mut rng);
            assert!((v.norm() - 1.0).abs() < 1e-12);
        }
        // dim = 1 is a pure phase
        let v = sample_isotropic_unit(1, &mut rng);
        assert!((v[0].norm() - 1.0).abs() < 1e-12);
    }

    #[test]
    fn haar_basis_is_orthonormal() {
        let mut rng = RngStream::new(5, 2);
        let q = sample_haar_unitary(6, &mut rng);
        for i in 0..6 {
            for j in 0..6 {
                let ip = q[i].inner(&q[j]).norm();
                let want = if i == j { 1.0 } else { 0.0 };
                assert!((ip - want).abs() < 1e-12, "({i},{j}) -> {ip}");
            }
        }
    }

    #[test]
    fn compensated_sum_recovers_cancellation() {
        let v = [1e16, 1.0, -1e16, 1.0];
        assert_eq!(compensated_sum(v), 2.0);
    }

    #[test]
    fn std_err_of_constant_is_zero() {
        let (m, se) = mean_and_std_err(&[2.5; 10]);
        assert_eq!(m, 2.5);
        assert_eq!(se, 0.0);
        let (m, se) = mean_and_std_err(&[1.0, 3.0]);
        assert_eq!(m, 2.0);
        assert!((se - 1.0).abs() < 1e-15);
    }
}
