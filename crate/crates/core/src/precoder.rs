//! Linear precoders built from (possibly quantized) channel directions.
//!
//! The channel-estimate matrix `G` stacks `ĝ_i†` as row `i`, so
//! `(G v)_i = ĝ_i† v`. Zero-forcing beamformers are the normalized columns of
//! `G⁻¹`; regularized zero-forcing uses `G†(GG† + (M/P) I)⁻¹`. Every stream
//! gets power `P/M`.

use serde::{Deserialize, Serialize};

use crate::error::{domain, Result};
use crate::numerics::{ComplexMatrix, ComplexVector};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum PrecoderKind {
    /// Zero-forcing.
    Zf,
    /// Regularized zero-forcing.
    Rzf,
}

impl PrecoderKind {
    pub fn label(self) -> &'static str {
        match self {
            PrecoderKind::Zf => "zf",
            PrecoderKind::Rzf => "rzf",
        }
    }
}

/// Where the matrix the beamformers were computed from came from.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum CsiSource {
    PerfectCsit,
    Quantized,
}

/// One unit-norm beamformer per stream.
#[derive(Clone, Debug, PartialEq)]
pub struct BeamformerSet {
    pub kind: PrecoderKind,
    pub source: CsiSource,
    pub vectors: Vec<ComplexVector>,
}

impl BeamformerSet {
    pub fn len(&self) -> usize {
        self.vectors.len()
    }

    pub fn is_empty(&self) -> bool {
        self.vectors.is_empty()
    }
}

fn normalized_columns(m: &ComplexMatrix) -> Result<Vec<ComplexVector>> {
    (0..m.cols()).map(|j| m.column(j).normalized()).collect()
}

/// Normalized columns of `G⁻¹`. Propagates `SingularMatrix`.
pub fn zf_beamformers(g: &ComplexMatrix, source: CsiSource) -> Result<BeamformerSet> {
    if !g.is_square() {
        return Err(domain("zero-forcing needs a square channel-estimate matrix"));
    }
    let inv = g.inverse()?;
    Ok(BeamformerSet { kind: PrecoderKind::Zf, source, vectors: normalized_columns(&inv)? })
}

/// Normalized columns of `G†(GG† + (M/P) I)⁻¹` with `M` the antenna count.
pub fn rzf_beamformers(g: &ComplexMatrix, power: f64, source: CsiSource) -> Result<BeamformerSet> {
    if !(power > 0.0) || !power.is_finite() {
        return Err(domain(format!("transmit power must be positive and finite, got {power}")));
    }
    let gh = g.adjoint();
    let gram = g.matmul(&gh)?;
    let reg = gram.add_scaled_identity(g.cols() as f64 / power)?;
    let precoder = gh.matmul(&reg.inverse()?)?;
    Ok(BeamformerSet { kind: PrecoderKind::Rzf, source, vectors: normalized_columns(&precoder)? })
}

/// Beamformers of the requested kind for power `power`.
pub fn beamformers(
    kind: PrecoderKind,
    g: &ComplexMatrix,
    power: f64,
    source: CsiSource,
) -> Result<BeamformerSet> {
    match kind {
        PrecoderKind::Zf => zf_beamformers(g, source),
        PrecoderKind::Rzf => rzf_beamformers(g, power, source),
    }
}

/// SINR of user `user` with channel `h` (not normalized) under equal power
/// `P/M` per stream, `M = bf.len()`:
/// `(P/M)|h†v_i|² / (1 + Σ_{j≠i} (P/M)|h†v_j|²)`.
pub fn sinr(h: &ComplexVector, bf: &BeamformerSet, user: usize, power: f64) -> f64 {
    let per_stream = power / bf.len() as f64;
    let mut signal = 0.0;
    let mut interference = 0.0;
    for (j, v) in bf.vectors.iter().enumerate() {
        let g = per_stream * h.inner(v).norm_sqr();
        if j == user {
            signal = g;
        } else {
            interference += g;
        }
    }
    signal / (1.0 + interference)
}

/// Per-user rates `log₂(1 + (P/M)|h_i†v_i|²)` of zero-forcing with perfect
/// CSIT. `h` stacks `h_i†` as rows.
pub fn zf_rates_perfect_csit(h: &ComplexMatrix, power: f64) -> Result<Vec<f64>> {
    let bf = zf_beamformers(h, CsiSource::PerfectCsit)?;
    let per_stream = power / bf.len() as f64;
    Ok((0..h.rows())
        .map(|i| {
            let g = crate::numerics::inner_slices(h.row(i), bf.vectors[i].as_slice()).norm_sqr();
            // row i is h_i†, so the product is already h_i†v_i
            (1.0 + per_stream * g).log2()
        })
        .collect())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::numerics::{angle_sin2, complex_gaussian, Complex64, RngStream};

    fn c(re: f64) -> Complex64 {
        Complex64::new(re, 0.0)
    }

    fn row_products(g: &ComplexMatrix, bf: &BeamformerSet) -> Vec<Vec<f64>> {
        (0..g.rows())
            .map(|i| {
                bf.vectors
                    .iter()
                    .map(|v| g.row(i).iter().zip(v.iter()).map(|(a, b)| a * b).sum::<Complex64>().norm())
                    .collect()
            })
            .collect()
    }

    fn random_matrix(n: usize, rng: &mut RngStream) -> ComplexMatrix {
        ComplexMatrix::new(n, n, (0..n * n).map(|_| complex_gaussian(rng)).collect()).unwrap()
    }

    #[test]
    fn identity_gives_basis_vectors() {
        let g = ComplexMatrix::identity(3);
        let bf = zf_beamformers(&g, CsiSource::PerfectCsit).unwrap();
        for (j, v) in bf.vectors.iter().enumerate() {
            assert_eq!(*v, ComplexVector::basis(3, j));
        }
        let bf = rzf_beamformers(&g, 0.37, CsiSource::PerfectCsit).unwrap();
        for (j, v) in bf.vectors.iter().enumerate() {
            assert!((v[j] - c(1.0)).norm() < 1e-15);
        }
    }

    #[test]
    fn two_by_two_hand_inverse() {
        let s = std::f64::consts::FRAC_1_SQRT_2;
        let g = ComplexMatrix::from_real(2, 2, &[1.0, 0.0, s, s]).unwrap();
        let bf = zf_beamformers(&g, CsiSource::Quantized).unwrap();
        // G⁻¹ = [[1, 0], [−1, √2]]
        let v1 = ComplexVector::from_real(&[s, -s]).unwrap();
        let v2 = ComplexVector::from_real(&[0.0, 1.0]).unwrap();
        assert!(angle_sin2(&bf.vectors[0], &v1).unwrap() < 1e-15);
        assert!(angle_sin2(&bf.vectors[1], &v2).unwrap() < 1e-15);
        let p = row_products(&g, &bf);
        assert!(p[0][1] < 1e-15 && p[1][0] < 1e-15);
    }

    #[test]
    fn random_zf_residual() {
        let mut rng = RngStream::new(12, 0);
        for _ in 0..50 {
            let g = random_matrix(4, &mut rng);
            let bf = zf_beamformers(&g, CsiSource::Quantized).unwrap();
            let p = row_products(&g, &bf);
            for i in 0..4 {
                assert!((bf.vectors[i].norm() - 1.0).abs() < 1e-12);
                for j in 0..4 {
                    if i != j {
                        assert!(p[i][j] < 1e-9, "|g_{i}† v_{j}| = {}", p[i][j]);
                    }
                }
            }
        }
    }

    #[test]
    fn zf_directions_ignore_row_scaling() {
        let mut rng = RngStream::new(13, 0);
        let g = random_matrix(3, &mut rng);
        let mut scaled = g.clone();
        for (i, s) in [2.0, 0.1, 7.5].into_iter().enumerate() {
            for j in 0..3 {
                scaled.set(i, j, g.get(i, j) * s);
            }
        }
        let a = zf_beamformers(&g, CsiSource::PerfectCsit).unwrap();
        let b = zf_beamformers(&scaled, CsiSource::PerfectCsit).unwrap();
        for (u, v) in a.vectors.iter().zip(&b.vectors) {
            assert!(angle_sin2(u, v).unwrap() < 1e-14);
        }
    }

    #[test]
    fn rzf_converges_to_zf_at_high_power() {
        let mut rng = RngStream::new(14, 0);
        let g = random_matrix(4, &mut rng);
        let zf = zf_beamformers(&g, CsiSource::Quantized).unwrap();
        let rzf = rzf_beamformers(&g, 1e12, CsiSource::Quantized).unwrap();
        for (u, v) in zf.vectors.iter().zip(&rzf.vectors) {
            let angle = angle_sin2(u, v).unwrap().sqrt().asin();
            assert!(angle < 1e-4, "angle {angle}");
        }
    }

    #[test]
    fn rzf_finite_for_nearly_collinear_users() {
        for theta in [1e-2, 1e-6, 1e-12, 0.0] {
            let (s, co) = f64::sin_cos(theta);
            let g = ComplexMatrix::from_real(2, 2, &[1.0, 0.0, co, s]).unwrap();
            let bf = rzf_beamformers(&g, 1.0, CsiSource::Quantized).unwrap();
            for v in &bf.vectors {
                assert!(v.iter().all(|z| z.re.is_finite() && z.im.is_finite()));
                assert!((v.norm() - 1.0).abs() < 1e-12);
            }
        }
    }

    #[test]
    fn rzf_rejects_non_positive_power() {
        assert!(rzf_beamformers(&ComplexMatrix::identity(2), 0.0, CsiSource::Quantized).is_err());
    }

    #[test]
    fn sinr_examples() {
        let mut rng = RngStream::new(15, 0);
        let h = random_matrix(4, &mut rng);
        let bf = zf_beamformers(&h, CsiSource::PerfectCsit).unwrap();
        for i in 0..4 {
            let hi = ComplexVector::new(h.row(i).iter().map(|z| z.conj()).collect()).unwrap();
            let want = 2.5 * hi.inner(&bf.vectors[i]).norm_sqr();
            let got = sinr(&hi, &bf, i, 10.0);
            assert!(((got - want) / want).abs() < 1e-12);
            assert_eq!(sinr(&hi, &bf, i, 0.0), 0.0);
        }

        let phi: f64 = 0.1;
        let bf = BeamformerSet {
            kind: PrecoderKind::Zf,
            source: CsiSource::Quantized,
            vectors: vec![
                ComplexVector::from_real(&[1.0, 0.0]).unwrap(),
                ComplexVector::from_real(&[phi.sin(), phi.cos()]).unwrap(),
            ],
        };
        let h1 = ComplexVector::from_real(&[1.0, 0.0]).unwrap();
        let want = 5.0 / (1.0 + 5.0 * phi.sin().powi(2));
        assert!((sinr(&h1, &bf, 0, 10.0) - want).abs() < 1e-13);
        assert!((want - 4.762).abs() < 1e-3);
    }

    #[test]
    fn perfect_csit_rates() {
        let r = zf_rates_perfect_csit(&ComplexMatrix::identity(3), 6.0).unwrap();
        for x in r {
            assert!((x - 3f64.log2()).abs() < 1e-15);
        }
        let h = ComplexMatrix::from_real(2, 2, &[1.0, 0.0, 0.0, 2.0]).unwrap();
        let r = zf_rates_perfect_csit(&h, 4.0).unwrap();
        assert!((r[0] - 3f64.log2()).abs() < 1e-14);
        assert!((r[1] - 9f64.log2()).abs() < 1e-14);
    }
}
