//! Single-user feedback, TDMA and random-beamforming engines.

use rand::Rng;
use rand_distr::Gamma;

use super::{build_curve, powers, quantizer_stream, run_trials, Csit, SamplingPath, SimConfig, TrialValues};
use crate::bounds::ThroughputCurve;
use crate::error::{Error, Result};
use crate::numerics::{sample_complex_gaussian, sample_haar_unitary, RngStream};
use crate::quantizer::{generate_codebook, sample_error};

fn validate_without_feedback(cfg: &SimConfig) -> Result<()> {
    let mut c = cfg.clone();
    c.csit = Csit::Perfect;
    c.validate()
}

/// Point-to-point MISO with `B` bits of feedback:
/// `E[log₂(1 + P‖h‖²(1 − Z))]`.
///
/// `B = 0` still beamforms along the single random codeword; it is not the
/// isotropic no-CSIT scheme.
pub fn miso_feedback_throughput(cfg: &SimConfig) -> Result<ThroughputCurve> {
    if cfg.users != 1 {
        return Err(Error::Config(format!("users must be 1 for the MISO engine, got {}", cfg.users)));
    }
    let mut c = cfg.clone();
    c.csit = Csit::Quantized;
    c.validate()?;
    let p = powers(&c);
    let bits: Vec<f64> = c.snr_grid_db.iter().map(|&x| c.bits_at(x)).collect::<Result<_>>()?;
    let m = c.antennas;
    let gamma = Gamma::new(m as f64, 1.0).expect("positive shape");
    let (stats, resamples) = run_trials(&c, 1, |t| {
        let mut rng = RngStream::new(c.seed, t);
        let (h, gain) = match c.path {
            SamplingPath::BruteForce => {
                let h = sample_complex_gaussian(m, &mut rng);
                let g = h.norm_sqr();
                (Some(h), g)
            }
            SamplingPath::FastDecomposition => (None, rng.sample(gamma)),
        };
        let mut cache: Vec<(f64, f64)> = Vec::new();
        let mut values = Vec::with_capacity(p.len());
        for (&power, &b) in p.iter().zip(&bits) {
            let z = match cache.iter().find(|(cb, _)| *cb == b) {
                Some(&(_, z)) => z,
                None => {
                    let mut q = quantizer_stream(c.seed, t, b, 0);
                    let z = match &h {
                        Some(h) => generate_codebook(m, b as u32, &mut q)?.quantize(h)?.error,
                        None => sample_error(m, b, &mut q)?,
                    };
                    cache.push((b, z));
                    z
                }
            };
            values.push((1.0 + power * gain * (1.0 - z)).log2());
        }
        Ok(TrialValues { values: vec![values], resamples: 0 })
    })?;
    let bits: Vec<Option<f64>> = bits.into_iter().map(Some).collect();
    let meta = c.meta(Some(c.policy), None, format!("miso path={}", c.path.label()));
    build_curve(&c, &stats[0], &bits, resamples, meta)
}

/// Full power to the strongest user: `E[log₂(1 + P·max_i ‖h_i‖²)]`.
pub fn tdma_throughput(cfg: &SimConfig) -> Result<ThroughputCurve> {
    validate_without_feedback(cfg)?;
    let p = powers(cfg);
    let (stats, _) = run_trials(cfg, 1, |t| {
        let mut rng = RngStream::new(cfg.seed, t);
        let best = (0..cfg.users)
            .map(|_| sample_complex_gaussian(cfg.antennas, &mut rng).norm_sqr())
            .fold(0.0, f64::max);
        let values = p.iter().map(|&power| (1.0 + power * best).log2()).collect();
        Ok(TrialValues { values: vec![values], resamples: 0 })
    })?;
    let none = vec![None; p.len()];
    build_curve(cfg, &stats[0], &none, 0, cfg.meta(None, None, "tdma".into()))
}

/// Random orthonormal beamforming with best-user selection per beam.
///
/// Each trial draws `M` Haar beams. User `i` computes
/// `SINR_{i,m} = (P/M)|h_i†φ_m|² / (1 + Σ_{n≠m} (P/M)|h_i†φ_n|²)` and reports
/// its best beam together with that SINR. Each beam serves the reporting user
/// with the highest SINR; beams nobody reported stay silent.
pub fn random_bf_throughput(cfg: &SimConfig) -> Result<ThroughputCurve> {
    validate_without_feedback(cfg)?;
    if cfg.users < cfg.antennas {
        return Err(Error::Config(format!(
            "users must be at least antennas for random beamforming (users={}, antennas={})",
            cfg.users, cfg.antennas
        )));
    }
    let p = powers(cfg);
    let m = cfg.antennas;
    let (stats, _) = run_trials(cfg, 1, |t| {
        let mut rng = RngStream::new(cfg.seed, t);
        let beams = sample_haar_unitary(m, &mut rng);
        let gains: Vec<Vec<f64>> = (0..cfg.users)
            .map(|_| {
                let h = sample_complex_gaussian(m, &mut rng);
                beams.iter().map(|b| h.inner(b).norm_sqr()).collect()
            })
            .collect();
        let values = p
            .iter()
            .map(|&power| {
                let ps = power / m as f64;
                let mut best = vec![None::<f64>; m];
                for g in &gains {
                    let total: f64 = g.iter().sum();
                    let (beam, s) = g
                        .iter()
                        .enumerate()
                        .map(|(k, &gk)| (k, ps * gk / (1.0 + ps * (total - gk))))
                        .fold((0, f64::NEG_INFINITY), |acc, x| if x.1 > acc.1 { x } else { acc });
                    if best[beam].map_or(true, |b| s > b) {
                        best[beam] = Some(s);
                    }
                }
                best.iter().flatten().map(|s| (1.0 + s).log2()).sum()
            })
            .collect();
        Ok(TrialValues { values: vec![values], resamples: 0 })
    })?;
    let none = vec![None; p.len()];
    build_curve(cfg, &stats[0], &none, 0, cfg.meta(None, None, "random_bf".into()))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::bounds::{miso_reference, ScalingPolicy};
    use crate::numerics::db_to_linear;

    fn single(antennas: usize, bits: u32) -> SimConfig {
        SimConfig::multiuser(antennas, ScalingPolicy::fixed(bits), vec![0.0, 10.0, 20.0]).with_users(1)
    }

    #[test]
    fn tdma_single_user_matches_csit_capacity() {
        let cfg = single(4, 0).with_trials(20_000);
        let c = tdma_throughput(&cfg).unwrap();
        for pt in &c.points {
            let r = miso_reference(db_to_linear(pt.snr_db), 4, 0.0).unwrap();
            assert!((pt.mean - r.csit).abs() < 3.5 * pt.std_err, "{} vs {}", pt.mean, r.csit);
        }
    }

    #[test]
    fn miso_paths_agree() {
        let brute = miso_feedback_throughput(&single(3, 4).with_trials(20_000).with_path(SamplingPath::BruteForce)).unwrap();
        let fast = miso_feedback_throughput(&single(3, 4).with_trials(20_000)).unwrap();
        for (a, b) in brute.points.iter().zip(&fast.points) {
            let se = a.std_err.hypot(b.std_err);
            assert!((a.mean - b.mean).abs() < 3.5 * se);
        }
    }

    #[test]
    fn miso_requires_one_user() {
        assert!(miso_feedback_throughput(&single(3, 4).with_users(2)).is_err());
    }

    #[test]
    fn random_bf_single_antenna_is_best_user_scalar() {
        // M = 1: the only beam serves the strongest user at full power
        let cfg = SimConfig {
            antennas: 1,
            users: 3,
            snr_grid_db: vec![10.0],
            policy: ScalingPolicy::fixed(0),
            precoder: crate::PrecoderKind::Zf,
            csit: Csit::Perfect,
            path: SamplingPath::BruteForce,
            trials: 500,
            seed: 3,
        };
        let rbf = random_bf_throughput(&cfg).unwrap();
        let tdma = tdma_throughput(&cfg).unwrap();
        assert!(rbf.points[0].mean > 0.0 && rbf.points[0].mean.is_finite());
        assert!((rbf.points[0].mean - tdma.points[0].mean).abs() < 0.25);
    }

    #[test]
    fn random_bf_needs_enough_users() {
        let cfg = SimConfig::multiuser(4, ScalingPolicy::fixed(0), vec![0.0]).with_users(3);
        assert!(random_bf_throughput(&cfg).is_err());
    }
}
