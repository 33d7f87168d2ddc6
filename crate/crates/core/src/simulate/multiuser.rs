//! Multiuser zero-forcing / regularized zero-forcing with `K = M` users.

use rand::Rng;
use rand_distr::Gamma;

use super::{build_curve, powers, quantizer_stream, run_trials, Csit, SamplingPath, SimConfig, TrialRecord, TrialValues, MAX_ATTEMPTS};
use crate::bounds::ThroughputCurve;
use crate::error::{Error, Result};
use crate::numerics::{sample_complex_gaussian, sample_isotropic_unit, ComplexMatrix, ComplexVector, Complex64, RngStream};
use crate::precoder::{beamformers, sinr, BeamformerSet, CsiSource, PrecoderKind};
use crate::quantizer::{generate_codebook, quantize_direction_fast};

/// Perfect-CSIT throughput, quantized-CSIT throughput and the per-user rate
/// gap `(R_perfect − R_quantized)/M`, all from the same channel draws.
#[derive(Clone, Debug, PartialEq)]
pub struct PairedCurves {
    pub perfect: ThroughputCurve,
    pub quantized: ThroughputCurve,
    pub gap: ThroughputCurve,
}

struct Channels {
    /// `h_i`, unnormalized.
    full: Vec<ComplexVector>,
    /// `h̃_i = h_i / ‖h_i‖`.
    directions: Vec<ComplexVector>,
}

fn draw_channels(cfg: &SimConfig, rng: &mut RngStream) -> Channels {
    let m = cfg.antennas;
    let mut full = Vec::with_capacity(cfg.users);
    let mut directions = Vec::with_capacity(cfg.users);
    match cfg.path {
        SamplingPath::BruteForce => {
            for _ in 0..cfg.users {
                let h = sample_complex_gaussian(m, rng);
                let d = h.normalized().unwrap_or_else(|_| ComplexVector::basis(m, 0));
                full.push(h);
                directions.push(d);
            }
        }
        SamplingPath::FastDecomposition => {
            let gamma = Gamma::new(m as f64, 1.0).expect("positive shape");
            for _ in 0..cfg.users {
                let d = sample_isotropic_unit(m, rng);
                let gain: f64 = rng.sample(gamma);
                full.push(d.scaled(Complex64::new(gain.sqrt(), 0.0)));
                directions.push(d);
            }
        }
    }
    Channels { full, directions }
}

struct Quantized {
    bits: f64,
    estimates: ComplexMatrix,
    errors: Vec<f64>,
    zf: Option<BeamformerSet>,
}

fn quantize_all(cfg: &SimConfig, ch: &Channels, bits: f64, trial: u64, attempt: u64) -> Result<Quantized> {
    let mut qrng = quantizer_stream(cfg.seed, trial, bits, attempt);
    let mut estimates = Vec::with_capacity(cfg.users);
    let mut errors = Vec::with_capacity(cfg.users);
    for (h, d) in ch.full.iter().zip(&ch.directions) {
        match cfg.path {
            SamplingPath::BruteForce => {
                let cb = generate_codebook(cfg.antennas, bits as u32, &mut qrng)?;
                let q = cb.quantize(h)?;
                estimates.push(q.direction);
                errors.push(q.error);
            }
            SamplingPath::FastDecomposition => {
                let (e, z) = quantize_direction_fast(d, bits, &mut qrng)?;
                estimates.push(e);
                errors.push(z);
            }
        }
    }
    Ok(Quantized { bits, estimates: ComplexMatrix::from_adjoint_rows(&estimates)?, errors, zf: None })
}

fn sinrs(h: &[ComplexVector], bf: &BeamformerSet, power: f64) -> Vec<f64> {
    (0..h.len()).map(|i| sinr(&h[i], bf, i, power)).collect()
}

/// Beamformers for `g` at `power`, reusing a cached zero-forcing set (which
/// does not depend on power).
fn precode(kind: PrecoderKind, g: &ComplexMatrix, power: f64, source: CsiSource, zf: &mut Option<BeamformerSet>) -> Result<BeamformerSet> {
    match kind {
        PrecoderKind::Zf => {
            if zf.is_none() {
                *zf = Some(beamformers(kind, g, power, source)?);
            }
            Ok(zf.clone().expect("cached"))
        }
        PrecoderKind::Rzf => beamformers(kind, g, power, source),
    }
}

#[derive(Clone, Copy)]
struct Arms {
    perfect: bool,
    quantized: bool,
}

struct PointOutcome {
    perfect: Option<Vec<f64>>,
    quantized: Option<(Vec<f64>, Vec<f64>)>,
}

fn check_interference(dirs: &[ComplexVector], bf: &BeamformerSet, errors: &[f64]) {
    for (i, d) in dirs.iter().enumerate() {
        for (j, v) in bf.vectors.iter().enumerate() {
            if i != j {
                let c = d.inner(v).norm_sqr();
                debug_assert!(c <= errors[i] + 1e-9, "interference {c} exceeds quantization error {}", errors[i]);
            }
        }
    }
}

/// One trial at every `(power, bits)` point. Returns the outcomes and the
/// number of redraws caused by singular matrices.
fn simulate_trial(cfg: &SimConfig, points: &[(f64, Option<f64>)], trial: u64, arms: Arms) -> Result<(Vec<PointOutcome>, u64)> {
    let mut rng = RngStream::new(cfg.seed, trial);
    for attempt in 0..MAX_ATTEMPTS {
        match attempt_trial(cfg, points, trial, attempt, arms, &mut rng) {
            Ok(out) => return Ok((out, attempt)),
            Err(Error::SingularMatrix { .. }) => continue,
            Err(e) => return Err(e),
        }
    }
    Err(Error::ExcessiveResampling { resamples: MAX_ATTEMPTS, trials: 1 })
}

fn attempt_trial(
    cfg: &SimConfig,
    points: &[(f64, Option<f64>)],
    trial: u64,
    attempt: u64,
    arms: Arms,
    rng: &mut RngStream,
) -> Result<Vec<PointOutcome>> {
    let ch = draw_channels(cfg, rng);
    let perfect_g = if arms.perfect { Some(ComplexMatrix::from_adjoint_rows(&ch.full)?) } else { None };
    let mut perfect_zf = None;
    let mut cache: Vec<Quantized> = Vec::new();
    let mut out = Vec::with_capacity(points.len());
    for &(power, bits) in points {
        let perfect = match &perfect_g {
            Some(g) => {
                let bf = precode(cfg.precoder, g, power, CsiSource::PerfectCsit, &mut perfect_zf)?;
                Some(sinrs(&ch.full, &bf, power))
            }
            None => None,
        };
        let quantized = match (arms.quantized, bits) {
            (true, Some(b)) => {
                let idx = match cache.iter().position(|q| q.bits == b) {
                    Some(i) => i,
                    None => {
                        cache.push(quantize_all(cfg, &ch, b, trial, attempt)?);
                        cache.len() - 1
                    }
                };
                let q = &mut cache[idx];
                let bf = precode(cfg.precoder, &q.estimates, power, CsiSource::Quantized, &mut q.zf)?;
                if cfg!(debug_assertions) && cfg.path == SamplingPath::BruteForce && cfg.precoder == PrecoderKind::Zf {
                    check_interference(&ch.directions, &bf, &q.errors);
                }
                Some((sinrs(&ch.full, &bf, power), q.errors.clone()))
            }
            _ => None,
        };
        out.push(PointOutcome { perfect, quantized });
    }
    Ok(out)
}

fn sum_rate(s: &[f64]) -> f64 {
    s.iter().map(|x| (1.0 + x).log2()).sum()
}

fn point_inputs(cfg: &SimConfig, quantized: bool) -> Result<Vec<(f64, Option<f64>)>> {
    powers(cfg)
        .into_iter()
        .zip(&cfg.snr_grid_db)
        .map(|(p, &snr)| Ok((p, if quantized { Some(cfg.bits_at(snr)?) } else { None })))
        .collect()
}

fn notes(cfg: &SimConfig, csit: Csit) -> String {
    match csit {
        Csit::Perfect => "csit=perfect".to_string(),
        Csit::Quantized => format!("csit=quantized path={}", cfg.path.label()),
    }
}

fn run(cfg: &SimConfig, arms: Arms) -> Result<(Vec<Vec<(f64, f64)>>, u64, Vec<(f64, Option<f64>)>)> {
    cfg.validate()?;
    cfg.require_square()?;
    let inputs = point_inputs(cfg, arms.quantized)?;
    let m = cfg.antennas as f64;
    let (stats, resamples) = run_trials(cfg, 3, |t| {
        let (outs, resamples) = simulate_trial(cfg, &inputs, t, arms)?;
        let mut values = vec![Vec::with_capacity(outs.len()); 3];
        for o in &outs {
            let p = o.perfect.as_deref().map(sum_rate).unwrap_or(0.0);
            let q = o.quantized.as_ref().map(|(s, _)| sum_rate(s)).unwrap_or(0.0);
            values[0].push(p);
            values[1].push(q);
            values[2].push((p - q) / m);
        }
        Ok(TrialValues { values, resamples })
    })?;
    Ok((stats, resamples, inputs))
}

/// Sum throughput `E[Σ_i log₂(1 + SINR_i)]` versus SNR.
pub fn mu_throughput(cfg: &SimConfig) -> Result<ThroughputCurve> {
    let quantized = cfg.csit == Csit::Quantized;
    let (stats, resamples, inputs) = run(cfg, Arms { perfect: !quantized, quantized })?;
    let bits: Vec<Option<f64>> = inputs.iter().map(|x| x.1).collect();
    let arm = if quantized { 1 } else { 0 };
    let policy = quantized.then_some(cfg.policy);
    build_curve(cfg, &stats[arm], &bits, resamples, cfg.meta(policy, Some(cfg.precoder), notes(cfg, cfg.csit)))
}

/// Per-user rate gap `(R_perfect − R_quantized)/M` with common random numbers.
pub fn rate_gap(cfg: &SimConfig) -> Result<ThroughputCurve> {
    Ok(mu_paired(cfg)?.gap)
}

/// Both arms and their paired difference in one pass.
pub fn mu_paired(cfg: &SimConfig) -> Result<PairedCurves> {
    if cfg.csit != Csit::Quantized {
        return Err(Error::Config("csit must be quantized for a rate-gap run".into()));
    }
    let (stats, resamples, inputs) = run(cfg, Arms { perfect: true, quantized: true })?;
    let bits: Vec<Option<f64>> = inputs.iter().map(|x| x.1).collect();
    let none = vec![None; bits.len()];
    let pre = Some(cfg.precoder);
    Ok(PairedCurves {
        perfect: build_curve(cfg, &stats[0], &none, resamples, cfg.meta(None, pre, notes(cfg, Csit::Perfect)))?,
        quantized: build_curve(cfg, &stats[1], &bits, resamples, cfg.meta(Some(cfg.policy), pre, notes(cfg, Csit::Quantized)))?,
        gap: build_curve(
            cfg,
            &stats[2],
            &bits,
            resamples,
            cfg.meta(Some(cfg.policy), pre, format!("rate_gap {}", notes(cfg, Csit::Quantized))),
        )?,
    })
}

/// Single trial at one SNR, as the engines would draw it for trial index
/// `trial` of a one-point grid.
pub fn mu_trial(cfg: &SimConfig, snr_db: f64, trial: u64) -> Result<TrialRecord> {
    let mut one = cfg.clone();
    one.snr_grid_db = vec![snr_db];
    one.validate()?;
    one.require_square()?;
    let quantized = cfg.csit == Csit::Quantized;
    let inputs = point_inputs(&one, quantized)?;
    let (mut outs, resamples) = simulate_trial(&one, &inputs, trial, Arms { perfect: !quantized, quantized })?;
    let o = outs.pop().expect("one point");
    let (sinr, error_z) = match (o.perfect, o.quantized) {
        (_, Some((s, z))) => (s, z),
        (Some(s), None) => {
            let n = s.len();
            (s, vec![0.0; n])
        }
        (None, None) => unreachable!("one arm is always active"),
    };
    Ok(TrialRecord { sinr, error_z, resamples })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::bounds::ScalingPolicy;

    #[test]
    fn trial_record_invariants() {
        for path in [SamplingPath::BruteForce, SamplingPath::FastDecomposition] {
            let cfg = SimConfig::multiuser(4, ScalingPolicy::fixed(5), vec![10.0]).with_path(path);
            for t in 0..50 {
                let r = mu_trial(&cfg, 10.0, t).unwrap();
                assert_eq!(r.sinr.len(), 4);
                assert!(r.sinr.iter().all(|&s| s >= 0.0));
                assert!(r.error_z.iter().all(|&z| (0.0..=1.0).contains(&z)));
            }
        }
    }

    #[test]
    fn trial_matches_engine_point() {
        let cfg = SimConfig::multiuser(3, ScalingPolicy::fixed(4), vec![5.0]).with_trials(20);
        let curve = mu_throughput(&cfg).unwrap();
        let mean = (0..20).map(|t| mu_trial(&cfg, 5.0, t).unwrap().sum_rate()).sum::<f64>() / 20.0;
        assert!((curve.points[0].mean - mean).abs() < 1e-12);
    }

    #[test]
    fn perfect_arm_agrees_between_engines() {
        let cfg = SimConfig::multiuser(3, ScalingPolicy::fixed(4), vec![0.0, 10.0]).with_trials(200);
        let paired = mu_paired(&cfg).unwrap();
        let perfect = mu_throughput(&cfg.clone().with_csit(Csit::Perfect)).unwrap();
        for (a, b) in paired.perfect.points.iter().zip(&perfect.points) {
            assert!((a.mean - b.mean).abs() < 1e-12);
        }
        for ((g, p), q) in paired.gap.points.iter().zip(&paired.perfect.points).zip(&paired.quantized.points) {
            assert!((g.mean - (p.mean - q.mean) / 3.0).abs() < 1e-12);
        }
    }

    #[test]
    fn rejects_non_square() {
        let cfg = SimConfig::multiuser(3, ScalingPolicy::fixed(4), vec![0.0]).with_users(2);
        assert!(matches!(mu_throughput(&cfg), Err(Error::Config(_))));
        let cfg = SimConfig::multiuser(3, ScalingPolicy::fixed(4), vec![0.0]).with_csit(Csit::Perfect);
        assert!(matches!(rate_gap(&cfg), Err(Error::Config(_))));
    }
}
