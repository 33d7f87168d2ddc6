//! Closed-form bounds, feedback-scaling laws and analytic reference curves.

use std::f64::consts::LOG2_E;
use std::fmt;

use serde::{Deserialize, Serialize};

use crate::error::{domain, Error, Result};
use crate::numerics::{db_to_linear, harmonic, integrate_to_infinity, ln_gamma};
use crate::precoder::PrecoderKind;
use crate::quantizer;

const QUAD_TOL: f64 = 1e-12;

/// How the scaling law converts SNR in dB into `log₂ P`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ScalingMode {
    /// `log₂ P = P_dB · log₂10 / 10`.
    Exact,
    /// `log₂ P ≈ P_dB / 3`.
    Approx3Db,
}

/// Feedback bits per user as a function of SNR.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case", deny_unknown_fields)]
pub enum ScalingPolicy {
    /// Constant `B`.
    FixedBits { bits: u32 },
    /// `B = (M−1) log₂P − (M−1) log₂(b−1)`, keeping the per-user rate gap
    /// below `log₂ b`.
    Scaled { b_gap: f64, mode: ScalingMode },
    /// `B = α log₂ P`.
    LogScaled { alpha: f64 },
}

impl ScalingPolicy {
    pub fn fixed(bits: u32) -> Self {
        ScalingPolicy::FixedBits { bits }
    }

    pub fn exact_scaled(b_gap: f64) -> Self {
        ScalingPolicy::Scaled { b_gap, mode: ScalingMode::Exact }
    }

    pub fn approx_3db_scaled(b_gap: f64) -> Self {
        ScalingPolicy::Scaled { b_gap, mode: ScalingMode::Approx3Db }
    }

    pub fn log_scaled(alpha: f64) -> Self {
        ScalingPolicy::LogScaled { alpha }
    }

    pub fn validate(&self) -> Result<()> {
        match *self {
            ScalingPolicy::FixedBits { .. } => Ok(()),
            ScalingPolicy::Scaled { b_gap, .. } if b_gap > 1.0 && b_gap.is_finite() => Ok(()),
            ScalingPolicy::Scaled { b_gap, .. } => {
                Err(Error::Config(format!("policy b_gap must exceed 1, got {b_gap}")))
            }
            ScalingPolicy::LogScaled { alpha } if alpha >= 0.0 && alpha.is_finite() => Ok(()),
            ScalingPolicy::LogScaled { alpha } => {
                Err(Error::Config(format!("policy alpha must be non-negative, got {alpha}")))
            }
        }
    }

    /// Real-valued bits per user at `snr_db` for `antennas` transmit antennas,
    /// clamped at zero.
    pub fn bits_at(&self, snr_db: f64, antennas: usize) -> Result<f64> {
        match *self {
            ScalingPolicy::FixedBits { bits } => Ok(bits as f64),
            ScalingPolicy::Scaled { b_gap, mode } => feedback_bits(snr_db, antennas, b_gap, mode),
            ScalingPolicy::LogScaled { alpha } => {
                self.validate()?;
                Ok((alpha * snr_db * std::f64::consts::LOG2_10 / 10.0).max(0.0))
            }
        }
    }

    pub fn is_fixed(&self) -> bool {
        matches!(self, ScalingPolicy::FixedBits { .. })
    }
}

impl fmt::Display for ScalingPolicy {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match *self {
            ScalingPolicy::FixedBits { bits } => write!(f, "fixed_B={bits}"),
            ScalingPolicy::Scaled { b_gap, mode: ScalingMode::Exact } => write!(f, "exact_b={b_gap}"),
            ScalingPolicy::Scaled { b_gap, mode: ScalingMode::Approx3Db } => {
                write!(f, "approx3_b={b_gap}")
            }
            ScalingPolicy::LogScaled { alpha } => write!(f, "alpha={alpha}"),
        }
    }
}

/// One SNR point of a throughput (or rate-gap) curve.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct CurvePoint {
    pub snr_db: f64,
    /// Mean in bps/Hz.
    pub mean: f64,
    pub std_err: f64,
    /// Monte Carlo trials behind the point; 0 for analytic curves.
    pub trials: u64,
    /// Feedback bits per user actually used at this point, if any.
    pub bits: Option<f64>,
    /// Trials redrawn because the channel-estimate matrix was singular.
    pub resamples: u64,
}

/// Provenance attached to a curve.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct CurveMeta {
    pub antennas: usize,
    pub users: usize,
    pub policy: Option<ScalingPolicy>,
    pub precoder: Option<PrecoderKind>,
    pub seed: u64,
    /// Free-form notes (sampling path, bit rounding).
    pub notes: String,
}

/// Mean throughput versus SNR.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct ThroughputCurve {
    pub points: Vec<CurvePoint>,
    pub meta: CurveMeta,
}

impl ThroughputCurve {
    /// Validates that SNRs strictly increase and standard errors are non-negative.
    pub fn new(points: Vec<CurvePoint>, meta: CurveMeta) -> Result<Self> {
        if points.windows(2).any(|w| !(w[1].snr_db > w[0].snr_db)) {
            return Err(domain("curve SNRs must be strictly increasing"));
        }
        if points.iter().any(|p| !(p.std_err >= 0.0)) {
            return Err(domain("standard errors must be non-negative"));
        }
        Ok(Self { points, meta })
    }

    /// Analytic curve evaluated on `snr_grid_db`.
    pub fn analytic<F: Fn(f64) -> f64>(snr_grid_db: &[f64], meta: CurveMeta, f: F) -> Result<Self> {
        let points = snr_grid_db
            .iter()
            .map(|&snr_db| CurvePoint {
                snr_db,
                mean: f(snr_db),
                std_err: 0.0,
                trials: 0,
                bits: None,
                resamples: 0,
            })
            .collect();
        Self::new(points, meta)
    }

    pub fn point_at(&self, snr_db: f64) -> Option<&CurvePoint> {
        self.points.iter().find(|p| (p.snr_db - snr_db).abs() < 1e-9)
    }

    pub fn means(&self) -> Vec<f64> {
        self.points.iter().map(|p| p.mean).collect()
    }
}

/// Per-user rate-gap bound `ΔR(P) < log₂(1 + P·2^{−B/(M−1)})`.
///
/// The derivation averages an independent Beta(1, M−2) factor and so assumes
/// `M ≥ 3`; at `M = 2` the same expression still evaluates.
pub fn rate_gap_bound(power: f64, antennas: usize, bits: f64) -> Result<f64> {
    if !(power > 0.0) {
        return Err(domain(format!("power must be positive, got {power}")));
    }
    let q = quantizer::error_upper_bound(antennas, bits)?;
    Ok((1.0 + power * q).log2())
}

/// High-SNR throughput ceilings of zero-forcing with fixed `B`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct ThroughputCeiling {
    /// `M(1 + (B+log₂e)/(M−1) + log₂e + log₂(M−2))`; undefined at `M = 2`.
    pub loose: Option<f64>,
    /// `M(1 + (log₂e/(M−1))·H(2^B) + log₂e·H(M−2))`.
    pub exact_form: f64,
}

impl ThroughputCeiling {
    pub fn loose(&self) -> Result<f64> {
        self.loose.ok_or_else(|| {
            domain(format!(
                "loose ceiling needs at least 3 antennas (log2(M-2)); exact form is {}",
                self.exact_form
            ))
        })
    }
}

pub fn ceiling_fixed_bits(antennas: usize, bits: f64) -> Result<ThroughputCeiling> {
    if antennas < 2 {
        return Err(domain("need at least 2 antennas"));
    }
    let m = antennas as f64;
    let exact_form =
        m * (1.0 + quantizer::expected_neg_log2_error(antennas, bits)? + LOG2_E * harmonic(m - 2.0));
    let loose = (antennas >= 3)
        .then(|| m * (1.0 + (bits + LOG2_E) / (m - 1.0) + LOG2_E + (m - 2.0).log2()));
    Ok(ThroughputCeiling { loose, exact_form })
}

/// Feedback bits per user keeping the per-user rate gap under `log₂ b`,
/// clamped at zero.
pub fn feedback_bits(snr_db: f64, antennas: usize, b_gap: f64, mode: ScalingMode) -> Result<f64> {
    if !(b_gap > 1.0) {
        return Err(domain(format!("rate-gap factor b must exceed 1, got {b_gap}")));
    }
    if antennas < 2 {
        return Err(domain("need at least 2 antennas"));
    }
    let m1 = antennas as f64 - 1.0;
    let log2_p = match mode {
        ScalingMode::Exact => snr_db * std::f64::consts::LOG2_10 / 10.0,
        ScalingMode::Approx3Db => snr_db / 3.0,
    };
    Ok((m1 * log2_p - m1 * (b_gap - 1.0).log2()).max(0.0))
}

/// Multiplexing gain `M·min(α/(M−1), 1)` of `B = α log₂ P` scaling.
pub fn mux_gain_prediction(alpha: f64, antennas: usize) -> f64 {
    let m = antennas as f64;
    m * (alpha / (m - 1.0)).min(1.0)
}

/// Bits an optimal quantizer could save over RVQ: `(M−1) log₂(M/(M−1))`.
pub fn rvq_bit_penalty(antennas: usize) -> f64 {
    let m = antennas as f64;
    (m - 1.0) * (m / (m - 1.0)).log2()
}

/// High-SNR power offset of zero-forcing relative to dirty-paper coding,
/// `(3 log₂e / M) Σ_{j=1}^{M−1} j/(M−j)` dB.
pub fn zf_dpc_power_offset_db(antennas: usize) -> f64 {
    let m = antennas as f64;
    let s: f64 = (1..antennas).map(|j| j as f64 / (m - j as f64)).sum();
    3.0 * LOG2_E / m * s
}

/// Least-squares slope of throughput against `log₂ P` over the top
/// `window_db` of the sweep.
pub fn fit_multiplexing_gain(curve: &ThroughputCurve, window_db: f64) -> Result<f64> {
    let top = curve.points.iter().map(|p| p.snr_db).fold(f64::NEG_INFINITY, f64::max);
    let pts: Vec<(f64, f64)> = curve
        .points
        .iter()
        .filter(|p| p.snr_db >= top - window_db - 1e-9)
        .map(|p| (p.snr_db * std::f64::consts::LOG2_10 / 10.0, p.mean))
        .collect();
    if pts.len() < 3 {
        return Err(Error::InsufficientData { needed: 3, found: pts.len() });
    }
    let n = pts.len() as f64;
    let mx = pts.iter().map(|p| p.0).sum::<f64>() / n;
    let my = pts.iter().map(|p| p.1).sum::<f64>() / n;
    let sxy: f64 = pts.iter().map(|p| (p.0 - mx) * (p.1 - my)).sum();
    let sxx: f64 = pts.iter().map(|p| (p.0 - mx) * (p.0 - mx)).sum();
    Ok(sxy / sxx)
}

/// `E[log₂(1 + c·X)]` for `X ~ Gamma(shape, 1)`.
pub fn gamma_log_rate(c: f64, shape: f64) -> f64 {
    if c <= 0.0 {
        return 0.0;
    }
    let log_norm = ln_gamma(shape).expect("positive shape");
    integrate_to_infinity(
        |x| {
            if x <= 0.0 {
                return 0.0;
            }
            (c * x).ln_1p() * LOG2_E * ((shape - 1.0) * x.ln() - x - log_norm).exp()
        },
        0.0,
        QUAD_TOL,
        QUAD_TOL,
    )
}

/// Point-to-point MISO reference values at linear SNR `P`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct MisoReference {
    /// `E[log₂(1 + P‖h‖²)]`: beamforming along the true channel.
    pub csit: f64,
    /// `E[log₂(1 + (P/M)‖h‖²)]`: isotropic transmission.
    pub no_csit: f64,
    /// `E[log₂(1 + P‖h‖²(1 − 2^{−B/(M−1)}))]`.
    pub feedback_approx: f64,
}

/// MISO capacities by quadrature over `‖h‖² ~ Gamma(M, 1)`.
pub fn miso_reference(power: f64, antennas: usize, bits: f64) -> Result<MisoReference> {
    if !(power > 0.0) {
        return Err(domain(format!("power must be positive, got {power}")));
    }
    let m = antennas as f64;
    let shrink = 1.0 - quantizer::error_upper_bound(antennas, bits)?;
    Ok(MisoReference {
        csit: gamma_log_rate(power, m),
        no_csit: gamma_log_rate(power / m, m),
        feedback_approx: gamma_log_rate(power * shrink, m),
    })
}

/// Sum throughput of perfect-CSIT zero-forcing with `K = M` users:
/// `M·E[log₂(1 + (P/M)·X)]` with `X ~ Exp(1)`, since the effective gain
/// `‖h‖²·|h̃†v|²` is a Gamma(M,1) times an independent Beta(1, M−1).
pub fn zf_perfect_throughput(power: f64, antennas: usize) -> f64 {
    antennas as f64 * gamma_log_rate(power / antennas as f64, 1.0)
}

/// Horizontal distance (dB) from a curve point to a reference curve:
/// `snr_db − x` where `reference(x) = rate`. Positive when the point lies to
/// the right of (below) the reference. `reference` must be increasing.
pub fn horizontal_gap_db<F: Fn(f64) -> f64>(snr_db: f64, rate: f64, reference: F) -> Result<f64> {
    let (mut lo, mut hi) = (snr_db - 80.0, snr_db + 80.0);
    if !(reference(lo) <= rate && reference(hi) >= rate) {
        return Err(domain(format!("rate {rate} is not bracketed by the reference curve")));
    }
    for _ in 0..100 {
        let mid = 0.5 * (lo + hi);
        if reference(mid) < rate {
            lo = mid;
        } else {
            hi = mid;
        }
        if hi - lo < 1e-10 {
            break;
        }
    }
    Ok(snr_db - 0.5 * (lo + hi))
}

/// Horizontal gap to perfect-CSIT zero-forcing for a sum-throughput value.
pub fn zf_power_offset_db(snr_db: f64, throughput: f64, antennas: usize) -> Result<f64> {
    horizontal_gap_db(snr_db, throughput, |x| zf_perfect_throughput(db_to_linear(x), antennas))
}
