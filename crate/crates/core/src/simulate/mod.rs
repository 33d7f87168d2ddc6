//! Monte Carlo engines.
//!
//! Trial `t` draws everything from `RngStream(seed, t)`, so curves do not
//! depend on the thread count. Within a trial the channel is drawn once and
//! reused at every SNR point and by every arm (common random numbers).
//! Quantization randomness comes from a second stream keyed by the bit
//! count, so points that share `B` share codebooks too.

mod baselines;
mod multiuser;

pub use baselines::{miso_feedback_throughput, random_bf_throughput, tdma_throughput};
pub use multiuser::{mu_paired, mu_throughput, mu_trial, rate_gap, PairedCurves};

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::bounds::{CurveMeta, CurvePoint, ScalingPolicy, ThroughputCurve};
use crate::error::{Error, Result};
use crate::numerics::{db_to_linear, mean_and_std_err, RngStream};
use crate::precoder::PrecoderKind;
use crate::quantizer::MAX_CODEBOOK_BITS;

/// Channel knowledge at the transmitter.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Csit {
    Perfect,
    Quantized,
}

/// How quantized directions are produced.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum SamplingPath {
    /// Explicit random codebooks, regenerated every trial, and an exhaustive
    /// search. Fractional `B` is rounded up.
    BruteForce,
    /// Error drawn from its closed-form law and the estimate assembled from
    /// the channel direction; channel gains drawn from Gamma(M, 1).
    FastDecomposition,
}

impl SamplingPath {
    pub fn label(self) -> &'static str {
        match self {
            SamplingPath::BruteForce => "brute_force",
            SamplingPath::FastDecomposition => "fast_decomposition",
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SimConfig {
    pub antennas: usize,
    pub users: usize,
    pub snr_grid_db: Vec<f64>,
    pub policy: ScalingPolicy,
    pub precoder: PrecoderKind,
    pub csit: Csit,
    pub path: SamplingPath,
    pub trials: u64,
    pub seed: u64,
}

impl SimConfig {
    /// `M = K` zero-forcing with quantized CSIT on the fast path, 10⁴ trials.
    pub fn multiuser(antennas: usize, policy: ScalingPolicy, snr_grid_db: Vec<f64>) -> Self {
        Self {
            antennas,
            users: antennas,
            snr_grid_db,
            policy,
            precoder: PrecoderKind::Zf,
            csit: Csit::Quantized,
            path: SamplingPath::FastDecomposition,
            trials: 10_000,
            seed: 42,
        }
    }

    pub fn with_trials(mut self, trials: u64) -> Self {
        self.trials = trials;
        self
    }

    pub fn with_seed(mut self, seed: u64) -> Self {
        self.seed = seed;
        self
    }

    pub fn with_path(mut self, path: SamplingPath) -> Self {
        self.path = path;
        self
    }

    pub fn with_csit(mut self, csit: Csit) -> Self {
        self.csit = csit;
        self
    }

    pub fn with_precoder(mut self, precoder: PrecoderKind) -> Self {
        self.precoder = precoder;
        self
    }

    pub fn with_users(mut self, users: usize) -> Self {
        self.users = users;
        self
    }

    /// Checks the fields every engine relies on.
    pub fn validate(&self) -> Result<()> {
        if self.trials == 0 {
            return Err(Error::Config("trials must be at least 1".into()));
        }
        if self.antennas == 0 {
            return Err(Error::Config("antennas must be at least 1".into()));
        }
        if self.users == 0 {
            return Err(Error::Config("users must be at least 1".into()));
        }
        if self.snr_grid_db.is_empty() {
            return Err(Error::Config("snr_grid_db must not be empty".into()));
        }
        if self.snr_grid_db.iter().any(|x| !x.is_finite()) {
            return Err(Error::Config("snr_grid_db entries must be finite".into()));
        }
        if self.snr_grid_db.windows(2).any(|w| !(w[1] > w[0])) {
            return Err(Error::Config("snr_grid_db must be strictly increasing".into()));
        }
        self.policy.validate()?;
        if self.csit == Csit::Quantized {
            if self.antennas < 2 {
                return Err(Error::Config("antennas must be at least 2 for quantized feedback".into()));
            }
            for &snr in &self.snr_grid_db {
                let bits = self.bits_at(snr)?;
                if self.path == SamplingPath::BruteForce && bits > MAX_CODEBOOK_BITS as f64 {
                    return Err(Error::Config(format!(
                        "path: brute_force supports at most {MAX_CODEBOOK_BITS} bits, policy gives {bits} at {snr} dB"
                    )));
                }
            }
        }
        Ok(())
    }

    /// Feedback bits used at `snr_db`, after rounding up on the brute-force path.
    pub fn bits_at(&self, snr_db: f64) -> Result<f64> {
        let bits = self
            .policy
            .bits_at(snr_db, self.antennas)
            .map_err(|e| Error::Config(format!("policy: {e}")))?;
        Ok(match self.path {
            // tolerance keeps values like 9.999999999999998 from rounding to 11
            SamplingPath::BruteForce => (bits - 1e-9).ceil().max(0.0),
            SamplingPath::FastDecomposition => bits,
        })
    }

    fn require_square(&self) -> Result<()> {
        if self.users != self.antennas {
            return Err(Error::Config(format!(
                "users must equal antennas for multiuser engines (users={}, antennas={})",
                self.users, self.antennas
            )));
        }
        if self.antennas < 2 {
            return Err(Error::Config("antennas must be at least 2".into()));
        }
        Ok(())
    }

    fn meta(&self, policy: Option<ScalingPolicy>, precoder: Option<PrecoderKind>, notes: String) -> CurveMeta {
        CurveMeta {
            antennas: self.antennas,
            users: self.users,
            policy,
            precoder,
            seed: self.seed,
            notes,
        }
    }
}

/// Outcome of one multiuser trial at one SNR point.
#[derive(Clone, Debug, PartialEq)]
pub struct TrialRecord {
    /// Per-user SINR.
    pub sinr: Vec<f64>,
    /// Per-user quantization error `sin²∠(h̃_i, ĥ_i)`; zeros under perfect CSIT.
    pub error_z: Vec<f64>,
    /// Times the trial was redrawn because the estimate matrix was singular.
    pub resamples: u64,
}

impl TrialRecord {
    pub fn sum_rate(&self) -> f64 {
        self.sinr.iter().map(|s| (1.0 + s).log2()).sum()
    }
}

/// Redraws per trial before giving up.
const MAX_ATTEMPTS: u64 = 64;

/// Allowed resamples per trial (0.1%).
const MAX_RESAMPLE_RATE: f64 = 1e-3;

fn splitmix64(mut x: u64) -> u64 {
    x = x.wrapping_add(0x9e37_79b9_7f4a_7c15);
    x = (x ^ (x >> 30)).wrapping_mul(0xbf58_476d_1ce4_e5b9);
    x = (x ^ (x >> 27)).wrapping_mul(0x94d0_49bb_1331_11eb);
    x ^ (x >> 31)
}

/// Stream for the quantization randomness of trial `trial`, keyed by the bit
/// count and the redraw attempt.
pub(crate) fn quantizer_stream(seed: u64, trial: u64, bits: f64, attempt: u64) -> RngStream {
    let key = splitmix64(seed ^ splitmix64(bits.to_bits() ^ splitmix64(attempt.wrapping_add(1))));
    RngStream::new(key, trial)
}

/// Per-trial values for each of `arms` arms at each SNR point.
pub(crate) struct TrialValues {
    /// `values[arm][point]`.
    pub values: Vec<Vec<f64>>,
    pub resamples: u64,
}

/// Runs `trial` for every trial index in parallel and reduces in index order.
/// Returns `[arm][point] -> (mean, std_err)` and the total resample count.
pub(crate) fn run_trials<F>(cfg: &SimConfig, arms: usize, trial: F) -> Result<(Vec<Vec<(f64, f64)>>, u64)>
where
    F: Fn(u64) -> Result<TrialValues> + Sync,
{
    let outcomes: Vec<TrialValues> = (0..cfg.trials).into_par_iter().map(&trial).collect::<Result<_>>()?;
    let resamples: u64 = outcomes.iter().map(|o| o.resamples).sum();
    if resamples as f64 > MAX_RESAMPLE_RATE * cfg.trials as f64 {
        return Err(Error::ExcessiveResampling { resamples, trials: cfg.trials });
    }
    let points = cfg.snr_grid_db.len();
    let mut stats = Vec::with_capacity(arms);
    let mut column = Vec::with_capacity(outcomes.len());
    for arm in 0..arms {
        let mut per_point = Vec::with_capacity(points);
        for p in 0..points {
            column.clear();
            column.extend(outcomes.iter().map(|o| o.values[arm][p]));
            per_point.push(mean_and_std_err(&column));
        }
        stats.push(per_point);
    }
    Ok((stats, resamples))
}

pub(crate) fn build_curve(
    cfg: &SimConfig,
    stats: &[(f64, f64)],
    bits: &[Option<f64>],
    resamples: u64,
    meta: CurveMeta,
) -> Result<ThroughputCurve> {
    let points = cfg
        .snr_grid_db
        .iter()
        .zip(stats)
        .zip(bits)
        .map(|((&snr_db, &(mean, std_err)), &bits)| CurvePoint {
            snr_db,
            mean,
            std_err,
            trials: cfg.trials,
            bits,
            resamples,
        })
        .collect();
    ThroughputCurve::new(points, meta)
}

pub(crate) fn powers(cfg: &SimConfig) -> Vec<f64> {
    cfg.snr_grid_db.iter().map(|&x| db_to_linear(x)).collect()
}
