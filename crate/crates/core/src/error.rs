use thiserror::Error;

/// Errors raised by the numeric core, the quantizer and the simulation engines.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    /// A pivot fell below the singularity threshold during inversion.
    #[error("matrix is numerically singular (pivot {pivot:.3e} below threshold {threshold:.3e})")]
    SingularMatrix { pivot: f64, threshold: f64 },

    /// An argument is outside the domain of the function.
    #[error("domain error: {0}")]
    Domain(String),

    /// The requested codebook would not fit the memory budget.
    #[error("codebook with {bits} bits exceeds the supported maximum of {max} bits")]
    Capacity { bits: u32, max: u32 },

    /// Inconsistent simulation configuration.
    #[error("invalid configuration: {0}")]
    Config(String),

    /// Not enough curve points to fit a slope.
    #[error("need at least {needed} points in the fit window, found {found}")]
    InsufficientData { needed: usize, found: usize },

    /// Too many trials hit singular channel-estimate matrices.
    #[error("{resamples} resamples over {trials} trials exceeds the allowed rate")]
    ExcessiveResampling { resamples: u64, trials: u64 },
}

pub type Result<T, E = Error> = std::result::Result<T, E>;

pub(crate) fn domain(msg: impl Into<String>) -> Error {
    Error::Domain(msg.into())
}
