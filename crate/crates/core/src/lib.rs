//! Multiuser MIMO downlink with finite-rate feedback.
//!
//! Each single-antenna receiver quantizes its channel direction against a
//! random codebook of `2^B` isotropic unit vectors and feeds back the index.
//! The access point zero-forces (or regularized-zero-forces) against the
//! quantized directions. This crate provides:
//!
//! * [`numerics`]: complex vectors and matrices, seeded substreams, special
//!   functions and quadrature;
//! * [`quantizer`]: random vector quantization and the closed-form law of its
//!   error;
//! * [`precoder`]: zero-forcing and regularized zero-forcing beamformers, SINR;
//! * [`bounds`]: rate-gap bounds, throughput ceilings, feedback-scaling laws
//!   and reference curves;
//! * [`simulate`]: Monte Carlo engines producing [`ThroughputCurve`]s.

pub mod bounds;
pub mod error;
pub mod numerics;
pub mod precoder;
pub mod quantizer;
pub mod simulate;
pub mod stats;

pub use bounds::{CurveMeta, CurvePoint, ScalingMode, ScalingPolicy, ThroughputCurve};
pub use error::{Error, Result};
pub use numerics::{ComplexMatrix, ComplexVector, RngStream};
pub use precoder::{BeamformerSet, CsiSource, PrecoderKind};
pub use quantizer::{Codebook, QuantizationOutcome, QuantizedPair};
pub use simulate::{Csit, SamplingPath, SimConfig, TrialRecord};
