//! CSV emission.

use std::io::Write;
use std::path::Path;

use fbmimo_core::ThroughputCurve;

use crate::error::CliError;

pub const COLUMNS: [&str; 13] = [
    "experiment",
    "curve",
    "M",
    "K",
    "policy",
    "precoder",
    "B_bits",
    "snr_db",
    "throughput_bps_hz",
    "std_err",
    "trials",
    "seed",
    "resamples",
];

/// A curve plus the labels written next to it.
#[derive(Clone, Debug)]
pub struct NamedCurve {
    pub name: String,
    /// Transmission scheme: `zf`, `rzf`, `tdma`, `random_bf`, `beamforming` or `analytic`.
    pub scheme: String,
    pub curve: ThroughputCurve,
}

impl NamedCurve {
    pub fn new(name: impl Into<String>, scheme: impl Into<String>, curve: ThroughputCurve) -> Self {
        Self { name: name.into(), scheme: scheme.into(), curve }
    }
}

fn csv_err(e: csv::Error) -> CliError {
    CliError::Io(format!("csv: {e}"))
}

/// Renders curves with the fixed column set.
pub fn curves_csv(experiment: &str, curves: &[NamedCurve]) -> Result<Vec<u8>, CliError> {
    let mut w = csv::Writer::from_writer(Vec::new());
    w.write_record(COLUMNS).map_err(csv_err)?;
    for c in curves {
        let meta = &c.curve.meta;
        let policy = meta.policy.map_or_else(|| "none".to_string(), |p| p.to_string());
        for p in &c.curve.points {
            w.write_record([
                experiment.to_string(),
                c.name.clone(),
                meta.antennas.to_string(),
                meta.users.to_string(),
                policy.clone(),
                c.scheme.clone(),
                p.bits.map_or_else(String::new, |b| b.to_string()),
                p.snr_db.to_string(),
                p.mean.to_string(),
                p.std_err.to_string(),
                p.trials.to_string(),
                meta.seed.to_string(),
                p.resamples.to_string(),
            ])
            .map_err(csv_err)?;
        }
    }
    w.into_inner().map_err(|e| CliError::Io(format!("csv: {e}")))
}

/// Renders an arbitrary table.
pub fn table_csv(header: &[&str], rows: &[Vec<String>]) -> Result<Vec<u8>, CliError> {
    let mut w = csv::Writer::from_writer(Vec::new());
    w.write_record(header).map_err(csv_err)?;
    for r in rows {
        w.write_record(r).map_err(csv_err)?;
    }
    w.into_inner().map_err(|e| CliError::Io(format!("csv: {e}")))
}

/// Writes to `path`, or to `stdout` when no path is given.
pub fn emit(bytes: &[u8], path: Option<&Path>, stdout: &mut dyn Write) -> Result<(), CliError> {
    match path {
        Some(p) => std::fs::write(p, bytes).map_err(|e| CliError::Io(format!("{}: {e}", p.display()))),
        None => stdout.write_all(bytes).map_err(|e| CliError::Io(format!("stdout: {e}"))),
    }
}
