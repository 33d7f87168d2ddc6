//! Flag and JSON-file configuration, merged into an [`ExperimentSpec`].
//!
//! Every option can come from the command line or from the `--config` file;
//! a flag always beats the file, and the file beats the built-in default.

use std::path::PathBuf;

use clap::{Parser, ValueEnum};
use fbmimo_core::{Csit, PrecoderKind, SamplingPath, ScalingPolicy};
use serde::Deserialize;

use crate::error::CliError;

pub const DEFAULT_TRIALS: u64 = 10_000;
pub const DEFAULT_SEED: u64 = 42;
pub const DEFAULT_SNR: &str = "0:5:40";

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum CommandName {
    Sweep,
    Figure,
    Table,
    Validate,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum FigureId {
    Miso4x1,
    Fixed5x5,
    Scaled5x5,
    Scaled6x6,
    Mux4x4,
    Reg5x5,
    Compare44,
    Compare44b,
    Compare88,
}

impl FigureId {
    pub fn name(self) -> &'static str {
        match self {
            FigureId::Miso4x1 => "miso4x1",
            FigureId::Fixed5x5 => "fixed5x5",
            FigureId::Scaled5x5 => "scaled5x5",
            FigureId::Scaled6x6 => "scaled6x6",
            FigureId::Mux4x4 => "mux4x4",
            FigureId::Reg5x5 => "reg5x5",
            FigureId::Compare44 => "compare44",
            FigureId::Compare44b => "compare44b",
            FigureId::Compare88 => "compare88",
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum TableKind {
    Quantizer,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum ValidateKind {
    Bounds,
    Quantizer,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum GridName {
    Default,
    Quick,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum PathArg {
    Brute,
    Fast,
}

impl From<PathArg> for SamplingPath {
    fn from(p: PathArg) -> Self {
        match p {
            PathArg::Brute => SamplingPath::BruteForce,
            PathArg::Fast => SamplingPath::FastDecomposition,
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Engine {
    /// Multiuser sum throughput.
    Mu,
    /// Perfect and quantized throughput plus the per-user rate gap.
    RateGap,
    /// Single-user beamforming with feedback.
    Miso,
    Tdma,
    RandomBf,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum PrecoderArg {
    Zf,
    Rzf,
}

impl From<PrecoderArg> for PrecoderKind {
    fn from(p: PrecoderArg) -> Self {
        match p {
            PrecoderArg::Zf => PrecoderKind::Zf,
            PrecoderArg::Rzf => PrecoderKind::Rzf,
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum CsitArg {
    Perfect,
    Quantized,
}

impl From<CsitArg> for Csit {
    fn from(c: CsitArg) -> Self {
        match c {
            CsitArg::Perfect => Csit::Perfect,
            CsitArg::Quantized => Csit::Quantized,
        }
    }
}

/// Command line. Flags override values from `--config`.
#[derive(Debug, Parser)]
#[command(name = "fbmimo", version, about = "Limited-feedback multiuser MIMO experiments")]
pub struct Cli {
    #[arg(value_enum)]
    pub command: CommandName,
    /// Figure id (figure), table kind (table) or suite (validate).
    pub target: Option<String>,
    /// JSON file with the same keys as the flags.
    #[arg(long)]
    pub config: Option<PathBuf>,
    #[arg(long)]
    pub trials: Option<u64>,
    #[arg(long)]
    pub seed: Option<u64>,
    /// Output CSV; stdout when omitted.
    #[arg(long)]
    pub out: Option<PathBuf>,
    /// SNR grid in dB as lo:step:hi.
    #[arg(long)]
    pub snr: Option<String>,
    #[arg(long, value_enum)]
    pub path: Option<PathArg>,
    /// Transmit antennas.
    #[arg(long = "M")]
    pub antennas: Option<usize>,
    /// Users (sweep only).
    #[arg(long = "K")]
    pub users: Option<usize>,
    /// Bit range for tables, e.g. 0..16 (inclusive).
    #[arg(long = "B")]
    pub bits: Option<String>,
    /// Feedback policy: fixed:B, exact:b, approx3:b or alpha:a.
    #[arg(long)]
    pub policy: Option<String>,
    #[arg(long, value_enum)]
    pub engine: Option<Engine>,
    #[arg(long, value_enum)]
    pub precoder: Option<PrecoderArg>,
    #[arg(long, value_enum)]
    pub csit: Option<CsitArg>,
    /// Grid for `validate bounds`.
    #[arg(long, value_enum)]
    pub grid: Option<GridName>,
}

/// Contents of a `--config` file. Unknown keys are rejected.
#[derive(Debug, Default, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct FileConfig {
    pub command: Option<CommandName>,
    pub figure: Option<FigureId>,
    pub table: Option<TableKind>,
    pub validate: Option<ValidateKind>,
    pub trials: Option<u64>,
    pub seed: Option<u64>,
    pub out: Option<PathBuf>,
    pub snr: Option<String>,
    pub snr_grid_db: Option<Vec<f64>>,
    pub path: Option<PathArg>,
    #[serde(rename = "M")]
    pub antennas: Option<usize>,
    #[serde(rename = "K")]
    pub users: Option<usize>,
    #[serde(rename = "B")]
    pub bits: Option<String>,
    pub policy: Option<String>,
    pub engine: Option<Engine>,
    pub precoder: Option<PrecoderArg>,
    pub csit: Option<CsitArg>,
    pub grid: Option<GridName>,
}

#[derive(Clone, Debug, PartialEq)]
pub struct SweepSpec {
    pub engine: Engine,
    pub antennas: usize,
    pub users: usize,
    pub policy: ScalingPolicy,
    pub precoder: PrecoderKind,
    pub csit: Csit,
}

#[derive(Clone, Debug, PartialEq)]
pub struct TableSpec {
    pub kind: TableKind,
    pub antennas: usize,
    pub bits: Vec<u32>,
}

#[derive(Clone, Debug, PartialEq)]
pub struct ValidateSpec {
    pub kind: ValidateKind,
    pub grid: GridName,
}

#[derive(Clone, Debug, PartialEq)]
pub enum Command {
    Sweep(SweepSpec),
    Figure(FigureId),
    Table(TableSpec),
    Validate(ValidateSpec),
}

/// Fully resolved experiment.
#[derive(Clone, Debug, PartialEq)]
pub struct ExperimentSpec {
    pub command: Command,
    pub trials: u64,
    pub seed: u64,
    /// Explicit grid; `None` means the command's own default.
    pub snr_grid_db: Option<Vec<f64>>,
    pub out: Option<PathBuf>,
    pub path: SamplingPath,
}

impl ExperimentSpec {
    /// Grid to use when the command has no preset of its own.
    pub fn grid_or_default(&self) -> Vec<f64> {
        self.snr_grid_db.clone().unwrap_or_else(|| parse_snr(DEFAULT_SNR).expect("valid default"))
    }

    pub fn grid_or(&self, preset: &str) -> Vec<f64> {
        self.snr_grid_db.clone().unwrap_or_else(|| parse_snr(preset).expect("valid preset"))
    }
}

fn config_err(field: &str, msg: impl std::fmt::Display) -> CliError {
    CliError::Config(format!("{field}: {msg}"))
}

/// Parses `lo:step:hi` into an inclusive grid.
pub fn parse_snr(text: &str) -> Result<Vec<f64>, CliError> {
    let parts: Vec<&str> = text.split(':').collect();
    let [lo, step, hi] = parts.as_slice() else {
        return Err(config_err("snr", format!("expected lo:step:hi, got {text:?}")));
    };
    let num = |s: &str| s.trim().parse::<f64>().map_err(|e| config_err("snr", format!("{s:?}: {e}")));
    let (lo, step, hi) = (num(lo)?, num(step)?, num(hi)?);
    if !(lo.is_finite() && hi.is_finite() && step.is_finite()) {
        return Err(config_err("snr", "values must be finite"));
    }
    if !(step > 0.0) || hi < lo {
        return Err(config_err("snr", "need step > 0 and hi >= lo"));
    }
    let n = ((hi - lo) / step + 1e-9).floor() as usize;
    if n > 10_000 {
        return Err(config_err("snr", "grid has too many points"));
    }
    Ok((0..=n).map(|k| lo + step * k as f64).collect())
}

fn check_grid(grid: Vec<f64>) -> Result<Vec<f64>, CliError> {
    if grid.is_empty() {
        return Err(config_err("snr_grid_db", "must not be empty"));
    }
    if grid.iter().any(|x| !x.is_finite()) || grid.windows(2).any(|w| !(w[1] > w[0])) {
        return Err(config_err("snr_grid_db", "must be finite and strictly increasing"));
    }
    Ok(grid)
}

/// Parses `fixed:B`, `exact:b`, `approx3:b` or `alpha:a`.
pub fn parse_policy(text: &str) -> Result<ScalingPolicy, CliError> {
    let (kind, value) = text
        .split_once(':')
        .ok_or_else(|| config_err("policy", format!("expected kind:value, got {text:?}")))?;
    let num = || value.trim().parse::<f64>().map_err(|e| config_err("policy", format!("{value:?}: {e}")));
    let policy = match kind.trim() {
        "fixed" => ScalingPolicy::fixed(
            value.trim().parse::<u32>().map_err(|e| config_err("policy", format!("{value:?}: {e}")))?,
        ),
        "exact" => ScalingPolicy::exact_scaled(num()?),
        "approx3" => ScalingPolicy::approx_3db_scaled(num()?),
        "alpha" => ScalingPolicy::log_scaled(num()?),
        other => return Err(config_err("policy", format!("unknown kind {other:?}"))),
    };
    policy.validate().map_err(|e| config_err("policy", e))?;
    Ok(policy)
}

/// Parses `a..b` (inclusive) or a single bit count.
pub fn parse_bits(text: &str) -> Result<Vec<u32>, CliError> {
    let num = |s: &str| s.trim().parse::<u32>().map_err(|e| config_err("B", format!("{s:?}: {e}")));
    let (lo, hi) = match text.split_once("..") {
        Some((a, b)) => (num(a)?, num(b.trim_start_matches('='))?),
        None => {
            let v = num(text)?;
            (v, v)
        }
    };
    if hi < lo {
        return Err(config_err("B", format!("empty range {text:?}")));
    }
    if hi > 1024 {
        return Err(config_err("B", "at most 1024 bits"));
    }
    Ok((lo..=hi).collect())
}

/// Parses the JSON text of a config file.
pub fn parse_file(text: &str) -> Result<FileConfig, CliError> {
    serde_json::from_str(text).map_err(|e| CliError::Config(format!("config file: {e}")))
}

/// Parses a JSON document describing a whole experiment (`command` required).
pub fn parse_config(text: &str) -> Result<ExperimentSpec, CliError> {
    let file = parse_file(text)?;
    let command = file.command.ok_or_else(|| config_err("command", "missing"))?;
    resolve(command, None, &Overrides::default(), file)
}

/// Flag values that override the file.
#[derive(Debug, Default)]
pub struct Overrides {
    pub trials: Option<u64>,
    pub seed: Option<u64>,
    pub out: Option<PathBuf>,
    pub snr: Option<String>,
    pub path: Option<PathArg>,
    pub antennas: Option<usize>,
    pub users: Option<usize>,
    pub bits: Option<String>,
    pub policy: Option<String>,
    pub engine: Option<Engine>,
    pub precoder: Option<PrecoderArg>,
    pub csit: Option<CsitArg>,
    pub grid: Option<GridName>,
}

impl Cli {
    /// Splits the command line into command, positional target and overrides.
    pub fn into_parts(self) -> (CommandName, Option<String>, Option<PathBuf>, Overrides) {
        let o = Overrides {
            trials: self.trials,
            seed: self.seed,
            out: self.out,
            snr: self.snr,
            path: self.path,
            antennas: self.antennas,
            users: self.users,
            bits: self.bits,
            policy: self.policy,
            engine: self.engine,
            precoder: self.precoder,
            csit: self.csit,
            grid: self.grid,
        };
        (self.command, self.target, self.config, o)
    }
}

fn parse_target<T: ValueEnum>(field: &str, text: &str) -> Result<T, CliError> {
    T::from_str(text, true).map_err(|_| {
        let names: Vec<String> =
            T::value_variants().iter().filter_map(|v| v.to_possible_value()).map(|v| v.get_name().to_owned()).collect();
        config_err(field, format!("unknown value {text:?}; expected one of {}", names.join(", ")))
    })
}

/// Merges flags over the file over defaults.
pub fn resolve(
    command: CommandName,
    target: Option<&str>,
    flags: &Overrides,
    file: FileConfig,
) -> Result<ExperimentSpec, CliError> {
    let trials = flags.trials.or(file.trials).unwrap_or(DEFAULT_TRIALS);
    if trials == 0 {
        return Err(config_err("trials", "must be at least 1"));
    }
    let seed = flags.seed.or(file.seed).unwrap_or(DEFAULT_SEED);
    let snr_grid_db = match (&flags.snr, &file.snr, file.snr_grid_db) {
        (Some(s), _, _) => Some(parse_snr(s)?),
        (None, Some(_), Some(_)) => return Err(config_err("snr", "give either snr or snr_grid_db, not both")),
        (None, Some(s), None) => Some(parse_snr(s)?),
        (None, None, Some(g)) => Some(check_grid(g)?),
        (None, None, None) => None,
    };
    let out = flags.out.clone().or(file.out);
    let path = flags.path.or(file.path).unwrap_or(PathArg::Fast).into();
    let antennas = flags.antennas.or(file.antennas);
    if antennas == Some(0) {
        return Err(config_err("M", "must be at least 1"));
    }

    let command = match command {
        CommandName::Sweep => {
            let engine = flags.engine.or(file.engine).unwrap_or(Engine::Mu);
            let antennas = antennas.unwrap_or(4);
            let default_users = if engine == Engine::Miso { 1 } else { antennas };
            let users = flags.users.or(file.users).unwrap_or(default_users);
            if users == 0 {
                return Err(config_err("K", "must be at least 1"));
            }
            let policy = match flags.policy.as_deref().or(file.policy.as_deref()) {
                Some(p) => parse_policy(p)?,
                None => ScalingPolicy::approx_3db_scaled(2.0),
            };
            Command::Sweep(SweepSpec {
                engine,
                antennas,
                users,
                policy,
                precoder: flags.precoder.or(file.precoder).unwrap_or(PrecoderArg::Zf).into(),
                csit: flags.csit.or(file.csit).unwrap_or(CsitArg::Quantized).into(),
            })
        }
        CommandName::Figure => {
            let id = match target {
                Some(t) => parse_target::<FigureId>("figure", t)?,
                None => file.figure.ok_or_else(|| config_err("figure", "a figure id is required"))?,
            };
            Command::Figure(id)
        }
        CommandName::Table => {
            let kind = match target {
                Some(t) => parse_target::<TableKind>("table", t)?,
                None => file.table.unwrap_or(TableKind::Quantizer),
            };
            let antennas = antennas.unwrap_or(4);
            if antennas < 2 {
                return Err(config_err("M", "must be at least 2"));
            }
            let bits = parse_bits(flags.bits.as_deref().or(file.bits.as_deref()).unwrap_or("0..16"))?;
            Command::Table(TableSpec { kind, antennas, bits })
        }
        CommandName::Validate => {
            let kind = match target {
                Some(t) => parse_target::<ValidateKind>("validate", t)?,
                None => file.validate.unwrap_or(ValidateKind::Bounds),
            };
            Command::Validate(ValidateSpec { kind, grid: flags.grid.or(file.grid).unwrap_or(GridName::Default) })
        }
    };
    Ok(ExperimentSpec { command, trials, seed, snr_grid_db, out, path })
}
