//! Command-line front end: configuration, figure presets, tables and CSV output.

pub mod config;
pub mod error;
pub mod output;
pub mod presets;
pub mod run;

use std::io::Write;

pub use config::{parse_config, Cli, ExperimentSpec};
pub use error::CliError;

/// Environment variable capping the number of worker threads.
pub const THREADS_ENV: &str = "FBMIMO_THREADS";

/// Reads the config file (if any), merges flags and runs.
pub fn run_cli(cli: Cli, stdout: &mut dyn Write) -> Result<bool, CliError> {
    let (command, target, config, flags) = cli.into_parts();
    let file = match &config {
        Some(path) => {
            let text = std::fs::read_to_string(path).map_err(|e| CliError::Io(format!("{}: {e}", path.display())))?;
            config::parse_file(&text)?
        }
        None => config::FileConfig::default(),
    };
    let spec = config::resolve(command, target.as_deref(), &flags, file)?;
    run::run(&spec, stdout)
}

/// Worker count from [`THREADS_ENV`], if set.
pub fn threads_from_env() -> Result<Option<usize>, CliError> {
    match std::env::var(THREADS_ENV) {
        Err(_) => Ok(None),
        Ok(v) => match v.trim().parse::<usize>() {
            Ok(n) if n >= 1 => Ok(Some(n)),
            _ => Err(CliError::Config(format!("{THREADS_ENV}: expected a positive integer, got {v:?}"))),
        },
    }
}
