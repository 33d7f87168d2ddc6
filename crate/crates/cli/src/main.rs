use std::process::ExitCode;

use clap::Parser;
use fbmimo_cli::{run_cli, threads_from_env, Cli, CliError};

fn main() -> ExitCode {
    let cli = Cli::parse();
    let result = threads_from_env().and_then(|threads| {
        let mut builder = rayon::ThreadPoolBuilder::new();
        if let Some(n) = threads {
            builder = builder.num_threads(n);
        }
        let pool = builder.build().map_err(|e| CliError::Io(format!("thread pool: {e}")))?;
        pool.install(|| run_cli(cli, &mut std::io::stdout().lock()))
    });
    match result {
        Ok(true) => ExitCode::SUCCESS,
        Ok(false) => ExitCode::from(1),
        Err(e) => {
            eprintln!("fbmimo: {e}");
            ExitCode::from(e.exit_code() as u8)
        }
    }
}
