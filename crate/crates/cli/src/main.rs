mod artifact;
mod commands;
mod config;
mod error;

use std::process::ExitCode;

use clap::Parser;

use crate::config::RunConfig;
use crate::error::CliError;

fn main() -> ExitCode {
    let cfg = RunConfig::parse();
    let run = || -> Result<(), CliError> {
        rayon::ThreadPoolBuilder::new()
            .num_threads(cfg.workers)
            .build_global()
            .map_err(|e| CliError::invalid(format!("worker pool: {e}")))?;
        commands::dispatch(&cfg)
    };
    match run() {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code() as u8)
        }
    }
}
