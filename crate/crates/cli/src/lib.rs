//! Command-line driver: configuration, subcommands and file exports.

pub mod angle;
pub mod cli;
pub mod commands;
pub mod config;
pub mod error;
pub mod svg;
pub mod table;

use cli::{Cli, Command};
use error::CliError;
use std::path::PathBuf;

/// Runs one invocation: computes, writes the output files and returns the
/// stdout summary.
pub fn run(cli: &Cli) -> Result<String, CliError> {
    let (cfg, extras) = cli.resolve()?;
    let outcome = match &cli.command {
        Command::Spectrum { .. } => commands::cmd_spectrum(&cfg)?,
        Command::Stability { .. } => commands::cmd_stability(&cfg)?,
        Command::Critical => commands::cmd_critical(&cfg)?,
        Command::Bifurcate => commands::cmd_bifurcate(&cfg)?,
        Command::Trace { .. } => commands::cmd_trace(&cfg, &extras)?,
        Command::Sweep { .. } => commands::cmd_sweep(&cfg, cli.threads)?,
    };
    let dir = cli
        .out
        .clone()
        .or_else(|| cfg.output.dir.as_ref().map(PathBuf::from))
        .unwrap_or_else(|| PathBuf::from("."));
    std::fs::create_dir_all(&dir)?;
    for (name, bytes) in &outcome.files {
        std::fs::write(dir.join(name), bytes)?;
    }
    Ok(outcome.stdout)
}
