//! `weyl`: command-line driver for the disk Weyl remainder experiments.
//!
//! Exit codes: 0 success, 2 usage or invalid parameter, 3 computation
//! error (guard, budget, accuracy, convergence, cache), 1 output I/O failure.

// `!(x > 0.0)` style guards are deliberate: they also reject NaN.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

mod commands;
mod output;

use clap::{Args, Parser, Subcommand};
use output::Format;
use serde::Serialize;
use std::path::PathBuf;
use std::process::ExitCode;
use weyl_core::WeylError;

#[derive(Debug, Parser)]
#[command(name = "weyl", version, about = "Numerical lab for the two-term Weyl remainder of the disk")]
pub struct Cli {
    #[command(flatten)]
    pub global: GlobalArgs,
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Clone, Args, Serialize)]
pub struct GlobalArgs {
    /// Seed of the random sampling.
    #[arg(long, global = true, default_value_t = 17)]
    pub seed: u64,
    /// Zero-cache directory (default: $WEYL_CACHE_DIR, else .weyl-cache).
    #[arg(long, global = true)]
    pub cache_dir: Option<PathBuf>,
    /// Output file, `-` for standard output.
    #[arg(long, short, global = true, default_value = "-")]
    pub output: String,
    #[arg(long, global = true, value_enum, default_value_t = Format::Csv)]
    pub format: Format,
    /// Worker threads (default: available cores). Results do not depend on it.
    #[arg(long, global = true)]
    pub threads: Option<usize>,
}

#[derive(Debug, Subcommand, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Command {
    /// Profile g, contact points, support function and cone function.
    #[command(subcommand)]
    Geometry(commands::GeometryCmd),
    /// Bessel zeros and the zero cache.
    #[command(subcommand)]
    Bessel(commands::BesselCmd),
    /// Lattice counts in mu * Omega.
    #[command(subcommand)]
    Lattice(commands::LatticeCmd),
    /// Disk eigenvalue counts.
    #[command(subcommand)]
    Spectral(commands::SpectralCmd),
    /// The boundary oscillatory integral.
    #[command(subcommand)]
    Oscillatory(commands::OscillatoryCmd),
    /// Exponential sums, differencing and h_q determinants.
    #[command(subcommand)]
    Expsum(commands::ExpsumCmd),
    /// Exponent and comparison experiments.
    #[command(subcommand)]
    Experiment(commands::ExperimentCmd),
}

#[derive(Debug)]
pub enum CliError {
    Usage(String),
    Compute(WeylError),
    Io(std::io::Error),
}

impl From<WeylError> for CliError {
    fn from(e: WeylError) -> Self {
        match e {
            WeylError::Domain(_) | WeylError::Precondition(_) => CliError::Usage(e.to_string()),
            other => CliError::Compute(other),
        }
    }
}

impl From<std::io::Error> for CliError {
    fn from(e: std::io::Error) -> Self {
        CliError::Io(e)
    }
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            // --help and --version print to stdout and exit 0; usage errors exit 2
            let _ = e.print();
            return ExitCode::from(if e.use_stderr() { 2 } else { 0 });
        }
    };
    match commands::run(&cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(CliError::Usage(msg)) => {
            eprintln!("error: {msg}");
            ExitCode::from(2)
        }
        Err(CliError::Compute(e)) => {
            eprintln!("error: {e}");
            ExitCode::from(3)
        }
        Err(CliError::Io(e)) => {
            eprintln!("error: {e}");
            ExitCode::from(1)
        }
    }
}
