//! `rwalk`: validation, exact tables, kernels, simulation and the full
//! verification pipeline for reflected random walks.

pub mod checks;
pub mod commands;
pub mod config;
pub mod error;

use std::ffi::OsString;
use std::path::PathBuf;

use clap::{Parser, Subcommand, ValueEnum};

pub use config::{RunConfig, Tolerances};
pub use error::CliError;

#[derive(Debug, Parser)]
#[command(
    name = "rwalk",
    version,
    about = "Reflected random walks: exact tables, kernels and limit checks"
)]
pub struct Cli {
    /// Step-law file: one `offset weight` pair per line.
    #[arg(long, global = true)]
    pub dist: Option<PathBuf>,

    /// Output directory.
    #[arg(long, global = true)]
    pub out: Option<PathBuf>,

    #[arg(long, global = true)]
    pub seed: Option<u64>,

    /// Multiplies every check tolerance.
    #[arg(long, global = true)]
    pub tol_scale: Option<f64>,

    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Check the step law's assumptions.
    Validate,

    /// Ladder-height law, potential, renewal functions and first-passage laws.
    Fluctuations {
        #[arg(long, default_value_t = 20)]
        x_max: usize,
        #[arg(long, default_value_t = 1000)]
        horizon: usize,
    },

    /// Reflection kernel, stationary measure, spectrum and renewal operators.
    Kernel {
        #[arg(long, value_delimiter = ',', default_values_t = [0usize, 3])]
        x: Vec<usize>,
        #[arg(long, value_delimiter = ',', default_values_t = [500usize, 1000, 2000, 5000])]
        scales: Vec<usize>,
        #[arg(long, value_delimiter = ',', default_values_t = [500usize, 1000, 2000])]
        split_scales: Vec<usize>,
    },

    /// Monte Carlo estimates of the rescaled reflected walk.
    Simulate {
        #[arg(long, default_value_t = 4096)]
        n: usize,
        #[arg(long, default_value_t = 10_000)]
        paths: usize,
        #[arg(long, value_delimiter = ',', default_values_t = [0.25, 0.5, 1.0])]
        times: Vec<f64>,
        #[arg(long, default_value_t = 0)]
        x0: u64,
        #[arg(long, default_value_t = 1)]
        workers: usize,
    },

    /// Reference densities and integral identities.
    Laws {
        #[arg(long, value_enum, default_value_t = LawCheck::All)]
        check: LawCheck,
    },

    /// Every check in sequence, one CSV each plus a summary.
    VerifyAll {
        #[arg(long)]
        config: Option<PathBuf>,
    },
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum LawCheck {
    All,
    Imk,
}

/// Parses `args` and runs the command; returns the process exit code.
pub fn run<I, T>(args: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() { 1 } else { 0 };
        }
    };
    match commands::dispatch(&cli) {
        Ok(()) => 0,
        Err(e) => {
            eprintln!("error: {e}");
            e.exit_code()
        }
    }
}
