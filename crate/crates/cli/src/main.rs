//! Batch driver: sample couplings to CSV, run the verification claims and
//! summarize saved reports.

mod commands;
mod config;

use std::process::ExitCode;

use clap::{Parser, Subcommand};
use thiserror::Error;

use config::{Flags, RunConfig};

#[derive(Debug, Error)]
pub enum CliError {
    #[error("{0}")]
    Usage(String),
    #[error("{0}")]
    Io(String),
    #[error(transparent)]
    Core(#[from] tiltscale::Error),
}

impl From<std::io::Error> for CliError {
    fn from(e: std::io::Error) -> Self {
        CliError::Io(e.to_string())
    }
}

#[derive(Debug, Parser)]
#[command(name = "tiltscale", version, about = "Simulate tilted couplings and test their distributional claims")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Write coupled draws as CSV. KIND is one of: scalar, gg-measure,
    /// size-biased, pd-bridge, jumps.
    Sample {
        kind: String,
        #[command(flatten)]
        flags: Flags,
    },
    /// Run a claim (or `all`) and write the report.
    Verify {
        claim: String,
        #[command(flatten)]
        flags: Flags,
    },
    /// Write coupled excursion triples as CSV.
    Excursion {
        #[command(flatten)]
        flags: Flags,
    },
    /// Write CRP block counts and diversity estimates as CSV.
    Diversity {
        #[command(flatten)]
        flags: Flags,
    },
    /// Print the summary of a JSON report written by `verify`.
    Report {
        path: std::path::PathBuf,
    },
}

/// Exit status of a completed run.
pub enum Outcome {
    Pass,
    Fail,
}

fn run(cli: Cli) -> Result<Outcome, CliError> {
    let (flags, job): (Flags, Box<dyn FnOnce(&RunConfig) -> Result<Outcome, CliError> + Send>) =
        match cli.command {
            Command::Sample { kind, flags } => (flags, Box::new(move |c| commands::sample(&kind, c))),
            Command::Verify { claim, flags } => (flags, Box::new(move |c| commands::verify(&claim, c))),
            Command::Excursion { flags } => (flags, Box::new(commands::excursion)),
            Command::Diversity { flags } => (flags, Box::new(commands::diversity)),
            Command::Report { path } => return commands::report(&path),
        };
    let cfg = RunConfig::resolve(&flags)?;
    let mut pool = rayon::ThreadPoolBuilder::new();
    if let Some(w) = cfg.workers {
        pool = pool.num_threads(w);
    }
    let pool = pool.build().map_err(|e| CliError::Io(e.to_string()))?;
    pool.install(|| job(&cfg))
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli) {
        Ok(Outcome::Pass) => ExitCode::SUCCESS,
        Ok(Outcome::Fail) => ExitCode::from(1),
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(2)
        }
    }
}
