//! Subcommands of the `llspec` binary, callable in-process.
//!
//! Exit codes: 0 success, 1 usage, configuration or I/O problems, 2 solver
//! failure, 3 a verification that ran but did not pass.

pub mod args;
mod commands;

use std::io::Write;

use ll_spectrum::{Error, ModelParams64};

pub use args::{Cli, Command};

/// Result of a subcommand that ran to completion.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Outcome {
    Success,
    VerificationFailed,
}

#[derive(Debug, thiserror::Error)]
pub enum Failure {
    #[error("{0}")]
    Usage(String),
    #[error(transparent)]
    Core(#[from] Error),
}

impl From<std::io::Error> for Failure {
    fn from(e: std::io::Error) -> Self {
        Failure::Core(Error::Io(e))
    }
}

pub fn exit_code(result: &Result<Outcome, Failure>) -> u8 {
    match result {
        Ok(Outcome::Success) => 0,
        Ok(Outcome::VerificationFailed) => 3,
        Err(Failure::Core(Error::NonConvergence { .. })) => 2,
        Err(_) => 1,
    }
}

/// Runs a parsed command line, printing progress to `out`.
pub fn run(cli: &Cli, out: &mut (dyn Write + Send)) -> Result<Outcome, Failure> {
    let mut builder = rayon::ThreadPoolBuilder::new();
    if let Some(n) = cli.threads {
        if n == 0 {
            return Err(Failure::Usage("--threads must be at least 1".into()));
        }
        builder = builder.num_threads(n);
    }
    let pool = builder.build().map_err(|e| Failure::Usage(format!("thread pool: {e}")))?;
    pool.install(|| match &cli.command {
        Command::Spectrum(a) => commands::spectrum(a, out),
        Command::Saturate(a) => commands::saturate(a, out),
        Command::Symmetry(a) => commands::symmetry(a, out),
        Command::Stats(a) => commands::stats(a, out),
    })
}

fn model_params(m: &args::ModelArgs) -> Result<ModelParams64, Failure> {
    let p = match (m.coupling.coupling, m.coupling.ratio) {
        (Some(c), None) => ModelParams64::new(m.n_particles, m.ring_length, c)?,
        (None, Some(r)) => ModelParams64::from_density_ratio(m.n_particles, m.ring_length, r)?,
        _ => return Err(Failure::Usage("give exactly one of --coupling and --ratio".into())),
    };
    Ok(p)
}
