use std::io;

use thiserror::Error;

use crate::quantum::QuantumNumbers;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Error)]
pub enum Error {
    /// A caller broke an operation's precondition.
    #[error("contract violation: {0}")]
    Contract(String),

    /// Newton iteration failed under every guess policy.
    #[error("Bethe solve did not converge for m = {quantum_numbers} (best residual {best_residual:e})")]
    NonConvergence {
        quantum_numbers: QuantumNumbers,
        best_residual: f64,
    },

    #[error("unfolding failed: {0}")]
    Unfolding(String),

    #[error("unsupported input: {0}")]
    Unsupported(String),

    #[error("parse error at line {line}: {message}")]
    Parse { line: usize, message: String },

    #[error("integrity error: {0}")]
    Integrity(String),

    #[error(transparent)]
    Io(#[from] io::Error),
}

impl Error {
    pub(crate) fn contract(msg: impl Into<String>) -> Self {
        Error::Contract(msg.into())
    }
}
