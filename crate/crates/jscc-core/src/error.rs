//! Error type shared by every module of the crate.

use thiserror::Error;

/// Failure modes of configuration validation and numerical routines.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    /// An argument lies outside the domain a routine is defined on.
    #[error("invalid argument: {0}")]
    InvalidArgument(String),

    /// A configuration is internally inconsistent (e.g. beta <= 1).
    #[error("invalid configuration: {0}")]
    InvalidConfig(String),

    /// An input vector does not have the expected number of entries.
    #[error("dimension mismatch: expected {expected} entries, got {got}")]
    DimensionMismatch { expected: usize, got: usize },

    /// An iterative solver failed to reach its target residual.
    #[error("no convergence: {0}")]
    NoConvergence(String),
}

pub type Result<T> = std::result::Result<T, Error>;

impl Error {
    pub(crate) fn arg(msg: impl Into<String>) -> Self {
        Error::InvalidArgument(msg.into())
    }

    pub(crate) fn config(msg: impl Into<String>) -> Self {
        Error::InvalidConfig(msg.into())
    }
}
