//! Error taxonomy shared by the library and the CLI.
//!
//! The CLI maps each variant to a process exit code: configuration and
//! domain problems exit 1, numerical degeneracy exits 2, resource and I/O
//! failures exit 3.

use thiserror::Error;

#[derive(Debug, Error)]
pub enum Error {
    /// Inconsistent sizes, truncations or experiment parameters.
    #[error("configuration error: {0}")]
    Config(String),

    /// Input outside an operation's mathematical domain (q < 1, empty
    /// trajectory, zero field where a ratio is required, ...).
    #[error("domain error: {0}")]
    Domain(String),

    /// A computation hit a numerically degenerate regime (vanishing norms
    /// below the representable scale, projector annihilating the input).
    #[error("numerical degeneracy: {0}")]
    Degeneracy(String),

    /// Requested sizes exceed the configured memory/time budget.
    #[error("resource error: {0}")]
    Resource(String),

    #[error("i/o error: {0}")]
    Io(#[from] std::io::Error),
}

impl Error {
    pub fn config(msg: impl Into<String>) -> Self {
        Error::Config(msg.into())
    }
    pub fn domain(msg: impl Into<String>) -> Self {
        Error::Domain(msg.into())
    }
    pub fn degeneracy(msg: impl Into<String>) -> Self {
        Error::Degeneracy(msg.into())
    }
    pub fn resource(msg: impl Into<String>) -> Self {
        Error::Resource(msg.into())
    }

    /// Exit code contract used by the CLI.
    pub fn exit_code(&self) -> i32 {
        match self {
            Error::Config(_) | Error::Domain(_) => 1,
            Error::Degeneracy(_) => 2,
            Error::Resource(_) | Error::Io(_) => 3,
        }
    }
}

pub type Result<T> = std::result::Result<T, Error>;
