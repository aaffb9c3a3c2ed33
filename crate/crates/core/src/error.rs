//! Error taxonomy shared across the crate.
//!
//! The CLI maps [`Error`] variants onto process exit codes: config errors
//! exit 1, invariant violations exit 2, I/O failures exit 3.

use std::fmt;

/// Crate-wide error type.
#[derive(Debug, Clone, PartialEq)]
pub enum Error {
    /// Invalid argument or configuration value. The string names the field
    /// or parameter at fault.
    Config(String),
    /// A numeric invariant the algorithm depends on was breached at runtime.
    Invariant(String),
    /// Degenerate weight vector: the strategy distribution is undefined
    /// (normalizer underflowed to zero or a weight is not finite/positive).
    DegenerateWeights,
    /// Root finding found no sign change in the search interval.
    NoCrossover,
    /// Filesystem failure, with the offending path.
    Io(String),
}

impl fmt::Display for Error {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Error::Config(msg) => write!(f, "config error: {msg}"),
            Error::Invariant(msg) => write!(f, "invariant violation: {msg}"),
            Error::DegenerateWeights => write!(f, "degenerate weight vector"),
            Error::NoCrossover => write!(f, "no crossover point in search interval"),
            Error::Io(msg) => write!(f, "i/o error: {msg}"),
        }
    }
}

impl std::error::Error for Error {}

impl Error {
    /// Process exit code the CLI reports for this error class.
    pub fn exit_code(&self) -> i32 {
        match self {
            Error::Config(_) => 1,
            Error::Invariant(_) | Error::DegenerateWeights | Error::NoCrossover => 2,
            Error::Io(_) => 3,
        }
    }
}

pub type Result<T> = std::result::Result<T, Error>;
