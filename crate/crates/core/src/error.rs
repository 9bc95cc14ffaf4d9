use std::path::PathBuf;

use thiserror::Error;

/// Errors produced by model construction, numerics and the experiment harness.
#[derive(Debug, Error)]
pub enum Error {
    #[error("basis too large: {what} gives dimension {dimension}, cap is {cap}")]
    Sizing {
        what: String,
        dimension: u128,
        cap: usize,
    },

    #[error("invalid parameter: {0}")]
    InvalidParameter(String),

    #[error("index {index} out of range for dimension {dimension}")]
    IndexOutOfRange { index: usize, dimension: usize },

    #[error("dimension mismatch: expected {expected}, got {found}")]
    DimensionMismatch { expected: usize, found: usize },

    #[error(
        "eigensolver failed to converge (n = {dimension}, max |H_ij| = {max_abs:e}, frobenius = {frobenius:e})"
    )]
    Convergence {
        dimension: usize,
        max_abs: f64,
        frobenius: f64,
    },

    #[error("probability vector not normalized: sum = {sum}")]
    Normalization { sum: f64 },

    #[error("too few levels for spacing statistics: {found} in window, need {needed}")]
    TooFewLevels { found: usize, needed: usize },

    #[error("strength-function fit failed: {0}")]
    FitFailure(String),

    #[error("configuration error: {0}")]
    Config(String),

    #[error("i/o error on {path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },

    #[error("realization {index}: {source}")]
    Realization {
        index: usize,
        #[source]
        source: Box<Error>,
    },
}

impl Error {
    /// Process exit code used by the command-line front end.
    pub fn exit_code(&self) -> i32 {
        match self {
            Error::Config(_) | Error::InvalidParameter(_) | Error::Sizing { .. } => 2,
            Error::Realization { source, .. } => source.exit_code(),
            Error::Io { .. } => 2,
            _ => 3,
        }
    }

    pub(crate) fn io(path: impl Into<PathBuf>, source: std::io::Error) -> Self {
        Error::Io {
            path: path.into(),
            source,
        }
    }
}

pub type Result<T> = std::result::Result<T, Error>;
