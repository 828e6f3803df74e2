use std::path::PathBuf;

use thiserror::Error;

/// Errors produced by the library.
#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid field: {0}")]
    InvalidField(String),

    #[error("invalid argument: {0}")]
    InvalidArgument(String),

    /// A parameter outside the region where a series or product converges.
    #[error("domain error: {0}")]
    Domain(String),

    #[error("configuration error: {0}")]
    Config(String),

    #[error("precondition violated: {0}")]
    Precondition(String),

    #[error("parse error at line {line}: {message}")]
    Parse { line: usize, message: String },

    #[error("validation failed for field `{field}`: {message}")]
    Validation { field: String, message: String },

    #[error("undefined density: {0}")]
    UndefinedDensity(String),

    #[error("empty sample: {0}")]
    EmptySample(String),

    #[error("degenerate system: {0}")]
    Degenerate(String),

    /// Two independent evaluation routes disagreed beyond their stated tolerance.
    #[error("consistency check failed: {0}")]
    Consistency(String),

    #[error("requested tolerance {tol:e} not reached (best bound {bound:e})")]
    ToleranceNotReached { tol: f64, bound: f64 },

    #[error("i/o error on {path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },
}

impl Error {
    pub(crate) fn io(path: impl Into<PathBuf>, source: std::io::Error) -> Self {
        Error::Io {
            path: path.into(),
            source,
        }
    }
}

pub type Result<T> = std::result::Result<T, Error>;
