use std::path::PathBuf;

use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error)]
pub enum Error {
    /// An argument lies outside the domain of the operation.
    #[error("domain error: {0}")]
    Domain(String),

    #[error("t = {t} lies beyond the last pillar at {max}; extrapolation is not supported")]
    Extrapolation { t: f64, max: f64 },

    #[error("invalid curve: {0}")]
    InvalidCurve(String),

    /// A denominator vanished (zero annuity, zero swap rate, ...).
    #[error("degenerate input: {0}")]
    Degenerate(String),

    #[error("undefined ratio: {0}")]
    UndefinedRatio(String),

    #[error("bootstrap failed at tenor {tenor}y: {reason}")]
    BootstrapFailure { tenor: f64, reason: String },

    #[error("schema error: {0}")]
    Schema(String),

    #[error("duplicate quote on line {line}: {key}")]
    Duplicate { line: u64, key: String },

    #[error("line {line}: {message}")]
    Parse { line: u64, message: String },

    #[error("usage error: {0}")]
    Usage(String),

    #[error("{path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },

    #[error("csv error: {0}")]
    Csv(#[from] csv::Error),

    #[error("json error: {0}")]
    Json(#[from] serde_json::Error),
}

impl Error {
    pub(crate) fn domain(msg: impl Into<String>) -> Self {
        Error::Domain(msg.into())
    }

    pub(crate) fn io(path: impl Into<PathBuf>, source: std::io::Error) -> Self {
        Error::Io {
            path: path.into(),
            source,
        }
    }
}
