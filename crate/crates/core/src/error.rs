use std::path::PathBuf;

use thiserror::Error;

use crate::resilience::ExpParams;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("failed to access {path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },

    #[error("{resource} line {line}: {reason}")]
    Resource {
        resource: &'static str,
        line: usize,
        reason: String,
    },

    #[error("invalid configuration: {0}")]
    Config(String),

    #[error("timestamp {0} lies outside the event window")]
    OutsideWindow(chrono::DateTime<chrono::Utc>),

    #[error("degenerate input: {0}")]
    Degenerate(String),

    #[error("insufficient data: {got} values, at least {need} required")]
    InsufficientData { got: usize, need: usize },

    #[error("half-life undefined for non-negative rate b = {0}")]
    UndefinedHalfLife(f64),

    #[error(transparent)]
    Fit(#[from] FitError),
}

impl Error {
    pub(crate) fn io(path: impl Into<PathBuf>, source: std::io::Error) -> Self {
        Error::Io {
            path: path.into(),
            source,
        }
    }
}

/// Failure of a least-squares fit. Carries the best parameters seen so a
/// caller can still report them.
#[derive(Debug, Clone, Error)]
#[error("{family} fit failed: {reason}")]
pub struct FitError {
    pub family: &'static str,
    pub reason: String,
    pub best: Option<(ExpParams, f64)>,
}
