use std::path::PathBuf;

use thiserror::Error;

/// Errors produced by the surrogate models, the active-learning loop and the
/// experiment harness.
#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid argument: {0}")]
    InvalidArgument(String),

    #[error("precondition violated: {0}")]
    Precondition(String),

    #[error("numerical failure: {0}")]
    Numerical(String),

    #[error("expectation propagation did not converge after {sweeps} sweeps (residual {residual:e})")]
    Convergence { sweeps: usize, residual: f64 },

    #[error("cannot build surrogate: {0}")]
    Unbuildable(String),

    #[error("metric undefined: {0}")]
    UndefinedMetric(String),

    #[error("i/o error at {path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },

    #[error("serialization error at {path}: {message}")]
    Serialization { path: PathBuf, message: String },
}

impl Error {
    /// Short machine-readable tag, used in the CLI's error record.
    pub fn kind(&self) -> &'static str {
        match self {
            Error::InvalidArgument(_) => "invalid_argument",
            Error::Precondition(_) => "precondition",
            Error::Numerical(_) => "numerical",
            Error::Convergence { .. } => "convergence",
            Error::Unbuildable(_) => "unbuildable",
            Error::UndefinedMetric(_) => "undefined_metric",
            Error::Io { .. } => "io",
            Error::Serialization { .. } => "serialization",
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
