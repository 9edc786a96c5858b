use std::path::PathBuf;

use thiserror::Error;

/// Errors raised by the solvers, the sampler and the experiment harness.
#[derive(Debug, Error)]
pub enum Error {
    #[error("domain error: {0}")]
    Domain(String),

    #[error("overflow: {0}")]
    Overflow(String),

    #[error("degenerate geometry: {0}")]
    Degenerate(String),

    #[error("irregular curve: speed vanishes near t = {t}")]
    IrregularCurve { t: f64 },

    #[error("linear system is singular (dimension {dim})")]
    SingularSystem { dim: usize },

    #[error("series truncated at order {order} before decaying (last term {last:e})")]
    Truncation { order: usize, last: f64 },

    #[error("wavenumber mismatch: density solved at k = {expected}, requested k = {got}")]
    WavenumberMismatch { expected: f64, got: f64 },

    #[error("dimension mismatch: {0}")]
    Dimension(String),

    #[error("empty input: {0}")]
    Empty(&'static str),

    #[error("misfit evaluation failed at iteration {iteration}: {source}")]
    Chain {
        iteration: usize,
        #[source]
        source: Box<Error>,
    },

    #[error("invalid configuration: {0}")]
    Config(String),

    #[error("unknown experiment `{0}`")]
    UnknownExperiment(String),

    #[error("{path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },

    #[error("{path}:{line}: {msg}")]
    Parse {
        path: PathBuf,
        line: usize,
        msg: String,
    },

    #[error(transparent)]
    Json(#[from] serde_json::Error),
}

pub type Result<T> = std::result::Result<T, Error>;

impl Error {
    pub(crate) fn io(path: impl Into<PathBuf>, source: std::io::Error) -> Self {
        Error::Io {
            path: path.into(),
            source,
        }
    }
}
