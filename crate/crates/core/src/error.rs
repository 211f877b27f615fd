use std::path::PathBuf;

use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("argument {x} lies outside [-1, 1]")]
    Domain { x: f64 },

    #[error("{what} = {value} is outside the supported range {range}")]
    Range {
        what: &'static str,
        value: usize,
        range: &'static str,
    },

    #[error("expected {expected} values, got {actual}")]
    LengthMismatch { expected: usize, actual: usize },

    #[error("precondition violated: {0}")]
    Precondition(String),

    #[error("invalid kernel: {0}")]
    InvalidKernel(String),

    #[error("signal is identically zero")]
    ZeroSignal,

    #[error("column `{column}` not found in {path}")]
    MissingColumn { column: String, path: PathBuf },

    #[error("{path}: line {line}: {message}")]
    Parse {
        path: PathBuf,
        line: u64,
        message: String,
    },

    #[error("{path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },

    #[error(transparent)]
    Csv(#[from] csv::Error),
}

impl Error {
    pub(crate) fn io(path: impl Into<PathBuf>, source: std::io::Error) -> Self {
        Error::Io {
            path: path.into(),
            source,
        }
    }

    /// True for failures caused by the filesystem or by malformed input files.
    pub fn is_io(&self) -> bool {
        matches!(
            self,
            Error::Io { .. } | Error::Csv(_) | Error::Parse { .. } | Error::MissingColumn { .. }
        )
    }
}
