//! Error type shared by all modules.

use std::path::PathBuf;

/// Crate-wide result alias.
pub type Result<T> = std::result::Result<T, Error>;

/// Errors produced by corpus ingestion, fitting, and the selection model.
#[derive(Debug, thiserror::Error)]
pub enum Error {
    #[error("cannot read {path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },

    #[error("{path} is not valid UTF-8")]
    Encoding { path: PathBuf },

    #[error("malformed CSV in {path}: {source}")]
    Csv {
        path: PathBuf,
        #[source]
        source: Box<csv::Error>,
    },

    #[error("unknown bundled stopword list `{0}` (expected common123, spacy305 or snowball175)")]
    UnknownStoplist(String),

    #[error("nothing to rank: token count table is empty")]
    EmptyTable,

    #[error("{op} needs at least {needed} points, got {got}")]
    TooFewPoints {
        op: &'static str,
        needed: usize,
        got: usize,
    },

    #[error("degenerate fit input: {0}")]
    Degenerate(String),

    #[error("invalid input: {0}")]
    InvalidInput(String),

    #[error("parameters not identifiable: {0}")]
    Unidentifiable(String),
}

impl Error {
    pub(crate) fn io(path: impl Into<PathBuf>, source: std::io::Error) -> Self {
        Error::Io {
            path: path.into(),
            source,
        }
    }

    pub(crate) fn csv(path: impl Into<PathBuf>, source: csv::Error) -> Self {
        Error::Csv {
            path: path.into(),
            source: Box::new(source),
        }
    }
}
