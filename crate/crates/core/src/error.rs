//! Crate-wide error type.

use std::path::PathBuf;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, thiserror::Error)]
pub enum Error {
    #[error("i/o error on {path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },

    #[error("corrupt table file: {0}")]
    Corrupt(String),

    #[error("invalid schema: {0}")]
    Schema(String),

    #[error("table {0:?} already exists in this session")]
    DuplicateTable(String),

    #[error("unique key violation on key {0:?}")]
    UniqueViolation(Vec<u64>),

    #[error("update would modify a clustered-key field (row key {0:?})")]
    KeyMutation(Vec<u64>),

    #[error("merge source contains duplicate key {0:?}")]
    DuplicateSourceKey(Vec<u64>),

    #[error("node {0} is not present in the graph")]
    NodeNotFound(u64),

    #[error("segment tables disagree on threshold ({out} vs {inc})")]
    ThresholdMismatch { out: u64, inc: u64 },

    #[error("threshold {l_thd} is below the minimum edge weight {w_min}")]
    ThresholdTooSmall { l_thd: u64, w_min: u64 },

    #[error("no segment from {0} to {1} in the segment table")]
    MissingSegment(u64, u64),

    #[error("{path}:{line}: {msg}")]
    EdgeListParse {
        path: PathBuf,
        line: usize,
        msg: String,
    },

    #[error("refusing all-pairs computation on {n} nodes (limit {limit})")]
    GraphTooLarge { n: usize, limit: usize },
}

impl Error {
    pub(crate) fn io(path: impl Into<PathBuf>, source: std::io::Error) -> Self {
        Error::Io {
            path: path.into(),
            source,
        }
    }

    pub(crate) fn corrupt(msg: impl Into<String>) -> Self {
        Error::Corrupt(msg.into())
    }
}
