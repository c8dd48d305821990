use std::path::PathBuf;

use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("line {line}: {msg}")]
    Parse { line: usize, msg: String },

    #[error("edge #{index}: sign {value} is not -1 or 1")]
    InvalidSign { index: usize, value: i64 },

    #[error("node {node} out of range (graph has {node_count} nodes)")]
    NodeOutOfRange { node: usize, node_count: usize },

    #[error("graph is empty")]
    EmptyGraph,

    #[error("size mismatch: expected {expected} entries, got {actual}")]
    SizeMismatch { expected: usize, actual: usize },

    #[error("empty training set")]
    EmptyTrainingSet,

    #[error("unknown dataset {0:?}")]
    UnknownDataset(String),

    #[error("checksum mismatch for {path}: cached copy discarded, fetch again")]
    ChecksumMismatch { path: PathBuf },

    #[error("download failed: {0}")]
    Download(String),

    #[error("invalid parameter `{field}`: {msg}")]
    InvalidParam { field: &'static str, msg: String },

    #[error("no runs to aggregate")]
    NoRuns,

    #[error(transparent)]
    Io(#[from] std::io::Error),

    #[error(transparent)]
    Json(#[from] serde_json::Error),
}

impl Error {
    pub(crate) fn param(field: &'static str, msg: impl Into<String>) -> Self {
        Error::InvalidParam {
            field,
            msg: msg.into(),
        }
    }
}
