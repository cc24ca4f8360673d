use std::path::PathBuf;

use thiserror::Error;

#[derive(Debug, Error)]
pub enum Error {
    #[error("line {line}: {msg}")]
    Parse { line: usize, msg: String },

    #[error("line {line}: duplicate edge {a} {b}")]
    DuplicateEdge { line: usize, a: String, b: String },

    #[error("line {line}: self-loop on {label}")]
    SelfLoop { line: usize, label: String },

    #[error("graph has no nodes")]
    EmptyGraph,

    #[error("unknown node {0}")]
    UnknownNode(String),

    #[error("edge {0} {1} is not in the graph")]
    MissingEdge(String, String),

    #[error("graph is disconnected")]
    Disconnected,

    #[error("nodes {0} and {1} are not connected")]
    Unreachable(String, String),

    #[error("more than {cap} shortest paths between {u} and {v}")]
    GeodesicOverflow { u: String, v: String, cap: usize },

    #[error("cycle catalog exceeds cap of {0} cycles")]
    CycleOverflow(usize),

    #[error("invalid parameter: {0}")]
    InvalidParameter(String),

    #[error("unsupported: {0}")]
    Unsupported(String),

    #[error("flow network has an s-t path of infinite capacity")]
    InfiniteFlow,

    #[error("linear program is unbounded")]
    Unbounded,

    #[error("size {size} exceeds cap {cap}")]
    CapExceeded { size: usize, cap: usize },

    #[error("invalid instance: {0}")]
    InvalidInstance(String),

    #[error("internal invariant violated: {0}")]
    Internal(String),

    #[error("{path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },

    #[error("{path}: {source}")]
    InFile {
        path: PathBuf,
        #[source]
        source: Box<Error>,
    },
}

impl Error {
    /// True for errors signalling a broken internal invariant rather than bad input.
    pub fn is_internal(&self) -> bool {
        match self {
            Error::Internal(_) => true,
            Error::InFile { source, .. } => source.is_internal(),
            _ => false,
        }
    }
}

pub type Result<T> = std::result::Result<T, Error>;
