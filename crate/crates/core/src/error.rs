use std::path::PathBuf;

use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("endpoint out of range at edge {index}: ({u}, {v}) with l={l}, r={r}")]
    EndpointOutOfRange {
        index: usize,
        u: u64,
        v: u64,
        l: usize,
        r: usize,
    },
    #[error("endpoint out of range at line {line}: ({u}, {v}) with l={l}, r={r}")]
    EndpointOutOfRangeAtLine {
        line: usize,
        u: u64,
        v: u64,
        l: usize,
        r: usize,
    },
    #[error("malformed input at line {line}: {msg}")]
    Parse { line: usize, msg: String },
    #[error("header declares {declared} edges but {found} were read")]
    HeaderMismatch { declared: usize, found: usize },
    #[error("invalid subgraph: {0}")]
    InvalidSubgraph(String),
    #[error("invalid configuration: {0}")]
    Config(String),
    #[error("precondition violated: {0}")]
    Precondition(String),
    #[error("instance too large for exact search: l={l}, r={r} (limit {limit} per side)")]
    TooLarge { l: usize, r: usize, limit: usize },
    #[error("target {target} unreachable for a={a} below ck={limit}")]
    Unreachable { a: u32, target: f64, limit: f64 },
    #[error("{path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },
}

impl Error {
    /// True for errors caused by the file system rather than by the data.
    pub fn is_io(&self) -> bool {
        matches!(self, Error::Io { .. })
    }

    pub(crate) fn io(path: impl Into<PathBuf>, source: std::io::Error) -> Self {
        Error::Io {
            path: path.into(),
            source,
        }
    }
}
