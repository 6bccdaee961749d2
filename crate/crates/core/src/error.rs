use thiserror::Error;

use crate::graph::VertexId;

/// Why an edge-list line was rejected.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum ParseErrorKind {
    MissingHeader,
    BadHeader(String),
    BadEdge(String),
    SelfLoop(VertexId),
    DuplicateEdge(VertexId, VertexId),
    IdOutOfRange { id: u64, n: usize },
    DegreeExceeded { vertex: VertexId, d: usize },
}

impl std::fmt::Display for ParseErrorKind {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            ParseErrorKind::MissingHeader => write!(f, "missing `n=<int>` header"),
            ParseErrorKind::BadHeader(s) => write!(f, "malformed header `{s}`"),
            ParseErrorKind::BadEdge(s) => write!(f, "malformed edge `{s}`"),
            ParseErrorKind::SelfLoop(v) => write!(f, "self-loop at vertex {v}"),
            ParseErrorKind::DuplicateEdge(u, v) => write!(f, "duplicate edge {u} {v}"),
            ParseErrorKind::IdOutOfRange { id, n } => write!(f, "vertex id {id} out of range (n={n})"),
            ParseErrorKind::DegreeExceeded { vertex, d } => {
                write!(f, "vertex {vertex} exceeds degree bound {d}")
            }
        }
    }
}

#[derive(Debug, Error)]
pub enum Error {
    #[error("line {line}: {kind}")]
    Parse { line: usize, kind: ParseErrorKind },

    #[error("usage error: {0}")]
    Usage(String),

    #[error("configuration error: {0}")]
    Config(String),

    #[error("contract violation: {0}")]
    Contract(String),

    #[error(transparent)]
    Json(#[from] serde_json::Error),

    #[error(transparent)]
    Io(#[from] std::io::Error),
}

pub type Result<T, E = Error> = std::result::Result<T, E>;
