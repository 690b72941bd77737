use std::path::PathBuf;

use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("{source_name}:{line}: {message}")]
    Parse {
        source_name: String,
        line: usize,
        message: String,
    },

    #[error("edge ({u}, {v}) references unknown node (node count {node_count})")]
    UnknownNode { u: usize, v: usize, node_count: usize },

    #[error("node {node}: value {value:?} is outside the domain of categorical dimension `{dim}`")]
    OutsideDomain { node: usize, dim: String, value: String },

    #[error("node {node}: expected {expected} attribute values, found {found}")]
    Arity { node: usize, expected: usize, found: usize },

    #[error("invalid schema: {0}")]
    Schema(String),

    #[error("invalid subspace: {0}")]
    Subspace(String),

    #[error("precondition violated: {0}")]
    Precondition(String),

    #[error("cached norm corrupted: radicand {0} is negative")]
    NormCorruption(f64),

    #[error("infeasible benchmark parameters: {0}")]
    Infeasible(String),

    #[error("invalid configuration: {0}")]
    Config(String),

    #[error("{path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },

    #[error(transparent)]
    Csv(#[from] csv::Error),

    #[error(transparent)]
    Json(#[from] serde_json::Error),
}

impl Error {
    /// An I/O error tagged with the path involved.
    pub fn io(path: impl Into<PathBuf>, source: std::io::Error) -> Self {
        Error::Io {
            path: path.into(),
            source,
        }
    }

    pub(crate) fn parse(source_name: &str, line: usize, message: impl Into<String>) -> Self {
        Error::Parse {
            source_name: source_name.to_string(),
            line,
            message: message.into(),
        }
    }
}
