use thiserror::Error;

#[derive(Debug, Error)]
pub enum Error {
    #[error("malformed structure: {0}")]
    Malformed(String),
    #[error("unknown atom `{0}`")]
    UnknownAtom(String),
    #[error("index {index} out of range for dimension {dim}")]
    Index { index: usize, dim: usize },
    #[error("unbound variable `{0}`")]
    Unbound(String),
    #[error("size bound exceeded: {0}")]
    Bound(String),
    #[error("budget exceeded: {0}")]
    Budget(String),
    #[error("precondition violated: {0}")]
    Precondition(String),
    #[error("parse error: {0}")]
    Parse(String),
    #[error(transparent)]
    Json(#[from] serde_json::Error),
}

pub type Result<T> = std::result::Result<T, Error>;
