use thiserror::Error;

/// Errors shared across the crate.
#[derive(Debug, Error)]
pub enum Error {
    #[error("parse error at byte {pos}: {msg}")]
    Parse { pos: usize, msg: String },

    #[error("invalid hypergraph: {0}")]
    Invalid(String),

    #[error("hyperedge index {index} out of range (l = {len})")]
    EdgeIndex { index: usize, len: usize },

    #[error("operation produced an empty hypergraph")]
    Empty,

    #[error("clique {size} exceeds declared dimension {n}")]
    CliqueTooLarge { size: usize, n: usize },

    #[error("search budget exceeded ({0} nodes); result indeterminate")]
    BudgetExceeded(u64),

    #[error("input too large for exhaustive search: {0}")]
    TooLarge(String),

    #[error("linear program infeasible: {0}")]
    Infeasible(String),

    #[error("coordinatization error: {0}")]
    Coord(String),

    #[error("unknown fixture `{0}`")]
    UnknownFixture(String),

    #[error("io error: {0}")]
    Io(#[from] std::io::Error),

    #[error("json error: {0}")]
    Json(#[from] serde_json::Error),
}

pub type Result<T> = std::result::Result<T, Error>;
