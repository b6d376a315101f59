use thiserror::Error;

#[derive(Debug, Error)]
pub enum Error {
    #[error("line {line}: {message}")]
    Parse { line: usize, message: String },

    #[error("graph has no edges")]
    EmptyGraph,

    #[error("no communities left after filtering")]
    NoCommunities,

    #[error("conductance is undefined for an empty set, the full vertex set, or a zero-volume side")]
    UndefinedConductance,

    #[error("vertex {vertex} out of range for a graph with {n} vertices")]
    VertexOutOfRange { vertex: usize, n: usize },

    #[error("seed set is empty")]
    EmptySeeds,

    #[error("vertex set is empty")]
    EmptySet,

    #[error("all span columns are numerically zero")]
    ZeroSpan,

    #[error("invalid parameter: {0}")]
    InvalidParameter(String),

    #[error("numerical failure: {0}")]
    Numerical(String),

    #[error("no triangle inside the community")]
    NoTriangle,

    #[error("community has {available} members, {requested} seeds requested")]
    NotEnoughMembers { requested: usize, available: usize },

    #[error(transparent)]
    Io(#[from] std::io::Error),

    #[error(transparent)]
    Json(#[from] serde_json::Error),

    #[error(transparent)]
    Csv(#[from] csv::Error),
}

pub type Result<T> = std::result::Result<T, Error>;
