use thiserror::Error;

/// Errors produced by the model, solver and evaluation layers.
#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid model: {0}")]
    InvalidModel(String),

    #[error("weak assortativity violated at nodes [{}]", .0.join(", "))]
    NotAssortative(Vec<String>),

    #[error("invalid node code {0:?}: only '0' and '1' are allowed")]
    InvalidCode(String),

    #[error("the root node has no sibling")]
    RootHasNoSibling,

    #[error("ancestor index {index} exceeds code length {len}")]
    AncestorOutOfRange { index: usize, len: usize },

    #[error("node {0:?} is not part of the tree")]
    UnknownNode(String),

    #[error("operation requires at least two communities (K >= 2)")]
    SingleCommunity,

    #[error("dimension mismatch: {0}")]
    DimensionMismatch(String),

    #[error("length mismatch: {left} vs {right}")]
    LengthMismatch { left: usize, right: usize },

    #[error("problem size {n} exceeds the dense limit {limit}")]
    TooLarge { n: usize, limit: usize },

    #[error("eigensolver did not converge after {iterations} iterations (best residual {best_residual:e})")]
    NoConvergence {
        iterations: usize,
        best_residual: f64,
    },

    #[error("invalid graph: {0}")]
    InvalidGraph(String),

    #[error("vector has a zero entry at index {0}")]
    ZeroEntry(usize),

    #[error("vertex {0} has zero degree")]
    ZeroDegree(usize),

    #[error("{path}:{line}: {message}")]
    Parse {
        path: String,
        line: usize,
        message: String,
    },

    #[error("dataset `{name}` not available: missing {path}")]
    DatasetUnavailable { name: String, path: String },

    #[error("invalid argument: {0}")]
    InvalidArgument(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),

    #[error(transparent)]
    Json(#[from] serde_json::Error),
}

impl Error {
    /// True for failures of the numerical layer rather than bad input.
    pub fn is_numerical(&self) -> bool {
        matches!(self, Error::NoConvergence { .. })
    }
}

pub type Result<T, E = Error> = std::result::Result<T, E>;
