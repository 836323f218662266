use thiserror::Error;

use crate::decomposition::{GoodDecomposition, PrimaryAudit};

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("parse error on line {line}: {message}")]
    Parse { line: usize, message: String },

    #[error("duplicate edge ({u}, {v})")]
    DuplicateEdge { u: usize, v: usize },

    #[error("self-loop at vertex {v}")]
    SelfLoop { v: usize },

    #[error("vertex {v} out of range for a graph on {n} vertices")]
    VertexOutOfRange { v: usize, n: usize },

    #[error("vertex set is empty")]
    EmptySet,

    #[error("blocks overlap at vertex {v}")]
    OverlappingBlocks { v: usize },

    #[error("invalid partition: {0}")]
    InvalidPartition(String),

    #[error("graph or network is disconnected")]
    Disconnected,

    #[error("invalid parameter: {0}")]
    Parameter(String),

    #[error("size guard: n = {n} exceeds the limit {limit} for {what}")]
    SizeGuard { n: usize, limit: usize, what: &'static str },

    #[error("eigensolver failed to converge on a {n}x{n} matrix")]
    Convergence { n: usize },

    #[error("dimension mismatch: expected {expected}, found {found}")]
    DimensionMismatch { expected: usize, found: usize },

    #[error("random walk exceeded the step cap of {cap}")]
    BudgetExceeded { cap: u64 },

    #[error("invalid path: {0}")]
    InvalidPath(String),

    #[error("hypothesis violated: {0}")]
    HypothesisViolation(String),

    #[error("minimum degree {min_degree} is below the required {required:.3}")]
    DegreePrecondition { min_degree: usize, required: f64 },

    #[error("refinement could not certify a primary decomposition")]
    RefinementStall(Box<PrimaryAudit>),

    #[error("good decomposition failed its audit")]
    AuditFailed(Box<GoodDecomposition>),

    #[error("killed operator radius {rho} is at or above the cap {cap}")]
    TailDivergence { rho: f64, cap: f64 },

    #[error("domain error: {0}")]
    Domain(String),

    #[error("constraint unsatisfiable: {0}")]
    Unsatisfiable(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),

    #[error(transparent)]
    Json(#[from] serde_json::Error),
}
