use thiserror::Error;

/// Errors shared by the solver modules.
#[derive(Debug, Error)]
pub enum Error {
    #[error("segment parameter {0} outside [0, 1]")]
    ParameterOutOfRange(f64),
    #[error("bounding box too small to host {n_graphs} disjoint cells")]
    BBoxTooSmall { n_graphs: usize },
    #[error("invalid generator parameters: {0}")]
    InvalidParams(String),
    #[error("parse error at `{path}`: {message}")]
    Parse { path: String, message: String },
    #[error("unsupported document version: {0}")]
    UnknownVersion(String),
    #[error("instance violates invariants: {0}")]
    InvalidInstance(String),
    #[error("infeasible: {0}")]
    Infeasible(String),
    #[error("graph {graph} admits no feasible meeting point")]
    InfeasibleGraph { graph: usize },
    #[error("convex solver did not reach tolerance {tol:e} in {iterations} iterations")]
    NonConverged { tol: f64, iterations: usize },
    #[error("instance exceeds limits: {0}")]
    LimitsExceeded(String),
    #[error("invalid combinatorial skeleton: {0}")]
    InvalidSkeleton(String),
}

pub type Result<T> = std::result::Result<T, Error>;
