use thiserror::Error;

use crate::graph::VertexId;

/// Errors raised by the simulation engine and its graph families.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("vertex {0} is not part of the graph")]
    InvalidVertex(VertexId),

    #[error("traversal visited more than {budget} vertices")]
    BudgetExceeded { budget: usize },

    #[error("invalid family parameter: {0}")]
    InvalidParameter(String),

    #[error("explicit graph is not connected")]
    Disconnected,

    #[error("explicit graph is not simple: {0}")]
    NotSimple(String),

    #[error("unsupported operation for this family: {0}")]
    Unsupported(String),

    #[error("radius {radius} outside the valid range (must be < {limit})")]
    RadiusOutOfRange { radius: u32, limit: u32 },

    #[error("non-typical oracle not evaluated beyond radius {radius}")]
    NotEvaluated { radius: u32 },

    #[error("parse error: {0}")]
    Parse(String),

    #[error("process did not stabilise within {max_rounds} rounds")]
    RoundLimit { max_rounds: u32 },

    #[error("graph of order {order} exceeds the oracle limit of {limit}")]
    OrderGuard { order: u64, limit: u64 },

    #[error("invalid argument: {0}")]
    InvalidArgument(String),
}

pub type Result<T, E = Error> = std::result::Result<T, E>;
