use thiserror::Error;

/// Errors produced by problem construction, the reduced LP and the GenCol loop.
#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("marginal {axis}: {reason}")]
    InvalidMarginal { axis: usize, reason: String },

    #[error("cost arity {cost} does not match {marginals} marginals")]
    ArityMismatch { cost: usize, marginals: usize },

    #[error("cost shape {cost:?} does not match marginal sizes {marginals:?}")]
    ShapeMismatch {
        cost: Vec<usize>,
        marginals: Vec<usize>,
    },

    #[error("cost is not finite at {0:?}")]
    NonFiniteCost(Vec<usize>),

    #[error("cost sup-norm unknown for a product of {0} cells; supply it explicitly")]
    CostScaleUnknown(u128),

    #[error("malformed plan: {0}")]
    MalformedPlan(String),

    #[error("configuration {config:?} out of range for sizes {sizes:?}")]
    ConfigOutOfRange {
        config: Vec<usize>,
        sizes: Vec<usize>,
    },

    #[error("configuration set is infeasible (residual mass {residual})")]
    Infeasible { residual: f64 },

    #[error("configuration set is empty")]
    EmptyActiveSet,

    #[error("duplicate configuration {0:?} in active set")]
    DuplicateConfiguration(Vec<usize>),

    #[error("invalid solver configuration: {0}")]
    InvalidConfig(String),

    #[error("product space of {size} cells exceeds the dense limit {limit}")]
    GuardExceeded { size: u128, limit: u128 },

    #[error("unsupported: {0}")]
    Unsupported(String),

    #[error("internal consistency error: {0}")]
    Internal(String),
}

pub type Result<T> = std::result::Result<T, Error>;
