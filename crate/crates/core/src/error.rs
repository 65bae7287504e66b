use thiserror::Error;

/// Errors raised by coefficient construction, evaluation and measure reconstruction.
#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("parameter `{name}` = {value} outside {range}")]
    Domain {
        name: &'static str,
        value: f64,
        range: &'static str,
    },

    #[error("coefficient table index gap: expected n={expected}, found n={found}")]
    IndexGap { expected: usize, found: usize },

    #[error("non-positive {name} at n={index}")]
    NonPositive { name: &'static str, index: usize },

    #[error("coefficient table too short: index {requested} requested, {available} rows and no tail extension")]
    TailRequired { requested: usize, available: usize },

    #[error("coefficients leave the normal floating-point range at n={index}")]
    Underflow { index: usize },

    #[error("coefficient table: {0}")]
    Table(String),

    #[error(
        "top-{k} eigenvalues did not stabilize by N={n_max} (worst index {worst_index}, relative change {change:e})"
    )]
    Convergence {
        k: usize,
        n_max: usize,
        worst_index: usize,
        change: f64,
    },

    #[error("Christoffel and eigenvector weights disagree at node {index} of N={size}: relative {discrepancy:e}")]
    NumericalConsistency {
        size: usize,
        index: usize,
        discrepancy: f64,
    },

    #[error("tail remainder {remainder:e} exceeds tolerance {tolerance:e}; increase K")]
    Precision { remainder: f64, tolerance: f64 },

    #[error("precondition violated: {0}")]
    Precondition(String),
}

pub type Result<T> = std::result::Result<T, Error>;
