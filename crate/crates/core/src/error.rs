use thiserror::Error;

/// Errors raised by the geometric and algebraic routines of this crate.
#[derive(Clone, Debug, Error, PartialEq)]
pub enum TransversalError {
    #[error("cannot normalize a zero-length direction")]
    ZeroDirection,

    #[error("dimension mismatch: expected {expected}, found {found}")]
    DimensionMismatch { expected: usize, found: usize },

    #[error("invalid ball {index}: {reason}")]
    InvalidBall { index: usize, reason: String },

    #[error("balls {i} and {j} are not disjoint (center distance {distance}, radius sum {radius_sum})")]
    Overlap {
        i: usize,
        j: usize,
        distance: f64,
        radius_sum: f64,
    },

    #[error("invalid parameter: {0}")]
    InvalidParameter(String),

    #[error("minimax solver did not converge after {iterations} iterations (last slack {last_slack})")]
    SolverFailure { iterations: usize, last_slack: f64 },

    #[error("scene generator gave up after {attempts} attempts: {diagnostics}")]
    GeneratorExhausted { attempts: usize, diagnostics: String },

    #[error("direction is not on the sextic: |sigma| = {value:e} exceeds tolerance {tolerance:e}")]
    NotOnSextic { value: f64, tolerance: f64 },

    #[error("invalid order: {0}")]
    InvalidOrder(String),

    #[error("assignment outside identity domain: {0}")]
    DomainViolation(String),

    #[error("scene parse error at line {line}, column {column}: {message}")]
    SceneParse {
        line: usize,
        column: usize,
        message: String,
    },
}

pub type Result<T> = std::result::Result<T, TransversalError>;
