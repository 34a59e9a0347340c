use thiserror::Error;

/// Failures reported by the numerical kernels.
#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("invalid argument: {0}")]
    InvalidArgument(String),

    #[error("quadrature node {index} of {count} did not converge (last step {last_step:e})")]
    NodeSolve { index: usize, count: usize, last_step: f64 },

    #[error("quadrature under-resolved: doubling the rule changed the result by {disagreement:e} (limit {limit:e}): {context}")]
    Resolution {
        disagreement: f64,
        limit: f64,
        context: String,
    },

    #[error("truncation tail {tail:e} exceeds the configured bound {bound:e}")]
    TruncationTail { tail: f64, bound: f64 },

    #[error("integrator exhausted {max_steps} steps at t = {reached} (target {target})")]
    StepLimit {
        max_steps: usize,
        reached: f64,
        target: f64,
    },

    #[error("oracle refuses z = {z:e}: above {limit:e} the closed form is authoritative")]
    OracleRange { z: f64, limit: f64 },

    #[error("profile is not square-integrable: {0}")]
    NotSquareIntegrable(String),

    #[error("fit refused: {0}")]
    Fit(String),

    #[error("shape mismatch: {0}")]
    Shape(String),
}

pub type Result<T> = std::result::Result<T, Error>;
