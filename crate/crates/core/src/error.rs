use thiserror::Error;

/// Errors raised by the exact maps, traces and the flow integrator.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum LoewnerError {
    #[error("domain error: {0}")]
    Domain(String),

    #[error("point {re}+{im}i lies on the slit [0, i2√t]; the square-root branch is ambiguous there")]
    OnSlit { re: f64, im: f64 },

    #[error("singularity: {0}")]
    Singularity(String),

    #[error("branch error: {0}")]
    Branch(String),

    #[error("continuation failed at t = {t}: {reason}")]
    Continuation { t: f64, reason: String },

    #[error("integrator step underflow at t = {t} (h = {h})")]
    StepUnderflow { t: f64, h: f64 },

    #[error("trace extrapolation did not converge: disagreement {disagreement} exceeds {limit}")]
    Extrapolation { disagreement: f64, limit: f64 },

    #[error("insufficient data: {0}")]
    InsufficientData(String),
}

pub type Result<T, E = LoewnerError> = std::result::Result<T, E>;
