//! Error type shared by every module.

use thiserror::Error;

/// Failures raised by the library.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum MlzError {
    #[error("domain error: {0}")]
    Domain(String),

    #[error("index {index} outside 0..={max}")]
    Index { index: usize, max: usize },

    #[error("occupations sum to {total}, exceeding N = {n}")]
    OccupationOverflow { total: usize, n: usize },

    #[error("series did not converge within {terms} terms")]
    Convergence { terms: usize },

    #[error("pole of the Gamma function at {0}")]
    Pole(f64),

    #[error("singular point: {0}")]
    Singularity(String),

    #[error("step size underflow at t = {t} (h = {h:e})")]
    StepUnderflow { t: f64, h: f64 },

    #[error("step limit of {0} reached")]
    StepLimit(usize),

    #[error("norm drift {drift:e} exceeds budget {budget:e}")]
    NormDrift { drift: f64, budget: f64 },

    #[error("amplitude too small for a phase: |S|^2 = {0:e}")]
    AmplitudeTooSmall(f64),

    #[error("consistency violation: {0}")]
    Consistency(String),

    #[error("trajectory left the physical domain: {0}")]
    BoundaryBreach(String),

    #[error("root bracketing failed: {0}")]
    Bracket(String),

    #[error("ambiguous adiabatic labelling at t = {0}; enlarge the window")]
    Labelling(f64),
}

pub type Result<T> = std::result::Result<T, MlzError>;

pub(crate) fn domain<T>(msg: impl Into<String>) -> Result<T> {
    Err(MlzError::Domain(msg.into()))
}
