use thiserror::Error;

/// Errors raised by the risk engine.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum RiskError {
    #[error("sample is empty")]
    EmptySample,

    #[error("shape mismatch: expected {expected}, got {actual}")]
    ShapeMismatch { expected: usize, actual: usize },

    #[error("level {0} is not in the open interval (0, 1)")]
    InvalidLevel(f64),

    #[error("level kind mismatch: {0}")]
    WrongLevelKind(&'static str),

    #[error("invalid weights: {0}")]
    InvalidWeights(String),

    #[error("invalid input: {0}")]
    InvalidInput(String),

    #[error("expectile solver did not converge within {0} iterations")]
    NoConvergence(usize),

    #[error("no sample point lies at or above the elicited quantile")]
    EmptyTail,

    #[error("degenerate denominator in ratio")]
    DegenerateDenominator,

    #[error("insufficient data: need at least {needed} observations, got {got}")]
    InsufficientData { needed: usize, got: usize },

    #[error("scenario set is empty")]
    EmptyScenarioSet,

    #[error("search space exhausted without finding an instance")]
    NotFound,
}

pub type Result<T> = std::result::Result<T, RiskError>;

pub(crate) fn check_len(expected: usize, actual: usize) -> Result<()> {
    if expected != actual {
        return Err(RiskError::ShapeMismatch { expected, actual });
    }
    Ok(())
}
