use thiserror::Error;

/// Failure modes shared by every module of the crate.
#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum Error {
    #[error("factorization bound exceeded for {0}")]
    BoundExceeded(String),
    #[error("domain error: {0}")]
    Domain(String),
    #[error("Newton condition fails at the given seed")]
    Inconclusive,
    #[error("precision exhausted: {0}")]
    PrecisionExhausted(String),
    #[error("degenerate field: {0}")]
    DegenerateField(String),
    #[error("ambient conductor {ambient} lacks the roots of unity of order {needed}")]
    AmbientTooSmall { ambient: u64, needed: u64 },
    #[error("invariant evaluation unsupported: {0}")]
    EvaluationUnsupported(String),
    #[error("search effort exceeded after {0} nodes")]
    EffortExceeded(u64),
    #[error("enumeration budget exceeded: {0}")]
    BudgetExceeded(String),
    #[error("deadline reached")]
    Cancelled,
}

pub type Result<T> = std::result::Result<T, Error>;

pub(crate) fn domain<T>(msg: impl Into<String>) -> Result<T> {
    Err(Error::Domain(msg.into()))
}
