use thiserror::Error;

/// Errors raised across the library.
///
/// Precondition violations (`InvalidInput`, `BoundExceeded`, `Mismatch`) are
/// distinguished from algorithmic failures so the CLI can map them to
/// different exit codes.
#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum Error {
    #[error("invalid input: {0}")]
    InvalidInput(String),
    #[error("size bound exceeded: {what} = {size} > {limit}")]
    BoundExceeded {
        what: &'static str,
        size: u128,
        limit: u128,
    },
    #[error("mismatched operands: {0}")]
    Mismatch(String),
    #[error("not invertible: {0}")]
    NotInvertible(String),
    #[error("promise violated: {0}")]
    PromiseViolation(String),
    #[error("round budget of {rounds} exhausted: {reason}")]
    BudgetExhausted { rounds: usize, reason: String },
    #[error("verification failed: {0}")]
    VerificationFailed(String),
    #[error("element not in subgroup: {0}")]
    NotInSubgroup(String),
}

impl Error {
    /// True for errors caused by caller input rather than by an algorithm
    /// run that failed to produce a verified answer.
    pub fn is_usage(&self) -> bool {
        matches!(
            self,
            Error::InvalidInput(_) | Error::BoundExceeded { .. } | Error::Mismatch(_)
        )
    }
}

pub type Result<T> = std::result::Result<T, Error>;

pub(crate) fn invalid<T>(msg: impl Into<String>) -> Result<T> {
    Err(Error::InvalidInput(msg.into()))
}

pub(crate) fn check_bound(what: &'static str, size: u128, limit: u128) -> Result<()> {
    if size > limit {
        Err(Error::BoundExceeded { what, size, limit })
    } else {
        Ok(())
    }
}
