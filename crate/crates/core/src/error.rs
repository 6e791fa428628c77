use thiserror::Error;

use crate::{RInterval, Rational};

/// Errors raised by oracle construction and queries.
///
/// Exhaustion of a query budget is not an error for `decide`/`locate`/`compare`
/// (those report it in their result type); the refinement algorithms that must
/// return a concrete value surface it as [`OracleError::BudgetExhausted`].
#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum OracleError {
    #[error("reciprocal of an interval containing zero: {0}")]
    ZeroInDenominator(RInterval),
    #[error("operation {0} needs a second operand")]
    MissingOperand(&'static str),
    #[error("unsupported domain: {0}")]
    UnsupportedDomain(String),
    #[error("invalid bracket {lo}:{hi}: function has the same strict sign at both ends")]
    InvalidBracket { lo: Rational, hi: Rational },
    #[error("invalid bounds: {0}")]
    InvalidBounds(String),
    #[error("invalid fonsi: {0}")]
    InvalidFonsi(String),
    #[error("invalid zero witness {witness}: {reason}")]
    ZeroWitnessInvalid { witness: RInterval, reason: String },
    #[error("refinement {interval} escaped the function domain {domain}")]
    DomainEscape { interval: RInterval, domain: RInterval },
    #[error("interval separation violated: {0}")]
    SeparationViolated(String),
    #[error("budget exhausted after {spent} refinement rounds")]
    BudgetExhausted { spent: u64 },
}

pub type Result<T, E = OracleError> = std::result::Result<T, E>;
