use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum Error {
    #[error("precondition violated: {0}")]
    Precondition(String),
    #[error("materialization cap exceeded: need {needed} coefficients, cap is {cap}")]
    CapExceeded { needed: String, cap: u64 },
    #[error("search budget exceeded: {subsets} subsets requested, budget is {budget}")]
    BudgetExceeded { subsets: String, budget: u64 },
    #[error("polynomial is not divisible by the given divisor")]
    NotDivisible,
    #[error("series is not invertible: constant term has no inverse")]
    NotInvertible,
    #[error("truncation orders differ: {left} vs {right}")]
    OrderMismatch { left: usize, right: usize },
    #[error("verification failed: {0}")]
    VerificationFailed(String),
    #[error("value out of supported range: {0}")]
    OutOfRange(String),
    #[error("cannot parse integer: {0}")]
    Parse(String),
}

impl Error {
    /// Short stable identifier, printed by the CLI on failure.
    pub fn name(&self) -> &'static str {
        match self {
            Error::Precondition(_) => "Precondition",
            Error::CapExceeded { .. } => "CapExceeded",
            Error::BudgetExceeded { .. } => "BudgetExceeded",
            Error::NotDivisible => "NotDivisible",
            Error::NotInvertible => "NotInvertible",
            Error::OrderMismatch { .. } => "OrderMismatch",
            Error::VerificationFailed(_) => "VerificationFailed",
            Error::OutOfRange(_) => "OutOfRange",
            Error::Parse(_) => "Parse",
        }
    }
}
