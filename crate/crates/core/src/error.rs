use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum Error {
    #[error("{0} is not a prime p >= 3")]
    InvalidPrime(u64),
    #[error("domain error: {0}")]
    Domain(String),
    #[error("insufficient precision: {0}")]
    InsufficientPrecision(String),
    #[error("series is not a unit: constant term vanishes")]
    NonUnit,
    #[error("all known coefficients vanish; the Newton polygon is indeterminate")]
    IndeterminatePolygon,
    #[error("pole: {0}")]
    Pole(String),
    #[error("division by zero")]
    DivisionByZero,
    #[error("model must be normalized: {0}")]
    NormalizationRequired(String),
    #[error("bad reduction at p = {p}: {reason}")]
    BadReduction { p: u64, reason: String },
    #[error("degenerate operator: {0}")]
    DegenerateOperator(String),
    #[error("no nice index set among the first {0} coefficients (reductions are dependent)")]
    SearchExhausted(usize),
    #[error("not algebraic: {0}")]
    NotAlgebraic(String),
    #[error("internal contradiction: {0}")]
    InternalContradiction(String),
    #[error("invalid input: {0}")]
    InvalidInput(String),
}

impl Error {
    /// Exit-code class used by the command-line driver: 1 for precision or
    /// degeneracy failures, 2 for invalid input or failed hypotheses.
    pub fn exit_code(&self) -> i32 {
        match self {
            Error::InsufficientPrecision(_)
            | Error::NonUnit
            | Error::IndeterminatePolygon
            | Error::DegenerateOperator(_)
            | Error::SearchExhausted(_)
            | Error::NotAlgebraic(_)
            | Error::Pole(_)
            | Error::InternalContradiction(_) => 1,
            _ => 2,
        }
    }
}

pub type Result<T> = std::result::Result<T, Error>;
