use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum Error {
    #[error("c must be in (0,1/2]")]
    InvalidC,
    #[error("numerator {a} out of range for prime {p}")]
    NumeratorOutOfRange { p: u64, a: u64 },
    #[error("bound must be at least 2, got {0}")]
    BoundTooSmall(u64),
    #[error("sequence lacks prime {0}")]
    MissingPrime(u64),
    #[error("invalid sequence: {0}")]
    InvalidSequence(String),
    #[error("invalid range: {0}")]
    InvalidRange(String),
    #[error("epsilon must be in (0,1), got {0}")]
    InvalidEpsilon(String),
    #[error("budget exhausted at block {block}: uncovered {uncovered} > {epsilon} with all primes up to {max_bound}")]
    BudgetExhausted {
        block: usize,
        max_bound: u64,
        epsilon: String,
        uncovered: String,
    },
    #[error("range too large for exact sweep: {0}")]
    RangeTooLarge(String),
    #[error("denominator too large for exact sweep: {0}")]
    DenominatorTooLarge(String),
    #[error("x too imprecise for bound {bound}: eta*bound must be below 1/4")]
    ImpreciseApproximant { bound: u64 },
    #[error("unknown psi function {0:?} (known: log, loglog, sqrt)")]
    UnknownPsi(String),
    #[error("{0}")]
    Parse(String),
}

pub type Result<T, E = Error> = std::result::Result<T, E>;
