use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum Error {
    #[error("precision must be at least 64 bits (got {0})")]
    Precision(u32),
    #[error("index violation: {0}")]
    IndexViolation(String),
    #[error("bad quantum numbers: {0}")]
    BadQuantumNumbers(String),
    #[error("invalid channel: {0}")]
    InvalidChannel(String),
    #[error("zero denominator before termination of a hypergeometric series")]
    DegenerateDenominator,
    #[error("u = 0 (or a u-singular point) is not allowed here")]
    DegenerateU,
    #[error("q = 0: the expansion is undefined")]
    DegenerateQ,
    #[error("evaluation point too close to a singular point")]
    SingularPoint,
    #[error("insufficient seeds to reach target {0}")]
    InsufficientSeeds(String),
    #[error("outside the convergence region: {0}")]
    ConvergenceRegionViolated(String),
    #[error("no convergence: {0}")]
    NoConvergence(String),
    #[error("invalid argument: {0}")]
    InvalidArgument(String),
}

pub type Result<T> = std::result::Result<T, Error>;
