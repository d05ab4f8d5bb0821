use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum Error {
    #[error("range [{lo}, {hi}] exceeds the prime cap {cap}")]
    RangeTooLarge { lo: u64, hi: u64, cap: u64 },

    #[error("invalid range: lo {lo} > hi {hi}")]
    InvalidRange { lo: u64, hi: u64 },

    #[error("{0} is not an odd prime")]
    NotOddPrime(u64),

    #[error("invalid family: {0}")]
    InvalidFamily(String),

    #[error("domain error: {0}")]
    Domain(String),

    #[error("instance too large: {0}")]
    TooLarge(String),

    #[error("family is not admissible: {0}")]
    NotAdmissible(String),

    #[error("no signature: the family has no even interaction sets")]
    NoSignature,

    #[error("arithmetic overflow while {0}")]
    Overflow(String),

    #[error("unsupported target: {0}")]
    UnsupportedTarget(String),
}
