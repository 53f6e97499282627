use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum Error {
    #[error("gcd(0, 0) is undefined")]
    GcdOfZeros,
    #[error("2-adic valuation of zero is undefined")]
    ValuationOfZero,
    #[error("d_n is only defined for n >= 1")]
    IndexZero,
    #[error("modulus must be at least 2, got {0}")]
    ModulusTooSmall(u64),
    #[error("{op} requires n >= {min}, got {got}")]
    IndexBelowMinimum { op: &'static str, min: u64, got: u64 },
    #[error("value {0} is below 1/2")]
    BelowHalf(String),
    #[error("zero denominator")]
    ZeroDenominator,
    #[error("series order mismatch: {left} vs {right}")]
    OrderMismatch { left: usize, right: usize },
    #[error("cannot differentiate a series of order 0")]
    ZeroOrder,
    #[error("exp requires a zero constant term")]
    NonZeroConstantTerm,
    #[error("need coefficients a_0..a_{need}, got {got}")]
    InsufficientCoefficients { need: usize, got: usize },
    #[error("enumeration is limited to n <= {max}, got {got}")]
    EnumerationBound { max: u64, got: u64 },
    #[error("limit {got} exceeds the ceiling {max}")]
    LimitTooLarge { max: u64, got: u64 },
    #[error("unknown check: {0}")]
    UnknownCheck(String),
    #[error("empty point list")]
    EmptyPoints,
}

pub type Result<T> = std::result::Result<T, Error>;
