use thiserror::Error;

/// Errors raised by the arithmetic, formula and oracle layers.
#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum Error {
    #[error("invalid field: {0}")]
    InvalidField(String),
    #[error("inversion of zero in F_q")]
    ZeroInverse,
    #[error("squareness of zero is undefined")]
    ZeroSquareClass,
    #[error("division by the zero polynomial")]
    DivisionByZero,
    #[error("gcd(0, 0) is undefined")]
    GcdOfZeros,
    #[error("operation undefined for the zero polynomial")]
    ZeroPolynomial,
    #[error("modulus must be monic of degree >= 1")]
    InvalidModulus,
    #[error("polynomial is not irreducible")]
    Reducible,
    #[error("arguments are not coprime")]
    NotCoprime,
    #[error("invalid quadratic form: {0}")]
    InvalidForm(String),
    #[error("degenerate Gram matrix")]
    Degenerate,
    #[error("parameter out of range: {0}")]
    OutOfRange(String),
    #[error("unsupported range: {0}")]
    Unsupported(String),
    #[error("non-integral value where an integer was required: {0}")]
    NonIntegral(String),
    #[error("inconsistent counts: {0}")]
    Inconsistent(String),
    #[error("enumeration budget exceeded: {needed} > {budget}; use convolution_count")]
    BudgetExceeded { needed: u128, budget: u128 },
    #[error("memory budget exceeded: {needed} counters > {budget}")]
    MemoryExceeded { needed: u128, budget: u128 },
}

pub type Result<T> = std::result::Result<T, Error>;
