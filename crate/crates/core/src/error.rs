use thiserror::Error;

/// Everything that can go wrong while evaluating characters or checking identities.
#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum Error {
    #[error("invalid field configuration: {0}")]
    InvalidConfig(String),
    #[error("value is indistinguishable from zero at precision {precision}")]
    IndistinguishableFromZero { precision: u32 },
    #[error("legendre symbol of a residue divisible by p")]
    ZeroInput,
    #[error("element is not a square")]
    NotASquare,
    #[error("element is not invertible (positive valuation)")]
    NotInvertible,
    #[error("precision exhausted: {0}")]
    PrecisionExhausted(String),
    #[error("pair ({a}, {b}) does not satisfy a^2 - eps*b^2 = 1 mod p^N")]
    NotOnTorus { a: u64, b: u64 },
    #[error("element is not near the identity")]
    NotNear,
    #[error("element is not far from the identity")]
    NotFar,
    #[error("no character formula is available for elements in -G_0+ (anti-near)")]
    AntiNearUnsupported,
    #[error("value is not determined by the available character formulas: {0}")]
    Undetermined(String),
    #[error("character level {level} is not regular modulo {modulus}")]
    NonRegularLevel { level: u64, modulus: u64 },
    #[error("sampler gave up after {attempts} attempts")]
    SamplingBudgetExceeded { attempts: u32 },
    #[error("conductor mismatch: {0} vs {1}")]
    ConductorMismatch(u64, u64),
    #[error("invalid argument: {0}")]
    InvalidArgument(String),
}

pub type Result<T> = std::result::Result<T, Error>;
