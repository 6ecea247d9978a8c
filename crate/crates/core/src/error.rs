use thiserror::Error;

/// Errors produced by the library.
#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("coefficient of term {index} is zero")]
    ZeroCoefficient { index: usize },

    #[error("terms {first} and {second} share the same exponent vector")]
    DuplicateExponent { first: usize, second: usize },

    #[error("term {index} has {found} exponents, expected {expected}")]
    DimensionMismatch {
        index: usize,
        expected: usize,
        found: usize,
    },

    #[error("invalid input: {0}")]
    InvalidInput(String),

    #[error("coordinate {index} is not strictly positive")]
    NonpositiveCoordinate { index: usize },

    #[error("logarithm or power of a non-positive base")]
    NonpositiveBase,

    #[error("{subsets} minors requested, budget allows {budget}")]
    SubsetBudgetExceeded { subsets: u128, budget: u128 },

    #[error("matrix is singular at the working precision")]
    SingularMatrix,

    #[error("monomial map is not invertible")]
    SingularMap,

    #[error("fewnomial is outside the supported class: {0}")]
    NotInClass(String),

    #[error("sign precondition violated: {0}")]
    SignPreconditionViolated(String),

    #[error("precision cap of {cap} bits reached without certifying the result")]
    PrecisionExhausted { cap: u32 },

    #[error("polynomial has degree {degree}, expected at most 4")]
    DegreeNotFour { degree: u32 },

    #[error("no instance found after {attempts} attempts")]
    ExhaustedAttempts { attempts: usize },

    #[error("parse error at byte {position}: {message}")]
    ParseError { position: usize, message: String },
}

pub type Result<T, E = Error> = std::result::Result<T, E>;
