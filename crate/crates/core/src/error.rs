use alloc::string::String;
use core::fmt;

pub type Result<T> = core::result::Result<T, Error>;

/// Everything that can go wrong inside the library.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Error {
    /// Malformed polynomial text. `offset` is a byte offset into the input.
    Syntax { offset: usize, message: String },
    UnknownVariable { offset: usize, name: String },
    BadExponent { offset: usize },
    NvarsMismatch { left: usize, right: usize },
    VariableOutOfRange { index: usize, nvars: usize },
    DimensionMismatch { expected: usize, found: usize },
    NotHomogeneous,
    ZeroPolynomial,
    ConstantPolynomial,
    InvalidArgument(String),
    /// A function that must be positive at an evaluation point is not.
    NonPositive(String),
    Asymmetric,
    NotIrreducible,
    NoConvergence { iterations: usize },
    TooLarge { what: &'static str, size: u128, cap: u128 },
    /// A matrix entry outside `Z_+[x]`.
    BadMatrixEntry { row: usize, col: usize },
}

impl fmt::Display for Error {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Error::Syntax { offset, message } => {
                write!(f, "syntax error at byte {}: {}", offset, message)
            }
            Error::UnknownVariable { offset, name } => {
                write!(f, "unknown variable '{}' at byte {}", name, offset)
            }
            Error::BadExponent { offset } => {
                write!(f, "exponent at byte {} must be a nonnegative integer", offset)
            }
            Error::NvarsMismatch { left, right } => {
                write!(f, "variable count mismatch: {} vs {}", left, right)
            }
            Error::VariableOutOfRange { index, nvars } => {
                write!(f, "variable index {} out of range for {} variables", index, nvars)
            }
            Error::DimensionMismatch { expected, found } => {
                write!(f, "dimension mismatch: expected {}, found {}", expected, found)
            }
            Error::NotHomogeneous => f.write_str("polynomial is not homogeneous"),
            Error::ZeroPolynomial => f.write_str("zero polynomial not allowed here"),
            Error::ConstantPolynomial => f.write_str("constant polynomial not allowed here"),
            Error::InvalidArgument(msg) => write!(f, "invalid argument: {}", msg),
            Error::NonPositive(msg) => write!(f, "not positive: {}", msg),
            Error::Asymmetric => f.write_str("matrix is not symmetric within tolerance"),
            Error::NotIrreducible => f.write_str("matrix is not irreducible"),
            Error::NoConvergence { iterations } => {
                write!(f, "no convergence after {} iterations", iterations)
            }
            Error::TooLarge { what, size, cap } => {
                write!(f, "{} too large: {} exceeds cap {}", what, size, cap)
            }
            Error::BadMatrixEntry { row, col } => write!(
                f,
                "matrix entry ({}, {}) must have nonnegative integer coefficients",
                row, col
            ),
        }
    }
}

impl core::error::Error for Error {}
