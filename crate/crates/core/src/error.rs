use alloc::string::String;
use core::fmt;

/// Errors produced by the numerical and symbolic routines of this crate.
#[derive(Debug, Clone, PartialEq)]
pub enum Error {
    /// The modulus parameter lies outside `[0, 1)`.
    InvalidModulus(f64),
    /// A spatial argument or energy was NaN or infinite.
    NonFiniteArgument(f64),
    /// Potential or operator parameters are unusable.
    InvalidParameters(String),
    /// The adaptive integrator could not keep the local error under tolerance.
    StepUnderflow { energy: f64, m: f64, x: f64 },
    /// No finite invariant subspace was found up to the requested degree.
    NotClosed { max_k: usize },
    /// An eigenvalue of a QES matrix came out complex.
    ComplexEigenvalue { re: f64, im: f64 },
    /// A sign change of the eigenfunction could not be resolved on the grid.
    AmbiguousNode { energy: f64, x: f64 },
    /// The requested eigen-index does not exist.
    IndexOutOfRange { index: usize, len: usize },
    /// A root bracket could not be established.
    NoBracket { lo: f64, hi: f64 },
}

impl fmt::Display for Error {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Error::InvalidModulus(m) => write!(f, "modulus parameter m = {m} is outside [0, 1)"),
            Error::NonFiniteArgument(x) => write!(f, "non-finite argument {x}"),
            Error::InvalidParameters(msg) => write!(f, "invalid parameters: {msg}"),
            Error::StepUnderflow { energy, m, x } => write!(
                f,
                "integrator step underflow at x = {x} (E = {energy}, m = {m})"
            ),
            Error::NotClosed { max_k } => {
                write!(f, "no invariant subspace found up to degree {max_k}")
            }
            Error::ComplexEigenvalue { re, im } => {
                write!(f, "complex eigenvalue {re} + {im}i in QES matrix")
            }
            Error::AmbiguousNode { energy, x } => {
                write!(f, "ambiguous node near x = {x} for E = {energy}")
            }
            Error::IndexOutOfRange { index, len } => {
                write!(f, "index {index} out of range for {len} entries")
            }
            Error::NoBracket { lo, hi } => write!(f, "no sign change bracketed on [{lo}, {hi}]"),
        }
    }
}

impl core::error::Error for Error {}

pub type Result<T> = core::result::Result<T, Error>;
