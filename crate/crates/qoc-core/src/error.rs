//! Error type shared by all modules.

use alloc::string::String;
use core::fmt;

/// Errors raised by construction and by the numerical operations.
#[derive(Debug, Clone, PartialEq)]
pub enum Error {
    /// Two operands live in different Hilbert-space dimensions.
    DimensionMismatch { expected: usize, found: usize },
    /// The number of control values does not match the generator's controls.
    ControlCountMismatch { expected: usize, found: usize },
    /// A matrix required to be Hermitian is not, within tolerance.
    NotHermitian { defect: f64 },
    /// A matrix required to be unitary is not, within tolerance.
    NotUnitary { defect: f64 },
    /// A density operator violates the trace-one constraint.
    NotTraceOne { trace: f64 },
    /// A density operator has a negative eigenvalue beyond tolerance.
    NotPositive { min_eigenvalue: f64 },
    /// A NaN or infinity appeared where a finite number is required.
    NonFinite(&'static str),
    /// A scalar or structural parameter is out of its admissible range.
    InvalidParameter(String),
}

impl fmt::Display for Error {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Error::DimensionMismatch { expected, found } => {
                write!(f, "dimension mismatch: expected {expected}, found {found}")
            }
            Error::ControlCountMismatch { expected, found } => {
                write!(
                    f,
                    "control count mismatch: generator has {expected} controls, got {found} values"
                )
            }
            Error::NotHermitian { defect } => {
                write!(f, "matrix is not Hermitian (max |M - M^dag| = {defect:e})")
            }
            Error::NotUnitary { defect } => {
                write!(f, "matrix is not unitary (max |U^dag U - I| = {defect:e})")
            }
            Error::NotTraceOne { trace } => {
                write!(f, "state trace is {trace}, expected 1")
            }
            Error::NotPositive { min_eigenvalue } => {
                write!(f, "state has negative eigenvalue {min_eigenvalue:e}")
            }
            Error::NonFinite(what) => write!(f, "non-finite value in {what}"),
            Error::InvalidParameter(msg) => write!(f, "invalid parameter: {msg}"),
        }
    }
}

#[cfg(feature = "std")]
impl std::error::Error for Error {}

/// Shorthand for `Error::InvalidParameter` with a formatted message.
#[macro_export]
macro_rules! invalid_param {
    ($($arg:tt)*) => {
        $crate::Error::InvalidParameter(alloc::format!($($arg)*))
    };
}
