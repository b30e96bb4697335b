use alloc::string::String;
use core::fmt;

/// Errors raised by the core algorithms.
#[derive(Debug, Clone, PartialEq)]
pub enum Error {
    /// A parameter is outside its admissible range.
    InvalidParameter(String),
    /// A radial table is malformed (not starting at 0, unsorted, increasing values...).
    InvalidProfile(String),
    /// The maximum value of the connection function is zero.
    DegenerateProfile,
    /// Dimensions of two inputs disagree.
    DimensionMismatch { expected: usize, found: usize },
    /// Exact enumeration requested beyond its size bound.
    TooLarge { size: usize, max: usize },
    /// A regime formula produced a non-positive target.
    DegenerateTarget { term: &'static str, value: f64 },
    /// Adaptive quadrature ran out of cells before reaching the tolerance.
    ToleranceNotReached { value: f64, error_estimate: f64, cells: usize },
}

impl fmt::Display for Error {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Error::InvalidParameter(msg) => write!(f, "invalid parameter: {msg}"),
            Error::InvalidProfile(msg) => write!(f, "invalid radial profile: {msg}"),
            Error::DegenerateProfile => write!(f, "connection function has zero maximum value"),
            Error::DimensionMismatch { expected, found } => {
                write!(f, "dimension mismatch: expected {expected}, found {found}")
            }
            Error::TooLarge { size, max } => write!(f, "input of size {size} exceeds the bound {max}"),
            Error::DegenerateTarget { term, value } => {
                write!(f, "regime target is not positive ({term} = {value})")
            }
            Error::ToleranceNotReached { value, error_estimate, cells } => write!(
                f,
                "tolerance not reached after {cells} cells (best estimate {value}, error {error_estimate})"
            ),
        }
    }
}

impl core::error::Error for Error {}
