use alloc::string::String;
use core::fmt;

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Error {
    /// Operands live on phase spaces of different dimension.
    DimensionMismatch { left: usize, right: usize },
    IndexOutOfRange { index: usize, size: usize },
    /// An expansion needs basis elements beyond the truncation.
    TruncationOverflow { degree: u32, cap: u32 },
    /// No index survives the window shrinking; the truncation must grow by
    /// `shortfall` degree levels.
    EmptyWindow { shortfall: u32 },
    /// A lifted operator needs coordinates beyond the truncated `l^2(N)`.
    PairingOverflow { required_dim: u64 },
    AlphabetTooSmall { needed: usize, available: usize },
    /// A chaos expansion left the internal order cap.
    OrderOverflow { order: u32, cap: u32 },
    /// Sum of surds with different radicals.
    IncommensurableSurds,
    ColumnOutsideWindow { column: usize },
    InvalidConfig(String),
}

impl fmt::Display for Error {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Error::DimensionMismatch { left, right } => {
                write!(f, "phase-space dimension mismatch: {left} vs {right}")
            }
            Error::IndexOutOfRange { index, size } => {
                write!(f, "basis index {index} out of range (size {size})")
            }
            Error::TruncationOverflow { degree, cap } => write!(
                f,
                "degree {degree} exceeds the basis truncation (complete up to degree {cap})"
            ),
            Error::EmptyWindow { shortfall } => write!(
                f,
                "validity window is empty; raise the truncation by at least {shortfall} degree level(s)"
            ),
            Error::PairingOverflow { required_dim } => write!(
                f,
                "lifted operator leaves the truncated space; need M >= {required_dim}"
            ),
            Error::AlphabetTooSmall { needed, available } => write!(
                f,
                "need {needed} Cuntz generators but only {available} are materialized"
            ),
            Error::OrderOverflow { order, cap } => {
                write!(f, "chaos order {order} exceeds the internal cap {cap}")
            }
            Error::IncommensurableSurds => {
                f.write_str("sum of surds with different radicals is not representable")
            }
            Error::ColumnOutsideWindow { column } => {
                write!(f, "column {column} is not complete inside the truncation")
            }
            Error::InvalidConfig(msg) => write!(f, "invalid configuration: {msg}"),
        }
    }
}

impl core::error::Error for Error {}
