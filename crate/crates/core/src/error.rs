//! Error type shared by every module of the crate.

use std::fmt;

/// Crate-wide result alias.
pub type Result<T> = std::result::Result<T, Error>;

/// Everything that can go wrong while evaluating delay series, initial
/// conditions, quadrature, residual checks or the oracle.
#[derive(Debug, Clone, PartialEq)]
pub enum Error {
    /// An argument is outside the mathematical domain of the operation.
    Domain { context: &'static str },
    /// Gamma overflow: `z > 171` overflows an f64.
    GammaOverflow { z: f64 },
    /// A single series term exceeds the representable f64 range.
    /// Carries the index of the offending term.
    TermOverflow { index: u32 },
    /// `floor(t / tau)` exceeds the term cap.
    TermCount { terms: u64, cap: u64 },
    /// A Hermite recurrence intermediate left the representable range.
    HermiteOverflow { order: u32 },
    /// Two quadrature refinement levels disagree beyond the allowed relative
    /// tolerance.
    QuadratureAccuracy { disagreement: f64 },
    /// The imaginary part of a spectral evaluation exceeds the diagnostic
    /// threshold.
    SpectralDiagnostic { imag: f64 },
    /// An oracle or grid configuration violates its preconditions.
    Config { message: String },
    /// `compare` was handed fields on different grids.
    GridMismatch,
    /// An evaluator failed at a specific grid point.
    AtGridPoint {
        ix: usize,
        it: usize,
        source: Box<Error>,
    },
}

impl Error {
    /// True for the overflow family (CLI exit code 3).
    pub fn is_overflow(&self) -> bool {
        match self {
            Error::GammaOverflow { .. }
            | Error::TermOverflow { .. }
            | Error::HermiteOverflow { .. } => true,
            Error::AtGridPoint { source, .. } => source.is_overflow(),
            _ => false,
        }
    }

    /// Index of the failing series term, when the error carries one.
    pub fn term_index(&self) -> Option<u32> {
        match self {
            Error::TermOverflow { index } => Some(*index),
            Error::AtGridPoint { source, .. } => source.term_index(),
            _ => None,
        }
    }
}

impl fmt::Display for Error {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Error::Domain { context } => write!(f, "domain error: {context}"),
            Error::GammaOverflow { z } => {
                write!(f, "gamma overflow: Gamma({z}) exceeds f64 range (z > 171)")
            }
            Error::TermOverflow { index } => {
                write!(f, "series term overflow at index n = {index}")
            }
            Error::TermCount { terms, cap } => {
                write!(
                    f,
                    "term count {terms} exceeds cap {cap} (floor(t/tau) too large)"
                )
            }
            Error::HermiteOverflow { order } => {
                write!(f, "Hermite recurrence overflow at order {order}")
            }
            Error::QuadratureAccuracy { disagreement } => {
                write!(
                    f,
                    "quadrature refinement levels disagree by {disagreement:e}"
                )
            }
            Error::SpectralDiagnostic { imag } => {
                write!(
                    f,
                    "spectral evaluation has non-negligible imaginary part {imag:e}"
                )
            }
            Error::Config { message } => write!(f, "configuration error: {message}"),
            Error::GridMismatch => write!(f, "fields are defined on different grids"),
            Error::AtGridPoint { ix, it, source } => {
                write!(f, "at grid point (ix={ix}, it={it}): {source}")
            }
        }
    }
}

impl std::error::Error for Error {}
