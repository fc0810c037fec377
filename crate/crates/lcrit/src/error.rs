//! Crate-wide error type. Messages are module-qualified so CLI output
//! points at the subsystem that rejected the request.

use thiserror::Error;

#[derive(Debug, Error)]
pub enum Error {
    /// A parameter is outside the documented domain of an operation.
    #[error("{module}: domain error: {message}")]
    Domain { module: &'static str, message: String },

    /// Evaluation requested at a pole (e.g. the Hurwitz zeta at s = 1).
    #[error("{module}: pole at {location}")]
    Pole { module: &'static str, location: String },

    /// A series or quadrature could not reach the requested accuracy.
    #[error("{module}: requested accuracy {requested:.3e} unreachable (achieved {achieved:.3e})")]
    Accuracy {
        module: &'static str,
        requested: f64,
        achieved: f64,
    },

    /// Evaluation too close to a zero of L(s, chi) for an operation that
    /// is singular there.
    #[error("lfunc: evaluation within {distance:.3e} of a zero of L (tolerance {tolerance:.3e})")]
    ZeroProximity { distance: f64, tolerance: f64 },

    /// A quantity that must be real (up to tolerance) came back with a
    /// large imaginary residue; signals drift in the underlying evaluation.
    #[error("{module}: numeric health: imaginary residue {residue:.3e} exceeds tolerance {tolerance:.3e}")]
    NumericHealth {
        module: &'static str,
        residue: f64,
        tolerance: f64,
    },

    /// Zero scan could not certify completeness after maximal refinement.
    #[error("zeros: incomplete list: argument principle counts {expected} zeros but scan found {found}; gap suspected in [{gap_lo:.6}, {gap_hi:.6}]")]
    IncompleteZeroList {
        expected: i64,
        found: i64,
        gap_lo: f64,
        gap_hi: f64,
    },

    /// Zero-file parse failure.
    #[error("zeros: parse error at line {line}: {message}")]
    ZeroFileParse { line: usize, message: String },

    /// Zero file describes a different character than requested.
    #[error("zeros: character mismatch: file has (q={file_q}, index={file_index}), requested (q={q}, index={index})")]
    CharacterMismatch {
        file_q: u32,
        file_index: u32,
        q: u32,
        index: u32,
    },

    /// Construction of a principal or imprimitive character was attempted.
    #[error("character: {message}")]
    BadCharacter { message: String },

    /// The zero list does not reach high enough for the requested tail tolerance.
    #[error("explicit_formula: zero coverage to height {have:.3} insufficient; need at least {need:.3}")]
    InsufficientZeroCoverage { have: f64, need: f64 },

    /// Richardson extrapolation of the half-limit did not converge.
    #[error("iterates: half-limit extrapolation non-convergent; samples {samples:?}")]
    NonConvergentExtrapolation { samples: Vec<f64> },

    /// sigma = 1/2 or sigma = 1 where the envelope formulas are singular.
    #[error("bounds: singular parameter sigma = {sigma} (mu and 1/(1-sigma) blow up)")]
    SingularParameter { sigma: f64 },

    #[error("io: {0}")]
    Io(#[from] std::io::Error),
}

pub type Result<T> = std::result::Result<T, Error>;
