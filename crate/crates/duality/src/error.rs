//! Error type shared across the crate.

use std::fmt;

/// Errors reported by state construction, gate application, program
/// evaluation, parsing and the optics assembly.
#[derive(Debug, Clone, PartialEq)]
pub enum Error {
    /// Two operands act on different register sizes.
    DimensionMismatch { left: usize, right: usize },
    /// A basis index or target is outside the register.
    IndexOutOfRange { index: usize, dim: usize },
    /// Register size exceeds the configured memory cap.
    RegisterTooLarge { n_dubits: usize, cap: usize },
    /// An amplitude is NaN or infinite.
    NonFiniteAmplitude,
    /// Squared norm exceeds 1 (beyond tolerance); only sub-normalized
    /// states are representable.
    NormTooLarge { norm_sq: f64 },
    /// A gate matrix failed the unitarity check at construction.
    NotUnitary { deviation: f64 },
    /// Bad gate name, parameter count or target list.
    InvalidGate(String),
    /// A divider specification violates a structural rule.
    InvalidDivider(String),
    /// Sub-waves with distinct coherence tags were passed to a coherent
    /// combiner; incoherent read-out must go through `detection_intensity`.
    MixedCoherenceTags,
    /// An operation that needs at least one dubit was given an empty register.
    EmptyRegister,
    /// Measurement policy parameters out of range.
    InvalidPolicy(String),
    /// Program- or DIMACS-text parse failure, with 1-based line number.
    Parse { line: usize, message: String },
    /// Optical assembly produced inconsistent mode labels.
    LabelMismatch(String),
    /// An internal exactness check failed; indicates a bug in the engine.
    Internal(String),
}

impl fmt::Display for Error {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Error::DimensionMismatch { left, right } => {
                write!(f, "dimension mismatch: {left} vs {right} dubits")
            }
            Error::IndexOutOfRange { index, dim } => {
                write!(f, "index {index} out of range for dimension {dim}")
            }
            Error::RegisterTooLarge { n_dubits, cap } => {
                write!(f, "register of {n_dubits} dubits exceeds cap of {cap}")
            }
            Error::NonFiniteAmplitude => write!(f, "non-finite amplitude (NaN or Inf)"),
            Error::NormTooLarge { norm_sq } => {
                write!(
                    f,
                    "squared norm {norm_sq} exceeds 1; state is super-normalized"
                )
            }
            Error::NotUnitary { deviation } => {
                write!(
                    f,
                    "matrix is not unitary (max |M\u{2020}M - I| = {deviation:e})"
                )
            }
            Error::InvalidGate(msg) => write!(f, "invalid gate: {msg}"),
            Error::InvalidDivider(msg) => write!(f, "invalid divider: {msg}"),
            Error::MixedCoherenceTags => write!(
                f,
                "sub-waves carry distinct coherence tags; coherent combination is \
                 undefined, use detection_intensity for incoherent read-out"
            ),
            Error::EmptyRegister => write!(f, "operation requires a non-empty register"),
            Error::InvalidPolicy(msg) => write!(f, "invalid measurement policy: {msg}"),
            Error::Parse { line, message } => write!(f, "parse error at line {line}: {message}"),
            Error::LabelMismatch(msg) => write!(f, "optical label mismatch: {msg}"),
            Error::Internal(msg) => write!(f, "internal invariant violated: {msg}"),
        }
    }
}

impl std::error::Error for Error {}

pub type Result<T> = std::result::Result<T, Error>;
