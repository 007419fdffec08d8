use thiserror::Error;

/// Errors raised by the deformed-calculus and oscillator routines.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum PqError {
    #[error("invalid parameter: {0}")]
    InvalidParameter(String),

    #[error("non-finite result at n = {n}")]
    NonFiniteResult { n: i64 },

    #[error("negative power n = {n} of a zero base (p*q = 0)")]
    ZeroBaseNegativePower { n: i64 },

    #[error("pq-number [{m}] vanishes and appears in a denominator")]
    DivisionByZeroPqNumber { m: i64 },

    #[error("series diverged after {terms} terms (last |term| = {last_term:e})")]
    SeriesDiverged { terms: usize, last_term: f64 },

    #[error("denominator magnitude {magnitude:e} is below the floor")]
    DenominatorUnderflow { magnitude: f64 },

    #[error("pq-number [{n}] = {value} is negative; no real Fock representation")]
    NegativePqNumber { n: i64, value: f64 },

    #[error("dimension {dim} is too small (need at least 2)")]
    InvalidDimension { dim: usize },

    #[error("coherent tail mass {tail:e} exceeds tolerance {tol:e} at dim {dim}")]
    TailTooLarge { tail: f64, tol: f64, dim: usize },

    #[error("self-check `{what}` failed: gap {gap:e}")]
    SelfCheckFailed { what: &'static str, gap: f64 },

    #[error("deformation parameter {which} is zero")]
    ZeroDeformationParameter { which: &'static str },

    #[error("index {index} out of range for dim {dim}")]
    IndexOutOfRange { index: i64, dim: usize },

    #[error("state is not normalized (norm^2 = {norm_sqr})")]
    NotNormalized { norm_sqr: f64 },

    #[error("concurrence^2 = {value} lies outside [0, 1]")]
    ConcurrenceOutOfRange { value: f64 },
}

impl PqError {
    /// Stable machine-readable name of the variant.
    pub fn kind(&self) -> &'static str {
        match self {
            PqError::InvalidParameter(_) => "InvalidParameter",
            PqError::NonFiniteResult { .. } => "NonFiniteResult",
            PqError::ZeroBaseNegativePower { .. } => "ZeroBaseNegativePower",
            PqError::DivisionByZeroPqNumber { .. } => "DivisionByZeroPqNumber",
            PqError::SeriesDiverged { .. } => "SeriesDiverged",
            PqError::DenominatorUnderflow { .. } => "DenominatorUnderflow",
            PqError::NegativePqNumber { .. } => "NegativePqNumber",
            PqError::InvalidDimension { .. } => "InvalidDimension",
            PqError::TailTooLarge { .. } => "TailTooLarge",
            PqError::SelfCheckFailed { .. } => "SelfCheckFailed",
            PqError::ZeroDeformationParameter { .. } => "ZeroDeformationParameter",
            PqError::IndexOutOfRange { .. } => "IndexOutOfRange",
            PqError::NotNormalized { .. } => "NotNormalized",
            PqError::ConcurrenceOutOfRange { .. } => "ConcurrenceOutOfRange",
        }
    }
}

pub type Result<T> = std::result::Result<T, PqError>;
