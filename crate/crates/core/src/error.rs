use thiserror::Error;

pub type Result<T, E = DecayError> = std::result::Result<T, E>;

/// Every failure the toolkit can report.
///
/// Variants are grouped by what the caller can do about them: input errors
/// (bad files, mismatched sizes), assumption failures (the system is outside
/// the class the decay bounds cover), and numerical failures.
#[derive(Debug, Error, Clone, PartialEq)]
pub enum DecayError {
    #[error("invalid input: {0}")]
    InvalidInput(String),

    #[error("dimension mismatch: stiffness is {stiffness}x{stiffness}, damping is {damping_rows}x{damping_cols}")]
    DimensionMismatch {
        stiffness: usize,
        damping_rows: usize,
        damping_cols: usize,
    },

    #[error("parse error at line {line}: {message}")]
    Parse { line: usize, message: String },

    #[error("i/o error: {0}")]
    Io(String),

    #[error("stiffness is not sectorial: smallest eigenvalue of its Hermitian part is {lambda_min:e} (threshold {threshold:e})")]
    NotSectorial { lambda_min: f64, threshold: f64 },

    #[error("damping is not uniformly accretive: beta = {beta:e}")]
    NotAccretiveDamping { beta: f64 },

    #[error("assumption (C) violated: delta = {delta:e}")]
    AssumptionCViolated { delta: f64 },

    #[error("invalid parameters: {0}")]
    InvalidParams(String),

    #[error("matrix is not positive definite: {0}")]
    NotPositiveDefinite(String),

    #[error("verification failed: {what} (observed {observed:e}, bound {bound:e})")]
    VerificationFailed {
        what: String,
        observed: f64,
        bound: f64,
    },

    #[error("no valid certificate on the search grid")]
    NoValidCertificate,

    #[error("eigensolver failed to converge: {0}")]
    EigensolverFailure(String),

    #[error("pencil is numerically singular at lambda = {re}{im:+}i")]
    SingularPencil { re: f64, im: f64 },

    #[error("insufficient data: {0}")]
    InsufficientData(String),
}

impl DecayError {
    /// Stable machine-readable name for reports.
    pub fn kind(&self) -> &'static str {
        match self {
            DecayError::InvalidInput(_) => "InvalidInput",
            DecayError::DimensionMismatch { .. } => "DimensionMismatch",
            DecayError::Parse { .. } => "ParseError",
            DecayError::Io(_) => "IoError",
            DecayError::NotSectorial { .. } => "NotSectorial",
            DecayError::NotAccretiveDamping { .. } => "NotAccretiveDamping",
            DecayError::AssumptionCViolated { .. } => "AssumptionCViolated",
            DecayError::InvalidParams(_) => "InvalidParams",
            DecayError::NotPositiveDefinite(_) => "NotPositiveDefinite",
            DecayError::VerificationFailed { .. } => "VerificationFailed",
            DecayError::NoValidCertificate => "NoValidCertificate",
            DecayError::EigensolverFailure(_) => "EigensolverFailure",
            DecayError::SingularPencil { .. } => "SingularPencil",
            DecayError::InsufficientData(_) => "InsufficientData",
        }
    }

    /// True for errors caused by malformed input rather than by the system
    /// failing to admit a certificate.
    pub fn is_input_error(&self) -> bool {
        matches!(
            self,
            DecayError::InvalidInput(_)
                | DecayError::DimensionMismatch { .. }
                | DecayError::Parse { .. }
                | DecayError::Io(_)
        )
    }
}

impl From<std::io::Error> for DecayError {
    fn from(err: std::io::Error) -> Self {
        DecayError::Io(err.to_string())
    }
}
