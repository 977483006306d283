use thiserror::Error;

pub type Result<T> = std::result::Result<T, QhtError>;

#[derive(Debug, Error)]
pub enum QhtError {
    #[error("matrix is not square: {rows}x{cols}")]
    NotSquare { rows: usize, cols: usize },

    #[error("matrix contains a non-finite entry at ({row}, {col})")]
    NonFinite { row: usize, col: usize },

    #[error("matrix is not Hermitian: max |A - A^H| = {deviation:e}")]
    NotHermitian { deviation: f64 },

    #[error("not a density operator: trace = {trace}, minimum eigenvalue = {min_eigenvalue:e}")]
    NotDensity { trace: f64, min_eigenvalue: f64 },

    #[error("not a valid test 0 <= T <= I: eigenvalues in [{min_eigenvalue:e}, {max_eigenvalue}]")]
    NotTest {
        min_eigenvalue: f64,
        max_eigenvalue: f64,
    },

    #[error("not a POVM: {reason}")]
    NotPovm { reason: String },

    #[error("dimension mismatch: expected {expected}, found {found}")]
    DimensionMismatch { expected: usize, found: usize },

    #[error("eigensolver did not converge after {sweeps} sweeps (off-diagonal residual {residual:e})")]
    EigenNoConvergence { sweeps: usize, residual: f64 },

    #[error("bisection failed to bracket after {iterations} iterations: trace values {lower_trace} (t = {lower}) and {upper_trace} (t = {upper}), target {target}")]
    BisectionFailure {
        iterations: usize,
        lower: f64,
        upper: f64,
        lower_trace: f64,
        upper_trace: f64,
        target: f64,
    },

    #[error("invalid argument: {0}")]
    InvalidArgument(String),

    #[error("invalid ensemble: {0}")]
    InvalidEnsemble(String),

    #[error("identity check failed: {what} differs by {difference:e}")]
    IdentityViolation { what: &'static str, difference: f64 },

    #[error("{field}: {message}")]
    Format { field: String, message: String },

    #[error(transparent)]
    Io(#[from] std::io::Error),

    #[error(transparent)]
    Json(#[from] serde_json::Error),
}

impl QhtError {
    pub(crate) fn format(field: impl Into<String>, message: impl Into<String>) -> Self {
        QhtError::Format {
            field: field.into(),
            message: message.into(),
        }
    }

    /// Wraps the error with the location of the offending field.
    pub(crate) fn at(self, field: impl Into<String>) -> Self {
        QhtError::Format {
            field: field.into(),
            message: self.to_string(),
        }
    }
}
