use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("dimension mismatch in {op}: expected {expected}, got {got}")]
    DimensionMismatch {
        op: &'static str,
        expected: String,
        got: String,
    },
    #[error("{op} requires a square matrix, got {rows}x{cols}")]
    NotSquare {
        op: &'static str,
        rows: usize,
        cols: usize,
    },
    #[error("matrix is not invertible (pivot {pivot:e} below threshold {threshold:e})")]
    NotInvertible { pivot: f64, threshold: f64 },
    #[error("linear system too ill-conditioned (condition estimate {cond:e})")]
    IllConditioned { cond: f64 },
    #[error("matrix is not symmetric positive definite")]
    NotPositiveDefinite,
    #[error("numeric range exceeded in {op}")]
    NumericRange { op: &'static str },
    #[error("retraction undefined at step {t:e}: {reason}")]
    Domain { t: f64, reason: String },
    #[error("point is not on the manifold (feasibility residual {residual:e})")]
    Infeasible { residual: f64 },
    #[error("tangent vector does not belong to this base point")]
    BasePointMismatch,
    #[error("invalid parameter: {0}")]
    InvalidParameter(String),
}

pub type Result<T, E = Error> = std::result::Result<T, E>;

impl Error {
    pub(crate) fn dims(op: &'static str, expected: impl ToString, got: impl ToString) -> Self {
        Error::DimensionMismatch {
            op,
            expected: expected.to_string(),
            got: got.to_string(),
        }
    }
}
