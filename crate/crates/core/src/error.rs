use thiserror::Error;

use crate::polyalg::ParseError;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Clone, Error)]
pub enum Error {
    #[error(transparent)]
    Parse(#[from] ParseError),

    #[error("dimension mismatch: expected {expected}, found {found}")]
    DimensionMismatch { expected: usize, found: usize },

    #[error("degree mismatch: {0}")]
    DegreeMismatch(String),

    #[error("operation undefined for the zero polynomial")]
    ZeroPolynomial,

    #[error("polynomial is not homogeneous")]
    NotHomogeneous,

    #[error("invalid argument: {0}")]
    InvalidArgument(String),

    #[error("Hankel moment matrix is numerically singular at degree {degree} (condition estimate {condition:.3e})")]
    SingularHankel { degree: usize, condition: f64 },

    #[error("orthogonal system has maxdeg {available}, degree {required} required")]
    InsufficientDegree { required: usize, available: usize },

    #[error("problem size {size} exceeds limit {limit}")]
    SizeGuard { size: usize, limit: usize },

    #[error("matrix is not symmetric (residual {residual:.3e})")]
    NonSymmetric { residual: f64 },

    #[error("Jacobi iteration did not converge after {sweeps} sweeps (off-diagonal norm {off_norm:.3e})")]
    NoConvergence { sweeps: usize, off_norm: f64 },

    #[error("need at least {required} usable points, found {found}")]
    InsufficientData { required: usize, found: usize },

    #[error("quadrature panel budget exhausted (achieved error {achieved_error:.3e})")]
    PanelBudget { achieved_error: f64 },

    #[error("eigenvalue multiplicity mismatch: {0}")]
    Multiplicity(String),
}
