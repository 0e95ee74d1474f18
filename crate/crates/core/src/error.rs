use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("dimension mismatch: expected {expected}, found {found}")]
    DimensionMismatch { expected: usize, found: usize },

    #[error("shape mismatch: {0}")]
    ShapeMismatch(String),

    #[error("matrix is not Hermitian (max |a - a*| = {deviation:e}, tol {tol:e})")]
    NotHermitian { deviation: f64, tol: f64 },

    #[error("element is not positive (minimum eigenvalue {min_eigenvalue:e}, tol {tol:e})")]
    NotPositive { min_eigenvalue: f64, tol: f64 },

    #[error("not invertible: smallest singular value {sigma_min:e} is below {tol:e}")]
    NotInvertible { sigma_min: f64, tol: f64 },

    #[error("frame operator is degenerate: minimum eigenvalue {lambda_min:e} is below {tol:e}")]
    FrameDegenerate { lambda_min: f64, tol: f64 },

    #[error("a {0} measure cannot be refined")]
    NotRefinable(&'static str),

    #[error("invalid argument: {0}")]
    InvalidArgument(String),
}
