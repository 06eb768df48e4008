use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("dimension mismatch: {0}")]
    DimensionMismatch(String),

    #[error("matrix is not positive semidefinite (eigenvalue {eigenvalue:e})")]
    NotPsd { eigenvalue: f64 },

    #[error("matrix is not unitary (||U^dag U - I||_2 = {deviation:e})")]
    NotUnitary { deviation: f64 },

    #[error("Hermitian eigensolver did not converge for a {dim}x{dim} matrix")]
    NoConvergence { dim: usize },

    #[error("invalid matrix: {0}")]
    InvalidMatrix(String),

    #[error("{name} out of domain: {reason}")]
    Domain { name: &'static str, reason: String },

    #[error("precision failure: {0}")]
    Precision(String),
}

impl Error {
    pub(crate) fn domain(name: &'static str, reason: impl Into<String>) -> Self {
        Error::Domain {
            name,
            reason: reason.into(),
        }
    }
}
