use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("invalid argument: {0}")]
    InvalidArgument(String),
    #[error("non-finite value: {0}")]
    NonFinite(String),
    #[error("logarithm of zero: {0}")]
    LogOfZero(String),
    #[error("quadrature failed: {0}")]
    QuadratureFail(String),
    #[error("domain error: {0}")]
    DomainError(String),
    #[error("degenerate overlap matrix: {0}")]
    DegenerateOverlap(String),
    #[error("root finding failed: {0}")]
    RootFindFail(String),
    #[error("eigenvalue iteration failed: {0}")]
    EigFail(String),
    #[error("measure support violation: {0}")]
    SupportViolation(String),
    #[error("zero on integration path: {0}")]
    ZeroOnPath(String),
    #[error("series diverges: {0}")]
    Divergence(String),
}

impl Error {
    /// Numerical failures map to CLI exit code 3, argument problems to 2.
    pub fn is_numerical(&self) -> bool {
        !matches!(self, Error::InvalidArgument(_) | Error::DomainError(_))
    }
}

pub type Result<T> = std::result::Result<T, Error>;
