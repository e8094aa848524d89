use thiserror::Error;

/// Errors raised by state construction, channel application and bound evaluation.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("invalid dimension: {0}")]
    InvalidDimension(String),

    #[error("mode index {index} out of range for a {n_modes}-mode state")]
    ModeOutOfRange { index: usize, n_modes: usize },

    #[error("parameter `{name}` = {value} outside its domain {domain}")]
    Domain {
        name: &'static str,
        value: f64,
        domain: &'static str,
    },

    #[error("covariance matrix is not symmetric (deviation {0:e})")]
    NotSymmetric(f64),

    #[error("covariance matrix is not bona fide: symplectic eigenvalue {0} < 1")]
    NotBonaFide(f64),

    #[error("matrix sum is singular or not positive definite")]
    SingularSum,

    #[error("operator is not Hermitian (deviation {0:e})")]
    NotHermitian(f64),

    #[error("operator is not positive semidefinite (eigenvalue {0:e})")]
    NotPositive(f64),

    #[error("dimension mismatch: {0}")]
    Mismatch(String),

    #[error("truncation tail mass {mass:e} exceeds tolerance {tol:e} at cutoff {cutoff}")]
    TailMass { cutoff: usize, mass: f64, tol: f64 },

    #[error("scalar minimizer broke down: {0}")]
    Minimizer(String),

    #[error("gain is not monotone in M along the search path: {0}")]
    NonMonotoneGain(String),

    #[error("approximation regime violated: {0}")]
    Regime(String),
}

pub type Result<T> = std::result::Result<T, Error>;

pub(crate) fn domain_err(name: &'static str, value: f64, domain: &'static str) -> Error {
    Error::Domain {
        name,
        value,
        domain,
    }
}
