use alloc::string::String;
use alloc::vec::Vec;

use num_complex::Complex64;
use thiserror::Error;

use crate::tangential::Violation;

pub type Result<T> = core::result::Result<T, Error>;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("dimension mismatch: {0}")]
    Dimension(String),

    #[error("invalid input: {0}")]
    InvalidInput(String),

    #[error("pencil sE - A is numerically singular at s = {s}")]
    SingularPencil { s: Complex64 },

    #[error("spectral interpolation data must lie in the open right half-plane (datum {index})")]
    InvalidSpectralData { index: usize },

    #[error("right point {right} coincides with left point {left}")]
    PointCollision { right: usize, left: usize },

    #[error("tangential data set is invalid: {0:?}")]
    InvalidTangentialData(Vec<Violation>),

    #[error("Loewner matrix is numerically singular (rcond = {rcond:e})")]
    SingularLoewner { rcond: f64 },

    #[error("data are not self-conjugate: {0}")]
    NotSelfConjugate(String),

    #[error("even pencil is numerically singular")]
    SingularEvenPencil,

    #[error("eigenvalue iteration did not converge")]
    EigenSolverFailed,

    #[error("spectral zero residual check failed for {} pair(s)", .0.len())]
    ResidualCheckFailed(Vec<Complex64>),

    #[error("found {found} spectral zeros in the open right half-plane, expected {expected}")]
    UnexpectedZeroCount { found: usize, expected: usize },

    #[error("matrix is not symmetric (relative asymmetry {asymmetry:e})")]
    NotSymmetric { asymmetry: f64 },

    #[error("Pick matrix is not positive definite (leading minor {minor} fails)")]
    PickNotPositiveDefinite { minor: usize },

    #[error("realization is not passive (lambda_min of dissipation block = {lambda_min:e})")]
    NotPassiveRealization { lambda_min: f64 },

    #[error("D + D^T is not positive definite")]
    DNotStrictlyPositiveReal,

    #[error("certificate fails the KYP inequality (lambda_min(W) = {lambda_min_w:e})")]
    CertificateInvalid { lambda_min_w: f64 },

    #[error("certificate X is not positive definite")]
    XNotPositiveDefinite,

    #[error("operation requires E = I")]
    DescriptorUnsupported,

    #[error("operation requires a real-valued model")]
    ComplexModel,

    #[error("at least {needed} samples are required, got {got}")]
    TooFewSamples { needed: usize, got: usize },

    #[error("no samples inside the band [{lo}, {hi}]")]
    EmptyBand { lo: f64, hi: f64 },

    #[error("invalid port-Hamiltonian form: {0}")]
    InvalidPortHamiltonian(String),
}

impl Error {
    /// Numerical breakdown as opposed to malformed or inconsistent input.
    pub fn is_numerical(&self) -> bool {
        matches!(
            self,
            Error::SingularPencil { .. }
                | Error::SingularLoewner { .. }
                | Error::SingularEvenPencil
                | Error::EigenSolverFailed
                | Error::ResidualCheckFailed(_)
                | Error::UnexpectedZeroCount { .. }
                | Error::PickNotPositiveDefinite { .. }
                | Error::NotPassiveRealization { .. }
        )
    }
}
