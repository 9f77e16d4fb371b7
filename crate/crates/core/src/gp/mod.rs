//! Gaussian-process regression with a zero prior mean, unit-variance
//! stationary kernels, and known Gaussian observation noise.

mod candidates;
mod kernel;
mod posterior;

use thiserror::Error;

pub use candidates::CandidatePredictor;
pub use kernel::{Kernel, MaternNu};
pub use posterior::{information_gain, GpPosterior, Prediction};

#[derive(Debug, Clone, PartialEq, Error)]
pub enum GpError {
    #[error("dimension mismatch: expected {expected}, got {got}")]
    DimensionMismatch { expected: usize, got: usize },
    #[error("invalid kernel: {0}")]
    InvalidKernel(String),
    #[error("noise variance must be positive, got {0}")]
    InvalidNoise(f64),
    #[error("observation {0} is not finite")]
    NonFiniteObservation(f64),
    #[error("covariance of {size} points is not positive definite even after jitter")]
    FactorizationFailed { size: usize },
    #[error("negative variance {0} in information-gain history")]
    NegativeVariance(f64),
}
