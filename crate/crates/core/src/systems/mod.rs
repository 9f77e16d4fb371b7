//! Systems under test.
//!
//! A [`SystemUnderTest`] maps a point of its input box `X₀` to a sampled
//! output [`Signal`]. The crate ships the automatic-transmission surrogate
//! used for requirement mining and the Ackley function used to benchmark
//! the optimisers.

mod ackley;
mod transmission;

use thiserror::Error;

use crate::stl::{Signal, StlError};

pub use ackley::{ackley, ACKLEY_BOUNDS, ACKLEY_OPTIMUM};
pub use transmission::Transmission;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum SimError {
    #[error("expected {expected} inputs, got {got}")]
    Dimension { expected: usize, got: usize },
    #[error("input {index} = {value} lies outside [{lower}, {upper}]")]
    OutOfBox {
        index: usize,
        value: f64,
        lower: f64,
        upper: f64,
    },
    #[error("state became non-finite at t = {time}")]
    NonFinite { time: f64 },
    #[error(transparent)]
    Signal(#[from] StlError),
}

/// A deterministic black-box simulator.
pub trait SystemUnderTest: Send + Sync {
    fn name(&self) -> &str;

    /// The box `X₀` of admissible inputs, one interval per coordinate.
    fn x0_bounds(&self) -> &[(f64, f64)];

    /// Simulated time span in seconds.
    fn sim_horizon(&self) -> f64;

    fn dt(&self) -> f64;

    fn channels(&self) -> &[String];

    /// Runs the simulator from `x0`. The returned signal starts at time 0
    /// and has `sim_horizon / dt + 1` samples.
    fn simulate(&self, x0: &[f64]) -> Result<Signal, SimError>;

    /// Checks that `x0` has the right dimension and lies inside `X₀`.
    fn check_input(&self, x0: &[f64]) -> Result<(), SimError> {
        let bounds = self.x0_bounds();
        if x0.len() != bounds.len() {
            return Err(SimError::Dimension {
                expected: bounds.len(),
                got: x0.len(),
            });
        }
        for (index, (&value, &(lower, upper))) in x0.iter().zip(bounds).enumerate() {
            if !(lower..=upper).contains(&value) {
                return Err(SimError::OutOfBox {
                    index,
                    value,
                    lower,
                    upper,
                });
            }
        }
        Ok(())
    }
}
