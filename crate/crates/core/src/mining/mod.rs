//! Requirement mining.
//!
//! [`mine`] alternates two steps until the falsifier gives up:
//!
//! 1. [`synthesize_parameters`] picks the tightest valuation under which
//!    every trace collected so far still satisfies the template, with
//!    minimum robustness in `(0, ε]`.
//! 2. [`falsify`] searches the input box for a trace violating the
//!    instantiated formula. A violation becomes a new counterexample and the
//!    loop repeats; otherwise the valuation is returned as mined.
//!
//! Synthesis relies on monotonicity: each parameter declares whether
//! robustness grows or shrinks with it, so the tightest feasible value of
//! each coordinate is found by bisection. Coordinates are visited in
//! declaration order and cycled until none moves by more than the
//! tolerance, which makes the result deterministic when several valuations
//! are equally tight.

mod falsify;
mod mine;
mod synthesis;
pub mod templates;

use thiserror::Error;

use crate::acquisition::AcquisitionError;
use crate::stl::{Signal, StlError};
use crate::systems::SimError;

pub use falsify::{falsify, falsify_on, Falsification, FalsificationOutcome};
pub use mine::{mine, validate, MiningConfig, MiningResult, MiningStatus, RoundLog, Validation};
pub use synthesis::{loosest_valuation, min_robustness, synthesize_parameters, Synthesis};

#[derive(Debug, Clone, PartialEq, Error)]
pub enum MiningError {
    #[error("parameter '{0}' has no declared monotonicity")]
    MissingMonotonicity(String),
    #[error("no traces to synthesise parameters from")]
    NoTraces,
    #[error("infeasible: the loosest valuation still has minimum robustness {min_robustness}")]
    Infeasible { min_robustness: f64 },
    #[error("formula horizon {horizon} s exceeds the simulation horizon {sim_horizon} s")]
    HorizonTooLong { horizon: f64, sim_horizon: f64 },
    #[error("invalid mining config: {0}")]
    InvalidConfig(String),
    #[error(transparent)]
    Stl(#[from] StlError),
    #[error(transparent)]
    Simulation(#[from] SimError),
    #[error(transparent)]
    Acquisition(#[from] AcquisitionError),
}

#[derive(Debug, Clone, PartialEq)]
pub struct Counterexample {
    pub x0: Vec<f64>,
    pub trace: Signal,
}

/// Traces the synthesised valuation must satisfy: the initial random
/// samples followed by every counterexample found by falsification.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct CounterexampleSet {
    entries: Vec<Counterexample>,
}

impl CounterexampleSet {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn push(&mut self, x0: Vec<f64>, trace: Signal) {
        self.entries.push(Counterexample { x0, trace });
    }

    pub fn entries(&self) -> &[Counterexample] {
        &self.entries
    }

    pub fn traces(&self) -> impl Iterator<Item = &Signal> {
        self.entries.iter().map(|e| &e.trace)
    }

    pub fn len(&self) -> usize {
        self.entries.len()
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }
}
