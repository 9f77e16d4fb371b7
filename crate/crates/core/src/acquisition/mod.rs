//! Active-learning optimisation over a discretised box.
//!
//! GP-ACB scores a candidate as `m(x) + sqrt(η_m(x) β_t) σ(x)`, where
//! `η_m` is the posterior mean min-max normalised over the candidate set.
//! GP-UCB drops `η_m`; the remaining strategies are the usual baselines.
//! Objective values are multiplied by the scaling factor `ξ` (and negated
//! when minimising) before they reach the GP; everything recorded in a
//! [`RunTrace`] is in the objective's own units.

mod config;
mod domain;
mod nelder_mead;
mod optimize;
mod regret;
mod strategy;

use thiserror::Error;

use crate::gp::GpError;

pub use config::{AcquisitionConfig, BetaRule, KernelFamily, Mode, Strategy};
pub(crate) use domain::random_point;
pub use domain::Domain;
pub use nelder_mead::{nelder_mead, NelderMeadResult};
pub use optimize::{optimize, optimize_until, OptimizeError, Record, RunTrace};
pub use regret::{regret_bound, regret_constant};
pub use strategy::{
    acquisition_scores, argmax, beta_continuous, beta_for, beta_schedule, eta_normalize,
    select_next, Selection, Selector,
};

#[derive(Debug, Clone, PartialEq, Error)]
pub enum AcquisitionError {
    #[error("invalid acquisition config: {0}")]
    InvalidConfig(String),
    #[error("invalid domain: {0}")]
    InvalidDomain(String),
    #[error("candidate set is empty")]
    EmptyCandidates,
    #[error(transparent)]
    Gp(#[from] GpError),
}
