//! Requirement mining for black-box dynamical systems.
//!
//! Given a parametric STL template and a simulator, [`mining::mine`]
//! alternates monotone parameter synthesis with Gaussian-process active
//! learning falsification until no counterexample can be found within
//! budget. The building blocks are usable on their own:
//!
//! - [`stl`]: formula parsing, parametric templates, robustness monitoring.
//! - [`gp`]: Gaussian-process regression with incremental Cholesky updates.
//! - [`acquisition`]: GP-ACB, GP-UCB and baseline selection strategies,
//!   the optimisation loop, Nelder-Mead, and regret accounting.
//! - [`systems`]: the Ackley benchmark and an automatic-transmission surrogate.

// `!(x > 0.0)` is used on purpose so that NaN is rejected too.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod acquisition;
pub mod gp;
pub mod mining;
pub mod stl;
pub mod systems;

use rand::{RngCore, SeedableRng};
use rand_chacha::ChaCha8Rng;

/// Derives the seed of sub-run `index` (a trial, a mining round) from a
/// master seed, so results do not depend on the order sub-runs execute in.
pub fn derive_seed(master: u64, index: u64) -> u64 {
    let mut rng = ChaCha8Rng::seed_from_u64(master);
    rng.set_stream(index.wrapping_add(1));
    rng.next_u64()
}
