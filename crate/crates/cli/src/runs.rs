//! Repeated mining trials.

use rayon::prelude::*;

use reqmine::derive_seed;
use reqmine::mining::templates::Template;
use reqmine::mining::{mine, validate, MiningConfig, MiningResult, MiningStatus, Validation};
use reqmine::systems::SystemUnderTest;

use crate::CliError;

#[derive(Debug, Clone)]
pub struct MiningTrial {
    pub trial: usize,
    pub seed: u64,
    pub result: MiningResult,
    /// Monte-Carlo check of the mined formula (mined runs only).
    pub validation: Option<Validation>,
    /// Minimum robustness of the final formula over the collected traces.
    pub trace_set_robustness: Option<f64>,
}

impl MiningTrial {
    pub fn mined(&self) -> bool {
        self.result.status == MiningStatus::Mined
    }
}

/// Runs `trials` independent mining runs; trial `i` is seeded with
/// `derive_seed(cfg.seed, i)` and validated with `validate_samples` fresh
/// inputs when it ends mined.
pub fn run_mining_trials(
    system: &dyn SystemUnderTest,
    template: &Template,
    cfg: &MiningConfig,
    trials: usize,
    validate_samples: usize,
) -> Result<Vec<MiningTrial>, CliError> {
    (0..trials)
        .into_par_iter()
        .map(|trial| {
            let seed = derive_seed(cfg.seed, trial as u64);
            let run_cfg = MiningConfig {
                seed,
                ..cfg.clone()
            };
            let result = mine(system, &template.formula, &run_cfg)
                .map_err(|e| CliError::Run(e.to_string()))?;
            let trace_set_robustness = result
                .robustness_on_traces(&template.formula)
                .transpose()
                .map_err(|e| CliError::Run(e.to_string()))?;
            let validation = match (&result.valuation, result.status) {
                (Some(theta), MiningStatus::Mined) if validate_samples > 0 => {
                    let phi = template
                        .formula
                        .instantiate(theta)
                        .map_err(|e| CliError::Run(e.to_string()))?;
                    Some(
                        validate(
                            system,
                            &phi,
                            validate_samples,
                            derive_seed(seed, u32::MAX as u64),
                        )
                        .map_err(|e| CliError::Run(e.to_string()))?,
                    )
                }
                _ => None,
            };
            Ok(MiningTrial {
                trial,
                seed,
                result,
                validation,
                trace_set_robustness,
            })
        })
        .collect()
}

pub fn mean_simulations(trials: &[MiningTrial]) -> f64 {
    trials
        .iter()
        .map(|t| t.result.total_simulations as f64)
        .sum::<f64>()
        / trials.len() as f64
}
