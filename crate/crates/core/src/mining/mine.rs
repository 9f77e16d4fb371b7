use std::time::{Duration, Instant};

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use crate::acquisition::{random_point, AcquisitionConfig, Domain};
use crate::derive_seed;
use crate::stl::{robustness, Formula, ParametricFormula, Valuation};
use crate::systems::SystemUnderTest;

use super::falsify::{falsify_on, FalsificationOutcome};
use super::synthesis::{min_robustness, synthesize_parameters};
use super::{CounterexampleSet, MiningError};

#[derive(Debug, Clone, PartialEq)]
pub struct MiningConfig {
    /// Upper bound on the minimum robustness of a mined formula.
    pub epsilon: f64,
    /// Bisection stopping width for each parameter.
    pub synthesis_tol: f64,
    /// Simulation budget of one falsification round.
    pub falsification_budget: usize,
    /// Maximum number of falsification rounds.
    pub max_rounds: usize,
    /// Falsifier settings; `budget`, `mode` and `seed` are set per round.
    pub acquisition: AcquisitionConfig,
    /// Random traces collected before the first synthesis.
    pub init_samples: usize,
    /// Candidates each falsification round draws around the inputs of
    /// recent counterexamples, in place of uniform ones.
    pub local_candidates: usize,
    /// Standard deviation of those draws per unit-cube axis.
    pub local_spread: f64,
    pub seed: u64,
}

/// Most recent counterexamples used to focus a falsification round.
const MAX_ANCHORS: usize = 8;

impl Default for MiningConfig {
    fn default() -> Self {
        MiningConfig {
            epsilon: 1.0,
            synthesis_tol: 1e-3,
            falsification_budget: 200,
            max_rounds: 50,
            acquisition: AcquisitionConfig::default(),
            init_samples: 10,
            local_candidates: 250,
            local_spread: 0.05,
            seed: 0,
        }
    }
}

impl MiningConfig {
    pub fn validate(&self) -> Result<(), MiningError> {
        let bad = |m: String| Err(MiningError::InvalidConfig(m));
        if !(self.epsilon > 0.0 && self.epsilon.is_finite()) {
            return bad(format!("epsilon must be positive, got {}", self.epsilon));
        }
        if !(self.synthesis_tol > 0.0 && self.synthesis_tol.is_finite()) {
            return bad(format!(
                "synthesis tolerance must be positive, got {}",
                self.synthesis_tol
            ));
        }
        if self.falsification_budget == 0 {
            return bad("falsification budget must be at least 1".into());
        }
        if self.init_samples == 0 {
            return bad("need at least one initial sample".into());
        }
        if !(self.local_spread > 0.0 && self.local_spread.is_finite()) {
            return bad(format!(
                "local spread must be positive, got {}",
                self.local_spread
            ));
        }
        let probe = AcquisitionConfig {
            budget: self.falsification_budget,
            ..self.acquisition.clone()
        };
        probe.validate()?;
        Ok(())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum MiningStatus {
    Mined,
    BudgetExhausted,
    Infeasible,
}

impl MiningStatus {
    pub fn name(self) -> &'static str {
        match self {
            MiningStatus::Mined => "mined",
            MiningStatus::BudgetExhausted => "budget_exhausted",
            MiningStatus::Infeasible => "infeasible",
        }
    }
}

/// One synthesis + falsification round.
#[derive(Debug, Clone, PartialEq)]
pub struct RoundLog {
    pub valuation: Valuation,
    /// Minimum robustness of the synthesised formula on the traces known at
    /// the start of the round.
    pub min_robustness: f64,
    pub simulations: usize,
    pub falsified: bool,
}

#[derive(Debug, Clone, PartialEq)]
pub struct MiningResult {
    pub status: MiningStatus,
    /// Last synthesised valuation; `None` only when even the loosest
    /// valuation is violated by the initial traces.
    pub valuation: Option<Valuation>,
    /// Minimum robustness of the final formula over all collected traces
    /// (of the loosest valuation, for infeasible runs).
    pub min_robustness_on_samples: f64,
    pub total_simulations: usize,
    pub rounds: usize,
    pub falsification_time: Duration,
    pub synthesis_time: Duration,
    pub counterexamples: CounterexampleSet,
    pub history: Vec<RoundLog>,
}

/// Mines a valuation of `pf` that `system` satisfies on every input found.
///
/// Each falsification round searches the vertices, uniform samples and
/// points around the most recent counterexamples; Nelder-Mead restarts
/// from those counterexamples first.
pub fn mine(
    system: &dyn SystemUnderTest,
    pf: &ParametricFormula,
    cfg: &MiningConfig,
) -> Result<MiningResult, MiningError> {
    cfg.validate()?;
    let mut rng = ChaCha8Rng::seed_from_u64(derive_seed(cfg.seed, 0));
    let mut traces = CounterexampleSet::new();
    for _ in 0..cfg.init_samples {
        let x0 = random_point(system.x0_bounds(), &mut rng);
        let trace = system.simulate(&x0)?;
        traces.push(x0, trace);
    }

    let mut result = MiningResult {
        status: MiningStatus::BudgetExhausted,
        valuation: None,
        min_robustness_on_samples: f64::NAN,
        total_simulations: cfg.init_samples,
        rounds: 0,
        falsification_time: Duration::ZERO,
        synthesis_time: Duration::ZERO,
        counterexamples: CounterexampleSet::new(),
        history: Vec::new(),
    };

    loop {
        let started = Instant::now();
        let synthesis = synthesize_parameters(pf, &traces, cfg.epsilon, cfg.synthesis_tol);
        result.synthesis_time += started.elapsed();
        let synthesis = match synthesis {
            Ok(s) => s,
            Err(MiningError::Infeasible { min_robustness }) => {
                result.status = MiningStatus::Infeasible;
                result.min_robustness_on_samples = min_robustness;
                break;
            }
            Err(e) => return Err(e),
        };
        result.valuation = Some(synthesis.valuation.clone());
        result.min_robustness_on_samples = synthesis.min_robustness;
        if result.rounds == cfg.max_rounds {
            break;
        }

        result.rounds += 1;
        let phi = pf.instantiate(&synthesis.valuation)?;
        let acquisition = AcquisitionConfig {
            seed: derive_seed(cfg.seed, result.rounds as u64),
            ..cfg.acquisition.clone()
        };
        let started = Instant::now();
        let anchors: Vec<Vec<f64>> = traces.entries()[cfg.init_samples..]
            .iter()
            .rev()
            .take(MAX_ANCHORS)
            .map(|c| c.x0.clone())
            .collect();
        let domain = Domain::sample_with_vertices(
            system.x0_bounds().to_vec(),
            acquisition.candidates,
            acquisition.seed,
        )?
        .with_anchors(anchors, cfg.local_candidates, cfg.local_spread)?;
        let round = falsify_on(
            system,
            &phi,
            &acquisition,
            cfg.falsification_budget,
            &domain,
        )?;
        result.falsification_time += started.elapsed();
        result.total_simulations += round.simulations;
        result.history.push(RoundLog {
            valuation: synthesis.valuation,
            min_robustness: synthesis.min_robustness,
            simulations: round.simulations,
            falsified: round.is_falsified(),
        });
        match round.outcome {
            FalsificationOutcome::Counterexample { x0, trace, .. } => traces.push(x0, trace),
            FalsificationOutcome::NotFalsified { .. } => {
                result.status = MiningStatus::Mined;
                break;
            }
        }
    }
    result.counterexamples = traces;
    Ok(result)
}

#[derive(Debug, Clone, PartialEq)]
pub struct Validation {
    pub min_robustness: f64,
    pub argmin: Vec<f64>,
    pub samples: usize,
}

/// Monte-Carlo check of a formula: simulates `n_samples` uniform inputs and
/// reports the least robust one.
pub fn validate(
    system: &dyn SystemUnderTest,
    phi: &Formula,
    n_samples: usize,
    seed: u64,
) -> Result<Validation, MiningError> {
    if n_samples == 0 {
        return Err(MiningError::InvalidConfig(
            "validation needs at least one sample".into(),
        ));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut best = Validation {
        min_robustness: f64::INFINITY,
        argmin: Vec::new(),
        samples: n_samples,
    };
    for _ in 0..n_samples {
        let x0 = random_point(system.x0_bounds(), &mut rng);
        let trace = system.simulate(&x0)?;
        let r = robustness(&trace, phi, trace.t0())?;
        if r < best.min_robustness || best.argmin.is_empty() {
            best.min_robustness = r;
            best.argmin = x0;
        }
    }
    Ok(best)
}

impl MiningResult {
    /// Recomputes the minimum robustness of the final valuation over every
    /// collected trace. `None` when no valuation was synthesised.
    pub fn robustness_on_traces(&self, pf: &ParametricFormula) -> Option<Result<f64, MiningError>> {
        let theta = self.valuation.as_ref()?;
        Some(min_robustness(pf, theta, &self.counterexamples))
    }
}
