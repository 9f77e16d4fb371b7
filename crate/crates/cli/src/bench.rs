//! Ackley benchmark: independent trials of each strategy and kernel.

use rayon::prelude::*;
use statrs::distribution::{Binomial, DiscreteCDF};

use reqmine::acquisition::{
    beta_for, optimize, regret_bound, AcquisitionConfig, Domain, KernelFamily, Mode, Strategy,
};
use reqmine::derive_seed;
use reqmine::systems::{ackley, ACKLEY_BOUNDS, ACKLEY_OPTIMUM};

use crate::CliError;

/// Default Ackley setup: 58 iterations over 1000 random candidates, noisy
/// observations with variance 0.025, δ = 0.1.
pub fn ackley_defaults() -> AcquisitionConfig {
    AcquisitionConfig {
        budget: 58,
        candidates: 1000,
        delta: 0.1,
        noise_var: 0.025,
        observation_noise: Some(0.025),
        mode: Mode::Minimize,
        ..Default::default()
    }
}

pub const ACKLEY_STRATEGIES: [Strategy; 5] = [
    Strategy::GpAcb,
    Strategy::GpUcb,
    Strategy::BatchGreedyUcb,
    Strategy::Explore,
    Strategy::Exploit,
];

pub const ACKLEY_KERNELS: [KernelFamily; 2] = [KernelFamily::Gaussian, KernelFamily::Matern52];

#[derive(Debug, Clone, PartialEq)]
pub struct AckleySettings {
    pub strategies: Vec<Strategy>,
    pub kernels: Vec<KernelFamily>,
    pub trials: usize,
    pub base: AcquisitionConfig,
    pub seed: u64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct TrialSummary {
    pub trial: usize,
    /// Best true objective value so far minus the optimum, per iteration.
    pub simple_regret: Vec<f64>,
    /// True objective value at each query minus the optimum.
    pub instant_regret: Vec<f64>,
    pub cumulative_regret: f64,
    pub information_gain: f64,
    pub eta_range: Option<(f64, f64)>,
    pub beta_final: f64,
    /// `sqrt(n C₁ T β_T I_T)` with `n` the largest adaptive factor for
    /// GP-ACB and 1 otherwise.
    pub regret_bound: f64,
}

impl TrialSummary {
    pub fn final_regret(&self) -> f64 {
        *self.simple_regret.last().expect("budget is at least one")
    }

    pub fn within_bound(&self) -> bool {
        self.cumulative_regret <= self.regret_bound
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Series {
    pub strategy: Strategy,
    /// `None` for Nelder-Mead, which has no kernel.
    pub kernel: Option<KernelFamily>,
    pub trials: Vec<TrialSummary>,
}

impl Series {
    pub fn label(&self) -> String {
        format!("{}/{}", self.strategy, self.kernel_name())
    }

    pub fn kernel_name(&self) -> &'static str {
        self.kernel.map_or("-", KernelFamily::name)
    }

    /// Mean over trials of the simple regret after each iteration.
    pub fn mean_simple_regret(&self) -> Vec<f64> {
        mean_curve(self.trials.iter().map(|t| t.simple_regret.as_slice()))
    }

    pub fn mean_instant_regret(&self) -> Vec<f64> {
        mean_curve(self.trials.iter().map(|t| t.instant_regret.as_slice()))
    }

    pub fn mean_final_regret(&self) -> f64 {
        *self
            .mean_simple_regret()
            .last()
            .expect("budget is at least one")
    }

    pub fn final_regrets(&self) -> Vec<f64> {
        self.trials.iter().map(TrialSummary::final_regret).collect()
    }

    /// First iteration at which the mean simple regret is within `frac` of
    /// its final value.
    pub fn iterations_to_within(&self, frac: f64) -> usize {
        iterations_to_within(&self.mean_simple_regret(), frac)
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct BenchReport {
    pub budget: usize,
    pub series: Vec<Series>,
}

impl BenchReport {
    pub fn find(&self, strategy: Strategy, kernel: KernelFamily) -> Option<&Series> {
        self.series
            .iter()
            .find(|s| s.strategy == strategy && s.kernel.is_none_or(|k| k == kernel))
    }
}

fn mean_curve<'a>(curves: impl Iterator<Item = &'a [f64]>) -> Vec<f64> {
    let mut sum: Vec<f64> = Vec::new();
    let mut n = 0usize;
    for c in curves {
        if sum.is_empty() {
            sum = vec![0.0; c.len()];
        }
        for (s, v) in sum.iter_mut().zip(c) {
            *s += v;
        }
        n += 1;
    }
    sum.iter().map(|s| s / n as f64).collect()
}

/// 1-based index of the first entry within `frac` of the last entry.
pub fn iterations_to_within(curve: &[f64], frac: f64) -> usize {
    let target = curve.last().copied().unwrap_or(0.0) * (1.0 + frac);
    curve
        .iter()
        .position(|&v| v <= target)
        .map_or(curve.len(), |i| i + 1)
}

fn run_trial(
    strategy: Strategy,
    kernel: KernelFamily,
    trial: usize,
    settings: &AckleySettings,
) -> Result<TrialSummary, CliError> {
    let domain_seed = derive_seed(settings.seed, 2 * trial as u64);
    let noise_seed = derive_seed(settings.seed, 2 * trial as u64 + 1);
    let domain = Domain::sample(
        ACKLEY_BOUNDS.to_vec(),
        settings.base.candidates,
        domain_seed,
    )
    .map_err(|e| CliError::Config(e.to_string()))?;
    let cfg = AcquisitionConfig {
        strategy,
        kernel,
        mode: Mode::Minimize,
        seed: noise_seed,
        ..settings.base.clone()
    };
    let run = optimize(
        |x: &[f64]| Ok::<_, std::convert::Infallible>(ackley(x[0], x[1])),
        &domain,
        &cfg,
    )
    .map_err(|e| CliError::Run(e.to_string()))?;
    let information_gain = run.information_gain().last().copied().unwrap_or(0.0);
    let eta_range = run.eta_range();
    let t = run.len();
    let beta_final = beta_for(&cfg, t, domain.len());
    let n = match (strategy, eta_range) {
        (Strategy::GpAcb, Some((_, hi))) => hi,
        _ => 1.0,
    };
    Ok(TrialSummary {
        trial,
        simple_regret: run.simple_regret(ACKLEY_OPTIMUM),
        instant_regret: run
            .records()
            .iter()
            .map(|r| r.value - ACKLEY_OPTIMUM)
            .collect(),
        cumulative_regret: run.cumulative_regret(ACKLEY_OPTIMUM),
        information_gain,
        eta_range,
        beta_final,
        regret_bound: regret_bound(t, beta_final, information_gain, n, cfg.noise_var),
    })
}

/// Runs every (strategy, kernel) pair for `settings.trials` trials. Trial
/// `i` uses the same candidate set and noise stream for every pair.
pub fn run_ackley(settings: &AckleySettings) -> Result<BenchReport, CliError> {
    settings
        .base
        .validate()
        .map_err(|e| CliError::Config(e.to_string()))?;
    let mut series = Vec::new();
    for &strategy in &settings.strategies {
        let kernels: Vec<Option<KernelFamily>> = if strategy.uses_gp() {
            settings.kernels.iter().copied().map(Some).collect()
        } else {
            vec![None]
        };
        for kernel in kernels {
            let k = kernel.unwrap_or(settings.base.kernel);
            let trials = (0..settings.trials)
                .into_par_iter()
                .map(|i| run_trial(strategy, k, i, settings))
                .collect::<Result<Vec<_>, _>>()?;
            series.push(Series {
                strategy,
                kernel,
                trials,
            });
        }
    }
    Ok(BenchReport {
        budget: settings.base.budget,
        series,
    })
}

/// Paired one-sided sign test on per-trial values.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SignTest {
    /// Trials where `a < b`.
    pub below: usize,
    /// Trials where `a > b`.
    pub above: usize,
    pub ties: usize,
}

impl SignTest {
    pub fn new(a: &[f64], b: &[f64]) -> Self {
        assert_eq!(a.len(), b.len(), "paired samples differ in length");
        let below = a.iter().zip(b).filter(|(x, y)| x < y).count();
        let above = a.iter().zip(b).filter(|(x, y)| x > y).count();
        SignTest {
            below,
            above,
            ties: a.len() - below - above,
        }
    }

    /// P(at least `above` of the untied pairs have `a > b`) under the null
    /// of no difference. Small values are evidence that `a` is larger.
    pub fn p_above(&self) -> f64 {
        upper_tail(self.above, self.below + self.above)
    }

    /// P(at least `below` pairs with `a < b`) under the null.
    pub fn p_below(&self) -> f64 {
        upper_tail(self.below, self.below + self.above)
    }
}

fn upper_tail(k: usize, n: usize) -> f64 {
    if n == 0 || k == 0 {
        return 1.0;
    }
    let binom = Binomial::new(0.5, n as u64).expect("valid binomial");
    binom.sf(k as u64 - 1)
}
