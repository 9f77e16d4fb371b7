use std::fmt;
use std::str::FromStr;

use crate::gp::{GpError, Kernel};

use super::AcquisitionError;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Strategy {
    /// Adaptive confidence bound: `m + sqrt(η_m β_t) σ`.
    GpAcb,
    /// Upper confidence bound: `m + sqrt(β_t) σ`.
    GpUcb,
    /// UCB batches built greedily with hallucinated observations.
    BatchGreedyUcb,
    /// Maximum posterior variance.
    Explore,
    /// Maximum posterior mean.
    Exploit,
    /// Bounded Nelder-Mead simplex with random restarts (no GP).
    NelderMead,
}

impl Strategy {
    pub const ALL: [Strategy; 6] = [
        Strategy::GpAcb,
        Strategy::GpUcb,
        Strategy::BatchGreedyUcb,
        Strategy::Explore,
        Strategy::Exploit,
        Strategy::NelderMead,
    ];

    pub fn name(self) -> &'static str {
        match self {
            Strategy::GpAcb => "gp_acb",
            Strategy::GpUcb => "gp_ucb",
            Strategy::BatchGreedyUcb => "batch_greedy_ucb",
            Strategy::Explore => "explore",
            Strategy::Exploit => "exploit",
            Strategy::NelderMead => "nelder_mead",
        }
    }

    pub fn uses_gp(self) -> bool {
        self != Strategy::NelderMead
    }
}

impl fmt::Display for Strategy {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Strategy {
    type Err = AcquisitionError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        Strategy::ALL
            .into_iter()
            .find(|st| st.name() == s)
            .ok_or_else(|| AcquisitionError::InvalidConfig(format!("unknown strategy '{s}'")))
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Mode {
    Maximize,
    Minimize,
}

/// Which confidence schedule to use for `β_t`.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum BetaRule {
    /// `2 ln(|D| π² t² / (6δ))`, for a finite candidate set.
    FiniteDomain,
    /// `2 ln(π² t² / (6δ))`, dropping the `|D|` factor.
    Continuous,
}

/// Kernel family; the lengthscale is resolved against the domain.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum KernelFamily {
    Gaussian,
    Matern12,
    Matern32,
    Matern52,
}

impl KernelFamily {
    pub fn name(self) -> &'static str {
        match self {
            KernelFamily::Gaussian => "gaussian",
            KernelFamily::Matern12 => "matern12",
            KernelFamily::Matern32 => "matern32",
            KernelFamily::Matern52 => "matern",
        }
    }

    pub fn with_lengthscale(self, l: f64) -> Result<Kernel, GpError> {
        match self {
            KernelFamily::Gaussian => Kernel::gaussian(l),
            KernelFamily::Matern12 => Kernel::matern(l, 0.5),
            KernelFamily::Matern32 => Kernel::matern(l, 1.5),
            KernelFamily::Matern52 => Kernel::matern(l, 2.5),
        }
    }
}

impl fmt::Display for KernelFamily {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for KernelFamily {
    type Err = AcquisitionError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "gaussian" | "rbf" => Ok(KernelFamily::Gaussian),
            "matern" | "matern52" => Ok(KernelFamily::Matern52),
            "matern32" => Ok(KernelFamily::Matern32),
            "matern12" => Ok(KernelFamily::Matern12),
            other => Err(AcquisitionError::InvalidConfig(format!(
                "unknown kernel '{other}'"
            ))),
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct AcquisitionConfig {
    pub strategy: Strategy,
    /// Confidence parameter of the `β_t` schedule, in (0, 1).
    pub delta: f64,
    /// Scaling factor applied to objective values before they reach the GP.
    pub xi: f64,
    /// Iteration (oracle call) budget.
    pub budget: usize,
    /// Size of the random candidate set a domain is discretised into.
    pub candidates: usize,
    pub batch_size: usize,
    pub kernel: KernelFamily,
    /// Lengthscale in unit-cube coordinates; `None` uses the domain default.
    pub lengthscale: Option<f64>,
    /// GP noise variance σ².
    pub noise_var: f64,
    pub mode: Mode,
    pub beta_rule: BetaRule,
    /// Variance of Gaussian noise added to each observed objective value.
    pub observation_noise: Option<f64>,
    /// Simulation sampling time, when the objective has one. Informational.
    pub sampling_time: Option<f64>,
    /// Seed for observation noise and Nelder-Mead restarts.
    pub seed: u64,
}

impl Default for AcquisitionConfig {
    fn default() -> Self {
        AcquisitionConfig {
            strategy: Strategy::GpAcb,
            delta: 0.1,
            xi: 1.0,
            budget: 58,
            candidates: 1000,
            batch_size: 5,
            kernel: KernelFamily::Matern52,
            lengthscale: None,
            noise_var: 0.025,
            mode: Mode::Maximize,
            beta_rule: BetaRule::FiniteDomain,
            observation_noise: None,
            sampling_time: None,
            seed: 0,
        }
    }
}

impl AcquisitionConfig {
    pub fn validate(&self) -> Result<(), AcquisitionError> {
        let bad = |m: String| Err(AcquisitionError::InvalidConfig(m));
        if !(self.delta > 0.0 && self.delta < 1.0) {
            return bad(format!("delta must lie in (0,1), got {}", self.delta));
        }
        if !(self.xi > 0.0 && self.xi.is_finite()) {
            return bad(format!("scaling factor must be positive, got {}", self.xi));
        }
        if self.budget == 0 {
            return bad("budget must be at least 1".into());
        }
        if self.candidates < 2 {
            return bad(format!(
                "need at least 2 candidates, got {}",
                self.candidates
            ));
        }
        if self.batch_size == 0 {
            return bad("batch size must be at least 1".into());
        }
        if !(self.noise_var > 0.0 && self.noise_var.is_finite()) {
            return bad(format!(
                "noise variance must be positive, got {}",
                self.noise_var
            ));
        }
        if let Some(l) = self.lengthscale {
            if !(l > 0.0 && l.is_finite()) {
                return bad(format!("lengthscale must be positive, got {l}"));
            }
        }
        if let Some(v) = self.observation_noise {
            if !(v >= 0.0 && v.is_finite()) {
                return bad(format!(
                    "observation noise variance must be non-negative, got {v}"
                ));
            }
        }
        Ok(())
    }
}
