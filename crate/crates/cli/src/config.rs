use std::collections::BTreeMap;
use std::fs;
use std::path::{Path, PathBuf};

use serde::Deserialize;

use reqmine::acquisition::{AcquisitionConfig, BetaRule, KernelFamily, Strategy};
use reqmine::mining::templates::{self, Template};
use reqmine::mining::MiningConfig;
use reqmine::stl::{parse_formula, Monotonicity, ParamKind, ParameterSpec, ParametricFormula};
use reqmine::systems::Transmission;

use crate::CliError;

/// Flat key-value run configuration, read from JSON. Every command-line
/// flag sets the key of the same name and wins over the file.
#[derive(Debug, Clone, Default, PartialEq, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct RunConfig {
    pub system: Option<String>,
    /// Number of piecewise-constant input segments of the transmission.
    pub segments: Option<usize>,
    /// Built-in template name (`sp_rpm`, `rpm100`, `stay`).
    pub template: Option<String>,
    /// Formula text: a concrete formula, or a custom template with `params`.
    pub formula: Option<String>,
    pub params: Option<Vec<ParamDecl>>,
    /// Parameter values used to instantiate a template for `falsify`.
    pub valuation: Option<BTreeMap<String, f64>>,
    pub trace: Option<PathBuf>,
    /// Where `falsify` writes the counterexample trace.
    pub trace_out: Option<PathBuf>,
    pub strategy: Option<String>,
    pub strategies: Option<Vec<String>>,
    pub kernel: Option<String>,
    pub kernels: Option<Vec<String>>,
    pub xi: Option<f64>,
    pub xis: Option<Vec<f64>>,
    pub delta: Option<f64>,
    pub budget: Option<usize>,
    pub candidates: Option<usize>,
    pub batch_size: Option<usize>,
    pub noise_var: Option<f64>,
    pub lengthscale: Option<f64>,
    pub observation_noise: Option<f64>,
    pub beta_rule: Option<String>,
    pub epsilon: Option<f64>,
    pub synthesis_tol: Option<f64>,
    pub falsification_budget: Option<usize>,
    pub max_rounds: Option<usize>,
    pub init_samples: Option<usize>,
    pub local_candidates: Option<usize>,
    pub local_spread: Option<f64>,
    pub validate_samples: Option<usize>,
    pub trials: Option<usize>,
    pub seed: Option<u64>,
    pub jobs: Option<usize>,
    pub out: Option<PathBuf>,
}

#[derive(Debug, Clone, PartialEq, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ParamDecl {
    pub name: String,
    pub kind: String,
    pub lower: f64,
    pub upper: f64,
    pub monotonicity: Option<String>,
}

macro_rules! overlay_fields {
    ($dst:ident, $src:ident; $($f:ident),* $(,)?) => {
        $(if $src.$f.is_some() { $dst.$f = $src.$f; })*
    };
}

fn config_err(msg: impl Into<String>) -> CliError {
    CliError::Config(msg.into())
}

impl RunConfig {
    pub fn load(path: &Path) -> Result<Self, CliError> {
        let text = fs::read_to_string(path)
            .map_err(|e| config_err(format!("cannot read {}: {e}", path.display())))?;
        serde_json::from_str(&text).map_err(|e| config_err(format!("{}: {e}", path.display())))
    }

    /// Sets every key present in `top`.
    pub fn overlay(&mut self, top: RunConfig) {
        overlay_fields!(self, top;
            system, segments, template, formula, params, valuation, trace, trace_out,
            strategy, strategies, kernel, kernels, xi, xis, delta, budget, candidates,
            batch_size, noise_var, lengthscale, observation_noise, beta_rule, epsilon,
            synthesis_tol, falsification_budget, max_rounds, init_samples, local_candidates,
            local_spread, validate_samples,
            trials, seed, jobs, out,
        );
    }

    pub fn seed(&self) -> u64 {
        self.seed.unwrap_or(0)
    }

    pub fn system(&self) -> Result<Transmission, CliError> {
        match self.system.as_deref().unwrap_or("transmission") {
            "transmission" => match self.segments.unwrap_or(2) {
                0 => Err(config_err("segments must be at least 1")),
                n => Ok(Transmission::new(n)),
            },
            other => Err(config_err(format!("unknown system '{other}'"))),
        }
    }

    /// The template to mine: a built-in by name, or `formula` with `params`.
    pub fn template(&self) -> Result<Template, CliError> {
        match (&self.template, &self.formula, &self.params) {
            (Some(name), None, None) => templates::by_name(name).ok_or_else(|| {
                config_err(format!(
                    "unknown template '{name}' (expected one of {})",
                    templates::NAMES.join(", ")
                ))
            }),
            (None, Some(text), Some(decls)) => {
                let params = decls
                    .iter()
                    .map(ParamDecl::to_spec)
                    .collect::<Result<Vec<_>, _>>()?;
                let formula = ParametricFormula::new(
                    parse_formula(text).map_err(|e| config_err(e.to_string()))?,
                    params,
                )
                .map_err(|e| config_err(e.to_string()))?;
                Ok(Template {
                    name: "custom",
                    formula,
                    epsilon: self.epsilon.unwrap_or(1.0),
                })
            }
            (None, Some(_), None) => Err(config_err("a custom template needs `params`")),
            (None, None, _) => Err(config_err("no template given")),
            _ => Err(config_err(
                "give either `template` or `formula` with `params`, not both",
            )),
        }
    }

    pub fn strategy(&self, default: Strategy) -> Result<Strategy, CliError> {
        self.strategy.as_deref().map_or(Ok(default), parse_strategy)
    }

    pub fn kernel(&self, default: KernelFamily) -> Result<KernelFamily, CliError> {
        self.kernel.as_deref().map_or(Ok(default), parse_kernel)
    }

    /// Strategies for a benchmark: `strategies`, else `strategy`, else the
    /// given defaults.
    pub fn strategy_list(&self, default: &[Strategy]) -> Result<Vec<Strategy>, CliError> {
        match (&self.strategies, &self.strategy) {
            (Some(list), _) => list.iter().map(|s| parse_strategy(s)).collect(),
            (None, Some(one)) => Ok(vec![parse_strategy(one)?]),
            (None, None) => Ok(default.to_vec()),
        }
    }

    pub fn kernel_list(&self, default: &[KernelFamily]) -> Result<Vec<KernelFamily>, CliError> {
        match (&self.kernels, &self.kernel) {
            (Some(list), _) => list.iter().map(|s| parse_kernel(s)).collect(),
            (None, Some(one)) => Ok(vec![parse_kernel(one)?]),
            (None, None) => Ok(default.to_vec()),
        }
    }

    /// Acquisition settings with the keys present here applied over `base`.
    pub fn acquisition(&self, base: AcquisitionConfig) -> Result<AcquisitionConfig, CliError> {
        let mut cfg = AcquisitionConfig {
            strategy: self.strategy(base.strategy)?,
            kernel: self.kernel(base.kernel)?,
            xi: self.xi.unwrap_or(base.xi),
            delta: self.delta.unwrap_or(base.delta),
            budget: self.budget.unwrap_or(base.budget),
            candidates: self.candidates.unwrap_or(base.candidates),
            batch_size: self.batch_size.unwrap_or(base.batch_size),
            noise_var: self.noise_var.unwrap_or(base.noise_var),
            lengthscale: self.lengthscale.or(base.lengthscale),
            observation_noise: self.observation_noise.or(base.observation_noise),
            ..base
        };
        if let Some(rule) = &self.beta_rule {
            cfg.beta_rule = match rule.as_str() {
                "finite" => BetaRule::FiniteDomain,
                "continuous" => BetaRule::Continuous,
                other => return Err(config_err(format!("unknown beta rule '{other}'"))),
            };
        }
        cfg.validate().map_err(|e| config_err(e.to_string()))?;
        Ok(cfg)
    }

    pub fn mining(&self, template: &Template) -> Result<MiningConfig, CliError> {
        let defaults = MiningConfig::default();
        let acquisition = self.acquisition(AcquisitionConfig {
            xi: 0.5,
            ..defaults.acquisition.clone()
        })?;
        let cfg = MiningConfig {
            epsilon: self.epsilon.unwrap_or(template.epsilon),
            synthesis_tol: self.synthesis_tol.unwrap_or(defaults.synthesis_tol),
            falsification_budget: self
                .falsification_budget
                .unwrap_or(defaults.falsification_budget),
            max_rounds: self.max_rounds.unwrap_or(defaults.max_rounds),
            init_samples: self.init_samples.unwrap_or(defaults.init_samples),
            local_candidates: self.local_candidates.unwrap_or(defaults.local_candidates),
            local_spread: self.local_spread.unwrap_or(defaults.local_spread),
            acquisition,
            seed: self.seed(),
        };
        cfg.validate().map_err(|e| config_err(e.to_string()))?;
        Ok(cfg)
    }

    pub fn trials(&self, default: usize) -> Result<usize, CliError> {
        match self.trials.unwrap_or(default) {
            0 => Err(config_err("trials must be at least 1")),
            n => Ok(n),
        }
    }
}

fn parse_strategy(s: &str) -> Result<Strategy, CliError> {
    s.parse()
        .map_err(|e: reqmine::acquisition::AcquisitionError| config_err(e.to_string()))
}

fn parse_kernel(s: &str) -> Result<KernelFamily, CliError> {
    s.parse()
        .map_err(|e: reqmine::acquisition::AcquisitionError| config_err(e.to_string()))
}

impl ParamDecl {
    fn to_spec(&self) -> Result<ParameterSpec, CliError> {
        let kind = match self.kind.as_str() {
            "scale" => ParamKind::Scale,
            "time" => ParamKind::Time,
            other => {
                return Err(config_err(format!(
                    "parameter '{}': unknown kind '{other}'",
                    self.name
                )))
            }
        };
        let monotonicity = match self.monotonicity.as_deref() {
            None => None,
            Some("increasing") => Some(Monotonicity::Increasing),
            Some("decreasing") => Some(Monotonicity::Decreasing),
            Some(other) => {
                return Err(config_err(format!(
                    "parameter '{}': unknown monotonicity '{other}'",
                    self.name
                )))
            }
        };
        ParameterSpec::new(
            self.name.clone(),
            kind,
            self.lower,
            self.upper,
            monotonicity,
        )
        .map_err(|e| config_err(e.to_string()))
    }
}
