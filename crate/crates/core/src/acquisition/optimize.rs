use std::error::Error;
use std::fmt;

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, Normal};

use crate::gp::{CandidatePredictor, GpPosterior};

use super::config::{AcquisitionConfig, Mode, Strategy};
use super::domain::{random_point, Domain};
use super::nelder_mead::nelder_mead;
use super::strategy::{Selection, Selector};
use super::AcquisitionError;

/// One oracle call.
#[derive(Debug, Clone, PartialEq)]
pub struct Record {
    /// 1-based iteration number.
    pub iteration: usize,
    pub x: Vec<f64>,
    /// Candidate index, for candidate-set strategies.
    pub candidate: Option<usize>,
    /// Objective value returned by the oracle.
    pub value: f64,
    /// `value` plus observation noise; this is what the optimiser sees.
    pub observed: f64,
    /// Model state behind the choice (GP strategies only).
    pub model: Option<Selection>,
}

/// Complete history of an optimisation run.
#[derive(Debug, Clone, PartialEq)]
pub struct RunTrace {
    pub strategy: Strategy,
    pub mode: Mode,
    pub noise_var: f64,
    records: Vec<Record>,
    info_gain: Vec<f64>,
}

impl RunTrace {
    fn new(cfg: &AcquisitionConfig) -> Self {
        RunTrace {
            strategy: cfg.strategy,
            mode: cfg.mode,
            noise_var: cfg.noise_var,
            records: Vec::new(),
            info_gain: Vec::new(),
        }
    }

    fn push(&mut self, record: Record) {
        let prev = self.info_gain.last().copied().unwrap_or(0.0);
        let gain = record
            .model
            .map(|m| 0.5 * (m.sigma * m.sigma / self.noise_var).ln_1p())
            .unwrap_or(0.0);
        self.info_gain.push(prev + gain);
        self.records.push(record);
    }

    pub fn records(&self) -> &[Record] {
        &self.records
    }

    pub fn len(&self) -> usize {
        self.records.len()
    }

    pub fn is_empty(&self) -> bool {
        self.records.is_empty()
    }

    fn better(&self, a: f64, b: f64) -> bool {
        match self.mode {
            Mode::Maximize => a > b,
            Mode::Minimize => a < b,
        }
    }

    /// Record with the best observed value (earliest on ties).
    pub fn best(&self) -> Option<&Record> {
        self.records
            .iter()
            .fold(None, |best: Option<&Record>, r| match best {
                Some(b) if !self.better(r.observed, b.observed) => Some(b),
                _ => Some(r),
            })
    }

    /// Best observed value after each iteration.
    pub fn best_so_far(&self) -> Vec<f64> {
        self.running_best(|r| r.observed)
    }

    fn running_best(&self, key: impl Fn(&Record) -> f64) -> Vec<f64> {
        let mut out = Vec::with_capacity(self.records.len());
        for r in &self.records {
            let v = key(r);
            let next = match out.last() {
                Some(&b) if !self.better(v, b) => b,
                _ => v,
            };
            out.push(next);
        }
        out
    }

    fn instantaneous(&self, value: f64, optimum: f64) -> f64 {
        match self.mode {
            Mode::Maximize => optimum - value,
            Mode::Minimize => value - optimum,
        }
    }

    /// Gap between the best true objective value found so far and the known
    /// optimum, after each iteration.
    pub fn simple_regret(&self, optimum: f64) -> Vec<f64> {
        self.running_best(|r| r.value)
            .into_iter()
            .map(|v| self.instantaneous(v, optimum))
            .collect()
    }

    /// Cumulative regret `R_T = Σ r_t` with `r_t` measured on true values.
    pub fn cumulative_regret(&self, optimum: f64) -> f64 {
        self.records
            .iter()
            .map(|r| self.instantaneous(r.value, optimum))
            .sum()
    }

    /// Running sequential information gain after each iteration.
    pub fn information_gain(&self) -> &[f64] {
        &self.info_gain
    }

    /// `(min, max)` of the adaptive factor at the chosen points.
    pub fn eta_range(&self) -> Option<(f64, f64)> {
        self.records
            .iter()
            .filter_map(|r| r.model.map(|m| m.eta))
            .fold(None, |acc, e| {
                Some(match acc {
                    None => (e, e),
                    Some((lo, hi)) => (lo.min(e), hi.max(e)),
                })
            })
    }
}

#[derive(Debug)]
pub enum OptimizeError<E> {
    /// The objective failed; the trace holds every completed call.
    Oracle {
        source: E,
        partial: Box<RunTrace>,
    },
    Acquisition(AcquisitionError),
}

impl<E: fmt::Display> fmt::Display for OptimizeError<E> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            OptimizeError::Oracle { source, partial } => {
                write!(
                    f,
                    "objective failed after {} calls: {source}",
                    partial.len()
                )
            }
            OptimizeError::Acquisition(e) => e.fmt(f),
        }
    }
}

impl<E: Error + 'static> Error for OptimizeError<E> {
    fn source(&self) -> Option<&(dyn Error + 'static)> {
        match self {
            OptimizeError::Oracle { source, .. } => Some(source),
            OptimizeError::Acquisition(e) => Some(e),
        }
    }
}

impl<E> From<AcquisitionError> for OptimizeError<E> {
    fn from(e: AcquisitionError) -> Self {
        OptimizeError::Acquisition(e)
    }
}

impl<E> From<crate::gp::GpError> for OptimizeError<E> {
    fn from(e: crate::gp::GpError) -> Self {
        OptimizeError::Acquisition(e.into())
    }
}

/// Runs `cfg.budget` iterations of the configured strategy.
pub fn optimize<E, F>(
    objective: F,
    domain: &Domain,
    cfg: &AcquisitionConfig,
) -> Result<RunTrace, OptimizeError<E>>
where
    F: FnMut(&[f64]) -> Result<f64, E>,
{
    optimize_until(objective, domain, cfg, |_| false)
}

/// Like [`optimize`], but stops right after the first record for which
/// `stop` returns true.
pub fn optimize_until<E, F, S>(
    mut objective: F,
    domain: &Domain,
    cfg: &AcquisitionConfig,
    mut stop: S,
) -> Result<RunTrace, OptimizeError<E>>
where
    F: FnMut(&[f64]) -> Result<f64, E>,
    S: FnMut(&Record) -> bool,
{
    cfg.validate()?;
    let mut noise_rng = ChaCha8Rng::seed_from_u64(cfg.seed);
    noise_rng.set_stream(1);
    let noise = match cfg.observation_noise {
        Some(v) if v > 0.0 => Some(Normal::new(0.0, v.sqrt()).expect("variance validated")),
        _ => None,
    };
    let mut observe = move |value: f64| match &noise {
        Some(n) => value + n.sample(&mut noise_rng),
        None => value,
    };
    let mut trace = RunTrace::new(cfg);

    if cfg.strategy == Strategy::NelderMead {
        return nelder_mead_restarts(&mut objective, &mut observe, domain, cfg, &mut stop, trace);
    }

    let sign = match cfg.mode {
        Mode::Maximize => 1.0,
        Mode::Minimize => -1.0,
    };
    let lengthscale = cfg
        .lengthscale
        .unwrap_or_else(|| domain.default_lengthscale());
    let kernel = cfg.kernel.with_lengthscale(lengthscale)?;
    let mut gp = GpPosterior::new(kernel, cfg.noise_var)?;
    let unit: Vec<Vec<f64>> = domain
        .candidates()
        .iter()
        .map(|c| domain.to_unit(c))
        .collect();
    let mut cache = CandidatePredictor::new(unit.clone());
    cache.sync(&gp)?;
    let mut selector = Selector::new(cfg)?;

    for t in 1..=cfg.budget {
        let sel = selector.select(&gp, &cache, t)?;
        let x = domain.candidates()[sel.index].clone();
        let value = match objective(&x) {
            Ok(v) => v,
            Err(source) => {
                return Err(OptimizeError::Oracle {
                    source,
                    partial: Box::new(trace),
                })
            }
        };
        let observed = observe(value);
        let record = Record {
            iteration: t,
            x,
            candidate: Some(sel.index),
            value,
            observed,
            model: Some(sel),
        };
        let halt = stop(&record);
        trace.push(record);
        if halt || t == cfg.budget {
            break;
        }
        gp = gp.update(&unit[sel.index], sign * cfg.xi * observed)?;
        cache.sync(&gp)?;
    }
    Ok(trace)
}

enum Halt<E> {
    Oracle(E),
    Stop,
}

fn nelder_mead_restarts<E, F, S>(
    objective: &mut F,
    observe: &mut impl FnMut(f64) -> f64,
    domain: &Domain,
    cfg: &AcquisitionConfig,
    stop: &mut S,
    mut trace: RunTrace,
) -> Result<RunTrace, OptimizeError<E>>
where
    F: FnMut(&[f64]) -> Result<f64, E>,
    S: FnMut(&Record) -> bool,
{
    let mut start_rng = ChaCha8Rng::seed_from_u64(cfg.seed);
    start_rng.set_stream(2);
    let sign = match cfg.mode {
        Mode::Maximize => -1.0,
        Mode::Minimize => 1.0,
    };
    let mut anchors = domain.anchors().iter();
    while trace.len() < cfg.budget {
        let start = match anchors.next() {
            Some(a) => a.clone(),
            None => random_point(domain.bounds(), &mut start_rng),
        };
        let remaining = cfg.budget - trace.len();
        let outcome = nelder_mead(
            |x: &[f64]| {
                let value = objective(x).map_err(Halt::Oracle)?;
                let observed = observe(value);
                let record = Record {
                    iteration: trace.len() + 1,
                    x: x.to_vec(),
                    candidate: None,
                    value,
                    observed,
                    model: None,
                };
                let halt = stop(&record);
                trace.push(record);
                if halt {
                    Err(Halt::Stop)
                } else {
                    Ok(sign * observed)
                }
            },
            &start,
            domain.bounds(),
            remaining,
        );
        match outcome {
            Ok(_) => {}
            Err(Halt::Stop) => break,
            Err(Halt::Oracle(source)) => {
                return Err(OptimizeError::Oracle {
                    source,
                    partial: Box::new(trace),
                })
            }
        }
    }
    Ok(trace)
}
