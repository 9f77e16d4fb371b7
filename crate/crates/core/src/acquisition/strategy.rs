use std::collections::VecDeque;
use std::f64::consts::PI;

use crate::gp::{CandidatePredictor, GpPosterior, Prediction};

use super::config::{AcquisitionConfig, BetaRule, Strategy};
use super::domain::Domain;
use super::AcquisitionError;

/// `β_t = 2 ln(|D| π² t² / (6δ))`.
pub fn beta_schedule(t: usize, domain_size: usize, delta: f64) -> f64 {
    let t = t.max(1) as f64;
    2.0 * (domain_size.max(1) as f64 * PI * PI * t * t / (6.0 * delta)).ln()
}

/// `β_t = 2 ln(π² t² / (6δ))`, the schedule without the domain-size factor.
pub fn beta_continuous(t: usize, delta: f64) -> f64 {
    beta_schedule(t, 1, delta)
}

pub fn beta_for(cfg: &AcquisitionConfig, t: usize, domain_size: usize) -> f64 {
    match cfg.beta_rule {
        BetaRule::FiniteDomain => beta_schedule(t, domain_size, cfg.delta),
        BetaRule::Continuous => beta_continuous(t, cfg.delta),
    }
}

/// Min-max normalisation of posterior means onto [0, 1]. Constant means map
/// to all ones.
pub fn eta_normalize(means: &[f64]) -> Vec<f64> {
    let (lo, hi) = means
        .iter()
        .fold((f64::INFINITY, f64::NEG_INFINITY), |(lo, hi), &m| {
            (lo.min(m), hi.max(m))
        });
    let range = hi - lo;
    if !(range > 0.0) {
        return vec![1.0; means.len()];
    }
    means
        .iter()
        .map(|&m| {
            if m == hi {
                1.0
            } else {
                ((m - lo) / range).clamp(0.0, 1.0)
            }
        })
        .collect()
}

/// Acquisition score of every candidate. `eta` is only read by GP-ACB.
pub fn acquisition_scores(
    strategy: Strategy,
    predictions: &[Prediction],
    beta: f64,
    eta: &[f64],
) -> Vec<f64> {
    let root_beta = beta.sqrt();
    predictions
        .iter()
        .enumerate()
        .map(|(j, p)| {
            let sigma = p.variance.sqrt();
            match strategy {
                Strategy::GpAcb => p.mean + (eta[j] * beta).sqrt() * sigma,
                Strategy::GpUcb | Strategy::BatchGreedyUcb => p.mean + root_beta * sigma,
                Strategy::Explore => sigma,
                Strategy::Exploit => p.mean,
                Strategy::NelderMead => f64::NAN,
            }
        })
        .collect()
}

/// Index of the largest score; ties go to the lowest index.
pub fn argmax(scores: &[f64]) -> Option<usize> {
    let mut best: Option<(usize, f64)> = None;
    for (j, &s) in scores.iter().enumerate() {
        if best.is_none_or(|(_, b)| s > b) {
            best = Some((j, s));
        }
    }
    best.map(|(j, _)| j)
}

/// The candidate chosen at one iteration, with the model quantities that
/// drove the choice (in the GP's scaled, sign-adjusted units).
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Selection {
    pub index: usize,
    pub mean: f64,
    pub sigma: f64,
    pub beta: f64,
    pub eta: f64,
}

/// Stateful candidate selector. Only batch-greedy UCB carries state
/// between calls (the remainder of the current batch).
#[derive(Debug, Clone)]
pub struct Selector {
    cfg: AcquisitionConfig,
    pending: VecDeque<usize>,
}

impl Selector {
    pub fn new(cfg: &AcquisitionConfig) -> Result<Self, AcquisitionError> {
        cfg.validate()?;
        if cfg.strategy == Strategy::NelderMead {
            return Err(AcquisitionError::InvalidConfig(
                "nelder_mead does not select from a candidate set".into(),
            ));
        }
        Ok(Selector {
            cfg: cfg.clone(),
            pending: VecDeque::new(),
        })
    }

    /// Picks the iteration-`t` candidate. `cache` must be synced with `gp`;
    /// both live in the domain's unit-cube coordinates.
    pub fn select(
        &mut self,
        gp: &GpPosterior,
        cache: &CandidatePredictor,
        t: usize,
    ) -> Result<Selection, AcquisitionError> {
        if cache.is_empty() {
            return Err(AcquisitionError::EmptyCandidates);
        }
        let preds = cache.predictions();
        let means: Vec<f64> = preds.iter().map(|p| p.mean).collect();
        let eta = eta_normalize(&means);
        let beta = beta_for(&self.cfg, t, cache.len());
        let index = if self.cfg.strategy == Strategy::BatchGreedyUcb {
            if self.pending.is_empty() {
                self.pending = self.build_batch(gp, cache, &means, t)?.into();
            }
            self.pending.pop_front().expect("batch is non-empty")
        } else {
            let scores = acquisition_scores(self.cfg.strategy, &preds, beta, &eta);
            argmax(&scores).expect("candidates are non-empty")
        };
        Ok(Selection {
            index,
            mean: preds[index].mean,
            sigma: preds[index].variance.sqrt(),
            beta,
            eta: eta[index],
        })
    }

    /// Greedy UCB batch: after each pick, condition a scratch posterior on a
    /// fantasy observation equal to the current mean, which shrinks the
    /// variance around the pick without moving the mean.
    fn build_batch(
        &self,
        gp: &GpPosterior,
        cache: &CandidatePredictor,
        means: &[f64],
        t: usize,
    ) -> Result<Vec<usize>, AcquisitionError> {
        let size = self.cfg.batch_size.min(cache.len());
        let mut scratch_gp = gp.clone();
        let mut scratch = cache.clone();
        let mut batch: Vec<usize> = Vec::with_capacity(size);
        for b in 0..size {
            let beta = beta_for(&self.cfg, t + b, cache.len());
            let mut scores: Vec<f64> = (0..cache.len())
                .map(|j| means[j] + beta.sqrt() * scratch.prediction(j).variance.sqrt())
                .collect();
            for &j in &batch {
                scores[j] = f64::NEG_INFINITY;
            }
            let pick = argmax(&scores).expect("candidates are non-empty");
            batch.push(pick);
            if b + 1 < size {
                let x = &cache.candidates()[pick];
                scratch_gp = scratch_gp.update(x, means[pick])?;
                scratch.sync(&scratch_gp)?;
            }
        }
        Ok(batch)
    }
}

/// One-shot selection over `domain` for iteration `t`. `gp` must be
/// expressed in the domain's unit-cube coordinates. Batch-greedy UCB
/// returns the first element of a freshly built batch.
pub fn select_next(
    gp: &GpPosterior,
    domain: &Domain,
    cfg: &AcquisitionConfig,
    t: usize,
) -> Result<Selection, AcquisitionError> {
    if domain.is_empty() {
        return Err(AcquisitionError::EmptyCandidates);
    }
    let mut cache = CandidatePredictor::new(
        domain
            .candidates()
            .iter()
            .map(|c| domain.to_unit(c))
            .collect(),
    );
    cache.sync(gp)?;
    Selector::new(cfg)?.select(gp, &cache, t)
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;

    fn pred(mean: f64, sigma: f64) -> Prediction {
        Prediction {
            mean,
            variance: sigma * sigma,
            clipped: 0.0,
        }
    }

    #[test]
    fn beta_values() {
        assert_relative_eq!(
            beta_schedule(1, 1000, 0.1),
            19.416_081_348_893_854,
            epsilon = 1e-9
        );
        assert_relative_eq!(
            beta_schedule(1, 1, 1.0 - 1e-12),
            0.995_400_604_941_490_6,
            epsilon = 1e-9
        );
        assert!(beta_schedule(2, 1000, 0.1) > beta_schedule(1, 1000, 0.1));
        assert_relative_eq!(beta_continuous(3, 0.1), beta_schedule(3, 1, 0.1));
    }

    #[test]
    fn eta_examples() {
        assert_eq!(eta_normalize(&[1.0, 2.0, 3.0]), vec![0.0, 0.5, 1.0]);
        assert_eq!(eta_normalize(&[4.0, 4.0, 4.0]), vec![1.0, 1.0, 1.0]);
        assert_eq!(eta_normalize(&[-2.0, 0.0, 2.0]), vec![0.0, 0.5, 1.0]);
        assert_eq!(eta_normalize(&[3.0, 1.0, 3.0]), vec![1.0, 0.0, 1.0]);
    }

    #[test]
    fn adaptive_factor_changes_the_choice() {
        let preds = [pred(0.0, 1.0), pred(1.0, 0.1)];
        let eta = eta_normalize(&[0.0, 1.0]);
        let acb = acquisition_scores(Strategy::GpAcb, &preds, 4.0, &eta);
        assert_relative_eq!(acb[0], 0.0);
        assert_relative_eq!(acb[1], 1.2, epsilon = 1e-12);
        assert_eq!(argmax(&acb), Some(1));
        let ucb = acquisition_scores(Strategy::GpUcb, &preds, 4.0, &eta);
        assert_relative_eq!(ucb[0], 2.0);
        assert_eq!(argmax(&ucb), Some(0));
    }

    #[test]
    fn unit_eta_reduces_to_ucb() {
        let preds: Vec<Prediction> = (0..30)
            .map(|i| pred((i as f64 * 0.7).sin(), 0.1 + (i as f64 * 0.3).cos().abs()))
            .collect();
        let ones = vec![1.0; preds.len()];
        assert_eq!(
            acquisition_scores(Strategy::GpAcb, &preds, 7.3, &ones),
            acquisition_scores(Strategy::GpUcb, &preds, 7.3, &ones)
        );
    }

    #[test]
    fn exploit_and_explore() {
        let preds = [pred(3.0, 0.2), pred(5.0, 0.1), pred(4.0, 0.9)];
        let eta = vec![1.0; 3];
        assert_eq!(
            argmax(&acquisition_scores(Strategy::Exploit, &preds, 1.0, &eta)),
            Some(1)
        );
        assert_eq!(
            argmax(&acquisition_scores(Strategy::Explore, &preds, 1.0, &eta)),
            Some(2)
        );
    }

    #[test]
    fn ties_go_to_lowest_index() {
        assert_eq!(argmax(&[1.0, 3.0, 3.0, 2.0]), Some(1));
        assert_eq!(argmax(&[]), None);
    }

    #[test]
    fn empty_prior_selects_first_candidate() {
        let domain = Domain::sample(vec![(0.0, 1.0), (0.0, 1.0)], 20, 3).unwrap();
        let gp = GpPosterior::new(crate::gp::Kernel::gaussian(0.1).unwrap(), 0.025).unwrap();
        for strategy in [
            Strategy::GpAcb,
            Strategy::GpUcb,
            Strategy::Explore,
            Strategy::BatchGreedyUcb,
        ] {
            let cfg = AcquisitionConfig {
                strategy,
                ..Default::default()
            };
            assert_eq!(select_next(&gp, &domain, &cfg, 1).unwrap().index, 0);
        }
    }

    #[test]
    fn batch_spreads_out() {
        let domain = Domain::sample(vec![(0.0, 1.0)], 50, 9).unwrap();
        let gp = GpPosterior::new(crate::gp::Kernel::gaussian(0.1).unwrap(), 0.025).unwrap();
        let cfg = AcquisitionConfig {
            strategy: Strategy::BatchGreedyUcb,
            batch_size: 4,
            ..Default::default()
        };
        let mut cache = CandidatePredictor::new(domain.candidates().to_vec());
        cache.sync(&gp).unwrap();
        let mut sel = Selector::new(&cfg).unwrap();
        let picks: Vec<usize> = (1..=4)
            .map(|t| sel.select(&gp, &cache, t).unwrap().index)
            .collect();
        for (a, &i) in picks.iter().enumerate() {
            for &j in &picks[a + 1..] {
                assert!((domain.candidates()[i][0] - domain.candidates()[j][0]).abs() > 0.05);
            }
        }
    }
}
