use crate::acquisition::{
    optimize_until, AcquisitionConfig, Domain, Mode, OptimizeError, RunTrace,
};
use crate::stl::{robustness, Formula, Signal};
use crate::systems::SystemUnderTest;

use super::MiningError;

#[derive(Debug, Clone, PartialEq)]
pub enum FalsificationOutcome {
    /// A trace with robustness at most zero.
    Counterexample {
        x0: Vec<f64>,
        trace: Signal,
        robustness: f64,
    },
    /// Budget spent without a violation; the least robust input seen.
    NotFalsified {
        min_robustness: f64,
        argmin: Vec<f64>,
    },
}

#[derive(Debug, Clone, PartialEq)]
pub struct Falsification {
    pub outcome: FalsificationOutcome,
    pub simulations: usize,
    pub run: RunTrace,
}

impl Falsification {
    pub fn is_falsified(&self) -> bool {
        matches!(self.outcome, FalsificationOutcome::Counterexample { .. })
    }
}

/// Searches the system's input box for a trace violating `phi`.
///
/// The candidate set is `cfg.candidates` points: the box vertices followed
/// by uniform samples drawn with `cfg.seed`. Robustness zero counts as a
/// violation, matching the Boolean verdict.
pub fn falsify(
    system: &dyn SystemUnderTest,
    phi: &Formula,
    cfg: &AcquisitionConfig,
    budget: usize,
) -> Result<Falsification, MiningError> {
    let domain =
        Domain::sample_with_vertices(system.x0_bounds().to_vec(), cfg.candidates, cfg.seed)?;
    falsify_on(system, phi, cfg, budget, &domain)
}

/// [`falsify`] over an explicit candidate domain.
pub fn falsify_on(
    system: &dyn SystemUnderTest,
    phi: &Formula,
    cfg: &AcquisitionConfig,
    budget: usize,
    domain: &Domain,
) -> Result<Falsification, MiningError> {
    let horizon = phi.horizon();
    if horizon > system.sim_horizon() + 1e-9 {
        return Err(MiningError::HorizonTooLong {
            horizon,
            sim_horizon: system.sim_horizon(),
        });
    }
    let cfg = AcquisitionConfig {
        mode: Mode::Minimize,
        budget,
        ..cfg.clone()
    };
    let mut last: Option<Signal> = None;
    let run = optimize_until(
        |x0: &[f64]| -> Result<f64, MiningError> {
            let trace = system.simulate(x0)?;
            let r = robustness(&trace, phi, trace.t0())?;
            last = Some(trace);
            Ok(r)
        },
        domain,
        &cfg,
        |record| record.value <= 0.0,
    )
    .map_err(|e| match e {
        OptimizeError::Oracle { source, .. } => source,
        OptimizeError::Acquisition(e) => e.into(),
    })?;

    let simulations = run.len();
    let final_record = run.records().last().expect("budget is at least one");
    let outcome = if final_record.value <= 0.0 {
        FalsificationOutcome::Counterexample {
            x0: final_record.x.clone(),
            trace: last.expect("a simulation ran"),
            robustness: final_record.value,
        }
    } else {
        let best = run.best().expect("budget is at least one");
        FalsificationOutcome::NotFalsified {
            min_robustness: best.value,
            argmin: best.x.clone(),
        }
    };
    Ok(Falsification {
        outcome,
        simulations,
        run,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::acquisition::Strategy;
    use crate::stl::parse_formula;
    use crate::systems::Transmission;

    fn phi(text: &str) -> Formula {
        parse_formula(text).unwrap().to_concrete().unwrap()
    }

    fn cfg(strategy: Strategy) -> AcquisitionConfig {
        AcquisitionConfig {
            strategy,
            candidates: 300,
            seed: 3,
            ..Default::default()
        }
    }

    #[test]
    fn loose_bound_is_not_falsified() {
        let sys = Transmission::default();
        let f = falsify(
            &sys,
            &phi("G[0,30)(speed < 1000000)"),
            &cfg(Strategy::GpAcb),
            15,
        )
        .unwrap();
        assert_eq!(f.simulations, 15);
        match f.outcome {
            FalsificationOutcome::NotFalsified { min_robustness, .. } => {
                assert!(min_robustness > 1e6 - 200.0)
            }
            other => panic!("{other:?}"),
        }
    }

    #[test]
    fn reachable_speed_is_falsified() {
        let sys = Transmission::default();
        for strategy in [Strategy::GpAcb, Strategy::GpUcb, Strategy::NelderMead] {
            let f = falsify(&sys, &phi("G[0,30)(speed < 50)"), &cfg(strategy), 200).unwrap();
            assert!(f.is_falsified(), "{strategy}");
            assert!(f.simulations <= 200);
            if let FalsificationOutcome::Counterexample {
                x0,
                trace,
                robustness: r,
            } = f.outcome
            {
                assert_eq!(trace, sys.simulate(&x0).unwrap());
                assert!(r <= 0.0);
                assert_eq!(
                    robustness(&trace, &phi("G[0,30)(speed < 50)"), 0.0).unwrap(),
                    r
                );
            }
        }
    }

    #[test]
    fn budget_of_one() {
        let sys = Transmission::default();
        let f = falsify(&sys, &phi("G[0,30)(speed < 50)"), &cfg(Strategy::GpAcb), 1).unwrap();
        assert_eq!(f.simulations, 1);
    }

    #[test]
    fn horizon_must_fit() {
        let sys = Transmission::default();
        let err = falsify(&sys, &phi("G[0,31)(speed < 50)"), &cfg(Strategy::GpAcb), 5).unwrap_err();
        assert!(matches!(err, MiningError::HorizonTooLong { .. }));
    }
}
