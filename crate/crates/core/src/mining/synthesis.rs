use crate::stl::{robustness, Monotonicity, ParameterSpec, ParametricFormula, Valuation};

use super::{CounterexampleSet, MiningError};

/// Cap on coordinate-descent sweeps; monotone templates settle in two.
const MAX_SWEEPS: usize = 64;

#[derive(Debug, Clone, PartialEq)]
pub struct Synthesis {
    pub valuation: Valuation,
    /// Minimum robustness of the instantiated formula over the traces.
    pub min_robustness: f64,
    /// Robustness evaluations spent (each covers every trace).
    pub evaluations: usize,
}

/// Minimum robustness at time 0 of `pf` under `theta` over all traces.
pub fn min_robustness(
    pf: &ParametricFormula,
    theta: &Valuation,
    traces: &CounterexampleSet,
) -> Result<f64, MiningError> {
    let phi = pf.instantiate(theta)?;
    let mut min = f64::INFINITY;
    for s in traces.traces() {
        min = min.min(robustness(s, &phi, s.t0())?);
    }
    Ok(min)
}

fn loose_end(p: &ParameterSpec, m: Monotonicity) -> f64 {
    match m {
        Monotonicity::Increasing => p.upper,
        Monotonicity::Decreasing => p.lower,
    }
}

fn tight_end(p: &ParameterSpec, m: Monotonicity) -> f64 {
    match m {
        Monotonicity::Increasing => p.lower,
        Monotonicity::Decreasing => p.upper,
    }
}

fn directions(pf: &ParametricFormula) -> Result<Vec<Monotonicity>, MiningError> {
    pf.params()
        .iter()
        .map(|p| {
            p.monotonicity
                .ok_or_else(|| MiningError::MissingMonotonicity(p.name.clone()))
        })
        .collect()
}

/// The valuation with the largest robustness: every parameter at the end of
/// its range where the formula is weakest.
pub fn loosest_valuation(pf: &ParametricFormula) -> Result<Valuation, MiningError> {
    let dirs = directions(pf)?;
    let mut theta = Valuation::new();
    for (p, &m) in pf.params().iter().zip(&dirs) {
        theta.set(&p.name, loose_end(p, m));
    }
    Ok(theta)
}

/// Tightest valuation whose minimum robustness over `traces` is positive.
///
/// Starting from the loosest corner, each parameter is bisected towards
/// its tight end, keeping the last value with positive robustness, until
/// the bracket is narrower than `tol` and the robustness at the feasible
/// end is at most `epsilon`. Sweeps repeat until no parameter moves by
/// more than `tol`. When robustness jumps past `epsilon` (time parameters
/// on a sampled grid can do this) bisection stops at floating-point
/// resolution and the result may exceed `epsilon`.
pub fn synthesize_parameters(
    pf: &ParametricFormula,
    traces: &CounterexampleSet,
    epsilon: f64,
    tol: f64,
) -> Result<Synthesis, MiningError> {
    if !(epsilon > 0.0) || !(tol > 0.0) {
        return Err(MiningError::InvalidConfig(format!(
            "epsilon and tolerance must be positive, got {epsilon} and {tol}"
        )));
    }
    let dirs = directions(pf)?;
    if traces.is_empty() {
        return Err(MiningError::NoTraces);
    }
    let mut theta = loosest_valuation(pf)?;
    let mut evaluations = 1;
    let mut best = min_robustness(pf, &theta, traces)?;
    if !(best > 0.0) {
        return Err(MiningError::Infeasible {
            min_robustness: best,
        });
    }

    for _ in 0..MAX_SWEEPS {
        let mut moved = false;
        for (p, &m) in pf.params().iter().zip(&dirs) {
            let start = theta
                .get(&p.name)
                .expect("valuation covers every parameter");
            let mut feasible = start;
            let mut infeasible = tight_end(p, m);
            if feasible == infeasible {
                continue;
            }
            let resolution = (p.upper - p.lower) * 1e-12;
            theta.set(&p.name, infeasible);
            evaluations += 1;
            let at_end = min_robustness(pf, &theta, traces)?;
            if at_end > 0.0 {
                feasible = infeasible;
                best = at_end;
            } else {
                while ((feasible - infeasible).abs() > tol || best > epsilon)
                    && (feasible - infeasible).abs() > resolution
                {
                    let mid = 0.5 * (feasible + infeasible);
                    theta.set(&p.name, mid);
                    evaluations += 1;
                    let r = min_robustness(pf, &theta, traces)?;
                    if r > 0.0 {
                        feasible = mid;
                        best = r;
                    } else {
                        infeasible = mid;
                    }
                }
            }
            theta.set(&p.name, feasible);
            moved |= (feasible - start).abs() > tol;
        }
        if !moved {
            break;
        }
    }
    Ok(Synthesis {
        valuation: theta,
        min_robustness: best,
        evaluations,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::stl::{parse_formula, Signal};

    fn speed_trace(peak: f64) -> Signal {
        let values: Vec<f64> = (0..=30).map(|k| peak * (k as f64 / 30.0)).collect();
        Signal::from_columns(vec![("speed".into(), values)], 0.0, 1.0).unwrap()
    }

    fn speed_template() -> ParametricFormula {
        ParametricFormula::new(
            parse_formula("G[0,30)(speed < $pi)").unwrap(),
            vec![ParameterSpec::scale("pi", 0.0, 200.0, Monotonicity::Increasing).unwrap()],
        )
        .unwrap()
    }

    fn set(peaks: &[f64]) -> CounterexampleSet {
        let mut s = CounterexampleSet::new();
        for &p in peaks {
            s.push(vec![p], speed_trace(p));
        }
        s
    }

    #[test]
    fn single_trace_closed_form() {
        // The sample at t = 30 is outside [0, 30), so the window peak is 80 * 29/30.
        let peak = 80.0 * 29.0 / 30.0;
        let r = synthesize_parameters(&speed_template(), &set(&[80.0]), 1.0, 1e-3).unwrap();
        let pi = r.valuation.get("pi").unwrap();
        assert!(pi > peak && pi <= peak + 1.0, "{pi}");
        assert!(r.min_robustness > 0.0 && r.min_robustness <= 1.0);
        assert!((r.min_robustness - (pi - peak)).abs() < 1e-9);
    }

    #[test]
    fn worst_trace_dominates() {
        let r = synthesize_parameters(&speed_template(), &set(&[80.0, 90.0]), 1.0, 1e-3).unwrap();
        let pi = r.valuation.get("pi").unwrap();
        let peak = 90.0 * 29.0 / 30.0;
        assert!(pi > peak && pi <= peak + 1.0, "{pi}");
    }

    #[test]
    fn infeasible_when_loosest_corner_fails() {
        let err = synthesize_parameters(&speed_template(), &set(&[300.0]), 1.0, 1e-3).unwrap_err();
        assert!(matches!(err, MiningError::Infeasible { min_robustness } if min_robustness < 0.0));
    }

    #[test]
    fn requires_monotonicity_and_traces() {
        let pf = ParametricFormula::new(
            parse_formula("G[0,30)(speed < $pi)").unwrap(),
            vec![ParameterSpec::new("pi", crate::stl::ParamKind::Scale, 0.0, 200.0, None).unwrap()],
        )
        .unwrap();
        assert_eq!(
            synthesize_parameters(&pf, &set(&[1.0]), 1.0, 1e-3),
            Err(MiningError::MissingMonotonicity("pi".into()))
        );
        assert_eq!(
            synthesize_parameters(&speed_template(), &CounterexampleSet::new(), 1.0, 1e-3),
            Err(MiningError::NoTraces)
        );
    }

    #[test]
    fn time_parameter_with_decreasing_robustness() {
        // G[0,tau)(speed < 50) on a ramp to 100 over 30 s: speed reaches 50 at t = 15,
        // so the tightest tau keeps sample 15 out of the window.
        let pf = ParametricFormula::new(
            parse_formula("G[0,$tau)(speed < 50)").unwrap(),
            vec![ParameterSpec::time("tau", 1.0, 30.0, Monotonicity::Decreasing).unwrap()],
        )
        .unwrap();
        let r = synthesize_parameters(&pf, &set(&[100.0]), 5.0, 1e-3).unwrap();
        let tau = r.valuation.get("tau").unwrap();
        assert!(tau > 14.99 && tau <= 15.0 + 1e-6, "{tau}");
        assert!(r.min_robustness > 0.0);
    }

    #[test]
    fn saturates_at_the_tight_end() {
        let pf = ParametricFormula::new(
            parse_formula("G[0,30)(speed < $pi)").unwrap(),
            vec![ParameterSpec::scale("pi", 90.0, 200.0, Monotonicity::Increasing).unwrap()],
        )
        .unwrap();
        let r = synthesize_parameters(&pf, &set(&[10.0]), 1.0, 1e-3).unwrap();
        assert_eq!(r.valuation.get("pi"), Some(90.0));
    }
}
