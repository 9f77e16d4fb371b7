//! Derivative-free Nelder-Mead simplex minimiser with box projection.

const REFLECT: f64 = 1.0;
const EXPAND: f64 = 2.0;
const CONTRACT: f64 = 0.5;
const SHRINK: f64 = 0.5;
/// Initial simplex edge as a fraction of each dimension's range.
const INITIAL_STEP: f64 = 0.1;
const MIN_DIAMETER: f64 = 1e-6;

#[derive(Debug, Clone, PartialEq)]
pub struct NelderMeadResult {
    pub best_point: Vec<f64>,
    pub best_value: f64,
    pub evaluations: usize,
    /// True when the simplex collapsed below the diameter tolerance before
    /// the budget ran out.
    pub converged: bool,
}

struct Evaluator<'a, F> {
    f: F,
    bounds: &'a [(f64, f64)],
    budget: usize,
    used: usize,
    best: Option<(Vec<f64>, f64)>,
}

impl<F, E> Evaluator<'_, F>
where
    F: FnMut(&[f64]) -> Result<f64, E>,
{
    fn exhausted(&self) -> bool {
        self.used >= self.budget
    }

    fn eval(&mut self, mut x: Vec<f64>) -> Result<(Vec<f64>, f64), E> {
        for (v, (lo, hi)) in x.iter_mut().zip(self.bounds) {
            *v = v.clamp(*lo, *hi);
        }
        let y = (self.f)(&x)?;
        self.used += 1;
        if self.best.as_ref().is_none_or(|(_, b)| y < *b) {
            self.best = Some((x.clone(), y));
        }
        Ok((x, y))
    }
}

fn diameter(simplex: &[(Vec<f64>, f64)]) -> f64 {
    let mut d: f64 = 0.0;
    for (i, (a, _)) in simplex.iter().enumerate() {
        for (b, _) in &simplex[i + 1..] {
            let dist = a
                .iter()
                .zip(b)
                .map(|(p, q)| (p - q) * (p - q))
                .sum::<f64>()
                .sqrt();
            d = d.max(dist);
        }
    }
    d
}

/// Minimises `f` over the box starting from `start`, spending at most
/// `budget` evaluations. Every trial point is clamped into the box.
pub fn nelder_mead<F, E>(
    f: F,
    start: &[f64],
    bounds: &[(f64, f64)],
    budget: usize,
) -> Result<NelderMeadResult, E>
where
    F: FnMut(&[f64]) -> Result<f64, E>,
{
    assert_eq!(
        start.len(),
        bounds.len(),
        "start point and bounds differ in dimension"
    );
    let n = start.len();
    let mut ev = Evaluator {
        f,
        bounds,
        budget: budget.max(1),
        used: 0,
        best: None,
    };
    let finish = |ev: Evaluator<'_, F>, converged: bool| {
        let (best_point, best_value) = ev.best.expect("at least one evaluation");
        NelderMeadResult {
            best_point,
            best_value,
            evaluations: ev.used,
            converged,
        }
    };

    let mut simplex = vec![ev.eval(start.to_vec())?];
    for i in 0..n {
        if ev.exhausted() {
            return Ok(finish(ev, false));
        }
        let (lo, hi) = bounds[i];
        let step = INITIAL_STEP * (hi - lo);
        let mut x = simplex[0].0.clone();
        x[i] = if x[i] + step <= hi {
            x[i] + step
        } else {
            x[i] - step
        };
        simplex.push(ev.eval(x)?);
    }

    loop {
        simplex.sort_by(|a, b| a.1.total_cmp(&b.1));
        if diameter(&simplex) < MIN_DIAMETER {
            return Ok(finish(ev, true));
        }
        if ev.exhausted() {
            return Ok(finish(ev, false));
        }
        let worst = simplex[n].clone();
        let centroid: Vec<f64> = (0..n)
            .map(|d| simplex[..n].iter().map(|(x, _)| x[d]).sum::<f64>() / n as f64)
            .collect();
        let toward = |from: &[f64], coef: f64| -> Vec<f64> {
            centroid
                .iter()
                .zip(from)
                .map(|(c, x)| c + coef * (x - c))
                .collect()
        };

        let reflected = ev.eval(toward(&worst.0, -REFLECT))?;
        if reflected.1 < simplex[0].1 {
            if ev.exhausted() {
                simplex[n] = reflected;
                continue;
            }
            let expanded = ev.eval(toward(&reflected.0, EXPAND))?;
            simplex[n] = if expanded.1 < reflected.1 {
                expanded
            } else {
                reflected
            };
            continue;
        }
        if reflected.1 < simplex[n - 1].1 {
            simplex[n] = reflected;
            continue;
        }
        if ev.exhausted() {
            continue;
        }
        let contracted = if reflected.1 < worst.1 {
            let c = ev.eval(toward(&reflected.0, CONTRACT))?;
            (c.1 <= reflected.1).then_some(c)
        } else {
            let c = ev.eval(toward(&worst.0, CONTRACT))?;
            (c.1 < worst.1).then_some(c)
        };
        if let Some(c) = contracted {
            simplex[n] = c;
            continue;
        }
        let best = simplex[0].0.clone();
        for vertex in simplex.iter_mut().skip(1) {
            if ev.exhausted() {
                break;
            }
            let x: Vec<f64> = best
                .iter()
                .zip(&vertex.0)
                .map(|(b, v)| b + SHRINK * (v - b))
                .collect();
            *vertex = ev.eval(x)?;
        }
    }
}
