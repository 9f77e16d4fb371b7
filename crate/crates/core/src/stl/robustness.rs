use std::collections::VecDeque;

use super::formula::{Comparator, Formula, Interval};
use super::signal::Signal;
use super::StlError;

/// Grid offsets `[lo, hi)` of the samples inside `[t + a, t + b)`.
fn window_offsets(interval: &Interval<f64>, dt: f64) -> (usize, usize) {
    // Sample t + j*dt lies in the window iff a <= j*dt < b.
    let lo = (interval.start / dt - 1e-9).ceil().max(0.0) as usize;
    let hi = (interval.end / dt - 1e-9).ceil().max(0.0) as usize;
    (lo, hi)
}

/// Number of samples beyond the evaluation index that `phi` reads.
fn lookahead(phi: &Formula, dt: f64) -> Result<usize, StlError> {
    Ok(match phi {
        Formula::Predicate { .. } => 0,
        Formula::Not(p) => lookahead(p, dt)?,
        Formula::And(a, b) | Formula::Or(a, b) => lookahead(a, dt)?.max(lookahead(b, dt)?),
        Formula::Finally(i, p) | Formula::Globally(i, p) => {
            let (lo, hi) = window_offsets(i, dt);
            if hi <= lo {
                return Err(StlError::EmptyWindow {
                    start: i.start,
                    end: i.end,
                    dt,
                });
            }
            hi - 1 + lookahead(p, dt)?
        }
    })
}

/// Robustness of `phi` at every start index `first..first + count`.
fn eval(phi: &Formula, s: &Signal, first: usize, count: usize) -> Result<Vec<f64>, StlError> {
    match phi {
        Formula::Predicate {
            channel,
            cmp,
            threshold,
        } => {
            let ch = s
                .channel_index(channel)
                .ok_or_else(|| StlError::UnknownChannel(channel.clone()))?;
            Ok((first..first + count)
                .map(|k| {
                    let v = s.value(k, ch);
                    match cmp {
                        Comparator::Lt => threshold - v,
                        Comparator::Ge => v - threshold,
                    }
                })
                .collect())
        }
        Formula::Not(p) => {
            let mut r = eval(p, s, first, count)?;
            r.iter_mut().for_each(|v| *v = -*v);
            Ok(r)
        }
        Formula::And(a, b) => {
            let ra = eval(a, s, first, count)?;
            let rb = eval(b, s, first, count)?;
            Ok(ra.into_iter().zip(rb).map(|(x, y)| x.min(y)).collect())
        }
        Formula::Or(a, b) => {
            let ra = eval(a, s, first, count)?;
            let rb = eval(b, s, first, count)?;
            Ok(ra.into_iter().zip(rb).map(|(x, y)| x.max(y)).collect())
        }
        Formula::Finally(i, p) => {
            let (lo, hi) = window_offsets(i, s.dt());
            let inner = eval(p, s, first + lo, count + hi - lo - 1)?;
            Ok(sliding_extremum(&inner, hi - lo, |a, b| a >= b))
        }
        Formula::Globally(i, p) => {
            let (lo, hi) = window_offsets(i, s.dt());
            let inner = eval(p, s, first + lo, count + hi - lo - 1)?;
            Ok(sliding_extremum(&inner, hi - lo, |a, b| a <= b))
        }
    }
}

/// Extremum of every length-`width` window of `xs` (monotone deque).
/// `dominates(a, b)` is true when `a` makes `b` irrelevant.
fn sliding_extremum(xs: &[f64], width: usize, dominates: impl Fn(f64, f64) -> bool) -> Vec<f64> {
    debug_assert!(width >= 1 && xs.len() >= width);
    let mut out = Vec::with_capacity(xs.len() + 1 - width);
    let mut deque: VecDeque<usize> = VecDeque::with_capacity(width);
    for (j, &x) in xs.iter().enumerate() {
        while deque.back().is_some_and(|&b| dominates(x, xs[b])) {
            deque.pop_back();
        }
        deque.push_back(j);
        if deque.front().is_some_and(|&f| f + width <= j) {
            deque.pop_front();
        }
        if j + 1 >= width {
            out.push(xs[*deque.front().expect("window is non-empty")]);
        }
    }
    out
}

/// Quantitative robustness of `phi` on `s` at grid time `t`.
///
/// Positive values mean the signal satisfies the formula, negative values
/// that it violates it. Temporal windows range over grid samples in
/// `[t + a, t + b)`.
pub fn robustness(s: &Signal, phi: &Formula, t: f64) -> Result<f64, StlError> {
    let k = s.index_of(t).ok_or(StlError::OffGrid(t))?;
    Ok(robustness_series(s, phi, k, 1)?[0])
}

/// Robustness at `count` consecutive grid indices starting at `first`.
pub fn robustness_series(
    s: &Signal,
    phi: &Formula,
    first: usize,
    count: usize,
) -> Result<Vec<f64>, StlError> {
    let need = lookahead(phi, s.dt())?;
    let last = first + count.max(1) - 1 + need;
    if last >= s.len() {
        return Err(StlError::TraceTooShort {
            required: s.time(0) + last as f64 * s.dt(),
            available: s.end_time(),
        });
    }
    if count == 0 {
        return Ok(Vec::new());
    }
    eval(phi, s, first, count)
}

/// Boolean verdict derived from robustness. Robustness exactly zero counts
/// as a violation.
pub fn satisfies(s: &Signal, phi: &Formula, t: f64) -> Result<bool, StlError> {
    Ok(robustness(s, phi, t)? > 0.0)
}
