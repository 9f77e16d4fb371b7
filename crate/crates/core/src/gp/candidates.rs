use super::posterior::{clip, GpPosterior, Prediction};
use super::GpError;

/// Posterior predictions over a fixed candidate set, kept in sync with a
/// growing [`GpPosterior`] at `O(n·m)` per observation.
///
/// Stores `V = L⁻¹ K(X, C)` one row per observation; the mean is `Vᵀz` and
/// the variance `diag K(C, C) - colsum(V²)`.
#[derive(Debug, Clone)]
pub struct CandidatePredictor {
    candidates: Vec<Vec<f64>>,
    rows: Vec<Vec<f64>>,
    mean: Vec<f64>,
    sq_sum: Vec<f64>,
    prior: Vec<f64>,
    jitter: f64,
}

impl CandidatePredictor {
    pub fn new(candidates: Vec<Vec<f64>>) -> Self {
        let m = candidates.len();
        CandidatePredictor {
            candidates,
            rows: Vec::new(),
            mean: vec![0.0; m],
            sq_sum: vec![0.0; m],
            prior: Vec::new(),
            jitter: 0.0,
        }
    }

    pub fn candidates(&self) -> &[Vec<f64>] {
        &self.candidates
    }

    pub fn len(&self) -> usize {
        self.candidates.len()
    }

    pub fn is_empty(&self) -> bool {
        self.candidates.is_empty()
    }

    /// Brings the cache up to date with `gp`. Appended observations are
    /// folded in incrementally; anything else triggers a rebuild.
    pub fn sync(&mut self, gp: &GpPosterior) -> Result<(), GpError> {
        if let (Some(d), Some(c)) = (gp.dim(), self.candidates.first()) {
            if d != c.len() {
                return Err(GpError::DimensionMismatch {
                    expected: d,
                    got: c.len(),
                });
            }
        }
        if self.prior.is_empty() {
            self.prior = self
                .candidates
                .iter()
                .map(|c| gp.kernel().eval_unchecked(c, c))
                .collect();
        }
        if gp.jitter() != self.jitter || gp.len() < self.rows.len() {
            self.rows.clear();
            self.mean.iter_mut().for_each(|v| *v = 0.0);
            self.sq_sum.iter_mut().for_each(|v| *v = 0.0);
            self.jitter = gp.jitter();
        }
        let z = gp.whitened_outputs();
        for i in self.rows.len()..gp.len() {
            let l = gp.factor_row(i);
            let xi = &gp.inputs()[i];
            let mut row = Vec::with_capacity(self.candidates.len());
            for (j, c) in self.candidates.iter().enumerate() {
                let mut acc = gp.kernel().eval_unchecked(xi, c);
                for (p, prev) in self.rows.iter().enumerate() {
                    acc -= l[p] * prev[j];
                }
                row.push(acc / l[i]);
            }
            for (j, v) in row.iter().enumerate() {
                self.mean[j] += v * z[i];
                self.sq_sum[j] += v * v;
            }
            self.rows.push(row);
        }
        Ok(())
    }

    pub fn prediction(&self, j: usize) -> Prediction {
        clip(self.mean[j], self.prior[j] - self.sq_sum[j])
    }

    pub fn predictions(&self) -> Vec<Prediction> {
        (0..self.len()).map(|j| self.prediction(j)).collect()
    }
}
