use super::{GpError, Kernel};

/// Posterior mean and latent-function variance at one query point.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Prediction {
    pub mean: f64,
    pub variance: f64,
    /// Magnitude of a negative variance clipped to zero (0 when none).
    pub clipped: f64,
}

/// Zero-mean GP posterior conditioned on noisy observations.
///
/// Holds the lower Cholesky factor `L` of `K + (σ² + jitter) I`, packed row
/// by row, and `z = L⁻¹ y`. Appending an observation adds one row to `L` and
/// one entry to `z`; nothing already computed changes.
#[derive(Debug, Clone, PartialEq)]
pub struct GpPosterior {
    kernel: Kernel,
    noise_var: f64,
    jitter: f64,
    xs: Vec<Vec<f64>>,
    ys: Vec<f64>,
    factor: Vec<f64>,
    z: Vec<f64>,
}

fn row_start(i: usize) -> usize {
    i * (i + 1) / 2
}

impl GpPosterior {
    pub fn new(kernel: Kernel, noise_var: f64) -> Result<Self, GpError> {
        if !(noise_var > 0.0 && noise_var.is_finite()) {
            return Err(GpError::InvalidNoise(noise_var));
        }
        Ok(GpPosterior {
            kernel,
            noise_var,
            jitter: 0.0,
            xs: Vec::new(),
            ys: Vec::new(),
            factor: Vec::new(),
            z: Vec::new(),
        })
    }

    /// Batch fit on a full dataset.
    pub fn fit(
        kernel: Kernel,
        noise_var: f64,
        xs: Vec<Vec<f64>>,
        ys: Vec<f64>,
    ) -> Result<Self, GpError> {
        let mut gp = GpPosterior::new(kernel, noise_var)?;
        if xs.len() != ys.len() {
            return Err(GpError::DimensionMismatch {
                expected: xs.len(),
                got: ys.len(),
            });
        }
        if let Some(first) = xs.first() {
            if let Some(bad) = xs.iter().find(|x| x.len() != first.len()) {
                return Err(GpError::DimensionMismatch {
                    expected: first.len(),
                    got: bad.len(),
                });
            }
        }
        gp.xs = xs;
        gp.ys = ys;
        gp.refactor()?;
        Ok(gp)
    }

    pub fn kernel(&self) -> &Kernel {
        &self.kernel
    }

    pub fn noise_var(&self) -> f64 {
        self.noise_var
    }

    /// Diagonal jitter added on top of the noise variance (0 unless a
    /// factorization needed it).
    pub fn jitter(&self) -> f64 {
        self.jitter
    }

    pub fn len(&self) -> usize {
        self.xs.len()
    }

    pub fn is_empty(&self) -> bool {
        self.xs.is_empty()
    }

    pub fn inputs(&self) -> &[Vec<f64>] {
        &self.xs
    }

    pub fn outputs(&self) -> &[f64] {
        &self.ys
    }

    pub fn dim(&self) -> Option<usize> {
        self.xs.first().map(Vec::len)
    }

    /// Entry `(i, j)` of the Cholesky factor, `j <= i`.
    pub fn factor(&self, i: usize, j: usize) -> f64 {
        debug_assert!(j <= i);
        self.factor[row_start(i) + j]
    }

    pub(crate) fn factor_row(&self, i: usize) -> &[f64] {
        &self.factor[row_start(i)..row_start(i + 1)]
    }

    /// `L⁻¹ y`.
    pub(crate) fn whitened_outputs(&self) -> &[f64] {
        &self.z
    }

    fn check_dim(&self, x: &[f64]) -> Result<(), GpError> {
        match self.dim() {
            Some(d) if d != x.len() => Err(GpError::DimensionMismatch {
                expected: d,
                got: x.len(),
            }),
            _ => Ok(()),
        }
    }

    /// Solves `L v = k(X, x)`.
    fn whiten(&self, x: &[f64]) -> Vec<f64> {
        let n = self.len();
        let mut v = Vec::with_capacity(n);
        for i in 0..n {
            let row = self.factor_row(i);
            let mut acc = self.kernel.eval_unchecked(&self.xs[i], x);
            for (l, vj) in row[..i].iter().zip(&v) {
                acc -= l * vj;
            }
            v.push(acc / row[i]);
        }
        v
    }

    /// Returns the posterior conditioned additionally on `(x, y)`.
    pub fn update(&self, x: &[f64], y: f64) -> Result<GpPosterior, GpError> {
        self.check_dim(x)?;
        if !y.is_finite() {
            return Err(GpError::NonFiniteObservation(y));
        }
        let mut next = self.clone();
        let v = self.whiten(x);
        let diag = self.kernel.eval_unchecked(x, x) + self.noise_var + self.jitter
            - v.iter().map(|a| a * a).sum::<f64>();
        next.xs.push(x.to_vec());
        next.ys.push(y);
        if diag > 0.0 && diag.is_finite() {
            let d = diag.sqrt();
            let zi = (y - v.iter().zip(&self.z).map(|(a, b)| a * b).sum::<f64>()) / d;
            next.factor.extend(v);
            next.factor.push(d);
            next.z.push(zi);
            Ok(next)
        } else {
            next.refactor()?;
            Ok(next)
        }
    }

    /// Recomputes the factorization from scratch; on failure adds a
    /// trace-scaled jitter of 1e-10 and retries once.
    fn refactor(&mut self) -> Result<(), GpError> {
        let base = self.jitter;
        if self.try_factor(base).is_ok() {
            return Ok(());
        }
        let n = self.len() as f64;
        let trace = n * (1.0 + self.noise_var + base);
        let jitter = base + 1e-10 * trace;
        self.try_factor(jitter)
            .map_err(|_| GpError::FactorizationFailed { size: self.len() })
    }

    fn try_factor(&mut self, jitter: f64) -> Result<(), ()> {
        let n = self.len();
        let mut l = vec![0.0; row_start(n)];
        for i in 0..n {
            for j in 0..=i {
                let mut acc = self.kernel.eval_unchecked(&self.xs[i], &self.xs[j]);
                if i == j {
                    acc += self.noise_var + jitter;
                }
                for p in 0..j {
                    acc -= l[row_start(i) + p] * l[row_start(j) + p];
                }
                if i == j {
                    if !(acc > 0.0 && acc.is_finite()) {
                        return Err(());
                    }
                    l[row_start(i) + i] = acc.sqrt();
                } else {
                    l[row_start(i) + j] = acc / l[row_start(j) + j];
                }
            }
        }
        let mut z = Vec::with_capacity(n);
        for i in 0..n {
            let mut acc = self.ys[i];
            for (p, zp) in z.iter().enumerate() {
                acc -= l[row_start(i) + p] * zp;
            }
            z.push(acc / l[row_start(i) + i]);
        }
        self.factor = l;
        self.z = z;
        self.jitter = jitter;
        Ok(())
    }

    pub fn predict(&self, x: &[f64]) -> Result<Prediction, GpError> {
        self.check_dim(x)?;
        let v = self.whiten(x);
        let mean = v.iter().zip(&self.z).map(|(a, b)| a * b).sum();
        let raw = self.kernel.eval_unchecked(x, x) - v.iter().map(|a| a * a).sum::<f64>();
        Ok(clip(mean, raw))
    }
}

pub(crate) fn clip(mean: f64, raw: f64) -> Prediction {
    if raw < 0.0 {
        Prediction {
            mean,
            variance: 0.0,
            clipped: -raw,
        }
    } else {
        Prediction {
            mean,
            variance: raw,
            clipped: 0.0,
        }
    }
}

/// Sequential information gain `½ Σ ln(1 + σ⁻² σ²_{t-1}(x_t))` of the
/// selected points, given the predictive variance each had when chosen.
pub fn information_gain(variance_history: &[f64], noise_var: f64) -> Result<f64, GpError> {
    if !(noise_var > 0.0) {
        return Err(GpError::InvalidNoise(noise_var));
    }
    variance_history.iter().try_fold(0.0, |acc, &v| {
        if v < 0.0 || v.is_nan() {
            Err(GpError::NegativeVariance(v))
        } else {
            Ok(acc + 0.5 * (v / noise_var).ln_1p())
        }
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;

    fn rbf() -> Kernel {
        Kernel::gaussian(1.0).unwrap()
    }

    #[test]
    fn empty_posterior_is_the_prior() {
        let gp = GpPosterior::new(rbf(), 0.025).unwrap();
        let p = gp.predict(&[0.4, 2.0]).unwrap();
        assert_eq!((p.mean, p.variance), (0.0, 1.0));
    }

    #[test]
    fn one_observation_closed_form() {
        let gp = GpPosterior::new(rbf(), 0.025)
            .unwrap()
            .update(&[0.5], 2.0)
            .unwrap();
        let p = gp.predict(&[0.5]).unwrap();
        assert_relative_eq!(p.mean, 2.0 / 1.025, epsilon = 1e-12);
        assert_relative_eq!(p.variance, 1.0 - 1.0 / 1.025, epsilon = 1e-12);
        assert_relative_eq!(p.mean, 1.951_219_512_195_122, epsilon = 1e-12);
        assert_relative_eq!(p.variance, 0.024_390_243_902_439, epsilon = 1e-12);
    }

    #[test]
    fn duplicate_observation_closed_form() {
        // Two identical inputs with the same output y: K + σ²I = [[1+s, 1], [1, 1+s]],
        // mean at x = 2y / (2 + s), variance = 1 - 2 / (2 + s).
        let s = 0.025;
        let y = 1.5;
        let gp = GpPosterior::new(rbf(), s)
            .unwrap()
            .update(&[0.0], y)
            .unwrap()
            .update(&[0.0], y)
            .unwrap();
        let p = gp.predict(&[0.0]).unwrap();
        assert_relative_eq!(p.mean, 2.0 * y / (2.0 + s), epsilon = 1e-12);
        assert_relative_eq!(p.variance, 1.0 - 2.0 / (2.0 + s), epsilon = 1e-12);
    }

    #[test]
    fn far_from_data_reverts_to_prior() {
        let gp =
            GpPosterior::fit(rbf(), 0.025, vec![vec![0.0], vec![1.0]], vec![3.0, -2.0]).unwrap();
        let p = gp.predict(&[100.0]).unwrap();
        assert!(p.mean.abs() < 1e-12);
        assert!((p.variance - 1.0).abs() < 1e-12);
    }

    #[test]
    fn incremental_chain_matches_batch_fit() {
        let xs: Vec<Vec<f64>> = (0..10)
            .map(|i| vec![(i as f64 * 0.37).sin() * 2.0, (i as f64 * 0.91).cos()])
            .collect();
        let ys: Vec<f64> = xs.iter().map(|x| x[0] * x[1] + x[0].sin()).collect();
        let kernel = Kernel::matern(0.8, 2.5).unwrap();
        let mut inc = GpPosterior::new(kernel, 0.025).unwrap();
        for (x, y) in xs.iter().zip(&ys) {
            inc = inc.update(x, *y).unwrap();
        }
        let batch = GpPosterior::fit(kernel, 0.025, xs, ys).unwrap();
        for q in [[0.1, 0.2], [-1.5, 0.7], [3.0, -3.0]] {
            let a = inc.predict(&q).unwrap();
            let b = batch.predict(&q).unwrap();
            assert!((a.mean - b.mean).abs() < 1e-8);
            assert!((a.variance - b.variance).abs() < 1e-8);
        }
    }

    #[test]
    fn dimension_checks() {
        let gp = GpPosterior::new(rbf(), 0.1)
            .unwrap()
            .update(&[0.0, 1.0], 1.0)
            .unwrap();
        assert!(matches!(
            gp.predict(&[0.0]),
            Err(GpError::DimensionMismatch { .. })
        ));
        assert!(matches!(
            gp.update(&[0.0], 1.0),
            Err(GpError::DimensionMismatch { .. })
        ));
        assert!(GpPosterior::new(rbf(), 0.0).is_err());
    }

    #[test]
    fn information_gain_values() {
        assert_eq!(information_gain(&[], 0.025).unwrap(), 0.0);
        assert_eq!(information_gain(&[0.0, 0.0, 0.0], 0.025).unwrap(), 0.0);
        assert_relative_eq!(
            information_gain(&[1.0], 0.025).unwrap(),
            0.5 * 41f64.ln(),
            epsilon = 1e-12
        );
        assert_relative_eq!(
            information_gain(&[1.0], 0.025).unwrap(),
            1.856_786_033_352_154,
            epsilon = 1e-12
        );
        assert!(matches!(
            information_gain(&[0.5, -0.1], 0.025),
            Err(GpError::NegativeVariance(_))
        ));
    }
}
