use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, Normal};

use super::AcquisitionError;

/// A box-shaped search space together with the fixed candidate set the
/// acquisition strategies choose from.
#[derive(Debug, Clone, PartialEq)]
pub struct Domain {
    bounds: Vec<(f64, f64)>,
    candidates: Vec<Vec<f64>>,
    seed: u64,
    anchors: Vec<Vec<f64>>,
}

fn check_bounds(bounds: &[(f64, f64)]) -> Result<(), AcquisitionError> {
    if bounds.is_empty() {
        return Err(AcquisitionError::InvalidDomain(
            "domain has no dimensions".into(),
        ));
    }
    if let Some((i, (lo, hi))) = bounds
        .iter()
        .enumerate()
        .find(|(_, (lo, hi))| !(lo < hi && lo.is_finite() && hi.is_finite()))
    {
        return Err(AcquisitionError::InvalidDomain(format!(
            "dimension {i} has bounds [{lo}, {hi}]"
        )));
    }
    Ok(())
}

impl Domain {
    /// Uniformly samples `count` candidates from the box.
    pub fn sample(
        bounds: Vec<(f64, f64)>,
        count: usize,
        seed: u64,
    ) -> Result<Self, AcquisitionError> {
        check_bounds(&bounds)?;
        if count < 2 {
            return Err(AcquisitionError::InvalidDomain(format!(
                "need at least 2 candidates, got {count}"
            )));
        }
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let candidates = (0..count)
            .map(|_| random_point(&bounds, &mut rng))
            .collect();
        Ok(Domain {
            bounds,
            candidates,
            seed,
            anchors: Vec::new(),
        })
    }

    /// Like [`Domain::sample`], but the first `2^d` candidates are the box
    /// vertices (only when `2^d < count`); the rest are uniform samples.
    pub fn sample_with_vertices(
        bounds: Vec<(f64, f64)>,
        count: usize,
        seed: u64,
    ) -> Result<Self, AcquisitionError> {
        let mut domain = Domain::sample(bounds, count, seed)?;
        let d = domain.bounds.len();
        if d < usize::BITS as usize && (1usize << d) < count {
            for (mask, slot) in domain.candidates.iter_mut().take(1 << d).enumerate() {
                *slot = (0..d)
                    .map(|i| {
                        if mask >> i & 1 == 0 {
                            domain.bounds[i].0
                        } else {
                            domain.bounds[i].1
                        }
                    })
                    .collect();
            }
        }
        Ok(domain)
    }

    pub fn from_candidates(
        bounds: Vec<(f64, f64)>,
        candidates: Vec<Vec<f64>>,
    ) -> Result<Self, AcquisitionError> {
        check_bounds(&bounds)?;
        if candidates.len() < 2 {
            return Err(AcquisitionError::InvalidDomain(
                "need at least 2 candidates".into(),
            ));
        }
        let domain = Domain {
            bounds,
            candidates,
            seed: 0,
            anchors: Vec::new(),
        };
        if let Some(bad) = domain.candidates.iter().find(|c| !domain.contains(c)) {
            return Err(AcquisitionError::InvalidDomain(format!(
                "candidate {bad:?} outside bounds"
            )));
        }
        Ok(domain)
    }

    /// Focuses part of the candidate set on `anchors`, points believed to
    /// lie near interesting inputs. The anchors replace the last random
    /// candidates, followed by `local` Gaussian perturbations of them
    /// (standard deviation `spread` per unit-cube axis, clamped to the
    /// box, anchors taken in turn). Nelder-Mead restarts from the anchors
    /// before drawing random starts. The first `2^d` candidates, the
    /// vertices of [`Domain::sample_with_vertices`], are kept.
    pub fn with_anchors(
        mut self,
        anchors: Vec<Vec<f64>>,
        local: usize,
        spread: f64,
    ) -> Result<Self, AcquisitionError> {
        if let Some(bad) = anchors.iter().find(|a| !self.contains(a)) {
            return Err(AcquisitionError::InvalidDomain(format!(
                "anchor {bad:?} outside bounds"
            )));
        }
        if !(spread > 0.0 && spread.is_finite()) {
            return Err(AcquisitionError::InvalidDomain(format!(
                "spread must be positive, got {spread}"
            )));
        }
        if anchors.is_empty() {
            return Ok(self);
        }
        let d = self.dim();
        let vertices = if d < usize::BITS as usize && (1usize << d) < self.len() {
            1usize << d
        } else {
            0
        };
        let room = self.len() - vertices;
        let mut extra: Vec<Vec<f64>> = anchors.iter().take(room).cloned().collect();
        let mut rng = ChaCha8Rng::seed_from_u64(self.seed);
        rng.set_stream(1);
        let noise = Normal::new(0.0, spread).expect("spread is positive");
        let mut k = 0;
        while extra.len() < room.min(anchors.len() + local) {
            let centre = self.to_unit(&anchors[k % anchors.len()]);
            let u: Vec<f64> = centre
                .iter()
                .map(|c| (c + noise.sample(&mut rng)).clamp(0.0, 1.0))
                .collect();
            let mut x = self.from_unit(&u);
            self.clamp(&mut x);
            extra.push(x);
            k += 1;
        }
        let keep = self.len() - extra.len();
        self.candidates.truncate(keep);
        self.candidates.extend(extra);
        self.anchors = anchors;
        Ok(self)
    }

    pub fn anchors(&self) -> &[Vec<f64>] {
        &self.anchors
    }

    pub fn bounds(&self) -> &[(f64, f64)] {
        &self.bounds
    }

    pub fn candidates(&self) -> &[Vec<f64>] {
        &self.candidates
    }

    pub fn seed(&self) -> u64 {
        self.seed
    }

    pub fn dim(&self) -> usize {
        self.bounds.len()
    }

    pub fn len(&self) -> usize {
        self.candidates.len()
    }

    pub fn is_empty(&self) -> bool {
        self.candidates.is_empty()
    }

    pub fn contains(&self, x: &[f64]) -> bool {
        x.len() == self.dim()
            && x.iter()
                .zip(&self.bounds)
                .all(|(v, (lo, hi))| v >= lo && v <= hi)
    }

    /// Affine map of the box onto the unit cube; the GP works in these
    /// coordinates so that one lengthscale fits every dimension.
    pub fn to_unit(&self, x: &[f64]) -> Vec<f64> {
        x.iter()
            .zip(&self.bounds)
            .map(|(v, (lo, hi))| (v - lo) / (hi - lo))
            .collect()
    }

    pub fn from_unit(&self, u: &[f64]) -> Vec<f64> {
        u.iter()
            .zip(&self.bounds)
            .map(|(v, (lo, hi))| lo + v * (hi - lo))
            .collect()
    }

    pub fn clamp(&self, x: &mut [f64]) {
        for (v, (lo, hi)) in x.iter_mut().zip(&self.bounds) {
            *v = v.clamp(*lo, *hi);
        }
    }

    /// Default GP lengthscale in unit-cube coordinates: a tenth of the
    /// cube's diameter.
    pub fn default_lengthscale(&self) -> f64 {
        (self.dim() as f64).sqrt() / 10.0
    }
}

pub(crate) fn random_point(bounds: &[(f64, f64)], rng: &mut impl Rng) -> Vec<f64> {
    bounds
        .iter()
        .map(|&(lo, hi)| rng.random_range(lo..=hi))
        .collect()
}
