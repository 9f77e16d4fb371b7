use super::GpError;

/// Matérn smoothness restricted to the half-integer values with closed forms.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum MaternNu {
    Half,
    ThreeHalves,
    FiveHalves,
}

impl MaternNu {
    pub fn value(self) -> f64 {
        match self {
            MaternNu::Half => 0.5,
            MaternNu::ThreeHalves => 1.5,
            MaternNu::FiveHalves => 2.5,
        }
    }
}

impl TryFrom<f64> for MaternNu {
    type Error = GpError;

    fn try_from(nu: f64) -> Result<Self, GpError> {
        match nu {
            0.5 => Ok(MaternNu::Half),
            1.5 => Ok(MaternNu::ThreeHalves),
            2.5 => Ok(MaternNu::FiveHalves),
            other => Err(GpError::InvalidKernel(format!(
                "Matérn smoothness {other} unsupported; use 0.5, 1.5 or 2.5"
            ))),
        }
    }
}

/// Stationary unit-variance covariance functions.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Kernel {
    /// `exp(-d² / (2 l²))`
    Gaussian {
        lengthscale: f64,
    },
    Matern {
        lengthscale: f64,
        nu: MaternNu,
    },
}

impl Kernel {
    pub fn gaussian(lengthscale: f64) -> Result<Self, GpError> {
        check_lengthscale(lengthscale)?;
        Ok(Kernel::Gaussian { lengthscale })
    }

    pub fn matern(lengthscale: f64, nu: f64) -> Result<Self, GpError> {
        check_lengthscale(lengthscale)?;
        Ok(Kernel::Matern {
            lengthscale,
            nu: MaternNu::try_from(nu)?,
        })
    }

    pub fn lengthscale(&self) -> f64 {
        match *self {
            Kernel::Gaussian { lengthscale } | Kernel::Matern { lengthscale, .. } => lengthscale,
        }
    }

    pub fn with_lengthscale(self, lengthscale: f64) -> Result<Self, GpError> {
        check_lengthscale(lengthscale)?;
        Ok(match self {
            Kernel::Gaussian { .. } => Kernel::Gaussian { lengthscale },
            Kernel::Matern { nu, .. } => Kernel::Matern { lengthscale, nu },
        })
    }

    pub fn eval(&self, x1: &[f64], x2: &[f64]) -> Result<f64, GpError> {
        if x1.len() != x2.len() {
            return Err(GpError::DimensionMismatch {
                expected: x1.len(),
                got: x2.len(),
            });
        }
        Ok(self.eval_unchecked(x1, x2))
    }

    pub(crate) fn eval_unchecked(&self, x1: &[f64], x2: &[f64]) -> f64 {
        let sq: f64 = x1.iter().zip(x2).map(|(a, b)| (a - b) * (a - b)).sum();
        self.of_sq_distance(sq)
    }

    /// Kernel value as a function of squared Euclidean distance.
    pub fn of_sq_distance(&self, sq: f64) -> f64 {
        match *self {
            Kernel::Gaussian { lengthscale: l } => (-sq / (2.0 * l * l)).exp(),
            Kernel::Matern { lengthscale: l, nu } => {
                let d = sq.sqrt();
                match nu {
                    MaternNu::Half => (-d / l).exp(),
                    MaternNu::ThreeHalves => {
                        let r = 3f64.sqrt() * d / l;
                        (1.0 + r) * (-r).exp()
                    }
                    MaternNu::FiveHalves => {
                        let r = 5f64.sqrt() * d / l;
                        (1.0 + r + r * r / 3.0) * (-r).exp()
                    }
                }
            }
        }
    }
}

fn check_lengthscale(l: f64) -> Result<(), GpError> {
    if l > 0.0 && l.is_finite() {
        Ok(())
    } else {
        Err(GpError::InvalidKernel(format!(
            "lengthscale must be positive, got {l}"
        )))
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;

    #[test]
    fn gaussian_values() {
        let k = Kernel::gaussian(1.0).unwrap();
        assert_eq!(k.eval(&[0.3, -1.0], &[0.3, -1.0]).unwrap(), 1.0);
        assert_relative_eq!(
            k.eval(&[0.0], &[1.0]).unwrap(),
            0.606_530_659_712_633,
            epsilon = 1e-12
        );
    }

    #[test]
    fn matern_half_is_exponential() {
        let k = Kernel::matern(1.0, 0.5).unwrap();
        assert_relative_eq!(
            k.eval(&[0.0, 0.0], &[0.6, 0.8]).unwrap(),
            (-1.0f64).exp(),
            epsilon = 1e-12
        );
    }

    #[test]
    fn matern_closed_forms_match_bessel_definition() {
        // Values of 2^(1-ν)/Γ(ν) (√(2ν) d/l)^ν K_ν(√(2ν) d/l) at d = l = 1, taken
        // from the Bessel-function definition with scipy.special.kv.
        let k15 = Kernel::matern(1.0, 1.5).unwrap();
        let k25 = Kernel::matern(1.0, 2.5).unwrap();
        assert_relative_eq!(
            k15.eval(&[0.0], &[1.0]).unwrap(),
            0.483_357_724_596_507_9,
            epsilon = 1e-12
        );
        assert_relative_eq!(
            k25.eval(&[0.0], &[1.0]).unwrap(),
            0.523_994_108_831_273_1,
            epsilon = 1e-12
        );
    }

    #[test]
    fn unit_diagonal_and_symmetry() {
        for k in [
            Kernel::gaussian(0.7).unwrap(),
            Kernel::matern(0.7, 0.5).unwrap(),
            Kernel::matern(0.7, 1.5).unwrap(),
            Kernel::matern(0.7, 2.5).unwrap(),
        ] {
            let (a, b) = ([0.1, 0.9, -2.0], [1.4, 0.2, 0.5]);
            assert_eq!(k.eval(&a, &a).unwrap(), 1.0);
            assert_eq!(k.eval(&a, &b).unwrap(), k.eval(&b, &a).unwrap());
        }
    }

    #[test]
    fn rejects_bad_parameters() {
        assert!(Kernel::gaussian(0.0).is_err());
        assert!(Kernel::matern(1.0, 2.0).is_err());
        let k = Kernel::gaussian(1.0).unwrap();
        assert_eq!(
            k.eval(&[0.0], &[0.0, 1.0]),
            Err(GpError::DimensionMismatch {
                expected: 1,
                got: 2
            })
        );
    }
}
