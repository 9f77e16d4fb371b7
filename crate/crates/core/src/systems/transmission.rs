//! Discrete-time surrogate of a four-speed automatic transmission.
//!
//! The inputs are piecewise-constant throttle (0 to 100) and brake
//! (0 to 325) profiles over equal segments of the horizon, so
//! `x0 = (u_1, .., u_k, b_1, .., b_k)`. Per 0.01 s step, with gear ratio
//! `R(g) ∈ {4.0, 2.5, 1.5, 1.0}`:
//!
//! ```text
//! rpm   = clamp(40 v R(g) + 6 u, 600, 6500)
//! shift up   when rpm > 4200 + 8 u, shift down when rpm < 1200,
//!            both only after 0.4 s in the current gear
//! dv/dt = 0.03 u R(g) - 0.01 b - 0.0001 v² - 0.05,   v >= 0
//! ```
//!
//! Speed is in mph. Under sustained full throttle the vehicle passes
//! 100 mph after about 24 s; hard braking produces gear-2 dwells of a
//! little over 2 s.

use crate::stl::Signal;

use super::{SimError, SystemUnderTest};

const DT: f64 = 0.01;
const HORIZON: f64 = 30.0;
const RATIOS: [f64; 4] = [4.0, 2.5, 1.5, 1.0];
const IDLE_RPM: f64 = 600.0;
const MAX_RPM: f64 = 6500.0;
const RPM_PER_MPH: f64 = 40.0;
const RPM_PER_THROTTLE: f64 = 6.0;
const UPSHIFT_RPM: f64 = 4200.0;
const UPSHIFT_PER_THROTTLE: f64 = 8.0;
const DOWNSHIFT_RPM: f64 = 1200.0;
/// Minimum time in a gear before the next shift, in steps of `DT`.
const DWELL_STEPS: usize = 40;
const THRUST: f64 = 0.03;
const BRAKING: f64 = 0.01;
const DRAG: f64 = 0.0001;
const ROLLING: f64 = 0.05;
const MAX_THROTTLE: f64 = 100.0;
const MAX_BRAKE: f64 = 325.0;

#[derive(Debug, Clone, PartialEq)]
pub struct Transmission {
    segments: usize,
    bounds: Vec<(f64, f64)>,
    channels: Vec<String>,
}

impl Default for Transmission {
    fn default() -> Self {
        Transmission::new(2)
    }
}

impl Transmission {
    /// Surrogate with `segments` piecewise-constant input segments.
    ///
    /// # Panics
    /// If `segments` is zero.
    pub fn new(segments: usize) -> Self {
        assert!(segments >= 1, "need at least one input segment");
        let mut bounds = vec![(0.0, MAX_THROTTLE); segments];
        bounds.extend(vec![(0.0, MAX_BRAKE); segments]);
        Transmission {
            segments,
            bounds,
            channels: vec!["speed".into(), "RPM".into(), "gear".into()],
        }
    }

    pub fn segments(&self) -> usize {
        self.segments
    }
}

fn engine_rpm(v: f64, gear: usize, throttle: f64) -> f64 {
    (RPM_PER_MPH * v * RATIOS[gear - 1] + RPM_PER_THROTTLE * throttle).clamp(IDLE_RPM, MAX_RPM)
}

impl SystemUnderTest for Transmission {
    fn name(&self) -> &str {
        "transmission"
    }

    fn x0_bounds(&self) -> &[(f64, f64)] {
        &self.bounds
    }

    fn sim_horizon(&self) -> f64 {
        HORIZON
    }

    fn dt(&self) -> f64 {
        DT
    }

    fn channels(&self) -> &[String] {
        &self.channels
    }

    fn simulate(&self, x0: &[f64]) -> Result<Signal, SimError> {
        self.check_input(x0)?;
        let steps = (HORIZON / DT).round() as usize;
        let mut values = Vec::with_capacity(3 * (steps + 1));
        let (mut v, mut gear, mut dwell) = (0.0_f64, 1_usize, 0_usize);
        for k in 0..=steps {
            let segment = (k * self.segments / steps).min(self.segments - 1);
            let (throttle, brake) = (x0[segment], x0[self.segments + segment]);
            let rpm = engine_rpm(v, gear, throttle);
            values.extend([v, rpm, gear as f64]);
            if k == steps {
                break;
            }
            if dwell >= DWELL_STEPS {
                if rpm > UPSHIFT_RPM + UPSHIFT_PER_THROTTLE * throttle && gear < RATIOS.len() {
                    gear += 1;
                    dwell = 0;
                } else if rpm < DOWNSHIFT_RPM && gear > 1 {
                    gear -= 1;
                    dwell = 0;
                }
            }
            let accel =
                THRUST * throttle * RATIOS[gear - 1] - BRAKING * brake - DRAG * v * v - ROLLING;
            v = (v + DT * accel).max(0.0);
            if !v.is_finite() {
                return Err(SimError::NonFinite {
                    time: (k + 1) as f64 * DT,
                });
            }
            dwell += 1;
        }
        Ok(Signal::new(self.channels.clone(), 0.0, DT, values)?)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn run(x0: &[f64]) -> (Vec<f64>, Vec<f64>, Vec<f64>) {
        let s = Transmission::default().simulate(x0).unwrap();
        (
            s.channel(0).collect(),
            s.channel(1).collect(),
            s.channel(2).collect(),
        )
    }

    #[test]
    fn at_rest_without_inputs() {
        let (speed, rpm, gear) = run(&[0.0; 4]);
        assert_eq!(speed.len(), 3001);
        assert!(speed.iter().all(|&v| v == 0.0));
        assert!(rpm.iter().all(|&w| w == 600.0));
        assert!(gear.iter().all(|&g| g == 1.0));
    }

    #[test]
    fn full_throttle_accelerates_and_upshifts() {
        let (speed, _, gear) = run(&[100.0, 100.0, 0.0, 0.0]);
        assert!(speed[..=1000].windows(2).all(|w| w[1] > w[0]));
        assert!(gear.windows(2).all(|w| w[1] >= w[0]));
        assert_eq!(gear[0], 1.0);
        assert_eq!(*gear.last().unwrap(), 4.0);
        assert!(speed.iter().cloned().fold(0.0, f64::max) > 100.0);
    }

    #[test]
    fn deterministic() {
        let t = Transmission::default();
        let x = [63.0, 12.5, 40.0, 200.0];
        assert_eq!(t.simulate(&x).unwrap(), t.simulate(&x).unwrap());
    }

    #[test]
    fn rejects_inputs_outside_the_box() {
        let t = Transmission::default();
        assert_eq!(
            t.simulate(&[101.0, 0.0, 0.0, 0.0]),
            Err(SimError::OutOfBox {
                index: 0,
                value: 101.0,
                lower: 0.0,
                upper: 100.0
            })
        );
        assert_eq!(
            t.simulate(&[0.0; 3]),
            Err(SimError::Dimension {
                expected: 4,
                got: 3
            })
        );
    }

    #[test]
    fn physical_sanity_on_a_grid() {
        let levels_u = [0.0, 30.0, 70.0, 100.0];
        let levels_b = [0.0, 20.0, 325.0];
        for &u1 in &levels_u {
            for &u2 in &levels_u {
                for &b1 in &levels_b {
                    for &b2 in &levels_b {
                        let (speed, rpm, gear) = run(&[u1, u2, b1, b2]);
                        assert!(speed.iter().all(|&v| v >= 0.0));
                        assert!(rpm.iter().all(|&w| (600.0..=6500.0).contains(&w)));
                        let mut last_shift = 0;
                        for k in 1..gear.len() {
                            let step = gear[k] - gear[k - 1];
                            assert!(step.abs() <= 1.0);
                            if step != 0.0 {
                                assert!(k - last_shift >= DWELL_STEPS || last_shift == 0);
                                last_shift = k;
                            }
                        }
                    }
                }
            }
        }
    }

    #[test]
    fn final_speed_monotone_in_throttle() {
        let mut prev = -1.0;
        for i in 0..=20 {
            let u = 5.0 * i as f64;
            let (speed, _, _) = run(&[u, u, 0.0, 0.0]);
            let last = *speed.last().unwrap();
            assert!(last >= prev, "throttle {u}: {last} < {prev}");
            prev = last;
        }
    }

    #[test]
    fn more_segments() {
        let t = Transmission::new(3);
        assert_eq!(t.x0_bounds().len(), 6);
        let s = t.simulate(&[100.0, 0.0, 100.0, 0.0, 0.0, 0.0]).unwrap();
        assert_eq!(s.len(), 3001);
    }
}
