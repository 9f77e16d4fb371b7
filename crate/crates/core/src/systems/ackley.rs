use std::f64::consts::{E, PI};

/// Box on which the benchmark is run.
pub const ACKLEY_BOUNDS: [(f64, f64); 2] = [(-5.0, 5.0), (-5.0, 5.0)];

/// Global minimum value, attained at the origin.
pub const ACKLEY_OPTIMUM: f64 = 0.0;

/// Two-dimensional Ackley function.
pub fn ackley(x: f64, y: f64) -> f64 {
    let radial = -20.0 * (-0.2 * (0.5 * (x * x + y * y)).sqrt()).exp();
    let ripple = -(0.5 * ((2.0 * PI * x).cos() + (2.0 * PI * y).cos())).exp();
    radial + ripple + E + 20.0
}
