//! Requirement templates for the transmission surrogate.
//!
//! Unbounded `G` is bounded by the 30 s simulation horizon. The gear
//! channel is integer valued, so `gear = 2` is written
//! `gear >= 1.5 && gear < 2.5` and its robustness is always ±0.5.

use crate::stl::{parse_formula, Monotonicity, ParameterSpec, ParametricFormula, StlError};

/// A parametric formula together with the tightness bound it is mined with.
#[derive(Debug, Clone, PartialEq)]
pub struct Template {
    pub name: &'static str,
    pub formula: ParametricFormula,
    pub epsilon: f64,
}

pub const NAMES: [&str; 3] = ["sp_rpm", "rpm100", "stay"];

/// Speed always below `pi1` and RPM always below `pi2`.
pub const SP_RPM: &str = "G[0,30)((speed < $pi1) && (RPM < $pi2))";

/// The vehicle does not reach 100 mph within `tau` seconds while keeping
/// RPM below `pi` throughout.
pub const RPM100: &str = "!(F[0,$tau)(speed >= 100) && G[0,30)(RPM < $pi))";

/// Whenever the gear changes to 2 (not 2 now, 2 at the next 0.01 s
/// sample), it stays 2 from that sample until `tau` seconds later. Shifts
/// in the last 5 s are not checked so that the window fits the horizon.
pub const STAY: &str =
    "G[0,25)(!((gear < 1.5 || gear >= 2.5) && F[0.01,0.02)(gear >= 1.5 && gear < 2.5)) \
                        || G[0.01,$tau)(gear >= 1.5 && gear < 2.5))";

fn build(
    name: &'static str,
    text: &str,
    params: Vec<ParameterSpec>,
    epsilon: f64,
) -> Result<Template, StlError> {
    Ok(Template {
        name,
        formula: ParametricFormula::new(parse_formula(text)?, params)?,
        epsilon,
    })
}

pub fn sp_rpm() -> Template {
    build(
        "sp_rpm",
        SP_RPM,
        vec![
            ParameterSpec::scale("pi1", 0.0, 200.0, Monotonicity::Increasing).unwrap(),
            ParameterSpec::scale("pi2", 0.0, 8000.0, Monotonicity::Increasing).unwrap(),
        ],
        1.0,
    )
    .expect("built-in template is well formed")
}

pub fn rpm100() -> Template {
    build(
        "rpm100",
        RPM100,
        vec![
            ParameterSpec::time("tau", 1.0, 30.0, Monotonicity::Decreasing).unwrap(),
            ParameterSpec::scale("pi", 600.0, 6500.0, Monotonicity::Decreasing).unwrap(),
        ],
        1.0,
    )
    .expect("built-in template is well formed")
}

pub fn stay() -> Template {
    build(
        "stay",
        STAY,
        vec![ParameterSpec::time("tau", 0.02, 5.0, Monotonicity::Decreasing).unwrap()],
        0.5,
    )
    .expect("built-in template is well formed")
}

pub fn by_name(name: &str) -> Option<Template> {
    match name {
        "sp_rpm" => Some(sp_rpm()),
        "rpm100" => Some(rpm100()),
        "stay" => Some(stay()),
        _ => None,
    }
}
