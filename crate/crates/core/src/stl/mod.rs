//! Signal temporal logic: formulas, parametric templates, and the
//! quantitative robustness monitor over uniformly sampled signals.
//!
//! Robustness follows the usual recursion: `d - x(t)` for `x < d`,
//! `x(t) - d` for `x >= d`, min/max for conjunction/disjunction, min/max
//! over the samples of `[t + a, t + b)` for `G`/`F`, and sign flip for `!`.

mod formula;
mod parser;
mod robustness;
mod signal;

use thiserror::Error;

pub use formula::{
    Comparator, Formula, Interval, Monotonicity, ParamKind, ParameterSpec, ParametricFormula, Term,
    Valuation,
};
pub use parser::parse_formula;
pub use robustness::{robustness, robustness_series, satisfies};
pub use signal::Signal;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum StlError {
    #[error("syntax error at {line}:{col}: {message}")]
    Syntax {
        line: usize,
        col: usize,
        message: String,
    },
    #[error("malformed interval [{start},{end}) at {line}:{col}: need 0 <= a < b")]
    MalformedInterval {
        line: usize,
        col: usize,
        start: f64,
        end: f64,
    },
    #[error("interval [{start},{end}) is empty or negative")]
    EmptyInterval { start: f64, end: f64 },
    #[error("interval [{start},{end}) contains no sample of a grid with step {dt}")]
    EmptyWindow { start: f64, end: f64, dt: f64 },
    #[error("invalid formula: {0}")]
    InvalidFormula(String),
    #[error("invalid parameter: {0}")]
    InvalidParameter(String),
    #[error("unbound parameter ${0}")]
    UnboundParameter(String),
    #[error("valuation does not assign parameter ${0}")]
    MissingParameter(String),
    #[error("parameter ${name} = {value} outside [{lower}, {upper}]")]
    OutOfBounds {
        name: String,
        value: f64,
        lower: f64,
        upper: f64,
    },
    #[error("channel '{0}' not in signal")]
    UnknownChannel(String),
    #[error(
        "trace too short: formula needs samples up to t = {required}, trace ends at {available}"
    )]
    TraceTooShort { required: f64, available: f64 },
    #[error("time {0} is not on the signal's sample grid")]
    OffGrid(f64),
    #[error("invalid signal: {0}")]
    InvalidSignal(String),
    #[error("I/O error: {0}")]
    Io(String),
}

impl From<csv::Error> for StlError {
    fn from(e: csv::Error) -> Self {
        StlError::Io(e.to_string())
    }
}
