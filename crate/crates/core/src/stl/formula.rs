use std::collections::BTreeMap;
use std::fmt;

use super::StlError;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Comparator {
    /// `channel < threshold`, robustness `threshold - value`.
    Lt,
    /// `channel >= threshold`, robustness `value - threshold`.
    Ge,
}

impl fmt::Display for Comparator {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Comparator::Lt => "<",
            Comparator::Ge => ">=",
        })
    }
}

/// A threshold or interval endpoint in a parametric formula.
#[derive(Debug, Clone, PartialEq)]
pub enum Term {
    Const(f64),
    Param(String),
}

impl fmt::Display for Term {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Term::Const(v) => write!(f, "{v}"),
            Term::Param(name) => write!(f, "${name}"),
        }
    }
}

impl From<f64> for Term {
    fn from(v: f64) -> Self {
        Term::Const(v)
    }
}

/// Half-open time window `[start, end)` relative to the evaluation time.
#[derive(Debug, Clone, PartialEq)]
pub struct Interval<V> {
    pub start: V,
    pub end: V,
}

/// STL abstract syntax tree.
///
/// `Formula<f64>` is a concrete STL formula; `Formula<Term>` may reference
/// named parameters in thresholds and interval endpoints.
#[derive(Debug, Clone, PartialEq)]
pub enum Formula<V = f64> {
    Predicate {
        channel: String,
        cmp: Comparator,
        threshold: V,
    },
    Not(Box<Formula<V>>),
    And(Box<Formula<V>>, Box<Formula<V>>),
    Or(Box<Formula<V>>, Box<Formula<V>>),
    Finally(Interval<V>, Box<Formula<V>>),
    Globally(Interval<V>, Box<Formula<V>>),
}

impl<V> Formula<V> {
    pub fn pred(channel: impl Into<String>, cmp: Comparator, threshold: impl Into<V>) -> Self {
        Formula::Predicate {
            channel: channel.into(),
            cmp,
            threshold: threshold.into(),
        }
    }

    #[allow(clippy::should_implement_trait)]
    pub fn not(phi: Self) -> Self {
        Formula::Not(Box::new(phi))
    }

    pub fn and(lhs: Self, rhs: Self) -> Self {
        Formula::And(Box::new(lhs), Box::new(rhs))
    }

    pub fn or(lhs: Self, rhs: Self) -> Self {
        Formula::Or(Box::new(lhs), Box::new(rhs))
    }

    pub fn finally(start: impl Into<V>, end: impl Into<V>, phi: Self) -> Self {
        Formula::Finally(
            Interval {
                start: start.into(),
                end: end.into(),
            },
            Box::new(phi),
        )
    }

    pub fn globally(start: impl Into<V>, end: impl Into<V>, phi: Self) -> Self {
        Formula::Globally(
            Interval {
                start: start.into(),
                end: end.into(),
            },
            Box::new(phi),
        )
    }

    /// Nesting depth; a predicate has depth 1.
    pub fn depth(&self) -> usize {
        match self {
            Formula::Predicate { .. } => 1,
            Formula::Not(p) | Formula::Finally(_, p) | Formula::Globally(_, p) => 1 + p.depth(),
            Formula::And(a, b) | Formula::Or(a, b) => 1 + a.depth().max(b.depth()),
        }
    }

    /// Channel names referenced by predicates, in first-occurrence order.
    pub fn channels(&self) -> Vec<&str> {
        let mut out = Vec::new();
        self.visit(&mut |node| {
            if let Formula::Predicate { channel, .. } = node {
                if !out.contains(&channel.as_str()) {
                    out.push(channel.as_str());
                }
            }
        });
        out
    }

    fn visit<'a>(&'a self, f: &mut impl FnMut(&'a Formula<V>)) {
        f(self);
        match self {
            Formula::Predicate { .. } => {}
            Formula::Not(p) | Formula::Finally(_, p) | Formula::Globally(_, p) => p.visit(f),
            Formula::And(a, b) | Formula::Or(a, b) => {
                a.visit(f);
                b.visit(f);
            }
        }
    }

    fn try_map<W, E>(&self, f: &mut impl FnMut(&V) -> Result<W, E>) -> Result<Formula<W>, E> {
        Ok(match self {
            Formula::Predicate {
                channel,
                cmp,
                threshold,
            } => Formula::Predicate {
                channel: channel.clone(),
                cmp: *cmp,
                threshold: f(threshold)?,
            },
            Formula::Not(p) => Formula::Not(Box::new(p.try_map(f)?)),
            Formula::And(a, b) => Formula::And(Box::new(a.try_map(f)?), Box::new(b.try_map(f)?)),
            Formula::Or(a, b) => Formula::Or(Box::new(a.try_map(f)?), Box::new(b.try_map(f)?)),
            Formula::Finally(i, p) => Formula::Finally(
                Interval {
                    start: f(&i.start)?,
                    end: f(&i.end)?,
                },
                Box::new(p.try_map(f)?),
            ),
            Formula::Globally(i, p) => Formula::Globally(
                Interval {
                    start: f(&i.start)?,
                    end: f(&i.end)?,
                },
                Box::new(p.try_map(f)?),
            ),
        })
    }
}

impl Formula<f64> {
    /// Trace length needed beyond the evaluation time.
    pub fn horizon(&self) -> f64 {
        match self {
            Formula::Predicate { .. } => 0.0,
            Formula::Not(p) => p.horizon(),
            Formula::And(a, b) | Formula::Or(a, b) => a.horizon().max(b.horizon()),
            Formula::Finally(i, p) | Formula::Globally(i, p) => i.end + p.horizon(),
        }
    }

    /// Checks interval and threshold invariants.
    pub fn validate(&self) -> Result<(), StlError> {
        let mut result = Ok(());
        self.visit(&mut |node| {
            if result.is_err() {
                return;
            }
            match node {
                Formula::Predicate {
                    threshold, channel, ..
                } if !threshold.is_finite() => {
                    result = Err(StlError::InvalidFormula(format!(
                        "threshold on '{channel}' is not finite"
                    )));
                }
                Formula::Finally(i, _) | Formula::Globally(i, _)
                    if !(i.start >= 0.0 && i.start < i.end && i.end.is_finite()) =>
                {
                    result = Err(StlError::EmptyInterval {
                        start: i.start,
                        end: i.end,
                    });
                }
                _ => {}
            }
        });
        result
    }

    /// Lifts a concrete formula into the parametric AST.
    pub fn to_parametric(&self) -> Formula<Term> {
        self.try_map::<_, ()>(&mut |v| Ok(Term::Const(*v)))
            .expect("infallible")
    }
}

impl Formula<Term> {
    /// Parameter names in first-occurrence order.
    pub fn params(&self) -> Vec<&str> {
        let mut out: Vec<&str> = Vec::new();
        self.visit(&mut |node| {
            let terms: &[&Term] = match node {
                Formula::Predicate { threshold, .. } => &[threshold],
                Formula::Finally(i, _) | Formula::Globally(i, _) => &[&i.start, &i.end],
                _ => &[],
            };
            for t in terms {
                if let Term::Param(name) = t {
                    if !out.contains(&name.as_str()) {
                        out.push(name.as_str());
                    }
                }
            }
        });
        out
    }

    /// Converts to a concrete formula; fails on the first free parameter.
    pub fn to_concrete(&self) -> Result<Formula<f64>, StlError> {
        let phi = self.try_map(&mut |t| match t {
            Term::Const(v) => Ok(*v),
            Term::Param(name) => Err(StlError::UnboundParameter(name.clone())),
        })?;
        phi.validate()?;
        Ok(phi)
    }
}

impl<V: fmt::Display> fmt::Display for Formula<V> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Formula::Predicate {
                channel,
                cmp,
                threshold,
            } => {
                write!(f, "{channel} {cmp} {threshold}")
            }
            Formula::Not(p) => write!(f, "!({p})"),
            Formula::And(a, b) => write!(f, "({a}) && ({b})"),
            Formula::Or(a, b) => write!(f, "({a}) || ({b})"),
            Formula::Finally(i, p) => write!(f, "F[{},{})({p})", i.start, i.end),
            Formula::Globally(i, p) => write!(f, "G[{},{})({p})", i.start, i.end),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ParamKind {
    /// Predicate threshold.
    Scale,
    /// Interval endpoint.
    Time,
}

/// Direction in which robustness of the induced formula moves as the
/// parameter grows.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Monotonicity {
    Increasing,
    Decreasing,
}

#[derive(Debug, Clone, PartialEq)]
pub struct ParameterSpec {
    pub name: String,
    pub kind: ParamKind,
    pub lower: f64,
    pub upper: f64,
    pub monotonicity: Option<Monotonicity>,
}

impl ParameterSpec {
    pub fn new(
        name: impl Into<String>,
        kind: ParamKind,
        lower: f64,
        upper: f64,
        monotonicity: Option<Monotonicity>,
    ) -> Result<Self, StlError> {
        let name = name.into();
        if !(lower < upper) || !lower.is_finite() || !upper.is_finite() {
            return Err(StlError::InvalidParameter(format!(
                "'{name}': bounds [{lower}, {upper}] are not an ordered finite range"
            )));
        }
        if kind == ParamKind::Time && lower < 0.0 {
            return Err(StlError::InvalidParameter(format!(
                "'{name}': time parameter has negative lower bound {lower}"
            )));
        }
        Ok(ParameterSpec {
            name,
            kind,
            lower,
            upper,
            monotonicity,
        })
    }

    pub fn scale(name: &str, lower: f64, upper: f64, m: Monotonicity) -> Result<Self, StlError> {
        Self::new(name, ParamKind::Scale, lower, upper, Some(m))
    }

    pub fn time(name: &str, lower: f64, upper: f64, m: Monotonicity) -> Result<Self, StlError> {
        Self::new(name, ParamKind::Time, lower, upper, Some(m))
    }

    pub fn contains(&self, value: f64) -> bool {
        value >= self.lower && value <= self.upper
    }
}

/// Assignment of values to named parameters.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct Valuation(BTreeMap<String, f64>);

impl Valuation {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn with(mut self, name: &str, value: f64) -> Self {
        self.set(name, value);
        self
    }

    pub fn set(&mut self, name: &str, value: f64) {
        self.0.insert(name.to_owned(), value);
    }

    pub fn get(&self, name: &str) -> Option<f64> {
        self.0.get(name).copied()
    }

    pub fn iter(&self) -> impl Iterator<Item = (&str, f64)> {
        self.0.iter().map(|(k, v)| (k.as_str(), *v))
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }
}

impl<const N: usize> From<[(&str, f64); N]> for Valuation {
    fn from(pairs: [(&str, f64); N]) -> Self {
        Valuation(pairs.iter().map(|(k, v)| ((*k).to_owned(), *v)).collect())
    }
}

/// A PSTL template: a parametric AST together with the declaration of every
/// parameter it references.
#[derive(Debug, Clone, PartialEq)]
pub struct ParametricFormula {
    formula: Formula<Term>,
    params: Vec<ParameterSpec>,
}

impl ParametricFormula {
    pub fn new(formula: Formula<Term>, params: Vec<ParameterSpec>) -> Result<Self, StlError> {
        let used = formula.params();
        for (i, spec) in params.iter().enumerate() {
            if params[..i].iter().any(|p| p.name == spec.name) {
                return Err(StlError::InvalidParameter(format!(
                    "parameter '{}' declared twice",
                    spec.name
                )));
            }
            if !used.contains(&spec.name.as_str()) {
                return Err(StlError::InvalidParameter(format!(
                    "parameter '{}' is declared but never used",
                    spec.name
                )));
            }
        }
        if let Some(missing) = used.iter().find(|u| !params.iter().any(|p| p.name == **u)) {
            return Err(StlError::UnboundParameter((*missing).to_owned()));
        }
        Ok(ParametricFormula { formula, params })
    }

    pub fn formula(&self) -> &Formula<Term> {
        &self.formula
    }

    pub fn params(&self) -> &[ParameterSpec] {
        &self.params
    }

    pub fn param(&self, name: &str) -> Option<&ParameterSpec> {
        self.params.iter().find(|p| p.name == name)
    }

    /// Substitutes the valuation into the template, producing a concrete formula.
    pub fn instantiate(&self, theta: &Valuation) -> Result<Formula<f64>, StlError> {
        for spec in &self.params {
            let value = theta
                .get(&spec.name)
                .ok_or_else(|| StlError::MissingParameter(spec.name.clone()))?;
            if !spec.contains(value) {
                return Err(StlError::OutOfBounds {
                    name: spec.name.clone(),
                    value,
                    lower: spec.lower,
                    upper: spec.upper,
                });
            }
        }
        let phi = self.formula.try_map(&mut |t| match t {
            Term::Const(v) => Ok(*v),
            Term::Param(name) => theta
                .get(name)
                .ok_or_else(|| StlError::MissingParameter(name.clone())),
        })?;
        phi.validate()?;
        Ok(phi)
    }
}

impl fmt::Display for ParametricFormula {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        self.formula.fmt(f)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::stl::parse_formula;

    fn finally_template() -> ParametricFormula {
        let phi = parse_formula("F[$tau1,$tau2)(x < $pi1)").unwrap();
        ParametricFormula::new(
            phi,
            vec![
                ParameterSpec::scale("pi1", -10.0, 10.0, Monotonicity::Increasing).unwrap(),
                ParameterSpec::time("tau1", 0.0, 5.0, Monotonicity::Decreasing).unwrap(),
                ParameterSpec::time("tau2", 0.0, 5.0, Monotonicity::Increasing).unwrap(),
            ],
        )
        .unwrap()
    }

    #[test]
    fn instantiate_substitutes_positionally() {
        let pf = finally_template();
        let theta = Valuation::from([("pi1", 0.0), ("tau1", 0.0), ("tau2", 3.0)]);
        let phi = pf.instantiate(&theta).unwrap();
        assert_eq!(
            phi,
            Formula::finally(0.0, 3.0, Formula::pred("x", Comparator::Lt, 0.0))
        );
    }

    #[test]
    fn instantiate_rejects_empty_interval() {
        let pf = finally_template();
        let theta = Valuation::from([("pi1", 0.0), ("tau1", 3.0), ("tau2", 3.0)]);
        assert!(matches!(
            pf.instantiate(&theta),
            Err(StlError::EmptyInterval { .. })
        ));
    }

    #[test]
    fn instantiate_rejects_missing_and_out_of_bounds() {
        let pf = finally_template();
        let partial = Valuation::from([("pi1", 0.0), ("tau1", 0.0)]);
        assert!(
            matches!(pf.instantiate(&partial), Err(StlError::MissingParameter(p)) if p == "tau2")
        );
        let wide = Valuation::from([("pi1", 11.0), ("tau1", 0.0), ("tau2", 3.0)]);
        assert!(matches!(
            pf.instantiate(&wide),
            Err(StlError::OutOfBounds { .. })
        ));
    }

    #[test]
    fn constants_survive_instantiation() {
        let phi = parse_formula("G[0,2)(x < 1) && F[1,4)(y >= -3.5)").unwrap();
        let pf = ParametricFormula::new(phi.clone(), vec![]).unwrap();
        assert_eq!(
            pf.instantiate(&Valuation::new()).unwrap(),
            phi.to_concrete().unwrap()
        );
    }

    #[test]
    fn declarations_must_match_references() {
        let phi = parse_formula("G[0,2)(x < $a)").unwrap();
        assert!(ParametricFormula::new(phi.clone(), vec![]).is_err());
        let unused = ParameterSpec::scale("b", 0.0, 1.0, Monotonicity::Increasing).unwrap();
        let used = ParameterSpec::scale("a", 0.0, 1.0, Monotonicity::Increasing).unwrap();
        assert!(ParametricFormula::new(phi.clone(), vec![used.clone(), unused]).is_err());
        assert!(ParametricFormula::new(phi.clone(), vec![used.clone(), used.clone()]).is_err());
        assert!(ParametricFormula::new(phi, vec![used]).is_ok());
    }

    #[test]
    fn parameter_spec_invariants() {
        assert!(ParameterSpec::scale("a", 1.0, 1.0, Monotonicity::Increasing).is_err());
        assert!(ParameterSpec::time("t", -1.0, 1.0, Monotonicity::Increasing).is_err());
        assert!(ParameterSpec::scale("a", -1.0, 1.0, Monotonicity::Increasing).is_ok());
    }

    #[test]
    fn horizon_sums_nested_bounds() {
        let pred = Formula::pred("x", Comparator::Lt, 1.0);
        assert_eq!(pred.horizon(), 0.0);
        assert_eq!(Formula::globally(0.0, 5.0, pred.clone()).horizon(), 5.0);
        let nested = Formula::finally(0.0, 2.0, Formula::globally(0.0, 3.0, pred.clone()));
        assert_eq!(nested.horizon(), 5.0);
        let both = Formula::and(nested, Formula::globally(1.0, 7.0, pred));
        assert_eq!(both.horizon(), 7.0);
    }
}
