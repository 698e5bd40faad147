//! Scalar functions with derivatives, used as problem data (`phi`, `eta`,
//! `psi`) and as hypothesis-checker inputs.
//!
//! The serializable enums cover the families that appear in practice; any
//! closure pair can be used through [`FnWithDerivative`].

use std::str::FromStr;

use serde::{Deserialize, Serialize};

/// A differentiable function of one positive variable.
pub trait Func1 {
    fn value(&self, s: f64) -> f64;
    fn derivative(&self, s: f64) -> f64;
    /// `(log f)'(s)`.
    fn log_derivative(&self, s: f64) -> f64 {
        self.derivative(s) / self.value(s)
    }
}

/// A differentiable function of `(u, r)`.
pub trait Func2 {
    fn value(&self, s: f64, t: f64) -> f64;
    fn d1(&self, s: f64, t: f64) -> f64;
    fn d2(&self, s: f64, t: f64) -> f64;
}

/// Serializable one-variable functions.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum ScalarFn {
    Constant { c: f64 },
    /// `coef * s^exponent`
    Power { coef: f64, exponent: f64 },
    /// `coef * exp(rate * s)`
    Exp { coef: f64, rate: f64 },
    /// `exp(rate * s^2)`
    Gaussian { rate: f64 },
    /// `mu * s^a + s^b`
    PowerSum { mu: f64, a: f64, b: f64 },
}

impl ScalarFn {
    pub fn power(exponent: f64) -> Self {
        ScalarFn::Power { coef: 1.0, exponent }
    }

    pub fn one() -> Self {
        ScalarFn::Constant { c: 1.0 }
    }
}

impl Func1 for ScalarFn {
    fn value(&self, s: f64) -> f64 {
        match *self {
            ScalarFn::Constant { c } => c,
            ScalarFn::Power { coef, exponent } => coef * s.powf(exponent),
            ScalarFn::Exp { coef, rate } => coef * (rate * s).exp(),
            ScalarFn::Gaussian { rate } => (rate * s * s).exp(),
            ScalarFn::PowerSum { mu, a, b } => mu * s.powf(a) + s.powf(b),
        }
    }

    fn derivative(&self, s: f64) -> f64 {
        match *self {
            ScalarFn::Constant { .. } => 0.0,
            ScalarFn::Power { coef, exponent } => coef * exponent * s.powf(exponent - 1.0),
            ScalarFn::Exp { coef, rate } => coef * rate * (rate * s).exp(),
            ScalarFn::Gaussian { rate } => 2.0 * rate * s * (rate * s * s).exp(),
            ScalarFn::PowerSum { mu, a, b } => mu * a * s.powf(a - 1.0) + b * s.powf(b - 1.0),
        }
    }

    fn log_derivative(&self, s: f64) -> f64 {
        match *self {
            ScalarFn::Constant { .. } => 0.0,
            ScalarFn::Power { exponent, .. } => exponent / s,
            ScalarFn::Exp { rate, .. } => rate,
            ScalarFn::Gaussian { rate } => 2.0 * rate * s,
            _ => self.derivative(s) / self.value(s),
        }
    }
}

/// Serializable functions of `(u, r)`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum BivariateFn {
    Constant { c: f64 },
    /// `u^u_exponent * g(r)`
    Product { u_exponent: f64, r: ScalarFn },
}

impl Func2 for BivariateFn {
    fn value(&self, s: f64, t: f64) -> f64 {
        match self {
            BivariateFn::Constant { c } => *c,
            BivariateFn::Product { u_exponent, r } => s.powf(*u_exponent) * r.value(t),
        }
    }

    fn d1(&self, s: f64, t: f64) -> f64 {
        match self {
            BivariateFn::Constant { .. } => 0.0,
            BivariateFn::Product { u_exponent, r } => u_exponent * s.powf(u_exponent - 1.0) * r.value(t),
        }
    }

    fn d2(&self, s: f64, t: f64) -> f64 {
        match self {
            BivariateFn::Constant { .. } => 0.0,
            BivariateFn::Product { u_exponent, r } => s.powf(*u_exponent) * r.derivative(t),
        }
    }
}

/// Adapter turning a value closure and a derivative closure into a [`Func1`].
pub struct FnWithDerivative<F, G>(pub F, pub G);

impl<F: Fn(f64) -> f64, G: Fn(f64) -> f64> Func1 for FnWithDerivative<F, G> {
    fn value(&self, s: f64) -> f64 {
        (self.0)(s)
    }

    fn derivative(&self, s: f64) -> f64 {
        (self.1)(s)
    }
}

/// Error from parsing the compact text form of a function.
#[derive(Debug, Clone, PartialEq, thiserror::Error)]
#[error("cannot parse function '{0}'")]
pub struct ParseFnError(pub String);

fn numbers(args: &[&str], src: &str) -> Result<Vec<f64>, ParseFnError> {
    args.iter().map(|a| a.trim().parse::<f64>().map_err(|_| ParseFnError(src.to_string()))).collect()
}

/// Compact forms: `const:c`, `power:e[:coef]`, `exp:rate[:coef]`,
/// `gaussian:rate`, `powersum:mu:a:b`, or the JSON object form.
impl FromStr for ScalarFn {
    type Err = ParseFnError;
    fn from_str(src: &str) -> Result<Self, ParseFnError> {
        let s = src.trim();
        if s.starts_with('{') {
            return serde_json::from_str(s).map_err(|_| ParseFnError(src.to_string()));
        }
        let mut parts = s.split(':');
        let head = parts.next().unwrap_or_default().to_ascii_lowercase();
        let args: Vec<&str> = parts.collect();
        let x = numbers(&args, src)?;
        let err = || ParseFnError(src.to_string());
        Ok(match (head.as_str(), x.as_slice()) {
            ("const" | "constant", [c]) => ScalarFn::Constant { c: *c },
            ("one", []) => ScalarFn::one(),
            ("power" | "pow", [e]) => ScalarFn::power(*e),
            ("power" | "pow", [e, coef]) => ScalarFn::Power { coef: *coef, exponent: *e },
            ("exp", [rate]) => ScalarFn::Exp { coef: 1.0, rate: *rate },
            ("exp", [rate, coef]) => ScalarFn::Exp { coef: *coef, rate: *rate },
            ("gaussian" | "gauss", [rate]) => ScalarFn::Gaussian { rate: *rate },
            ("powersum", [mu, a, b]) => ScalarFn::PowerSum { mu: *mu, a: *a, b: *b },
            _ => return Err(err()),
        })
    }
}

/// Compact forms: `const:c`, `u^a*<scalar form of r>` (e.g.
/// `u^0.5*power:2`), or the JSON object form.
impl FromStr for BivariateFn {
    type Err = ParseFnError;
    fn from_str(src: &str) -> Result<Self, ParseFnError> {
        let s = src.trim();
        if s.starts_with('{') {
            return serde_json::from_str(s).map_err(|_| ParseFnError(src.to_string()));
        }
        let err = || ParseFnError(src.to_string());
        if let Some(rest) = s.strip_prefix("u^") {
            let (a, r) = rest.split_once('*').unwrap_or((rest, "one"));
            let u_exponent = a.trim().parse::<f64>().map_err(|_| err())?;
            return Ok(BivariateFn::Product { u_exponent, r: r.parse().map_err(|_| err())? });
        }
        match s.parse::<ScalarFn>().map_err(|_| err())? {
            ScalarFn::Constant { c } => Ok(BivariateFn::Constant { c }),
            r => Ok(BivariateFn::Product { u_exponent: 0.0, r }),
        }
    }
}
