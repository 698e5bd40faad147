//! Checks of the structural hypotheses behind the uniqueness results: sign
//! conditions on the data functions `phi`, `psi`, `eta`, and closed-form
//! membership of `(p, q)` in the admissible regions.
//!
//! Universally quantified conditions are only sampled. A passing verdict is
//! evidence on the sampled set, recorded as [`Method::Sampled`], and never a
//! proof.

use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::functions::{Func1, Func2};

#[derive(Debug, Error, Clone, PartialEq)]
pub enum HypothesisError {
    #[error("function is not positive and finite at {at} (value {value})")]
    NotPositive { at: f64, value: f64 },
    #[error("derivative is not finite at {at}")]
    BadDerivative { at: f64 },
    #[error("unknown region id '{0}'")]
    UnknownRegion(String),
    #[error("invalid parameters: {0}")]
    InvalidParameters(String),
    #[error("no alpha in [0, 1] is feasible: p + k - 1 = {0} < 0")]
    Infeasible(f64),
}

pub type Result<T> = std::result::Result<T, HypothesisError>;

/// Log-spaced sample points, used for both coordinates of a pair grid.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SampleGrid {
    pub lo: f64,
    pub hi: f64,
    pub samples: usize,
}

impl Default for SampleGrid {
    fn default() -> Self {
        Self { lo: 1e-2, hi: 1e2, samples: 200 }
    }
}

impl SampleGrid {
    pub fn new(lo: f64, hi: f64, samples: usize) -> Self {
        Self { lo, hi, samples }
    }

    fn validate(&self) -> Result<()> {
        if !(self.lo > 0.0 && self.hi > self.lo && self.hi.is_finite()) || self.samples < 2 {
            return Err(HypothesisError::InvalidParameters(format!(
                "sample range [{}, {}] with {} points",
                self.lo, self.hi, self.samples
            )));
        }
        Ok(())
    }

    /// The sample points, endpoints included.
    pub fn points(&self) -> Vec<f64> {
        let (a, b) = (self.lo.ln(), self.hi.ln());
        let m = (self.samples - 1) as f64;
        (0..self.samples)
            .map(|i| match i {
                0 => self.lo,
                i if i + 1 == self.samples => self.hi,
                i => (a + (b - a) * i as f64 / m).exp(),
            })
            .collect()
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Method {
    /// Checked on finitely many samples only.
    Sampled,
    /// Decided exactly from closed-form inequalities.
    ClosedForm,
}

/// Where a condition fails.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum Witness {
    Pair { s: f64, t: f64 },
    Sample { s: f64 },
    Point { p: f64, q: f64 },
}

/// How "at least one of the two inequalities is strict" is read.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Strictness {
    /// One partial is strictly positive at every sample.
    #[default]
    Global,
    /// At every sample some partial is strictly positive.
    PerPoint,
}

impl FromStr for Strictness {
    type Err = HypothesisError;
    fn from_str(s: &str) -> Result<Self> {
        match s {
            "global" => Ok(Strictness::Global),
            "per-point" | "per_point" | "pointwise" => Ok(Strictness::PerPoint),
            _ => Err(HypothesisError::InvalidParameters(format!("strictness '{s}'"))),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ConditionVerdict {
    pub condition: String,
    pub satisfied: bool,
    pub method: Method,
    /// Violating sample, present whenever `satisfied` is false.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub witness: Option<Witness>,
    /// The tested quantity at the witness, reproducible by re-evaluation.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub value: Option<f64>,
    /// Which part of a compound condition failed.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub failed: Option<String>,
    /// Second sample when a failure needs two points (global strictness).
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub companion: Option<Witness>,
    pub samples_checked: usize,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub range: Option<(f64, f64)>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub strictness: Option<Strictness>,
    /// `eta' < 0` at every sample.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub eta_strictly_decreasing: Option<bool>,
    /// Membership agrees with membership of `(-q, -p)` in the dual region.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub dual_consistent: Option<bool>,
}

impl ConditionVerdict {
    fn sampled(condition: &str, grid: &SampleGrid) -> Self {
        Self {
            condition: condition.to_string(),
            satisfied: true,
            method: Method::Sampled,
            witness: None,
            value: None,
            failed: None,
            companion: None,
            samples_checked: 0,
            range: Some((grid.lo, grid.hi)),
            strictness: None,
            eta_strictly_decreasing: None,
            dual_consistent: None,
        }
    }

    fn fail(&mut self, witness: Witness, value: f64, failed: &str) {
        self.satisfied = false;
        self.witness = Some(witness);
        self.value = Some(value);
        self.failed = Some(failed.to_string());
    }

    /// "member" / "not member" style label used in text output.
    pub fn label(&self) -> &'static str {
        match (self.method, self.satisfied) {
            (Method::Sampled, true) => "satisfied (sampled)",
            (Method::Sampled, false) => "violated",
            (Method::ClosedForm, true) => "member",
            (Method::ClosedForm, false) => "not member",
        }
    }
}

fn positive(f: &dyn Func1, s: f64) -> Result<f64> {
    let v = f.value(s);
    if v > 0.0 && v.is_finite() {
        Ok(v)
    } else {
        Err(HypothesisError::NotPositive { at: s, value: v })
    }
}

fn check_k(k: usize) -> Result<()> {
    if k < 2 {
        return Err(HypothesisError::InvalidParameters(format!("the phi conditions need k >= 2, got k={k}")));
    }
    Ok(())
}

/// `(s phi^(1/k)(s) - t phi^(1/k)(t)) (phi^((k-1)/k)(s) - phi^((k-1)/k)(t))`.
pub fn phi_product(phi: &dyn Func1, k: usize, s: f64, t: f64) -> Result<f64> {
    check_k(k)?;
    let (a, b) = (positive(phi, s)?, positive(phi, t)?);
    let k = k as f64;
    Ok(difference(s * a.powf(1.0 / k), t * b.powf(1.0 / k)) * difference(a.powf((k - 1.0) / k), b.powf((k - 1.0) / k)))
}

/// `a - b`, flushed to zero when it is at rounding level.
fn difference(a: f64, b: f64) -> f64 {
    let d = a - b;
    if d.abs() <= 1e-13 * a.abs().max(b.abs()) {
        0.0
    } else {
        d
    }
}

/// Tests `phi_product(s, t) < 0` for all sampled `t > s`. The reported
/// witness is the pair with the largest product.
pub fn check_phi_product(phi: &dyn Func1, k: usize, grid: &SampleGrid) -> Result<ConditionVerdict> {
    grid.validate()?;
    check_k(k)?;
    let pts = grid.points();
    let mut v = ConditionVerdict::sampled("phi-product", grid);
    let mut worst: Option<(f64, f64, f64)> = None;
    for (i, &s) in pts.iter().enumerate() {
        for &t in &pts[i + 1..] {
            let x = phi_product(phi, k, s, t)?;
            v.samples_checked += 1;
            if !(x < 0.0) && worst.is_none_or(|w| x > w.2) {
                worst = Some((s, t, x));
            }
        }
    }
    if let Some((s, t, x)) = worst {
        v.fail(Witness::Pair { s, t }, x, "product not negative");
    }
    Ok(v)
}

/// `min(-(log phi)'(s), (log phi)'(s) + k/s)`; the bound holds iff positive.
pub fn log_derivative_margin(phi: &dyn Func1, k: usize, s: f64) -> Result<f64> {
    check_k(k)?;
    positive(phi, s)?;
    let d = phi.log_derivative(s);
    if !d.is_finite() {
        return Err(HypothesisError::BadDerivative { at: s });
    }
    Ok((-d).min(d + k as f64 / s))
}

/// Tests `-k/s < (log phi)'(s) < 0` at every sample.
pub fn check_phi_log_derivative(phi: &dyn Func1, k: usize, grid: &SampleGrid) -> Result<ConditionVerdict> {
    grid.validate()?;
    let mut v = ConditionVerdict::sampled("phi-log-derivative", grid);
    let mut worst: Option<(f64, f64)> = None;
    for s in grid.points() {
        let m = log_derivative_margin(phi, k, s)?;
        v.samples_checked += 1;
        if !(m > 0.0) && worst.is_none_or(|w| m < w.1) {
            worst = Some((s, m));
        }
    }
    if let Some((s, m)) = worst {
        v.fail(Witness::Sample { s }, m, "log-derivative bound");
    }
    Ok(v)
}

fn check_kl(k: usize, l: usize) -> Result<i32> {
    if l >= k {
        return Err(HypothesisError::InvalidParameters(format!("need 0 <= l < k, got k={k}, l={l}")));
    }
    Ok((k - l - 1) as i32)
}

/// `(s psi(1,1) - psi(s,t)) (eta(1) psi(1,1)^m - eta(t) psi(s,t)^m)` with
/// `m = k - l - 1`.
pub fn psi_eta_product(psi: &dyn Func2, eta: &dyn Func1, k: usize, l: usize, s: f64, t: f64) -> Result<f64> {
    let m = check_kl(k, l)?;
    let p11 = psi.value(1.0, 1.0);
    let pst = psi.value(s, t);
    for (at, x) in [(1.0, p11), (s, pst)] {
        if !(x > 0.0 && x.is_finite()) {
            return Err(HypothesisError::NotPositive { at, value: x });
        }
    }
    let (e1, et) = (positive(eta, 1.0)?, positive(eta, t)?);
    Ok(difference(s * p11, pst) * difference(e1 * p11.powi(m), et * pst.powi(m)))
}

/// Tests `psi_eta_product(s, t) <= 0` for sampled `t > s`, after checking
/// that `eta` is non-increasing. Also records whether `eta' < 0` strictly.
pub fn check_psi_eta_product(
    psi: &dyn Func2,
    eta: &dyn Func1,
    k: usize,
    l: usize,
    grid: &SampleGrid,
) -> Result<ConditionVerdict> {
    grid.validate()?;
    check_kl(k, l)?;
    let pts = grid.points();
    let mut v = ConditionVerdict::sampled("psi-eta-product", grid);
    let mut strict = true;
    let mut rising: Option<(f64, f64)> = None;
    for &t in &pts {
        let d = eta.derivative(t);
        if !d.is_finite() {
            return Err(HypothesisError::BadDerivative { at: t });
        }
        strict &= d < 0.0;
        if d > 0.0 && rising.is_none_or(|r| d > r.1) {
            rising = Some((t, d));
        }
    }
    v.eta_strictly_decreasing = Some(strict);
    v.samples_checked += pts.len();
    if let Some((t, d)) = rising {
        v.fail(Witness::Sample { s: t }, d, "eta increasing");
        return Ok(v);
    }
    let mut worst: Option<(f64, f64, f64)> = None;
    for (i, &s) in pts.iter().enumerate() {
        for &t in &pts[i + 1..] {
            let x = psi_eta_product(psi, eta, k, l, s, t)?;
            v.samples_checked += 1;
            if !(x <= 0.0) && worst.is_none_or(|w| x > w.2) {
                worst = Some((s, t, x));
            }
        }
    }
    if let Some((s, t, x)) = worst {
        v.fail(Witness::Pair { s, t }, x, "product positive");
    }
    Ok(v)
}

/// Tests `d1 psi >= 0`, `d2 psi >= 0` on the full sample grid, with one of
/// them strict in the given reading.
pub fn check_psi_monotone(psi: &dyn Func2, grid: &SampleGrid, strictness: Strictness) -> Result<ConditionVerdict> {
    grid.validate()?;
    let pts = grid.points();
    let mut v = ConditionVerdict::sampled("psi-monotone", grid);
    v.strictness = Some(strictness);
    let mut negative: Option<(f64, f64, f64)> = None;
    // first samples where each partial fails to be strict, and where both do
    let mut flat1 = None;
    let mut flat2 = None;
    let mut flat_both = None;
    for &s in &pts {
        for &t in &pts {
            let (a, b) = (psi.d1(s, t), psi.d2(s, t));
            if !(a.is_finite() && b.is_finite()) {
                return Err(HypothesisError::BadDerivative { at: s });
            }
            v.samples_checked += 1;
            let m = a.min(b);
            if m < 0.0 && negative.is_none_or(|w| m < w.2) {
                negative = Some((s, t, m));
            }
            if a <= 0.0 && flat1.is_none() {
                flat1 = Some((s, t, a));
            }
            if b <= 0.0 && flat2.is_none() {
                flat2 = Some((s, t, b));
            }
            if a.max(b) <= 0.0 && flat_both.is_none() {
                flat_both = Some((s, t, a.max(b)));
            }
        }
    }
    if let Some((s, t, m)) = negative {
        v.fail(Witness::Pair { s, t }, m, "negative partial");
        return Ok(v);
    }
    match strictness {
        Strictness::Global => {
            if let (Some((s1, t1, a)), Some((s2, t2, _))) = (flat1, flat2) {
                v.fail(Witness::Pair { s: s1, t: t1 }, a, "neither partial strict everywhere");
                v.companion = Some(Witness::Pair { s: s2, t: t2 });
            }
        }
        Strictness::PerPoint => {
            if let Some((s, t, m)) = flat_both {
                v.fail(Witness::Pair { s, t }, m, "no strict partial at sample");
            }
        }
    }
    Ok(v)
}

/// Admissible `(p, q)` regions of the uniqueness results.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Region {
    /// `p >= 1`, `q <= k+1`, one strict; any solution (`n >= 2`).
    Monotone,
    /// `p >= -n-1`, `q <= n-1+2 sqrt(1+(n+1+p)/(n+2))`, one strict;
    /// origin-symmetric solutions.
    SymmetricUpper,
    /// Dual of [`Region::SymmetricUpper`].
    SymmetricLower,
    /// `-n-1 < p <= -1`, `n+1 <= q <= n+1/2+sqrt(1/4-(1+p)(n+1+p)/(n(n+2)))`.
    GeneralUpper,
    /// Dual of [`Region::GeneralUpper`].
    GeneralLower,
    /// Planar embedded solutions, two self-dual branches.
    Planar,
    /// `p >= 1-k`, `q <= k+1+2 alpha_*`, `1 <= k <= n-1`; origin-symmetric.
    ChristoffelSymmetric,
}

impl Region {
    pub const ALL: [Region; 7] = [
        Region::Monotone,
        Region::SymmetricUpper,
        Region::SymmetricLower,
        Region::GeneralUpper,
        Region::GeneralLower,
        Region::Planar,
        Region::ChristoffelSymmetric,
    ];

    pub fn id(self) -> &'static str {
        match self {
            Region::Monotone => "1.6",
            Region::SymmetricUpper => "1.10i",
            Region::SymmetricLower => "1.10ii",
            Region::GeneralUpper => "1.12i",
            Region::GeneralLower => "1.12ii",
            Region::Planar => "cor1.9",
            Region::ChristoffelSymmetric => "corA",
        }
    }

    /// Region containing `(-q, -p)` exactly when this one contains `(p, q)`.
    pub fn dual(self) -> Option<Region> {
        match self {
            Region::SymmetricUpper => Some(Region::SymmetricLower),
            Region::SymmetricLower => Some(Region::SymmetricUpper),
            Region::GeneralUpper => Some(Region::GeneralLower),
            Region::GeneralLower => Some(Region::GeneralUpper),
            Region::Planar => Some(Region::Planar),
            Region::Monotone | Region::ChristoffelSymmetric => None,
        }
    }

    pub fn needs_k(self) -> bool {
        matches!(self, Region::Monotone | Region::ChristoffelSymmetric)
    }
}

impl fmt::Display for Region {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.id())
    }
}

impl FromStr for Region {
    type Err = HypothesisError;
    fn from_str(s: &str) -> Result<Self> {
        let key = s.trim().to_ascii_lowercase();
        Ok(match key.as_str() {
            "1.6" | "cor1.6" => Region::Monotone,
            "1.10i" | "1.10.i" | "1.10(i)" => Region::SymmetricUpper,
            "1.10ii" | "1.10.ii" | "1.10(ii)" => Region::SymmetricLower,
            "1.12i" | "1.12.i" | "1.12(i)" => Region::GeneralUpper,
            "1.12ii" | "1.12.ii" | "1.12(ii)" => Region::GeneralLower,
            "cor1.9" | "1.9" => Region::Planar,
            "cora" | "a" | "a.2" | "a2" => Region::ChristoffelSymmetric,
            _ => return Err(HypothesisError::UnknownRegion(s.to_string())),
        })
    }
}

/// Why `(p, q)` is outside a region, or `None` when inside.
fn region_failure(region: Region, n: usize, k: Option<usize>, p: f64, q: f64) -> Result<Option<&'static str>> {
    if !(p.is_finite() && q.is_finite()) {
        return Err(HypothesisError::InvalidParameters(format!("p={p}, q={q}")));
    }
    if n == 0 {
        return Err(HypothesisError::InvalidParameters("n must be at least 1".into()));
    }
    let nf = n as f64;
    let k = match (region.needs_k(), k) {
        (true, None) => return Err(HypothesisError::InvalidParameters(format!("region {region} needs k"))),
        (_, k) => k.unwrap_or(n),
    };
    let kf = k as f64;
    let fail = |ok: bool, why: &'static str| if ok { None } else { Some(why) };
    Ok(match region {
        Region::Monotone => {
            if n < 2 || k < 1 || k > n {
                Some("requires n >= 2 and 1 <= k <= n")
            } else if !(p >= 1.0 && q <= kf + 1.0) {
                Some("p >= 1 and q <= k+1")
            } else {
                fail(!(p == 1.0 && q == kf + 1.0), "neither inequality strict")
            }
        }
        Region::SymmetricUpper => {
            let bound = (nf - 1.0) + 2.0 * (1.0 + (nf + 1.0 + p) / (nf + 2.0)).sqrt();
            if !(p >= -nf - 1.0 && q <= bound) {
                Some("p >= -n-1 and q below the upper bound")
            } else {
                fail(!(p == -nf - 1.0 && q == bound), "neither inequality strict")
            }
        }
        Region::SymmetricLower => {
            let bound = (1.0 - nf) - 2.0 * (1.0 + (nf + 1.0 - q) / (nf + 2.0)).sqrt();
            if !(q <= nf + 1.0 && p >= bound) {
                Some("q <= n+1 and p above the lower bound")
            } else {
                fail(!(q == nf + 1.0 && p == bound), "neither inequality strict")
            }
        }
        Region::GeneralUpper => {
            let inner = 0.25 - (1.0 + p) * (nf + 1.0 + p) / (nf * (nf + 2.0));
            let ok = p > -nf - 1.0 && p <= -1.0 && q >= nf + 1.0 && inner >= 0.0 && q <= (nf + 0.5) + inner.sqrt();
            fail(ok, "outside -n-1 < p <= -1, n+1 <= q <= bound")
        }
        Region::GeneralLower => {
            let inner = 0.25 - (1.0 - q) * (nf + 1.0 - q) / (nf * (nf + 2.0));
            let ok = q < nf + 1.0 && q >= 1.0 && p <= -nf - 1.0 && inner >= 0.0 && p >= -(nf + 0.5) - inner.sqrt();
            fail(ok, "outside 1 <= q < n+1, bound <= p <= -n-1")
        }
        Region::Planar => {
            if n != 1 {
                Some("requires n = 1")
            } else {
                let upper = q > 2.0 && p + 3.0 < q && 5.0 + p >= 0.0 && q <= 2.0 * ((5.0 + p) / 3.0).sqrt();
                let lower = p < -2.0 && 5.0 - q >= 0.0 && -(2.0 * ((5.0 - q) / 3.0).sqrt()) <= p && p < q - 3.0;
                fail(upper || lower, "outside both planar branches")
            }
        }
        Region::ChristoffelSymmetric => {
            if n < 2 || k < 1 || k + 1 > n {
                Some("requires n >= 2 and 1 <= k <= n-1")
            } else if p < 1.0 - kf {
                Some("p >= 1-k")
            } else {
                fail(q <= kf + 1.0 + 2.0 * alpha_star(n, k, p)?, "q <= k+1+2 alpha_*")
            }
        }
    })
}

/// Closed-form membership test, with the duality cross-check where the
/// region has a dual.
pub fn region_member(region: Region, n: usize, k: Option<usize>, p: f64, q: f64) -> Result<ConditionVerdict> {
    let why = region_failure(region, n, k, p, q)?;
    let dual_consistent = match region.dual() {
        Some(d) => Some(region_failure(d, n, k, -q, -p)?.is_none() == why.is_none()),
        None => None,
    };
    Ok(ConditionVerdict {
        condition: format!("region {}", region.id()),
        satisfied: why.is_none(),
        method: Method::ClosedForm,
        witness: why.map(|_| Witness::Point { p, q }),
        value: None,
        failed: why.map(str::to_string),
        companion: None,
        samples_checked: 1,
        range: None,
        strictness: None,
        eta_strictly_decreasing: None,
        dual_consistent,
    })
}

/// `[min(alpha, 1-alpha), R - C1(alpha), R - C2(alpha)]` with `R = p+k-1`;
/// `alpha` is feasible iff all three are non-negative.
pub fn alpha_constraints(n: usize, k: usize, p: f64, alpha: f64) -> [f64; 3] {
    let (nf, kf) = (n as f64, k as f64);
    let r = p + kf - 1.0;
    let a2 = alpha * alpha + 2.0 * alpha;
    [
        alpha.min(1.0 - alpha),
        r - (-2.0 * alpha * (p + 1.0) + a2 * (3.0 * p + 1.0)),
        r - (2.0 * alpha * (nf + 2.0) + a2 * (2.0 * nf + kf + 6.0)),
    ]
}

/// Real roots of `a x^2 + b x + c`.
fn quadratic_roots(a: f64, b: f64, c: f64) -> Vec<f64> {
    if a == 0.0 {
        return if b == 0.0 { vec![] } else { vec![-c / b] };
    }
    let disc = b * b - 4.0 * a * c;
    if disc < 0.0 {
        return vec![];
    }
    let q = -0.5 * (b + b.signum() * disc.sqrt());
    if q == 0.0 {
        return vec![0.0];
    }
    vec![q / a, c / q]
}

/// Largest `alpha` in `[0, 1]` satisfying both quadratic constraints. The
/// maximum of the feasible set is 1 or a root of one of the constraints, so
/// it is found among those candidates.
pub fn alpha_star(n: usize, k: usize, p: f64) -> Result<f64> {
    let (nf, kf) = (n as f64, k as f64);
    let r = p + kf - 1.0;
    if !p.is_finite() {
        return Err(HypothesisError::InvalidParameters(format!("p={p}")));
    }
    if r < 0.0 {
        return Err(HypothesisError::Infeasible(r));
    }
    // C1 = (3p+1) a^2 + 4p a,  C2 = (2n+k+6) a^2 + (6n+2k+16) a
    let mut candidates = vec![0.0, 1.0];
    candidates.extend(quadratic_roots(3.0 * p + 1.0, 4.0 * p, -r));
    candidates.extend(quadratic_roots(2.0 * nf + kf + 6.0, 6.0 * nf + 2.0 * kf + 16.0, -r));
    let tol = 1e-13 * (1.0 + r.abs() + p.abs());
    Ok(candidates
        .into_iter()
        .filter(|a| (0.0..=1.0).contains(a))
        .filter(|&a| alpha_constraints(n, k, p, a).iter().all(|m| *m >= -tol))
        .fold(0.0, f64::max))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::functions::{BivariateFn, FnWithDerivative, ScalarFn};

    fn coarse() -> SampleGrid {
        SampleGrid::new(1e-2, 1e2, 60)
    }

    #[test]
    fn power_phi_in_the_interval() {
        for k in 2..5 {
            for p in [1.5, k as f64 + 0.5] {
                let v = check_phi_product(&ScalarFn::power(1.0 - p), k, &coarse()).unwrap();
                assert!(v.satisfied, "k={k} p={p} {v:?}");
                assert_eq!(v.method, Method::Sampled);
                assert_eq!(v.samples_checked, 60 * 59 / 2);
            }
        }
    }

    #[test]
    fn power_phi_outside_has_witness() {
        let k = 3;
        let phi = ScalarFn::power(1.0 - (k as f64 + 2.0));
        let v = check_phi_product(&phi, k, &coarse()).unwrap();
        assert!(!v.satisfied);
        let Some(Witness::Pair { s, t }) = v.witness else { panic!() };
        assert!(t > s);
        let x = phi_product(&phi, k, s, t).unwrap();
        assert_eq!(x, v.value.unwrap());
        assert!(x >= 0.0);
    }

    #[test]
    fn listed_phi_examples() {
        let k = 3;
        let exp = ScalarFn::Exp { coef: 1.0, rate: -1.0 };
        assert!(check_phi_product(&exp, k, &SampleGrid::new(1e-2, k as f64, 80)).unwrap().satisfied);
        assert!(!check_phi_product(&exp, k, &SampleGrid::new(1e-2, 2.0 * k as f64, 80)).unwrap().satisfied);
        let sum = ScalarFn::PowerSum { mu: 2.0, a: -0.5, b: -2.0 };
        assert!(check_phi_product(&sum, k, &coarse()).unwrap().satisfied);
        let inv = FnWithDerivative(|s: f64| 1.0 / (s.powf(0.5) + s.powf(2.0)), |s: f64| {
            let d = s.powf(0.5) + s * s;
            -(0.5 * s.powf(-0.5) + 2.0 * s) / (d * d)
        });
        assert!(check_phi_product(&inv, k, &coarse()).unwrap().satisfied);
    }

    #[test]
    fn nonpositive_phi_is_an_error() {
        let phi = ScalarFn::Power { coef: -1.0, exponent: 1.0 };
        assert!(matches!(check_phi_product(&phi, 2, &coarse()), Err(HypothesisError::NotPositive { .. })));
    }

    #[test]
    fn log_derivative_bounds() {
        let k = 3;
        assert!(check_phi_log_derivative(&ScalarFn::power(1.0 - 2.0), k, &coarse()).unwrap().satisfied);
        let one = check_phi_log_derivative(&ScalarFn::one(), k, &coarse()).unwrap();
        assert!(!one.satisfied && one.value == Some(0.0));
        let edge = ScalarFn::power(-(k as f64));
        let v = check_phi_log_derivative(&edge, k, &coarse()).unwrap();
        assert!(!v.satisfied);
        for s in coarse().points() {
            assert!(log_derivative_margin(&edge, k, s).unwrap() <= 0.0);
        }
    }

    #[test]
    fn product_form_psi_with_matching_eta() {
        let (k, l) = (3, 0);
        let m = (k - l - 1) as f64;
        for alpha in [0.0, 0.3, 0.7] {
            let phi = ScalarFn::Power { coef: 1.0, exponent: 1.5 };
            let psi = BivariateFn::Product { u_exponent: alpha, r: phi.clone() };
            let eta = ScalarFn::power(-1.5 * m / (1.0 - alpha));
            let v = check_psi_eta_product(&psi, &eta, k, l, &coarse()).unwrap();
            assert!(v.satisfied, "alpha={alpha} {v:?}");
            assert_eq!(v.eta_strictly_decreasing, Some(true));
        }
    }

    #[test]
    fn constant_psi_and_eta() {
        let psi = BivariateFn::Constant { c: 1.0 };
        let v = check_psi_eta_product(&psi, &ScalarFn::one(), 3, 1, &coarse()).unwrap();
        assert!(v.satisfied);
        assert_eq!(v.eta_strictly_decreasing, Some(false));
    }

    #[test]
    fn squared_u_violates() {
        let (k, l) = (3, 0);
        let psi = BivariateFn::Product { u_exponent: 2.0, r: ScalarFn::one() };
        let eta = ScalarFn::one();
        let v = check_psi_eta_product(&psi, &eta, k, l, &coarse()).unwrap();
        assert!(!v.satisfied);
        let Some(Witness::Pair { s, t }) = v.witness else { panic!() };
        assert_eq!(psi_eta_product(&psi, &eta, k, l, s, t).unwrap(), v.value.unwrap());
    }

    #[test]
    fn increasing_eta_is_reported() {
        let psi = BivariateFn::Constant { c: 1.0 };
        let v = check_psi_eta_product(&psi, &ScalarFn::power(1.0), 2, 0, &coarse()).unwrap();
        assert!(!v.satisfied);
        assert_eq!(v.failed.as_deref(), Some("eta increasing"));
    }

    #[test]
    fn monotone_psi() {
        let g = SampleGrid::new(1e-2, 1e2, 30);
        // u^(p-1) r^(k+1-q)
        let (k, p, q) = (2.0, 1.5, 3.0);
        let psi = BivariateFn::Product { u_exponent: p - 1.0, r: ScalarFn::power(k + 1.0 - q) };
        assert!(check_psi_monotone(&psi, &g, Strictness::Global).unwrap().satisfied);
        let gauss = BivariateFn::Product { u_exponent: 0.0, r: ScalarFn::Gaussian { rate: 0.5 } };
        assert!(check_psi_monotone(&gauss, &SampleGrid::new(1e-2, 10.0, 30), Strictness::Global).unwrap().satisfied);
        let c = check_psi_monotone(&BivariateFn::Constant { c: 2.0 }, &g, Strictness::PerPoint).unwrap();
        assert!(!c.satisfied);
        let dec = BivariateFn::Product { u_exponent: -0.5, r: ScalarFn::one() };
        assert_eq!(check_psi_monotone(&dec, &g, Strictness::Global).unwrap().failed.as_deref(), Some("negative partial"));
    }

    #[test]
    fn strictness_readings_differ() {
        // d1 > 0 only where u > r, d2 > 0 only where u <= r
        struct Patch;
        impl Func2 for Patch {
            fn value(&self, _: f64, _: f64) -> f64 {
                1.0
            }
            fn d1(&self, s: f64, t: f64) -> f64 {
                (s - t).max(0.0)
            }
            fn d2(&self, s: f64, t: f64) -> f64 {
                if s <= t { 1.0 } else { 0.0 }
            }
        }
        let g = SampleGrid::new(0.5, 2.0, 5);
        let global = check_psi_monotone(&Patch, &g, Strictness::Global).unwrap();
        assert!(!global.satisfied && global.companion.is_some());
        assert!(check_psi_monotone(&Patch, &g, Strictness::PerPoint).unwrap().satisfied);
    }

    #[test]
    fn region_examples() {
        let v = region_member(Region::SymmetricUpper, 1, None, 0.0, 2.5).unwrap();
        assert!(v.satisfied && v.dual_consistent == Some(true));
        assert!(!region_member(Region::SymmetricUpper, 1, None, 0.0, 2.6).unwrap().satisfied);
        for n in 1..5 {
            let nf = n as f64;
            assert!(region_member(Region::GeneralUpper, n, None, -1.0, nf + 1.0).unwrap().satisfied);
            assert!(region_member(Region::GeneralLower, n, None, -nf - 1.0, 1.0).unwrap().satisfied);
            assert!(!region_member(Region::GeneralUpper, n, None, -nf - 1.0, nf + 1.0).unwrap().satisfied);
            // both limits attained: not strict
            assert!(!region_member(Region::SymmetricUpper, n, None, -nf - 1.0, nf + 1.0).unwrap().satisfied);
        }
        assert!(region_member(Region::Monotone, 3, Some(2), 1.0, 2.5).unwrap().satisfied);
        assert!(!region_member(Region::Monotone, 3, Some(2), 1.0, 3.0).unwrap().satisfied);
        assert!(region_member(Region::Planar, 1, None, -1.0, 2.1).unwrap().satisfied);
        assert!(region_member(Region::Planar, 1, None, -2.1, 1.0).unwrap().satisfied);
        assert!(!region_member(Region::Planar, 1, None, 0.0, 2.5).unwrap().satisfied);
        assert!(!region_member(Region::Planar, 2, None, -1.0, 2.1).unwrap().satisfied);
        let a = alpha_star(2, 1, 1.0).unwrap();
        assert!(region_member(Region::ChristoffelSymmetric, 2, Some(1), 1.0, 2.0 + 2.0 * a).unwrap().satisfied);
        assert!(!region_member(Region::ChristoffelSymmetric, 2, Some(1), 1.0, 2.0 + 2.0 * a + 1e-9).unwrap().satisfied);
        assert!(region_member(Region::Monotone, 3, None, 1.0, 1.0).is_err());
    }

    #[test]
    fn region_ids_parse() {
        for r in Region::ALL {
            assert_eq!(r.id().parse::<Region>().unwrap(), r);
        }
        assert_eq!("1.12(i)".parse::<Region>().unwrap(), Region::GeneralUpper);
        assert!("1.13".parse::<Region>().is_err());
    }

    #[test]
    fn alpha_star_values() {
        let a = alpha_star(2, 1, 1.0).unwrap();
        assert!((a - (-30.0 + 944f64.sqrt()) / 22.0).abs() < 1e-14);
        for n in 2..6 {
            for k in 1..n {
                assert_eq!(alpha_star(n, k, 1.0 - k as f64).unwrap(), 0.0);
            }
        }
        assert!(matches!(alpha_star(3, 1, -0.5), Err(HypothesisError::Infeasible(_))));
        // for large p the first constraint tends to 3a^2 + 4a <= 1
        let limit = (-2.0 + 7f64.sqrt()) / 3.0;
        assert!((alpha_star(2, 1, 1e9).unwrap() - limit).abs() < 1e-6);
    }
}
