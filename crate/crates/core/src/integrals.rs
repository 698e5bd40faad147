//! Integral identities for support functions, evaluated by quadrature on the
//! sphere after pulling everything back through the Gauss map: curvatures
//! are eigenvalues of `W^{-1}`, the area element is `det W dsigma`, and the
//! tangential part of the position vector has frame components `grad u`.
//!
//! Every function returns a [`ResidualReport`] whose `value` vanishes in the
//! continuum; `scale` is the integral of the absolute values of the terms, so
//! `value / scale` is a relative residual.

use std::sync::Arc;

use nalgebra::DMatrix;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::body::{BodyError, Shape, SupportBody};
use crate::functions::{Func1, ScalarFn};
use crate::sphere::{GridError, GridSpec, SphereGrid};
use crate::symfun::{self, binomial, SymfunError};

/// Relative residuals below this are treated as round-off when measuring
/// convergence orders.
pub const ROUND_OFF_FLOOR: f64 = 1e-13;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum IntegralError {
    #[error("index out of range: {0}")]
    IndexOutOfRange(String),
    #[error("bodies live on different grids")]
    GridMismatch,
    #[error("identity needs strictly convex bodies")]
    NotConvex,
    #[error("weight function is not finite at r = {0}")]
    NonFinite(f64),
    #[error(transparent)]
    Body(#[from] BodyError),
    #[error(transparent)]
    Grid(#[from] GridError),
    #[error(transparent)]
    Symfun(#[from] SymfunError),
}

pub type Result<T> = std::result::Result<T, IntegralError>;

/// Outcome of evaluating one identity at one resolution.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ResidualReport {
    pub name: String,
    pub value: f64,
    pub scale: f64,
    pub resolution: String,
    pub order: Option<f64>,
}

impl ResidualReport {
    fn new(name: String, grid: &SphereGrid, terms: &Terms) -> Self {
        Self {
            name,
            value: terms.value,
            scale: terms.scale,
            resolution: grid.spec().label(),
            order: None,
        }
    }

    /// `|value| / scale` (zero when both vanish).
    pub fn relative(&self) -> f64 {
        if self.scale == 0.0 {
            self.value.abs()
        } else {
            self.value.abs() / self.scale
        }
    }
}

/// Accumulates `sum w (a - b)` together with `sum w (|a| + |b|)`.
#[derive(Default)]
struct Terms {
    value: f64,
    scale: f64,
}

impl Terms {
    fn add(&mut self, w: f64, a: f64, b: f64) {
        self.value += w * (a - b);
        self.scale += w * (a.abs() + b.abs());
    }
}

fn same_grid(a: &SupportBody, b: &SupportBody) -> Result<()> {
    if Arc::ptr_eq(a.grid(), b.grid()) || a.grid().spec() == b.grid().spec() {
        Ok(())
    } else {
        Err(IntegralError::GridMismatch)
    }
}

fn require_convex(bodies: &[&SupportBody]) -> Result<()> {
    if bodies.iter().all(|b| b.is_convex_body()) {
        Ok(())
    } else {
        Err(IntegralError::NotConvex)
    }
}

/// Minkowski formula `int (u P_{k+1}(kappa) - P_k(kappa)) dmu = 0`, `0 <= k < n`.
pub fn minkowski_residual(body: &SupportBody, k: usize) -> Result<ResidualReport> {
    let n = body.dim();
    if k >= n {
        return Err(IntegralError::IndexOutOfRange(format!("k={k} needs k < n={n}")));
    }
    let g = body.grid();
    let mut t = Terms::default();
    for i in 0..body.len() {
        // P_j(kappa) dmu = P_{n-j}(W) dsigma
        let p = symfun::elem_sym(body.radii_at(i));
        t.add(g.weights()[i], body.support()[i] * p[n - k - 1], p[n - k]);
    }
    Ok(ResidualReport::new(format!("minkowski[k={k}]"), g, &t))
}

/// Two-body identities for mixed functions `P_{k,l}(W, W_bar)`. They hold
/// for arbitrary smooth `u`, `u_bar`, convex or not.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum MixedIdentity {
    /// `int (u_bar P_{k,l} - P_{k,l+1}) = 0`
    SecondSupport,
    /// `int (u P_{k,l} - P_{k+1,l}) = 0`
    FirstSupport,
    /// `int (u_bar P_{k+1,l} - u P_{k,l+1}) = 0`
    Exchange,
}

impl MixedIdentity {
    pub const ALL: [MixedIdentity; 3] = [Self::SecondSupport, Self::FirstSupport, Self::Exchange];

    pub fn label(&self) -> &'static str {
        match self {
            Self::SecondSupport => "mixed_second",
            Self::FirstSupport => "mixed_first",
            Self::Exchange => "mixed_exchange",
        }
    }
}

/// Residual of a [`MixedIdentity`] for `0 <= k + l <= n - 1`.
pub fn mixed_identity_residual(
    a: &SupportBody,
    b: &SupportBody,
    k: usize,
    l: usize,
    which: MixedIdentity,
) -> Result<ResidualReport> {
    same_grid(a, b)?;
    let n = a.dim();
    if k + l >= n {
        return Err(IntegralError::IndexOutOfRange(format!("k+l={} needs k+l < n={n}", k + l)));
    }
    let g = a.grid();
    let mut t = Terms::default();
    for i in 0..a.len() {
        let (wa, wb) = (a.w_matrix(i), b.w_matrix(i));
        let p = |x, y| symfun::mixed_pkl(&wa, &wb, x, y);
        let (u, ub) = (a.support()[i], b.support()[i]);
        let (lhs, rhs) = match which {
            MixedIdentity::SecondSupport => (ub * p(k, l)?, p(k, l + 1)?),
            MixedIdentity::FirstSupport => (u * p(k, l)?, p(k + 1, l)?),
            MixedIdentity::Exchange => (ub * p(k + 1, l)?, u * p(k, l + 1)?),
        };
        t.add(g.weights()[i], lhs, rhs);
    }
    Ok(ResidualReport::new(format!("{}[k={k},l={l}]", which.label()), g, &t))
}

/// Per-node data of one side of a two-body identity; the unit sphere is
/// available without sampling.
#[derive(Clone, Copy)]
enum Side<'a> {
    Body(&'a SupportBody),
    UnitSphere,
}

struct Node {
    u: f64,
    tau: Vec<f64>,
    w: DMatrix<f64>,
    det: f64,
    r: f64,
}

impl Side<'_> {
    fn node(&self, n: usize, i: usize) -> Node {
        match self {
            Side::Body(b) => {
                let w = b.w_matrix(i);
                Node {
                    u: b.support()[i],
                    tau: b.grad_at(i).to_vec(),
                    det: b.radii_at(i).iter().product(),
                    w,
                    r: b.radial()[i],
                }
            }
            Side::UnitSphere => Node { u: 1.0, tau: vec![0.0; n], w: DMatrix::identity(n, n), det: 1.0, r: 1.0 },
        }
    }
}

fn inverse(m: &DMatrix<f64>) -> DMatrix<f64> {
    m.clone().try_inverse().unwrap_or_else(|| DMatrix::from_element(m.nrows(), m.ncols(), f64::NAN))
}

/// Shared evaluator for the relative-curvature identities, optionally
/// weighted by `eta(r_bar)`:
///
/// `int eta(r_bar) (u_bar P_{k+1}(a) - u P_k(a)) dmu_bar
///    = (n-k-1)!/n! int eta'(r_bar)/r_bar D((u tau_bar - u_bar tau) tau_bar^T, a, .., a) dmu_bar`
///
/// with `a = W W_bar^{-1}`, `dmu_bar = det W_bar dsigma` and `D` the
/// generalized-Kronecker contraction, `(k+1)! sigma_{k+1}` of its slots.
fn relative_core(
    grid: &SphereGrid,
    first: Side,
    second: Side,
    k: usize,
    eta: Option<&dyn Func1>,
) -> Result<Terms> {
    let n = grid.dim();
    if k >= n {
        return Err(IntegralError::IndexOutOfRange(format!("k={k} needs k < n={n}")));
    }
    let coef = (1..=n - k - 1).map(|x| x as f64).product::<f64>() / (1..=n).map(|x| x as f64).product::<f64>()
        * (1..=k + 1).map(|x| x as f64).product::<f64>();
    let mut t = Terms::default();
    for i in 0..grid.len() {
        let x = first.node(n, i);
        let y = second.node(n, i);
        let a = &x.w * inverse(&y.w);
        let p = symfun::elem_sym_matrix(&a);
        let wq = grid.weights()[i] * y.det;
        let (e, de) = match eta {
            Some(f) => (f.value(y.r), f.derivative(y.r)),
            None => (1.0, 0.0),
        };
        if !e.is_finite() || !de.is_finite() {
            return Err(IntegralError::NonFinite(y.r));
        }
        let lhs_a = e * y.u * p[k + 1];
        let lhs_b = e * x.u * p[k];
        let rhs = if de == 0.0 {
            0.0
        } else {
            let v: Vec<f64> = y.tau.iter().zip(&x.tau).map(|(tb, t)| x.u * tb - y.u * t).collect();
            let m1 = DMatrix::from_fn(n, n, |r, c| v[r] * y.tau[c]);
            let mut slots = vec![&m1];
            slots.extend(std::iter::repeat_n(&a, k));
            coef * de / y.r * symfun::mixed_sigma(&slots)?
        };
        t.value += wq * (lhs_a - lhs_b - rhs);
        t.scale += wq * (lhs_a.abs() + lhs_b.abs() + rhs.abs());
    }
    Ok(t)
}

/// `int (u_bar P_{k+1}(a) - u P_k(a)) dmu_bar = 0` with `a = W W_bar^{-1}`,
/// where `u` belongs to `body` and `u_bar` to `other`. Swapping the bodies
/// gives the companion identity with `W_bar W^{-1}` and `dmu`.
pub fn relative_identity(body: &SupportBody, other: &SupportBody, k: usize) -> Result<ResidualReport> {
    same_grid(body, other)?;
    require_convex(&[body, other])?;
    let t = relative_core(body.grid(), Side::Body(body), Side::Body(other), k, None)?;
    Ok(ResidualReport::new(format!("relative[k={k}]"), body.grid(), &t))
}

/// [`relative_identity`] weighted by `eta(r_bar)`, with the gradient
/// correction on the right-hand side.
pub fn radial_identity(body: &SupportBody, other: &SupportBody, k: usize, eta: &dyn Func1) -> Result<ResidualReport> {
    same_grid(body, other)?;
    require_convex(&[body, other])?;
    let t = relative_core(body.grid(), Side::Body(body), Side::Body(other), k, Some(eta))?;
    Ok(ResidualReport::new(format!("radial[k={k}]"), body.grid(), &t))
}

/// Single-body radial identity:
/// `int eta(r) (u P_{k+1}(kappa) - P_k(kappa)) dmu
///    = (n-k-1)! k!/n! int eta'(r)/r tau^T T^k(h) tau dmu`.
pub fn radial_single(body: &SupportBody, k: usize, eta: &dyn Func1) -> Result<ResidualReport> {
    require_convex(&[body])?;
    let t = relative_core(body.grid(), Side::UnitSphere, Side::Body(body), k, Some(eta))?;
    Ok(ResidualReport::new(format!("radial_single[k={k}]"), body.grid(), &t))
}

/// Weighted Minkowski identity for a test function `phi` on the sphere:
/// `int T^k(h)(tau, grad_M phi) dmu - (n-k) C(n,k) int (u P_{k+1} - P_k)(kappa) phi dmu = 0`
/// with `grad_M phi = W^{-1} grad phi`.
pub fn weighted_minkowski_residual(body: &SupportBody, k: usize, phi: &[f64]) -> Result<ResidualReport> {
    require_convex(&[body])?;
    let n = body.dim();
    if k >= n {
        return Err(IntegralError::IndexOutOfRange(format!("k={k} needs k < n={n}")));
    }
    let g = body.grid();
    let dphi = g.derivatives(phi)?;
    let c = (n - k) as f64 * binomial(n, k);
    let mut t = Terms::default();
    for i in 0..body.len() {
        let h = inverse(&body.w_matrix(i));
        let tk = symfun::newton_tensor(&h, k)?;
        let gp = nalgebra::DVector::from_column_slice(dphi.grad_at(i));
        let tau = nalgebra::DVector::from_column_slice(body.grad_at(i));
        let first = tau.dot(&(&tk * (&h * gp)));
        let kappa: Vec<f64> = body.radii_at(i).iter().map(|r| 1.0 / r).collect();
        let p = symfun::elem_sym(&kappa);
        let det: f64 = body.radii_at(i).iter().product();
        let second = c * (body.support()[i] * p[k + 1] - p[k]) * phi[i];
        t.add(g.weights()[i] * det, first, second);
    }
    Ok(ResidualReport::new(format!("weighted_minkowski[k={k}]"), g, &t))
}

/// Configuration of the randomized identity battery.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BatterySpec {
    /// Grids from coarse to fine, each a refinement of the previous one.
    pub grids: Vec<GridSpec>,
    pub bodies: usize,
    pub seed: u64,
    /// Exponents `alpha` of the radial weights `eta(r) = r^alpha`.
    pub alphas: Vec<f64>,
    pub max_degree: usize,
    pub amplitude: f64,
}

impl BatterySpec {
    pub fn default_for(dim: usize) -> Self {
        let grids = if dim == 1 {
            vec![GridSpec::circle(64), GridSpec::circle(128), GridSpec::circle(256)]
        } else {
            vec![GridSpec::sphere(16, 32), GridSpec::sphere(32, 64), GridSpec::sphere(64, 128)]
        };
        Self { grids, bodies: 20, seed: 1, alphas: vec![-1.0, 0.0, 1.0, 2.0], max_degree: 4, amplitude: 0.15 }
    }
}

/// Every identity for one pair of bodies, in a fixed order.
pub fn all_identities(a: &SupportBody, b: &SupportBody, alphas: &[f64]) -> Result<Vec<ResidualReport>> {
    let n = a.dim();
    let mut out = Vec::new();
    for k in 0..n {
        out.push(minkowski_residual(a, k)?);
        out.push(relative_identity(a, b, k)?);
        let mut swapped = relative_identity(b, a, k)?;
        swapped.name = format!("relative_swapped[k={k}]");
        out.push(swapped);
        for &alpha in alphas {
            let eta = ScalarFn::power(alpha);
            let mut r = radial_identity(a, b, k, &eta)?;
            r.name = format!("radial[k={k},alpha={alpha}]");
            out.push(r);
            let mut r = radial_identity(b, a, k, &eta)?;
            r.name = format!("radial_swapped[k={k},alpha={alpha}]");
            out.push(r);
            let mut r = radial_single(a, k, &eta)?;
            r.name = format!("radial_single[k={k},alpha={alpha}]");
            out.push(r);
        }
        let r2: Vec<f64> = a.radial().iter().map(|r| r * r).collect();
        out.push(weighted_minkowski_residual(a, k, &r2)?);
    }
    for m in 0..n {
        for k in 0..=m {
            for which in MixedIdentity::ALL {
                out.push(mixed_identity_residual(a, b, k, m - k, which)?);
            }
        }
    }
    Ok(out)
}

/// Least-squares slope of `log e` against `-log h` over the levels whose
/// relative residual `e` is above [`ROUND_OFF_FLOOR`]. `spacing` holds the
/// grid spacings `h`. `None` with fewer than two usable levels.
pub fn observed_order(errors: &[f64], spacing: &[f64]) -> Option<f64> {
    let pts: Vec<(f64, f64)> = errors
        .iter()
        .zip(spacing)
        .filter(|(e, _)| **e >= ROUND_OFF_FLOOR)
        .map(|(e, h)| (-h.ln(), e.ln()))
        .collect();
    if pts.len() < 2 {
        return None;
    }
    let m = pts.len() as f64;
    let (sx, sy) = pts.iter().fold((0.0, 0.0), |(a, b), (x, y)| (a + x, b + y));
    let (mx, my) = (sx / m, sy / m);
    let sxy: f64 = pts.iter().map(|(x, y)| (x - mx) * (y - my)).sum();
    let sxx: f64 = pts.iter().map(|(x, _)| (x - mx) * (x - mx)).sum();
    Some(-sxy / sxx)
}

/// Runs [`all_identities`] on `bodies` random pairs at every grid and
/// returns the finest-grid reports, each tagged with the convergence order
/// fitted over all grids.
pub fn identity_battery(spec: &BatterySpec) -> Result<Vec<ResidualReport>> {
    let grids: Vec<Arc<SphereGrid>> =
        spec.grids.iter().map(|s| SphereGrid::new(s.clone()).map(Arc::new)).collect::<std::result::Result<_, _>>()?;
    let finest = grids.last().ok_or_else(|| IntegralError::IndexOutOfRange("no grids".into()))?;
    let n = finest.dim();
    let spacing: Vec<f64> = grids.iter().map(|g| (g.len() as f64).powf(-1.0 / n as f64)).collect();
    let mut out = Vec::new();
    for j in 0..spec.bodies {
        let sa = Shape::random(n, 1.0, spec.max_degree, spec.amplitude, false, spec.seed.wrapping_add(2 * j as u64))
            .clamped(finest)?;
        let sb = Shape::random(n, 1.3, spec.max_degree, spec.amplitude, false, spec.seed.wrapping_add(2 * j as u64 + 1))
            .clamped(finest)?;
        let levels: Vec<Vec<ResidualReport>> = grids
            .iter()
            .map(|g| all_identities(&sa.build(g)?, &sb.build(g)?, &spec.alphas))
            .collect::<Result<_>>()?;
        for (idx, rep) in levels[levels.len() - 1].iter().enumerate() {
            let mut r = rep.clone();
            r.name = format!("body{j}/{}", rep.name);
            let errors: Vec<f64> = levels.iter().map(|l| l[idx].relative()).collect();
            r.order = observed_order(&errors, &spacing);
            out.push(r);
        }
    }
    Ok(out)
}
