//! Curvature equations on the sphere in log form and their linearizations.

use nalgebra::DMatrix;
use serde::{Deserialize, Serialize};

use super::{Result, SolverError};
use crate::body::SupportBody;
use crate::functions::{BivariateFn, Func1, Func2, ScalarFn};
use crate::sphere::{ScalarField, SphereGrid};
use crate::symfun::{self, binomial};

/// Equation family. Every family reads `LHS(u) = f` with
/// `R = log LHS - log f`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "family", rename_all = "snake_case")]
pub enum Family {
    /// `phi(u) P_k(W) = f`
    OrliczCm { k: usize, phi: ScalarFn },
    /// `(P_k(W) / P_l(W))^{1/(k-l)} / psi(u, r) = f`
    QuotientIsotropic { k: usize, l: usize, psi: BivariateFn },
    /// `u^{1-p} r^{q-n-1} det W = f`
    LpDual { p: f64, q: f64 },
    /// `u^{1-p} exp(-r^2/2) det W = f`
    LpGauss { p: f64 },
    /// `u^{1-p} r^{q-k-1} sigma_k(W) = f`
    LpDualCm { k: usize, p: f64, q: f64 },
}

impl Family {
    pub fn label(&self) -> &'static str {
        match self {
            Family::OrliczCm { .. } => "orlicz_cm",
            Family::QuotientIsotropic { .. } => "quotient_isotropic",
            Family::LpDual { .. } => "lp_dual",
            Family::LpGauss { .. } => "lp_gauss",
            Family::LpDualCm { .. } => "lp_dual_cm",
        }
    }

    /// `(p, q)` where the family has them.
    pub fn pq(&self) -> Option<(f64, f64)> {
        match *self {
            Family::LpDual { p, q } | Family::LpDualCm { p, q, .. } => Some((p, q)),
            Family::LpGauss { p } => Some((p, f64::NAN)),
            _ => None,
        }
    }

    /// Same family with new exponents; families without them are unchanged.
    pub fn with_pq(&self, p: f64, q: f64) -> Family {
        match self.clone() {
            Family::LpDual { .. } => Family::LpDual { p, q },
            Family::LpDualCm { k, .. } => Family::LpDualCm { k, p, q },
            Family::LpGauss { .. } => Family::LpGauss { p },
            other => other,
        }
    }
}

/// Right-hand side data `f > 0`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum Data {
    Constant(f64),
    Field(ScalarField),
}

impl Default for Data {
    fn default() -> Self {
        Data::Constant(1.0)
    }
}

impl Data {
    fn log_at(&self, i: usize) -> f64 {
        match self {
            Data::Constant(c) => c.ln(),
            Data::Field(f) => f[i].ln(),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ProblemSpec {
    pub dim: usize,
    #[serde(flatten)]
    pub family: Family,
    #[serde(default)]
    pub data: Data,
}

impl ProblemSpec {
    pub fn new(dim: usize, family: Family) -> Self {
        Self { dim, family, data: Data::default() }
    }

    pub fn with_data(mut self, data: Data) -> Self {
        self.data = data;
        self
    }

    /// Order of the curvature function (`n` for determinant families).
    pub fn order(&self) -> usize {
        match self.family {
            Family::OrliczCm { k, .. } | Family::QuotientIsotropic { k, .. } | Family::LpDualCm { k, .. } => k,
            Family::LpDual { .. } | Family::LpGauss { .. } => self.dim,
        }
    }

    /// Solutions must have `W` in this cone: strict convexity for the
    /// determinant families, `Gamma_k` otherwise.
    fn cone(&self) -> usize {
        match self.family {
            Family::OrliczCm { k, .. } => k,
            _ => self.dim,
        }
    }

    pub fn validate(&self) -> Result<()> {
        let n = self.dim;
        if !(1..=2).contains(&n) {
            return Err(SolverError::InvalidSpec(format!("dimension {n} not supported")));
        }
        let bad = |m: String| Err(SolverError::InvalidSpec(m));
        match &self.family {
            Family::OrliczCm { k, .. } | Family::LpDualCm { k, .. } if *k == 0 || *k > n => {
                return bad(format!("k={k} must lie in 1..={n}"));
            }
            Family::QuotientIsotropic { k, l, .. } if !(l < k && *k <= n) => {
                return bad(format!("need 0 <= l < k <= n, got k={k}, l={l}"));
            }
            _ => {}
        }
        let positive = match &self.data {
            Data::Constant(c) => *c > 0.0 && c.is_finite(),
            Data::Field(f) => f.iter().all(|v| *v > 0.0 && v.is_finite()),
        };
        if !positive {
            return bad("data f must be positive and finite".into());
        }
        Ok(())
    }

    /// Homogeneity degree `d` with `R(lambda u) = R(u) + d log lambda`.
    pub fn scale_degree(&self) -> Option<f64> {
        match &self.family {
            Family::LpDual { p, q } | Family::LpDualCm { p, q, .. } => Some(q - p),
            Family::OrliczCm { k, phi: ScalarFn::Power { exponent, .. } } => Some(*k as f64 + exponent),
            Family::OrliczCm { k, phi: ScalarFn::Constant { .. } } => Some(*k as f64),
            Family::QuotientIsotropic { psi: BivariateFn::Constant { .. }, .. } => Some(1.0),
            _ => None,
        }
    }

    /// Constant data for which the unit sphere solves the equation.
    pub fn unit_sphere_data(&self) -> f64 {
        let n = self.dim;
        match &self.family {
            Family::OrliczCm { phi, .. } => phi.value(1.0),
            Family::QuotientIsotropic { psi, .. } => 1.0 / psi.value(1.0, 1.0),
            Family::LpDual { .. } => 1.0,
            Family::LpGauss { .. } => (-0.5f64).exp(),
            Family::LpDualCm { k, .. } => binomial(n, *k),
        }
    }

    pub fn normalized_for_unit_sphere(self) -> Self {
        let c = self.unit_sphere_data();
        self.with_data(Data::Constant(c))
    }
}

fn log_sigma(radii: &[f64], k: usize) -> f64 {
    symfun::elem_sym_raw(radii)[k].ln()
}

/// Checks that the candidate is admissible for the equation.
pub(crate) fn admissible(body: &SupportBody, spec: &ProblemSpec) -> Result<()> {
    let cone = spec.cone();
    if let Some(node) = body.support().iter().position(|&u| !(u > 0.0)) {
        return Err(SolverError::NonPositive(node));
    }
    let tol = crate::body::CONVEXITY_TOL * body.mean_support();
    for i in 0..body.len() {
        let radii = body.radii_at(i);
        let ok = if cone == spec.dim {
            radii[0] > tol
        } else {
            symfun::in_gamma_k(radii, cone)
        };
        if !ok {
            return Err(SolverError::LeftCone(i));
        }
    }
    Ok(())
}

/// Log-form residual `log LHS - log f` at every node.
pub fn residual(body: &SupportBody, spec: &ProblemSpec) -> Result<ScalarField> {
    admissible(body, spec)?;
    let n = spec.dim;
    let mut out = Vec::with_capacity(body.len());
    for i in 0..body.len() {
        let u = body.support()[i];
        let r = body.radial()[i];
        let radii = body.radii_at(i);
        let lhs = match &spec.family {
            Family::OrliczCm { k, phi } => phi.value(u).ln() + log_sigma(radii, *k) - binomial(n, *k).ln(),
            Family::QuotientIsotropic { k, l, psi } => {
                let pk = log_sigma(radii, *k) - binomial(n, *k).ln();
                let pl = log_sigma(radii, *l) - binomial(n, *l).ln();
                (pk - pl) / (k - l) as f64 - psi.value(u, r).ln()
            }
            Family::LpDual { p, q } => (1.0 - p) * u.ln() + (q - n as f64 - 1.0) * r.ln() + log_sigma(radii, n),
            Family::LpGauss { p } => (1.0 - p) * u.ln() - 0.5 * r * r + log_sigma(radii, n),
            Family::LpDualCm { k, p, q } => {
                (1.0 - p) * u.ln() + (q - *k as f64 - 1.0) * r.ln() + log_sigma(radii, *k)
            }
        };
        if !lhs.is_finite() {
            return Err(SolverError::NonFiniteResidual(i));
        }
        out.push(lhs - spec.data.log_at(i));
    }
    Ok(out.into())
}

/// Node coefficients of the linearized residual
/// `L dv = a dv + b . grad dv + tr(C Hess dv)`.
#[derive(Debug, Clone)]
pub struct Linearization {
    dim: usize,
    a: Vec<f64>,
    b: Vec<f64>,
    c: Vec<f64>,
}

impl Linearization {
    pub fn at(body: &SupportBody, spec: &ProblemSpec) -> Result<Self> {
        admissible(body, spec)?;
        let n = spec.dim;
        let len = body.len();
        let mut lin = Self { dim: n, a: vec![0.0; len], b: vec![0.0; len * n], c: vec![0.0; len * n * n] };
        for i in 0..len {
            let u = body.support()[i];
            let r = body.radial()[i];
            let g = body.grad_at(i);
            let w = body.w_matrix(i);
            let radii = body.radii_at(i);
            // d log sigma_m(W) = tr(T^{m-1} dW) / sigma_m with dW = Hess dv + dv I
            let mut log_sigma_term = |m: usize, weight: f64| -> Result<()> {
                if m == 0 {
                    return Ok(());
                }
                let t = symfun::newton_tensor(&w, m - 1)? * (weight / symfun::elem_sym_raw(radii)[m]);
                lin.add_second_order(i, &t);
                Ok(())
            };
            // coefficient of dr / r^2 = (u dv + grad u . grad dv) / r^2 is split below
            let mut radial = 0.0;
            let mut support = 0.0;
            match &spec.family {
                Family::OrliczCm { k, phi } => {
                    log_sigma_term(*k, 1.0)?;
                    support += phi.log_derivative(u);
                }
                Family::QuotientIsotropic { k, l, psi } => {
                    let inv = 1.0 / (k - l) as f64;
                    log_sigma_term(*k, inv)?;
                    log_sigma_term(*l, -inv)?;
                    let v = psi.value(u, r);
                    support -= psi.d1(u, r) / v;
                    // d r = (u dv + grad u . grad dv) / r
                    radial -= psi.d2(u, r) / v * r;
                }
                Family::LpDual { p, q } => {
                    log_sigma_term(n, 1.0)?;
                    support += (1.0 - p) / u;
                    radial += q - n as f64 - 1.0;
                }
                Family::LpGauss { p } => {
                    log_sigma_term(n, 1.0)?;
                    support += (1.0 - p) / u;
                    radial -= r * r;
                }
                Family::LpDualCm { k, p, q } => {
                    log_sigma_term(*k, 1.0)?;
                    support += (1.0 - p) / u;
                    radial += q - *k as f64 - 1.0;
                }
            }
            let rr = radial / (r * r);
            lin.a[i] += support + rr * u;
            for (bj, gj) in lin.b[i * n..(i + 1) * n].iter_mut().zip(g) {
                *bj += rr * gj;
            }
        }
        Ok(lin)
    }

    /// Row-major coefficient of the Hessian term at node `i`.
    pub fn second_order_at(&self, i: usize) -> &[f64] {
        let s = self.dim * self.dim;
        &self.c[i * s..(i + 1) * s]
    }

    fn add_second_order(&mut self, i: usize, t: &DMatrix<f64>) {
        let n = self.dim;
        for a in 0..n {
            for b in 0..n {
                self.c[i * n * n + a * n + b] += t[(a, b)];
            }
            self.a[i] += t[(a, a)];
        }
    }

    /// Applies the linearization to a field.
    pub fn apply(&self, grid: &SphereGrid, dv: &[f64]) -> Result<ScalarField> {
        let d = grid.derivatives(dv)?;
        let n = self.dim;
        Ok((0..grid.len())
            .map(|i| {
                let g = d.grad_at(i);
                let h = d.hess_at(i);
                let mut s = self.a[i] * dv[i];
                s += self.b[i * n..(i + 1) * n].iter().zip(g).map(|(x, y)| x * y).sum::<f64>();
                s += self.c[i * n * n..(i + 1) * n * n].iter().zip(h).map(|(x, y)| x * y).sum::<f64>();
                s
            })
            .collect())
    }

    /// Dense matrix of the discrete linearization, one column per node.
    pub fn matrix(&self, grid: &SphereGrid) -> Result<DMatrix<f64>> {
        let len = grid.len();
        let mut m = DMatrix::zeros(len, len);
        let mut e = vec![0.0; len];
        for j in 0..len {
            e[j] = 1.0;
            let col = self.apply(grid, &e)?;
            m.column_mut(j).copy_from_slice(&col);
            e[j] = 0.0;
        }
        Ok(m)
    }
}
