//! Local Brunn-Minkowski spectral estimate
//! `k int f^2 dV_k <= int u^2 sigma_k^{ij} f_i f_j dsigma` for `int f dV_k = 0`,
//! with `dV_k = u sigma_k(W) dsigma`, its generalized eigenproblem, and the
//! moment inequalities obtained from the test functions `|X|^alpha <X, E_l>`.

use nalgebra::{DMatrix, DVector};
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::body::SupportBody;
use crate::sphere::{GridError, ScalarField};
use crate::symfun::{self, SymfunError};

/// A test field is accepted as mean-zero when `|int f dV| <= MEAN_TOL * ||f||`.
pub const MEAN_TOL: f64 = 1e-10;
/// Relative gap below which a field is reported as an equality case.
pub const EQUALITY_REL_TOL: f64 = 1e-7;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum SpectralError {
    #[error("order k={k} must lie in 1..={n}")]
    OrderOutOfRange { k: usize, n: usize },
    #[error("body has non-positive total measure {0}")]
    ZeroMeasure(f64),
    #[error("operation requires k = n")]
    NeedsTopOrder,
    #[error("alpha={0} < 0 is outside the hypothesis for k < n")]
    NegativeAlpha(f64),
    #[error("mass matrix is not positive definite")]
    Factorization,
    #[error(transparent)]
    Grid(#[from] GridError),
    #[error(transparent)]
    Symfun(#[from] SymfunError),
}

pub type Result<T> = std::result::Result<T, SpectralError>;

/// A body together with the order `k` of the measure `dV_k`.
#[derive(Debug, Clone)]
pub struct SpectralProblem<'a> {
    body: &'a SupportBody,
    k: usize,
    dv: ScalarField,
    total: f64,
}

impl<'a> SpectralProblem<'a> {
    pub fn new(body: &'a SupportBody, k: usize) -> Result<Self> {
        let n = body.dim();
        if k == 0 || k > n {
            return Err(SpectralError::OrderOutOfRange { k, n });
        }
        let sk = body.sigma(k);
        let dv: ScalarField = body.support().iter().zip(sk.iter()).map(|(u, s)| u * s).collect();
        let total = body.grid().integrate(&dv);
        if !(total > 0.0) {
            return Err(SpectralError::ZeroMeasure(total));
        }
        Ok(Self { body, k, dv, total })
    }

    /// The `k = n` problem.
    pub fn top(body: &'a SupportBody) -> Result<Self> {
        Self::new(body, body.dim())
    }

    pub fn body(&self) -> &SupportBody {
        self.body
    }

    pub fn k(&self) -> usize {
        self.k
    }

    /// Density of `dV_k` with respect to `dsigma`.
    pub fn density(&self) -> &ScalarField {
        &self.dv
    }

    pub fn total_measure(&self) -> f64 {
        self.total
    }

    /// `int f dV_k`.
    pub fn integrate(&self, f: &[f64]) -> f64 {
        let g: Vec<f64> = f.iter().zip(self.dv.iter()).map(|(a, b)| a * b).collect();
        self.body.grid().integrate(&g)
    }

    /// `u^2 dsigma_k/dW` at node `i`.
    fn weight_matrix(&self, i: usize) -> Result<DMatrix<f64>> {
        let u = self.body.support()[i];
        Ok(symfun::newton_tensor(&self.body.w_matrix(i), self.k - 1)? * (u * u))
    }
}

/// Value of `int u^2 sigma_k^{ij} f_i f_j - k int f^2 dV_k`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SpectralGap {
    pub gap: f64,
    pub scale: f64,
    /// The input was not mean-zero and its mean was removed first.
    pub projected: bool,
}

impl SpectralGap {
    pub fn relative(&self) -> f64 {
        if self.scale == 0.0 {
            0.0
        } else {
            self.gap / self.scale
        }
    }

    pub fn is_equality(&self) -> bool {
        self.relative().abs() < EQUALITY_REL_TOL
    }
}

/// Gap of the spectral estimate for a field `f`. Fields with nonzero
/// `dV_k`-mean are projected and flagged.
pub fn bm_gap(problem: &SpectralProblem, f: &[f64]) -> Result<SpectralGap> {
    let grid = problem.body.grid();
    let n = grid.dim();
    let norm = (grid.integrate(&f.iter().map(|x| x * x).collect::<Vec<_>>()) * problem.total).sqrt();
    let mean = problem.integrate(f);
    let projected = mean.abs() > MEAN_TOL * norm;
    let f: Vec<f64> = if projected {
        let m = mean / problem.total;
        f.iter().map(|x| x - m).collect()
    } else {
        f.to_vec()
    };
    let d = grid.derivatives(&f)?;
    let mut dirichlet = vec![0.0; f.len()];
    for (i, out) in dirichlet.iter_mut().enumerate() {
        let a = problem.weight_matrix(i)?;
        let g = DVector::from_column_slice(&d.grad_at(i)[..n]);
        *out = g.dot(&(&a * &g));
    }
    let lhs = grid.integrate(&dirichlet);
    let rhs = problem.k as f64 * problem.integrate(&f.iter().map(|x| x * x).collect::<Vec<_>>());
    Ok(SpectralGap { gap: lhs - rhs, scale: lhs.abs() + rhs.abs(), projected })
}

/// Generalized eigenpair of the Dirichlet form against `k` times the
/// `dV_k` mass form on mean-zero fields.
#[derive(Debug, Clone)]
pub struct Eigenpair {
    pub value: f64,
    pub field: ScalarField,
}

/// Default harmonic degree of the trial space on a grid.
pub fn default_degree(body: &SupportBody) -> usize {
    let res = &body.grid().spec().resolution;
    if body.dim() == 1 {
        (res[0] / 4).clamp(2, 24)
    } else {
        (res[0] / 2 - 1).clamp(2, 12)
    }
}

/// Smallest `count` eigenpairs by Rayleigh-Ritz on harmonics of degree at
/// most `degree`, with the constant direction removed by the mean-zero
/// constraint.
pub fn bm_eigenpairs(problem: &SpectralProblem, count: usize, degree: Option<usize>) -> Result<Vec<Eigenpair>> {
    let body = problem.body;
    let grid = body.grid();
    let n = grid.dim();
    let len = grid.len();
    let basis = grid.harmonic_basis(degree.unwrap_or_else(|| default_degree(body)));
    let m = basis.len();
    let phi = DMatrix::from_fn(len, m, |i, j| basis[j].2[i]);
    let mut grad = DMatrix::zeros(len * n, m);
    for (j, (_, _, f)) in basis.iter().enumerate() {
        let d = grid.derivatives(f)?;
        for i in 0..len {
            for a in 0..n {
                grad[(i * n + a, j)] = d.grad_at(i)[a];
            }
        }
    }
    let w = grid.weights();
    let mut weighted = grad.clone();
    for i in 0..len {
        let a = problem.weight_matrix(i)? * w[i];
        let rows = grad.rows(i * n, n).into_owned();
        weighted.rows_mut(i * n, n).copy_from(&(a * rows));
    }
    let dir = grad.transpose() * weighted;
    let mass_w = DVector::from_fn(len, |i, _| problem.k as f64 * w[i] * problem.dv[i]);
    let mut scaled = phi.clone();
    for i in 0..len {
        scaled.row_mut(i).scale_mut(mass_w[i]);
    }
    let mass = phi.transpose() * &scaled;
    let c = phi.transpose() * DVector::from_fn(len, |i, _| w[i] * problem.dv[i]);

    // fields phi_j - (c_j / c_0) phi_0 span the mean-zero trial space
    let mut p = DMatrix::zeros(m, m - 1);
    for j in 1..m {
        p[(j, j - 1)] = 1.0;
        p[(0, j - 1)] = -c[j] / c[0];
    }
    let dr = p.transpose() * &dir * &p;
    let mr = p.transpose() * &mass * &p;
    let chol = mr.cholesky().ok_or(SpectralError::Factorization)?;
    let l = chol.l();
    let linv = l.clone().try_inverse().ok_or(SpectralError::Factorization)?;
    let mut sym = &linv * dr * linv.transpose();
    sym = (&sym + sym.transpose()) * 0.5;
    let eig = sym.symmetric_eigen();
    let mut order: Vec<usize> = (0..eig.eigenvalues.len()).collect();
    order.sort_by(|&a, &b| eig.eigenvalues[a].total_cmp(&eig.eigenvalues[b]));
    let to_coeffs = &p * linv.transpose();
    Ok(order
        .into_iter()
        .take(count)
        .map(|j| {
            let coeffs = &to_coeffs * eig.eigenvectors.column(j);
            let field = (&phi * coeffs).iter().copied().collect();
            Eigenpair { value: eig.eigenvalues[j], field }
        })
        .collect())
}

/// Smallest `count` generalized eigenvalues (see [`bm_eigenpairs`]).
pub fn bm_eigenvalues(problem: &SpectralProblem, count: usize) -> Result<Vec<f64>> {
    Ok(bm_eigenpairs(problem, count, None)?.into_iter().map(|e| e.value).collect())
}

/// Number of leading values within `rel_tol` of the first.
pub fn multiplicity(values: &[f64], rel_tol: f64) -> usize {
    values.first().map_or(0, |&v0| values.iter().take_while(|v| (*v - v0).abs() <= rel_tol * v0.abs()).count())
}

/// `|X|^alpha <X, E_l> - mean` for the coordinate basis, each with zero
/// `dV_k`-mean.
pub fn radial_test_functions(problem: &SpectralProblem, alpha: f64) -> Vec<ScalarField> {
    let body = problem.body;
    let n = body.dim();
    (0..=n)
        .map(|l| {
            let raw: Vec<f64> = (0..body.len()).map(|i| body.radial()[i].powf(alpha) * body.position(i)[l]).collect();
            let mean = problem.integrate(&raw) / problem.total;
            raw.into_iter().map(|v| v - mean).collect()
        })
        .collect()
}

/// Moment inequality gap `RHS - LHS`, with scale the sum of absolute values
/// of the terms.
///
/// For `k = n`:
/// `n int |X|^{2a+2} dV_n <= n |int |X|^a X dV_n|^2 / int dV_n
///     + int |X|^{2a} u sigma_1 dV_n + (a^2 + 2a) int |X|^{2a-1} u <grad u, grad |X|> dV_n`.
///
/// For `k < n` and `a >= 0`:
/// `k int |X|^{2a+2} dV_k <= k |int |X|^a X dV_k|^2 / int dV_k
///     + int u (|X|^{2a} + (a^2 + 2a) |X|^{2a-2} |grad u|^2) (sigma_1 - (k+1) sigma_{k+1}/sigma_k) dV_k`.
pub fn radial_weight_gap(problem: &SpectralProblem, alpha: f64) -> Result<symfun::Gap> {
    let body = problem.body;
    let n = body.dim();
    let k = problem.k;
    if k < n && alpha < 0.0 {
        return Err(SpectralError::NegativeAlpha(alpha));
    }
    let kf = k as f64;
    let c = alpha * alpha + 2.0 * alpha;
    let mut moment = vec![0.0; n + 1];
    let (mut lhs, mut t1, mut t2) = (vec![0.0; body.len()], vec![0.0; body.len()], vec![0.0; body.len()]);
    for i in 0..body.len() {
        let r = body.radial()[i];
        let u = body.support()[i];
        let tau = body.grad_at(i);
        let s = symfun::elem_sym_raw(body.radii_at(i));
        let dv = problem.dv[i];
        let wq = body.grid().weights()[i] * dv;
        for (m, x) in moment.iter_mut().zip(body.position(i)) {
            *m += wq * r.powf(alpha) * x;
        }
        lhs[i] = kf * r.powf(2.0 * alpha + 2.0) * dv;
        if k == n {
            // r <grad u, grad r> = tau^T W tau
            let w = body.w_matrix(i);
            let tv = DVector::from_column_slice(tau);
            let twt = tv.dot(&(&w * &tv));
            t1[i] = r.powf(2.0 * alpha) * u * s[1] * dv;
            t2[i] = c * r.powf(2.0 * alpha - 2.0) * u * twt * dv;
        } else {
            let g2: f64 = tau.iter().map(|x| x * x).sum();
            let q = s[1] - (kf + 1.0) * s[k + 1] / s[k];
            t1[i] = r.powf(2.0 * alpha) * u * q * dv;
            t2[i] = c * r.powf(2.0 * alpha - 2.0) * g2 * u * q * dv;
        }
    }
    let grid = body.grid();
    let lhs = grid.integrate(&lhs);
    let m2: f64 = moment.iter().map(|x| x * x).sum();
    let terms = [kf * m2 / problem.total, grid.integrate(&t1), grid.integrate(&t2)];
    let rhs: f64 = terms.iter().sum();
    Ok(symfun::Gap { gap: rhs - lhs, scale: lhs.abs() + terms.iter().map(|t| t.abs()).sum::<f64>() })
}

/// `sum_l bm_gap(f_l)` over the test functions. For `k = n` this equals
/// [`radial_weight_gap`] up to discretization; for `k < n` it is smaller by the
/// slack of the pointwise bound used there.
pub fn assembled_gap(problem: &SpectralProblem, alpha: f64) -> Result<symfun::Gap> {
    let mut gap = 0.0;
    let mut scale = 0.0;
    for f in radial_test_functions(problem, alpha) {
        let g = bm_gap(problem, &f)?;
        gap += g.gap;
        scale += g.scale;
    }
    Ok(symfun::Gap { gap, scale })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::body::Shape;
    use crate::sphere::{make_grid, GridSpec, LatitudeScheme, SphereGrid};
    use std::sync::Arc;

    fn random_body(dim: usize, res: &[usize], seed: u64, even: bool) -> SupportBody {
        let g = make_grid(dim, res).unwrap();
        Shape::random(dim, 1.0, 4, 0.15, even, seed).build(&g).unwrap()
    }

    #[test]
    fn order_is_checked() {
        let b = random_body(2, &[8, 16], 1, false);
        assert!(matches!(SpectralProblem::new(&b, 0), Err(SpectralError::OrderOutOfRange { .. })));
        assert!(matches!(SpectralProblem::new(&b, 3), Err(SpectralError::OrderOutOfRange { .. })));
        let p = SpectralProblem::new(&b, 1).unwrap();
        assert_eq!(radial_weight_gap(&p, -1.0), Err(SpectralError::NegativeAlpha(-1.0)));
    }

    #[test]
    fn coordinate_functions_are_equality_cases_on_sphere() {
        let g = make_grid(2, &[32, 64]).unwrap();
        let b = Shape::unit_sphere().build(&g).unwrap();
        let p = SpectralProblem::top(&b).unwrap();
        let f = g.sample(|z| z[0] - 0.5 * z[2]);
        let gap = bm_gap(&p, &f).unwrap();
        assert!(!gap.projected);
        assert!(gap.relative().abs() < 1e-7, "{gap:?}");
    }

    #[test]
    fn degree_two_gap_on_sphere() {
        let g = make_grid(2, &[32, 64]).unwrap();
        let b = Shape::unit_sphere().build(&g).unwrap();
        let p = SpectralProblem::top(&b).unwrap();
        let f = g.harmonic(2, 1);
        let l2 = g.integrate(&f.iter().map(|x| x * x).collect::<Vec<_>>());
        let gap = bm_gap(&p, &f).unwrap();
        assert!((gap.gap - 4.0 * l2).abs() < 0.01 * 4.0 * l2, "{}", gap.gap);
    }

    #[test]
    fn mean_is_projected_and_flagged() {
        let b = random_body(1, &[64], 2, false);
        let p = SpectralProblem::top(&b).unwrap();
        let f = b.grid().constant(1.0);
        let gap = bm_gap(&p, &f).unwrap();
        assert!(gap.projected);
        assert!(gap.gap.abs() < 1e-12);
    }

    #[test]
    fn equality_functions_for_any_body() {
        for dim in [1, 2] {
            let g = Arc::new(
                SphereGrid::new(if dim == 1 {
                    GridSpec::circle(128)
                } else {
                    GridSpec::sphere(32, 64).with_scheme(LatitudeScheme::Uniform)
                })
                .unwrap(),
            );
            let b = Shape::random(dim, 1.0, 4, 0.15, false, 9).build(&g).unwrap();
            let p = SpectralProblem::top(&b).unwrap();
            let f: ScalarField = (0..b.len()).map(|i| g.point(i)[0] / b.support()[i]).collect();
            let gap = bm_gap(&p, &f).unwrap();
            assert!(gap.is_equality(), "dim {dim}: {gap:?}");
        }
    }

    #[test]
    fn circle_spectrum_is_wirtinger() {
        let b = Shape::unit_sphere().build(&make_grid(1, &[64]).unwrap()).unwrap();
        let v = bm_eigenvalues(&SpectralProblem::top(&b).unwrap(), 4).unwrap();
        for (x, e) in v.iter().zip([1.0, 1.0, 4.0, 4.0]) {
            assert!((x - e).abs() < 1e-10, "{v:?}");
        }
    }

    #[test]
    fn sphere_spectrum() {
        let b = Shape::unit_sphere().build(&make_grid(2, &[16, 32]).unwrap()).unwrap();
        let v = bm_eigenvalues(&SpectralProblem::top(&b).unwrap(), 8).unwrap();
        assert_eq!(multiplicity(&v, 0.01), 3);
        assert!((v[0] - 1.0).abs() < 1e-4);
        assert!((v[3] - 3.0).abs() < 1e-3, "{v:?}");
    }

    #[test]
    fn ellipse_has_unit_eigenvalue() {
        let g = make_grid(1, &[128]).unwrap();
        let b = Shape::Ellipsoid { axes: vec![1.2, 1.0] }.build(&g).unwrap();
        let pairs = bm_eigenpairs(&SpectralProblem::top(&b).unwrap(), 3, None).unwrap();
        assert!((pairs[0].value - 1.0).abs() < 1e-6);
        assert!((pairs[1].value - 1.0).abs() < 1e-6);
        assert!(pairs[2].value > 1.5);
    }

    #[test]
    fn test_functions_have_zero_mean() {
        let b = random_body(2, &[16, 32], 3, false);
        let p = SpectralProblem::new(&b, 1).unwrap();
        for f in radial_test_functions(&p, 1.0) {
            assert!(p.integrate(&f).abs() < 1e-12);
        }
        let sym = random_body(2, &[16, 32], 3, true);
        let p = SpectralProblem::top(&sym).unwrap();
        for l in 0..3 {
            let raw: Vec<f64> = (0..sym.len()).map(|i| sym.radial()[i].powf(0.5) * sym.position(i)[l]).collect();
            assert!(p.integrate(&raw).abs() < 1e-12);
        }
    }

    #[test]
    fn centered_sphere_weighted_gap_is_tight() {
        let g = make_grid(2, &[16, 32]).unwrap();
        let b = Shape::Sphere { radius: 1.4, center: vec![] }.build(&g).unwrap();
        for k in [1, 2] {
            let p = SpectralProblem::new(&b, k).unwrap();
            for a in [0.0, 0.5, 2.0] {
                assert!(radial_weight_gap(&p, a).unwrap().relative().abs() < 1e-12);
            }
        }
    }

    #[test]
    fn weighted_gap_matches_assembled_gap() {
        let g = Arc::new(SphereGrid::new(GridSpec::sphere(32, 64).with_scheme(LatitudeScheme::Uniform)).unwrap());
        let b = Shape::random(2, 1.0, 4, 0.15, false, 5).build(&g).unwrap();
        let p = SpectralProblem::top(&b).unwrap();
        for a in [-1.0, 0.0, 0.5, 2.0] {
            let x = radial_weight_gap(&p, a).unwrap();
            let y = assembled_gap(&p, a).unwrap();
            assert!((x.gap - y.gap).abs() < 1e-8 * x.scale, "{a}: {x:?} {y:?}");
            assert!(x.gap >= -1e-8 * x.scale);
        }
    }

    #[test]
    fn lower_order_weighted_gap_dominates_assembled_gap() {
        let b = random_body(2, &[32, 64], 6, false);
        let p = SpectralProblem::new(&b, 1).unwrap();
        for a in [0.0, 0.5, 1.0] {
            let x = radial_weight_gap(&p, a).unwrap();
            let y = assembled_gap(&p, a).unwrap();
            assert!(y.gap >= -1e-8 * y.scale);
            assert!(x.gap >= y.gap - 1e-6 * x.scale, "{a}: {x:?} {y:?}");
        }
    }
}
