use nalgebra::{DMatrix, DVector};
use serde::{Deserialize, Serialize};

use super::family::{admissible, residual, Linearization, ProblemSpec};
use super::{Result, SolveReport, SolverError};
use crate::body::SupportBody;
use crate::sphere::ScalarField;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct NewtonOptions {
    /// Stop when `sup |R - log c| <= tol`.
    pub tol: f64,
    pub max_iter: usize,
    /// Smallest damping factor tried by the line search.
    pub min_step: f64,
    /// Solve for a scale unknown `log c` with `int u dsigma` fixed. `None`
    /// enables it when the equation is scale invariant.
    pub free_scale: Option<bool>,
    /// Keep iterates even, `u(z) = u(-z)`.
    pub symmetric: bool,
    /// Relative singular-value cutoff of the fallback least-squares step.
    pub svd_cutoff: f64,
}

impl Default for NewtonOptions {
    fn default() -> Self {
        Self { tol: 1e-10, max_iter: 40, min_step: 2f64.powi(-20), free_scale: None, symmetric: false, svd_cutoff: 1e-9 }
    }
}

fn sup(v: &[f64]) -> f64 {
    v.iter().fold(0.0, |m, x| m.max(x.abs()))
}

fn lu_step(j: &DMatrix<f64>, rhs: &DVector<f64>) -> Option<DVector<f64>> {
    let x = j.clone().lu().solve(rhs)?;
    let bound = 1e3 * sup(rhs.as_slice()).max(f64::MIN_POSITIVE);
    (x.iter().all(|v| v.is_finite()) && sup(x.as_slice()) <= bound).then_some(x)
}

fn svd_step(j: &DMatrix<f64>, rhs: &DVector<f64>, cutoff: f64) -> Option<DVector<f64>> {
    let svd = j.clone().svd(true, true);
    let smax = svd.singular_values.max();
    svd.solve(rhs, cutoff * smax).ok()
}

enum Reject {
    Cone,
    NoDecrease,
}

/// Damped Newton iteration on the log-form residual.
pub fn newton_solve(spec: &ProblemSpec, init: &SupportBody, opts: &NewtonOptions) -> Result<SolveReport> {
    spec.validate()?;
    if init.dim() != spec.dim {
        return Err(SolverError::InvalidSpec(format!("body dimension {} != {}", init.dim(), spec.dim)));
    }
    admissible(init, spec).map_err(|e| SolverError::BadInit(e.to_string()))?;
    let grid = init.grid().clone();
    let len = grid.len();
    let free = opts.free_scale.unwrap_or_else(|| spec.scale_degree().is_some_and(|d| d.abs() < 1e-14));
    let w = grid.weights().to_vec();

    let mut u: ScalarField = if opts.symmetric { grid.even_part(init.support()) } else { init.support().clone() };
    let mut body = SupportBody::from_function(grid.clone(), u.clone())?;
    let mut r = residual(&body, spec)?;
    let mut s = if free { grid.integrate(&r) / grid.area() } else { 0.0 };
    let shifted = |r: &ScalarField, s: f64| -> Vec<f64> { r.iter().map(|x| x - s).collect() };
    let mut res = sup(&shifted(&r, s));
    let mut history = vec![res];
    let mut iterations = 0;

    while res > opts.tol && iterations < opts.max_iter {
        iterations += 1;
        let lin = Linearization::at(&body, spec)?;
        let jac = lin.matrix(&grid)?;
        let (jac, rhs) = if free {
            let mut m = DMatrix::zeros(len + 1, len + 1);
            m.view_mut((0, 0), (len, len)).copy_from(&jac);
            for i in 0..len {
                m[(i, len)] = -1.0;
                m[(len, i)] = w[i];
            }
            let mut b = DVector::zeros(len + 1);
            for i in 0..len {
                b[i] = s - r[i];
            }
            (m, b)
        } else {
            (jac, DVector::from_iterator(len, r.iter().map(|x| -x)))
        };

        let mut accepted: Option<(ScalarField, SupportBody, ScalarField, f64, f64)> = None;
        let mut last_reject = Reject::NoDecrease;
        let candidates: [Box<dyn Fn() -> Option<DVector<f64>>>; 2] =
            [Box::new(|| lu_step(&jac, &rhs)), Box::new(|| svd_step(&jac, &rhs, opts.svd_cutoff))];
        for make in candidates.iter() {
            let Some(step) = make() else { continue };
            let mut du: Vec<f64> = step.as_slice()[..len].to_vec();
            if opts.symmetric {
                du = grid.even_part(&du).0;
            }
            let ds = if free { step[len] } else { 0.0 };
            let mut t = 1.0;
            while t >= opts.min_step {
                let cand: ScalarField = u.iter().zip(&du).map(|(a, b)| a + t * b).collect();
                let trial = SupportBody::from_function(grid.clone(), cand.clone())?;
                match residual(&trial, spec) {
                    Ok(rn) => {
                        let sn = s + t * ds;
                        let resn = sup(&shifted(&rn, sn));
                        if resn <= (1.0 - 1e-4 * t) * res {
                            if accepted.as_ref().is_none_or(|a| resn < a.4) {
                                accepted = Some((cand, trial, rn, sn, resn));
                            }
                            break;
                        }
                        last_reject = Reject::NoDecrease;
                    }
                    Err(_) => last_reject = Reject::Cone,
                }
                t *= 0.5;
            }
            // a short damped step usually means the Jacobian is near singular,
            // where the truncated least-squares step does better
            if t >= 0.25 {
                break;
            }
        }
        match accepted {
            Some((cand, trial, rn, sn, resn)) => {
                u = cand;
                body = trial;
                r = rn;
                s = sn;
                res = resn;
                history.push(res);
            }
            None => {
                return Err(match last_reject {
                    Reject::Cone => SolverError::LeftConvexCone,
                    Reject::NoDecrease => SolverError::LineSearchFailed(res),
                });
            }
        }
    }
    let body = SupportBody::from_support(grid, u).unwrap_or(body);
    let roundness = body.roundness();
    Ok(SolveReport {
        converged: res <= opts.tol,
        iterations,
        residual: res,
        body,
        roundness,
        log_scale: free.then_some(s),
        history,
        path: Vec::new(),
        fixed_point_distance: None,
    })
}
