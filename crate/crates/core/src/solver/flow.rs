use serde::{Deserialize, Serialize};

use super::family::{admissible, residual, Linearization, ProblemSpec};
use super::{Result, SolveReport, SolverError};
use crate::body::SupportBody;
use crate::sphere::{ScalarField, SphereGrid};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct FlowOptions {
    pub steps: usize,
    pub dt: f64,
    /// Divide `u` by its `dV_n`-weighted mean radius after every step.
    pub normalize: bool,
    /// Stop early once `sup |du/dt| / u` drops below this.
    pub stationary_tol: f64,
    pub symmetric: bool,
}

impl Default for FlowOptions {
    fn default() -> Self {
        Self { steps: 1000, dt: 1e-3, normalize: true, stationary_tol: 0.0, symmetric: false }
    }
}

/// Largest wavenumber squared resolved by the grid, an upper bound for the
/// spectrum of the discrete Laplacian.
fn stiffness(grid: &SphereGrid) -> f64 {
    let res = &grid.spec().resolution;
    if grid.dim() == 1 {
        (res[0] as f64 / 2.0).powi(2)
    } else {
        let sin_min = (0..grid.len()).map(|i| grid.angles(i).0.sin()).fold(f64::INFINITY, f64::min);
        (res[1] as f64 / 2.0 / sin_min).powi(2) + (res[0] as f64).powi(2)
    }
}

/// Explicit-Euler stability limit of `du/dt = exp(R) u` at the current body.
fn step_limit(body: &SupportBody, spec: &ProblemSpec, r: &[f64]) -> Result<f64> {
    let lin = Linearization::at(body, spec)?;
    let n = spec.dim;
    let mut rate: f64 = 0.0;
    for i in 0..body.len() {
        // spectral radius of the second-order coefficient (symmetric, n <= 2)
        let c = lin.second_order_at(i);
        let cmax = if n == 1 {
            c[0].abs()
        } else {
            let m = 0.5 * (c[0] + c[3]);
            let d = (0.25 * (c[0] - c[3]).powi(2) + c[1] * c[1]).sqrt();
            m.abs() + d
        };
        rate = rate.max(r[i].exp() * body.support()[i] * cmax);
    }
    Ok(2.0 / (rate * stiffness(body.grid())))
}

/// Explicit-Euler stability limit of the flow at `body`.
pub fn stable_step(spec: &ProblemSpec, body: &SupportBody) -> Result<f64> {
    spec.validate()?;
    let r = residual(body, spec)?;
    step_limit(body, spec, &r)
}

fn mean_radius(body: &SupportBody) -> f64 {
    let dv: Vec<f64> = body.support().iter().zip(body.area_density().iter()).map(|(u, s)| u * s).collect();
    let rdv: Vec<f64> = dv.iter().zip(body.radial()).map(|(d, r)| d * r).collect();
    let g = body.grid();
    g.integrate(&rdv) / g.integrate(&dv)
}

/// Evolves `du/dt = exp(R) u`, the support-function form of the expanding
/// flow whose homothetic solutions solve the equation up to a constant.
/// With normalization the fixed points are exactly those solutions.
pub fn flow_run(spec: &ProblemSpec, init: &SupportBody, opts: &FlowOptions) -> Result<SolveReport> {
    spec.validate()?;
    admissible(init, spec).map_err(|e| SolverError::BadInit(e.to_string()))?;
    let grid = init.grid().clone();
    let mut u: ScalarField = if opts.symmetric { grid.even_part(init.support()) } else { init.support().clone() };
    let mut body = SupportBody::from_function(grid.clone(), u.clone())?;
    let mut r = residual(&body, spec)?;
    let limit = step_limit(&body, spec, &r)?;
    if opts.dt > limit {
        return Err(SolverError::Unstable { dt: opts.dt, limit });
    }
    let mut distance = f64::INFINITY;
    let mut history = Vec::new();
    let mut steps = 0;
    for step in 0..opts.steps {
        let speed: Vec<f64> = r.iter().map(|x| x.exp()).collect();
        let mut next: ScalarField = u.iter().zip(&speed).map(|(u, v)| u + opts.dt * v * u).collect();
        if opts.symmetric {
            next = grid.even_part(&next);
        }
        let trial = SupportBody::from_function(grid.clone(), next.clone())?;
        let scale = if opts.normalize { mean_radius(&trial) } else { 1.0 };
        if !scale.is_finite() || scale <= 0.0 {
            return Err(SolverError::BlowUp(step));
        }
        let next: ScalarField = next.iter().map(|v| v / scale).collect();
        distance = u.iter().zip(next.iter()).map(|(a, b)| ((b - a) / a).abs()).fold(0.0, f64::max) / opts.dt;
        body = SupportBody::from_function(grid.clone(), next.clone())?;
        r = residual(&body, spec).map_err(|_| SolverError::BlowUp(step))?;
        if distance > 0.5 / opts.dt || !distance.is_finite() {
            return Err(SolverError::BlowUp(step));
        }
        u = next;
        steps = step + 1;
        let mean = grid.integrate(&r) / grid.area();
        history.push(r.iter().map(|x| (x - mean).abs()).fold(0.0, f64::max));
        if distance < opts.stationary_tol {
            break;
        }
        if step % 64 == 63 {
            let limit = step_limit(&body, spec, &r)?;
            if opts.dt > limit {
                return Err(SolverError::Unstable { dt: opts.dt, limit });
            }
        }
    }
    let log_c = grid.integrate(&r) / grid.area();
    let residual = r.iter().map(|x| (x - log_c).abs()).fold(0.0, f64::max);
    let body = SupportBody::from_support(grid, u).unwrap_or(body);
    let roundness = body.roundness();
    Ok(SolveReport {
        converged: true,
        iterations: steps,
        residual,
        body,
        roundness,
        log_scale: Some(log_c),
        history,
        path: Vec::new(),
        fixed_point_distance: Some(distance),
    })
}
