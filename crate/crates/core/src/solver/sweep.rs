use std::sync::Arc;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use super::family::ProblemSpec;
use super::newton::{newton_solve, NewtonOptions};
use super::{SolveRecord, SolveReport};
use crate::body::{Shape, SupportBody};
use crate::sphere::{GridSpec, SphereGrid};

/// Solves at every `(p, q)` point from several random perturbed spheres.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SweepSpec {
    pub problem: ProblemSpec,
    pub points: Vec<(f64, f64)>,
    pub inits_per_point: usize,
    pub seed: u64,
    pub grid: GridSpec,
    #[serde(default = "default_amplitude")]
    pub amplitude: f64,
    #[serde(default = "default_degree")]
    pub max_degree: usize,
    /// Initial mean radii are `exp(U(-spread, spread))`.
    #[serde(default = "default_spread")]
    pub radius_spread: f64,
    /// Even initial data and even iterates.
    #[serde(default)]
    pub symmetric: bool,
    /// Also start each point from the first converged solution of the
    /// previous point with the same `p`.
    #[serde(default)]
    pub warm_start: bool,
    #[serde(default)]
    pub newton: NewtonOptions,
}

fn default_amplitude() -> f64 {
    0.15
}

fn default_degree() -> usize {
    4
}

fn default_spread() -> f64 {
    0.2
}

/// Aggregated outcome at one `(p, q)`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SweepPoint {
    pub p: f64,
    pub q: f64,
    pub runs: Vec<SolveRecord>,
    pub converged: usize,
    /// Largest roundness deviation and center offset over converged runs.
    pub max_roundness: f64,
    pub max_center: f64,
    /// Number of distinct converged solutions after rescaling to unit mean
    /// radius.
    pub distinct: usize,
}

/// Relative sup distance under which two rescaled solutions count as one.
pub const DISTINCT_TOL: f64 = 1e-6;

impl SweepPoint {
    fn new(p: f64, q: f64, reports: &[Result<SolveReport, super::SolverError>]) -> Self {
        let runs: Vec<SolveRecord> = reports
            .iter()
            .map(|r| match r {
                Ok(rep) => rep.record(),
                Err(e) => SolveRecord::failed(e),
            })
            .collect();
        let good: Vec<&SolveReport> = reports.iter().filter_map(|r| r.as_ref().ok()).filter(|r| r.converged).collect();
        let mut reps: Vec<Vec<f64>> = Vec::new();
        for r in &good {
            let m = r.body.mean_support();
            let v: Vec<f64> = r.body.support().iter().map(|u| u / m).collect();
            let new = reps.iter().all(|w| w.iter().zip(&v).map(|(a, b)| (a - b).abs()).fold(0.0, f64::max) > DISTINCT_TOL);
            if new {
                reps.push(v);
            }
        }
        SweepPoint {
            p,
            q,
            converged: good.len(),
            max_roundness: good.iter().map(|r| r.roundness.deviation).fold(0.0, f64::max),
            max_center: good.iter().map(|r| r.roundness.center_norm()).fold(0.0, f64::max),
            distinct: reps.len(),
            runs,
        }
    }
}

fn initial_bodies(spec: &SweepSpec, grid: &Arc<SphereGrid>, point: usize) -> Vec<SupportBody> {
    (0..spec.inits_per_point)
        .filter_map(|j| {
            let seed = spec.seed.wrapping_mul(1_000_003).wrapping_add((point * spec.inits_per_point + j) as u64);
            let mut rng = ChaCha8Rng::seed_from_u64(seed ^ 0x5eed);
            let radius = if spec.radius_spread > 0.0 {
                rng.random_range(-spec.radius_spread..spec.radius_spread).exp()
            } else {
                1.0
            };
            Shape::random(grid.dim(), radius, spec.max_degree, spec.amplitude, spec.symmetric, seed).build(grid).ok()
        })
        .collect()
}

fn solve_row(spec: &SweepSpec, grid: &Arc<SphereGrid>, row: &[(usize, (f64, f64))]) -> Vec<SweepPoint> {
    let mut warm: Option<(SupportBody, Vec<(f64, f64)>)> = None;
    let mut out = Vec::with_capacity(row.len());
    let opts = NewtonOptions { symmetric: spec.symmetric || spec.newton.symmetric, ..spec.newton.clone() };
    for &(idx, (p, q)) in row {
        let problem = ProblemSpec { family: spec.problem.family.with_pq(p, q), ..spec.problem.clone() };
        let mut reports: Vec<_> = Vec::new();
        if let Some((body, path)) = &warm {
            let mut r = newton_solve(&problem, body, &opts);
            if let Ok(rep) = &mut r {
                rep.path = path.clone();
                rep.path.push((p, q));
            }
            reports.push(r);
        }
        for init in initial_bodies(spec, grid, idx) {
            reports.push(newton_solve(&problem, &init, &opts));
        }
        if spec.warm_start {
            warm = reports.iter().filter_map(|r| r.as_ref().ok()).find(|r| r.converged).map(|r| {
                let mut path = r.path.clone();
                if path.is_empty() {
                    path.push((p, q));
                }
                (r.body.clone(), path)
            });
        }
        out.push(SweepPoint::new(p, q, &reports));
    }
    out
}

/// Runs the sweep. Rows of consecutive points with equal `p` are solved in
/// order (warm starts flow along a row); rows run in parallel. Results are
/// returned in input order and do not depend on the thread count.
pub fn sweep(spec: &SweepSpec) -> Result<Vec<SweepPoint>, super::SolverError> {
    spec.problem.validate()?;
    let grid = Arc::new(SphereGrid::new(spec.grid.clone())?);
    let mut rows: Vec<Vec<(usize, (f64, f64))>> = Vec::new();
    for (i, &pt) in spec.points.iter().enumerate() {
        match rows.last_mut() {
            Some(row) if spec.warm_start && row.last().is_some_and(|(_, (p, _))| *p == pt.0) => row.push((i, pt)),
            _ => rows.push(vec![(i, pt)]),
        }
    }
    #[cfg(feature = "parallel")]
    let results: Vec<Vec<SweepPoint>> = {
        use rayon::prelude::*;
        rows.par_iter().map(|row| solve_row(spec, &grid, row)).collect()
    };
    #[cfg(not(feature = "parallel"))]
    let results: Vec<Vec<SweepPoint>> = rows.iter().map(|row| solve_row(spec, &grid, row)).collect();
    Ok(results.into_iter().flatten().collect())
}
