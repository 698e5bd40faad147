//! Residuals, damped Newton, normalized flows and parameter sweeps for the
//! isotropic and anisotropic curvature equations.

mod family;
mod flow;
mod newton;
mod sweep;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::body::{BodyError, Roundness, SupportBody};
use crate::sphere::GridError;
use crate::symfun::SymfunError;

pub use family::{residual, Data, Family, Linearization, ProblemSpec};
pub use flow::{flow_run, stable_step, FlowOptions};
pub use newton::{newton_solve, NewtonOptions};
pub use sweep::{sweep, SweepPoint, SweepSpec};

#[derive(Debug, Error, Clone, PartialEq)]
pub enum SolverError {
    #[error("invalid problem: {0}")]
    InvalidSpec(String),
    #[error("support function not positive at node {0}")]
    NonPositive(usize),
    #[error("curvature matrix left the admissible cone at node {0}")]
    LeftCone(usize),
    #[error("residual not finite at node {0}")]
    NonFiniteResidual(usize),
    #[error("initial body is not admissible: {0}")]
    BadInit(String),
    #[error("line search failed at residual {0:e}")]
    LineSearchFailed(f64),
    #[error("iterate left the convex cone and could not be rescued")]
    LeftConvexCone,
    #[error("time step {dt:e} exceeds the stability limit {limit:e}")]
    Unstable { dt: f64, limit: f64 },
    #[error("flow blew up at step {0}")]
    BlowUp(usize),
    #[error(transparent)]
    Body(#[from] BodyError),
    #[error(transparent)]
    Grid(#[from] GridError),
    #[error(transparent)]
    Symfun(#[from] SymfunError),
}

pub type Result<T> = std::result::Result<T, SolverError>;

/// Outcome of a solve or a flow run.
#[derive(Debug, Clone)]
pub struct SolveReport {
    pub converged: bool,
    pub iterations: usize,
    /// `sup |R - log c|` at the final iterate.
    pub residual: f64,
    pub body: SupportBody,
    pub roundness: Roundness,
    /// Solved scale unknown `log c` when the free-scale gauge was used.
    pub log_scale: Option<f64>,
    /// Residual after each iteration.
    pub history: Vec<f64>,
    /// `(p, q)` points this solve was warm-started through.
    pub path: Vec<(f64, f64)>,
    /// Flow only: `sup |du/dt| / u` at the last step.
    pub fixed_point_distance: Option<f64>,
}

/// Serializable summary of a [`SolveReport`].
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SolveRecord {
    pub converged: bool,
    pub iterations: usize,
    pub residual: f64,
    pub roundness: f64,
    pub center: f64,
    pub radius: f64,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub log_scale: Option<f64>,
    #[serde(skip_serializing_if = "Vec::is_empty", default)]
    pub path: Vec<(f64, f64)>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub fixed_point_distance: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub error: Option<String>,
}

impl SolveReport {
    pub fn record(&self) -> SolveRecord {
        SolveRecord {
            converged: self.converged,
            iterations: self.iterations,
            residual: self.residual,
            roundness: self.roundness.deviation,
            center: self.roundness.center_norm(),
            radius: self.roundness.radius,
            log_scale: self.log_scale,
            path: self.path.clone(),
            fixed_point_distance: self.fixed_point_distance,
            error: None,
        }
    }
}

impl SolveRecord {
    pub fn failed(err: &SolverError) -> Self {
        SolveRecord {
            converged: false,
            iterations: 0,
            residual: f64::NAN,
            roundness: f64::NAN,
            center: f64::NAN,
            radius: f64::NAN,
            log_scale: None,
            path: Vec::new(),
            fixed_point_distance: None,
            error: Some(err.to_string()),
        }
    }
}
