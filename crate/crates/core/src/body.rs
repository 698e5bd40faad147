//! Convex bodies represented by their support function `u` sampled on a
//! sphere grid, with the derived geometry evaluated once at construction:
//! frame gradient, the radii-of-curvature matrix `W = Hess u + u g`, its
//! eigenvalues, the position `X = u z + grad u` and `r = |X|`.

use std::f64::consts::PI;
use std::sync::Arc;

use nalgebra::DMatrix;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::sphere::{GridError, GridSpec, ScalarField, SphereGrid};
use crate::symfun;

/// Strict-convexity threshold: the smallest principal radius must exceed
/// this fraction of the mean support value.
pub const CONVEXITY_TOL: f64 = 1e-8;

/// Random perturbations are shrunk until the smallest radius is at least this
/// fraction of the base radius.
pub const MIN_RADIUS_FRACTION: f64 = 0.1;

pub const BODY_FORMAT: &str = "minklab-body";
pub const BODY_VERSION: u32 = 1;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum BodyError {
    #[error("support function not positive at node {node} (u = {value})")]
    NonPositive { node: usize, value: f64 },
    #[error("body not strictly convex at node {node} (smallest radius {min_radius})")]
    NonConvex { node: usize, min_radius: f64 },
    #[error("invalid shape: {0}")]
    InvalidShape(String),
    #[error("body file: {0}")]
    Format(String),
    #[error(transparent)]
    Grid(#[from] GridError),
}

pub type Result<T> = std::result::Result<T, BodyError>;

/// A sampled support function with its derived geometry.
#[derive(Debug, Clone)]
pub struct SupportBody {
    grid: Arc<SphereGrid>,
    u: ScalarField,
    grad: Vec<f64>,
    w: Vec<f64>,
    radii: Vec<f64>,
    x: Vec<f64>,
    r: Vec<f64>,
    checked: bool,
}

fn sym_eigen(n: usize, w: &[f64]) -> Vec<f64> {
    match n {
        1 => vec![w[0]],
        2 => {
            let m = 0.5 * (w[0] + w[3]);
            let d = (0.25 * (w[0] - w[3]).powi(2) + w[1] * w[1]).sqrt();
            vec![m - d, m + d]
        }
        _ => symfun::SymMatrix::try_new(DMatrix::from_row_slice(n, n, w))
            .map(|s| s.eigenvalues())
            .unwrap_or_else(|_| vec![f64::NAN; n]),
    }
}

impl SupportBody {
    /// Builds a body and checks positivity and strict convexity.
    pub fn from_support(grid: Arc<SphereGrid>, u: ScalarField) -> Result<Self> {
        let b = Self::build(grid, u)?;
        if let Some((node, &value)) = b.u.iter().enumerate().find(|(_, &v)| !(v > 0.0)) {
            return Err(BodyError::NonPositive { node, value });
        }
        let thresh = CONVEXITY_TOL * b.mean_support();
        let n = b.dim();
        for node in 0..b.len() {
            let min_radius = b.radii[node * n];
            if !(min_radius > thresh) {
                return Err(BodyError::NonConvex { node, min_radius });
            }
        }
        Ok(Self { checked: true, ..b })
    }

    /// Builds the derived geometry of an arbitrary smooth function without
    /// any positivity or convexity check. Identities that hold for general
    /// functions accept such objects; everything else rejects them.
    pub fn from_function(grid: Arc<SphereGrid>, u: ScalarField) -> Result<Self> {
        Self::build(grid, u)
    }

    fn build(grid: Arc<SphereGrid>, u: ScalarField) -> Result<Self> {
        let d = grid.derivatives(&u)?;
        let n = grid.dim();
        let len = grid.len();
        let mut grad = Vec::with_capacity(n * len);
        let mut w = Vec::with_capacity(n * n * len);
        let mut radii = Vec::with_capacity(n * len);
        let mut x = Vec::with_capacity((n + 1) * len);
        let mut r = Vec::with_capacity(len);
        for i in 0..len {
            let g = d.grad_at(i);
            let h = d.hess_at(i);
            grad.extend_from_slice(g);
            let wi: Vec<f64> = (0..n * n).map(|ab| h[ab] + if ab % (n + 1) == 0 { u[i] } else { 0.0 }).collect();
            // symmetrize against round-off in the mixed derivative
            let wi: Vec<f64> = (0..n * n).map(|ab| 0.5 * (wi[ab] + wi[(ab % n) * n + ab / n])).collect();
            radii.extend(sym_eigen(n, &wi));
            w.extend(wi);
            let z = grid.point(i);
            let mut xi: Vec<f64> = z.iter().map(|c| u[i] * c).collect();
            for (a, ga) in g.iter().enumerate() {
                for (xc, ec) in xi.iter_mut().zip(grid.frame(i, a)) {
                    *xc += ga * ec;
                }
            }
            r.push(xi.iter().map(|c| c * c).sum::<f64>().sqrt());
            x.extend(xi);
        }
        Ok(Self { grid, u, grad, w, radii, x, r, checked: false })
    }

    pub fn grid(&self) -> &Arc<SphereGrid> {
        &self.grid
    }

    pub fn dim(&self) -> usize {
        self.grid.dim()
    }

    pub fn len(&self) -> usize {
        self.grid.len()
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    /// Whether positivity and strict convexity were verified.
    pub fn is_convex_body(&self) -> bool {
        self.checked
    }

    pub fn support(&self) -> &ScalarField {
        &self.u
    }

    pub fn grad_at(&self, i: usize) -> &[f64] {
        let n = self.dim();
        &self.grad[i * n..(i + 1) * n]
    }

    /// Row-major radii-of-curvature matrix `W` at node `i`.
    pub fn w_at(&self, i: usize) -> &[f64] {
        let s = self.dim() * self.dim();
        &self.w[i * s..(i + 1) * s]
    }

    pub fn w_matrix(&self, i: usize) -> DMatrix<f64> {
        let n = self.dim();
        DMatrix::from_row_slice(n, n, self.w_at(i))
    }

    /// Principal radii (ascending) at node `i`.
    pub fn radii_at(&self, i: usize) -> &[f64] {
        let n = self.dim();
        &self.radii[i * n..(i + 1) * n]
    }

    /// Boundary point `X = u z + grad u` with outer normal `z`.
    pub fn position(&self, i: usize) -> &[f64] {
        let d = self.dim() + 1;
        &self.x[i * d..(i + 1) * d]
    }

    pub fn radial(&self) -> &[f64] {
        &self.r
    }

    /// Unnormalized `sigma_k(W)` at every node.
    pub fn sigma(&self, k: usize) -> ScalarField {
        (0..self.len())
            .map(|i| symfun::elem_sym_raw(self.radii_at(i)).get(k).copied().unwrap_or(0.0))
            .collect()
    }

    /// Area density `sigma_n(W) = det W`.
    pub fn area_density(&self) -> ScalarField {
        self.sigma(self.dim())
    }

    /// `int u dsigma / |S^n|`.
    pub fn mean_support(&self) -> f64 {
        self.grid.integrate(&self.u) / self.grid.area()
    }

    pub fn smallest_radius(&self) -> f64 {
        let n = self.dim();
        self.radii.chunks(n).map(|r| r[0]).fold(f64::INFINITY, f64::min)
    }

    /// Center and deviation from the best-fitting sphere.
    pub fn roundness(&self) -> Roundness {
        let g = &self.grid;
        let n = self.dim();
        let c: Vec<f64> = (0..=n)
            .map(|a| {
                let f: Vec<f64> = (0..self.len()).map(|i| self.u[i] * g.point(i)[a]).collect();
                (n as f64 + 1.0) / g.area() * g.integrate(&f)
            })
            .collect();
        let radius = self.mean_support();
        let deviation = (0..self.len())
            .map(|i| {
                let cz: f64 = c.iter().zip(g.point(i)).map(|(a, b)| a * b).sum();
                (self.u[i] - cz - radius).abs()
            })
            .fold(0.0, f64::max)
            / radius;
        Roundness { center: c, radius, deviation }
    }

    /// Same body with support function multiplied by `s`.
    pub fn scaled(&self, s: f64) -> Result<Self> {
        let u = self.u.iter().map(|v| v * s).collect();
        if self.checked {
            Self::from_support(self.grid.clone(), u)
        } else {
            Self::from_function(self.grid.clone(), u)
        }
    }

    pub fn to_file(&self) -> BodyFile {
        BodyFile {
            format: BODY_FORMAT.to_string(),
            version: BODY_VERSION,
            grid: self.grid.spec().clone(),
            u: self.u.0.clone(),
        }
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string(&self.to_file()).expect("body serializes")
    }

    pub fn from_json(s: &str) -> Result<Self> {
        let f: BodyFile = serde_json::from_str(s).map_err(|e| BodyError::Format(e.to_string()))?;
        f.into_body()
    }
}

/// Versioned on-disk form of a body.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BodyFile {
    pub format: String,
    pub version: u32,
    pub grid: GridSpec,
    pub u: Vec<f64>,
}

impl BodyFile {
    pub fn into_body(self) -> Result<SupportBody> {
        if self.format != BODY_FORMAT {
            return Err(BodyError::Format(format!("unknown format {:?}", self.format)));
        }
        if self.version != BODY_VERSION {
            return Err(BodyError::Format(format!("unsupported version {}", self.version)));
        }
        let grid = Arc::new(SphereGrid::new(self.grid)?);
        SupportBody::from_support(grid, ScalarField(self.u))
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Roundness {
    pub center: Vec<f64>,
    pub radius: f64,
    pub deviation: f64,
}

impl Roundness {
    pub fn center_norm(&self) -> f64 {
        self.center.iter().map(|c| c * c).sum::<f64>().sqrt()
    }
}

/// One harmonic component of a perturbation. Harmonics are scaled to unit
/// maximum (cosines/sines on the circle, Schmidt-normalized on the sphere).
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Mode {
    pub degree: usize,
    pub order: i64,
    pub amplitude: f64,
}

/// Parametrized shape families.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum Shape {
    /// `u = R + <c, z>`
    Sphere { radius: f64, center: Vec<f64> },
    /// `u = sqrt(sum a_i^2 z_i^2)`
    Ellipsoid { axes: Vec<f64> },
    /// `u = R (1 + sum eps_m Y_m)`, amplitudes shrunk if needed to keep the
    /// smallest radius above `MIN_RADIUS_FRACTION * R`.
    Perturbed { radius: f64, modes: Vec<Mode> },
}

impl Shape {
    pub fn unit_sphere() -> Self {
        Shape::Sphere { radius: 1.0, center: Vec::new() }
    }

    /// Random perturbation of a sphere with degrees `1..=max_degree` (or the
    /// even ones only) and amplitudes uniform in `[-amplitude, amplitude] / degree`.
    pub fn random(dim: usize, radius: f64, max_degree: usize, amplitude: f64, even: bool, seed: u64) -> Self {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let mut modes = Vec::new();
        for degree in 1..=max_degree {
            if even && degree % 2 == 1 {
                continue;
            }
            let orders: Vec<i64> = if dim == 1 {
                vec![0, -1]
            } else {
                (-(degree as i64)..=degree as i64).collect()
            };
            for order in orders {
                let a = rng.random_range(-amplitude..=amplitude) / degree as f64;
                modes.push(Mode { degree, order, amplitude: a });
            }
        }
        Shape::Perturbed { radius, modes }
    }

    /// Samples the support function on a grid and builds the body.
    pub fn build(&self, grid: &Arc<SphereGrid>) -> Result<SupportBody> {
        let n = grid.dim();
        match self {
            Shape::Sphere { radius, center } => {
                let c = pad(center, n + 1)?;
                let u = grid.sample(|z| radius + z.iter().zip(&c).map(|(a, b)| a * b).sum::<f64>());
                SupportBody::from_support(grid.clone(), u)
            }
            Shape::Ellipsoid { axes } => {
                if axes.len() != n + 1 || axes.iter().any(|a| !(*a > 0.0)) {
                    return Err(BodyError::InvalidShape(format!("need {} positive axes", n + 1)));
                }
                let u = grid.sample(|z| z.iter().zip(axes).map(|(z, a)| a * a * z * z).sum::<f64>().sqrt());
                SupportBody::from_support(grid.clone(), u)
            }
            Shape::Perturbed { radius, modes } => {
                let pert = perturbation(grid, modes)?;
                let scale = convex_scale(grid, &pert, *radius, MIN_RADIUS_FRACTION)?;
                let u = pert.iter().map(|p| radius * (1.0 + scale * p)).collect();
                SupportBody::from_support(grid.clone(), u)
            }
        }
    }

    /// For perturbed shapes, folds the convexity shrink factor on `grid`
    /// into the amplitudes with twice the usual radius margin, so that the
    /// result builds unchanged on this grid and on nearby resolutions.
    pub fn clamped(&self, grid: &Arc<SphereGrid>) -> Result<Shape> {
        match self {
            Shape::Perturbed { radius, modes } => {
                let pert = perturbation(grid, modes)?;
                let scale = convex_scale(grid, &pert, *radius, 2.0 * MIN_RADIUS_FRACTION)?;
                Ok(Shape::Perturbed {
                    radius: *radius,
                    modes: modes.iter().map(|m| Mode { amplitude: m.amplitude * scale, ..m.clone() }).collect(),
                })
            }
            other => Ok(other.clone()),
        }
    }
}

fn convex_scale(grid: &Arc<SphereGrid>, pert: &[f64], radius: f64, margin: f64) -> Result<f64> {
    let mut scale = 1.0;
    for _ in 0..80 {
        let u: ScalarField = pert.iter().map(|p| radius * (1.0 + scale * p)).collect();
        if let Ok(b) = SupportBody::from_support(grid.clone(), u) {
            if b.smallest_radius() >= margin * radius {
                return Ok(scale);
            }
        }
        scale *= 0.8;
    }
    Err(BodyError::InvalidShape("perturbation cannot be made convex".into()))
}

fn pad(c: &[f64], len: usize) -> Result<Vec<f64>> {
    if c.len() > len {
        return Err(BodyError::InvalidShape(format!("center has {} components, expected {len}", c.len())));
    }
    let mut v = c.to_vec();
    v.resize(len, 0.0);
    Ok(v)
}

/// `sum eps_m Y_m` with unit-maximum harmonics.
pub fn perturbation(grid: &SphereGrid, modes: &[Mode]) -> Result<ScalarField> {
    let n = grid.dim();
    let mut out = vec![0.0; grid.len()];
    for m in modes {
        if (m.order.unsigned_abs() as usize) > m.degree || (n == 1 && m.degree == 0) {
            return Err(BodyError::InvalidShape(format!("invalid mode {m:?}")));
        }
        let (y, norm) = if n == 1 {
            (grid.harmonic(m.degree, m.order), PI.sqrt())
        } else {
            (grid.harmonic(m.degree, m.order), (4.0 * PI / (2 * m.degree + 1) as f64).sqrt())
        };
        for (o, v) in out.iter_mut().zip(y.iter()) {
            *o += m.amplitude * norm * v;
        }
    }
    Ok(ScalarField(out))
}
