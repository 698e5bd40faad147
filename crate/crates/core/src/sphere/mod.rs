//! Quadrature grids on the unit circle and the unit 2-sphere with an
//! orthonormal tangent frame at every node, and covariant differentiation of
//! sampled fields.
//!
//! On the circle the grid is uniform and derivatives are spectral (FFT).
//! On the 2-sphere longitudes are uniform and differentiated spectrally per
//! latitude ring. Colatitude derivatives are taken along full great circles:
//! a meridian is continued over each pole by the opposite meridian, which is
//! smooth, so no pole boundary condition is needed. Two colatitude schemes
//! are available:
//!
//! * [`LatitudeScheme::GaussLegendre`]: Gauss-Legendre colatitudes with
//!   seven-point finite differences on the (non-uniform) great-circle nodes.
//! * [`LatitudeScheme::Uniform`]: offset uniform colatitudes with Fejer
//!   weights; the continued great circle is then uniform and the colatitude
//!   derivative is spectral as well.
//!
//! Poles are never grid nodes. Frames are `e_1 = d/dtheta`,
//! `e_2 = d/dphi / sin(theta)` on the sphere and `e_1 = (-sin t, cos t)` on
//! the circle.

pub mod harmonics;
pub mod quadrature;

use std::f64::consts::PI;
use std::fmt;
use std::ops::Deref;
use std::sync::Arc;

use rustfft::num_complex::Complex;
use rustfft::{Fft, FftPlanner};
use serde::{Deserialize, Serialize};
use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum GridError {
    #[error("unsupported sphere dimension {0}; only 1 and 2 are implemented")]
    UnsupportedDimension(usize),
    #[error("invalid resolution {resolution:?}: {reason}")]
    Resolution { resolution: Vec<usize>, reason: &'static str },
    #[error("field has {got} samples, grid has {expected}")]
    FieldLength { expected: usize, got: usize },
}

pub type Result<T> = std::result::Result<T, GridError>;

/// Area of the unit `n`-sphere for `n` in {1, 2}.
pub fn sphere_area(n: usize) -> f64 {
    match n {
        1 => 2.0 * PI,
        2 => 4.0 * PI,
        _ => f64::NAN,
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum LatitudeScheme {
    #[default]
    GaussLegendre,
    Uniform,
}

/// Grid description: dimension, resolution and colatitude scheme.
/// Resolution is `[N]` on the circle and `[n_lat, n_lon]` on the sphere.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct GridSpec {
    pub dim: usize,
    pub resolution: Vec<usize>,
    #[serde(default)]
    pub scheme: LatitudeScheme,
}

impl GridSpec {
    pub fn circle(n: usize) -> Self {
        Self { dim: 1, resolution: vec![n], scheme: LatitudeScheme::default() }
    }

    pub fn sphere(nlat: usize, nlon: usize) -> Self {
        Self { dim: 2, resolution: vec![nlat, nlon], scheme: LatitudeScheme::default() }
    }

    pub fn with_scheme(mut self, scheme: LatitudeScheme) -> Self {
        self.scheme = scheme;
        self
    }

    /// Default grid: 256 angles on the circle, 64 x 128 on the sphere.
    pub fn default_for(dim: usize) -> Self {
        if dim == 1 {
            Self::circle(256)
        } else {
            Self::sphere(64, 128)
        }
    }

    /// Same grid family with every resolution entry scaled by `factor`.
    pub fn refined(&self, factor: usize) -> Self {
        Self { resolution: self.resolution.iter().map(|r| r * factor).collect(), ..self.clone() }
    }

    pub fn label(&self) -> String {
        self.resolution.iter().map(|r| r.to_string()).collect::<Vec<_>>().join("x")
    }
}

/// Samples of a scalar function at the nodes of a grid.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(transparent)]
pub struct ScalarField(pub Vec<f64>);

impl Deref for ScalarField {
    type Target = [f64];
    fn deref(&self) -> &[f64] {
        &self.0
    }
}

impl From<Vec<f64>> for ScalarField {
    fn from(v: Vec<f64>) -> Self {
        Self(v)
    }
}

impl FromIterator<f64> for ScalarField {
    fn from_iter<I: IntoIterator<Item = f64>>(iter: I) -> Self {
        Self(iter.into_iter().collect())
    }
}

/// Frame components of the gradient and covariant Hessian at every node.
#[derive(Debug, Clone)]
pub struct Derivatives {
    dim: usize,
    grad: Vec<f64>,
    hess: Vec<f64>,
}

impl Derivatives {
    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn grad_at(&self, i: usize) -> &[f64] {
        &self.grad[i * self.dim..(i + 1) * self.dim]
    }

    /// Row-major `dim x dim` Hessian at node `i`.
    pub fn hess_at(&self, i: usize) -> &[f64] {
        let s = self.dim * self.dim;
        &self.hess[i * s..(i + 1) * s]
    }

    pub fn laplacian(&self) -> ScalarField {
        let s = self.dim * self.dim;
        self.hess.chunks(s).map(|h| (0..self.dim).map(|a| h[a * self.dim + a]).sum()).collect()
    }

    pub fn grad_norm_sq(&self) -> ScalarField {
        self.grad.chunks(self.dim).map(|g| g.iter().map(|x| x * x).sum()).collect()
    }
}

/// Periodic spectral differentiation on `n` uniform samples of a `2 pi`-periodic function.
struct FftLine {
    n: usize,
    fwd: Arc<dyn Fft<f64>>,
    inv: Arc<dyn Fft<f64>>,
}

impl FftLine {
    fn new(n: usize) -> Self {
        let mut planner = FftPlanner::new();
        Self { n, fwd: planner.plan_fft_forward(n), inv: planner.plan_fft_inverse(n) }
    }

    fn apply(&self, vals: &[f64], d1: &mut [f64], d2: Option<&mut [f64]>) {
        let n = self.n;
        let mut buf: Vec<Complex<f64>> = vals.iter().map(|&v| Complex::new(v, 0.0)).collect();
        self.fwd.process(&mut buf);
        let wave = |k: usize| if k <= n / 2 { k as f64 } else { k as f64 - n as f64 };
        let scale = 1.0 / n as f64;
        if let Some(d2) = d2 {
            let mut b2: Vec<Complex<f64>> =
                buf.iter().enumerate().map(|(k, c)| c * (-wave(k) * wave(k) * scale)).collect();
            self.inv.process(&mut b2);
            for (o, c) in d2.iter_mut().zip(&b2) {
                *o = c.re;
            }
        }
        for (k, c) in buf.iter_mut().enumerate() {
            *c = if 2 * k == n { Complex::new(0.0, 0.0) } else { *c * Complex::new(0.0, wave(k) * scale) };
        }
        self.inv.process(&mut buf);
        for (o, c) in d1.iter_mut().zip(&buf) {
            *o = c.re;
        }
    }

    /// Fourier coefficients `(a_k, b_k)` of the real trigonometric interpolant,
    /// `f = a_0 + sum a_k cos kt + b_k sin kt` (Nyquist term in `a_{n/2}`).
    fn coefficients(&self, vals: &[f64]) -> (Vec<f64>, Vec<f64>) {
        let n = self.n;
        let mut buf: Vec<Complex<f64>> = vals.iter().map(|&v| Complex::new(v, 0.0)).collect();
        self.fwd.process(&mut buf);
        let half = n / 2;
        let mut a = vec![0.0; half + 1];
        let mut b = vec![0.0; half + 1];
        a[0] = buf[0].re / n as f64;
        for k in 1..=half {
            let f = if 2 * k == n { 1.0 } else { 2.0 };
            a[k] = f * buf[k].re / n as f64;
            b[k] = if 2 * k == n { 0.0 } else { -f * buf[k].im / n as f64 };
        }
        (a, b)
    }
}

struct StencilRow {
    idx: [usize; 7],
    w1: [f64; 7],
    w2: [f64; 7],
}

enum Meridian {
    Spectral(FftLine),
    Stencil(Vec<StencilRow>),
}

impl Meridian {
    fn apply(&self, c: &[f64], d1: &mut [f64], d2: Option<&mut [f64]>) {
        match self {
            Meridian::Spectral(line) => line.apply(c, d1, d2),
            Meridian::Stencil(rows) => {
                for (m, row) in rows.iter().enumerate() {
                    d1[m] = row.idx.iter().zip(&row.w1).map(|(&j, w)| w * c[j]).sum();
                }
                if let Some(d2) = d2 {
                    for (m, row) in rows.iter().enumerate() {
                        d2[m] = row.idx.iter().zip(&row.w2).map(|(&j, w)| w * c[j]).sum();
                    }
                }
            }
        }
    }
}

/// A quadrature grid with tangent frames and differentiation operators.
pub struct SphereGrid {
    spec: GridSpec,
    len: usize,
    points: Vec<f64>,
    frames: Vec<f64>,
    weights: Vec<f64>,
    theta: Vec<f64>,
    phi: Vec<f64>,
    ring: FftLine,
    meridian: Option<Meridian>,
}

impl fmt::Debug for SphereGrid {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("SphereGrid").field("spec", &self.spec).field("len", &self.len).finish()
    }
}

/// Builds a shared grid for dimension `n` with the given resolution.
pub fn make_grid(n: usize, resolution: &[usize]) -> Result<Arc<SphereGrid>> {
    SphereGrid::new(GridSpec { dim: n, resolution: resolution.to_vec(), scheme: LatitudeScheme::default() })
        .map(Arc::new)
}

impl SphereGrid {
    pub fn new(spec: GridSpec) -> Result<Self> {
        let bad = |reason| GridError::Resolution { resolution: spec.resolution.clone(), reason };
        match spec.dim {
            1 => {
                let &[n] = spec.resolution.as_slice() else {
                    return Err(bad("circle grids take a single resolution"));
                };
                if n < 8 || n % 2 != 0 {
                    return Err(bad("circle grids need an even number of at least 8 nodes"));
                }
                Ok(Self::circle(spec, n))
            }
            2 => {
                let &[nlat, nlon] = spec.resolution.as_slice() else {
                    return Err(bad("sphere grids take [n_lat, n_lon]"));
                };
                if nlat < 4 || nlon < 8 || nlon % 2 != 0 {
                    return Err(bad("sphere grids need n_lat >= 4 and an even n_lon >= 8"));
                }
                Ok(Self::sphere(spec, nlat, nlon))
            }
            d => Err(GridError::UnsupportedDimension(d)),
        }
    }

    fn circle(spec: GridSpec, n: usize) -> Self {
        let phi: Vec<f64> = (0..n).map(|j| 2.0 * PI * j as f64 / n as f64).collect();
        let points = phi.iter().flat_map(|&t| [t.cos(), t.sin()]).collect();
        let frames = phi.iter().flat_map(|&t| [-t.sin(), t.cos()]).collect();
        Self {
            spec,
            len: n,
            points,
            frames,
            weights: vec![2.0 * PI / n as f64; n],
            theta: Vec::new(),
            phi,
            ring: FftLine::new(n),
            meridian: None,
        }
    }

    fn sphere(spec: GridSpec, nlat: usize, nlon: usize) -> Self {
        let (theta, wlat) = match spec.scheme {
            LatitudeScheme::GaussLegendre => {
                let (x, w) = quadrature::gauss_legendre(nlat);
                (x.iter().map(|x| x.acos()).collect::<Vec<_>>(), w)
            }
            LatitudeScheme::Uniform => quadrature::fejer_colatitude(nlat),
        };
        let phi: Vec<f64> = (0..nlon).map(|j| 2.0 * PI * j as f64 / nlon as f64).collect();
        let len = nlat * nlon;
        let mut points = Vec::with_capacity(3 * len);
        let mut frames = Vec::with_capacity(6 * len);
        let mut weights = Vec::with_capacity(len);
        for (i, &t) in theta.iter().enumerate() {
            let (st, ct) = t.sin_cos();
            for &p in &phi {
                let (sp, cp) = p.sin_cos();
                points.extend([st * cp, st * sp, ct]);
                frames.extend([ct * cp, ct * sp, -st, -sp, cp, 0.0]);
                weights.push(wlat[i] * 2.0 * PI / nlon as f64);
            }
        }
        let meridian = match spec.scheme {
            LatitudeScheme::Uniform => Meridian::Spectral(FftLine::new(2 * nlat)),
            LatitudeScheme::GaussLegendre => Meridian::Stencil(Self::stencils(&theta)),
        };
        Self { spec, len, points, frames, weights, theta, phi, ring: FftLine::new(nlon), meridian: Some(meridian) }
    }

    /// Seven-point stencils on the continued great circle through the nodes
    /// `theta_0 .. theta_{n-1}, 2 pi - theta_{n-1} .. 2 pi - theta_0`.
    fn stencils(theta: &[f64]) -> Vec<StencilRow> {
        let nl = theta.len();
        let len = 2 * nl;
        let pos = |m: usize| if m < nl { theta[m] } else { 2.0 * PI - theta[len - 1 - m] };
        (0..len)
            .map(|m| {
                let mut idx = [0; 7];
                let mut xs = [0.0; 7];
                for (s, o) in (-3i64..=3).enumerate() {
                    let raw = m as i64 + o;
                    let wrapped = raw.rem_euclid(len as i64) as usize;
                    idx[s] = wrapped;
                    xs[s] = pos(wrapped) + 2.0 * PI * raw.div_euclid(len as i64) as f64;
                }
                let c = quadrature::fornberg(pos(m), &xs, 2);
                let mut w1 = [0.0; 7];
                let mut w2 = [0.0; 7];
                w1.copy_from_slice(&c[1]);
                w2.copy_from_slice(&c[2]);
                StencilRow { idx, w1, w2 }
            })
            .collect()
    }

    pub fn spec(&self) -> &GridSpec {
        &self.spec
    }

    pub fn dim(&self) -> usize {
        self.spec.dim
    }

    pub fn len(&self) -> usize {
        self.len
    }

    pub fn is_empty(&self) -> bool {
        self.len == 0
    }

    pub fn weights(&self) -> &[f64] {
        &self.weights
    }

    /// Exact area of the unit sphere of this dimension.
    pub fn area(&self) -> f64 {
        sphere_area(self.dim())
    }

    /// Unit normal (node position) at node `i`.
    pub fn point(&self, i: usize) -> &[f64] {
        let d = self.dim() + 1;
        &self.points[i * d..(i + 1) * d]
    }

    /// Tangent frame vector `e_a` at node `i`.
    pub fn frame(&self, i: usize, a: usize) -> &[f64] {
        let d = self.dim() + 1;
        let o = (i * self.dim() + a) * d;
        &self.frames[o..o + d]
    }

    /// `(colatitude, longitude)` of node `i`; on the circle the colatitude is `pi/2`.
    pub fn angles(&self, i: usize) -> (f64, f64) {
        if self.dim() == 1 {
            (PI / 2.0, self.phi[i])
        } else {
            let nlon = self.phi.len();
            (self.theta[i / nlon], self.phi[i % nlon])
        }
    }

    /// Index of the node at `-z`.
    pub fn antipode(&self, i: usize) -> usize {
        let nlon = self.phi.len();
        if self.dim() == 1 {
            (i + nlon / 2) % nlon
        } else {
            let (a, b) = (i / nlon, i % nlon);
            (self.theta.len() - 1 - a) * nlon + (b + nlon / 2) % nlon
        }
    }

    pub fn sample(&self, f: impl Fn(&[f64]) -> f64) -> ScalarField {
        (0..self.len).map(|i| f(self.point(i))).collect()
    }

    pub fn constant(&self, c: f64) -> ScalarField {
        ScalarField(vec![c; self.len])
    }

    fn check(&self, f: &[f64]) -> Result<()> {
        if f.len() == self.len {
            Ok(())
        } else {
            Err(GridError::FieldLength { expected: self.len, got: f.len() })
        }
    }

    /// Quadrature sum `sum_i w_i f_i`.
    pub fn integrate(&self, f: &[f64]) -> f64 {
        debug_assert_eq!(f.len(), self.len);
        self.weights.iter().zip(f).map(|(w, v)| w * v).sum()
    }

    /// Checked quadrature.
    pub fn quadrature(&self, f: &[f64]) -> Result<f64> {
        self.check(f)?;
        Ok(self.integrate(f))
    }

    /// Weighted mean `int f g / int g`.
    pub fn weighted_mean(&self, f: &[f64], g: &[f64]) -> f64 {
        let num: f64 = self.weights.iter().zip(f).zip(g).map(|((w, a), b)| w * a * b).sum();
        num / self.integrate(g)
    }

    /// `(f(z) + f(-z)) / 2`.
    pub fn even_part(&self, f: &[f64]) -> ScalarField {
        (0..self.len).map(|i| 0.5 * (f[i] + f[self.antipode(i)])).collect()
    }

    /// Gradient and Hessian in the orthonormal frame.
    pub fn derivatives(&self, f: &[f64]) -> Result<Derivatives> {
        self.check(f)?;
        Ok(match self.dim() {
            1 => {
                let mut g = vec![0.0; self.len];
                let mut h = vec![0.0; self.len];
                self.ring.apply(f, &mut g, Some(&mut h));
                Derivatives { dim: 1, grad: g, hess: h }
            }
            _ => self.sphere_derivatives(f),
        })
    }

    pub fn laplacian(&self, f: &[f64]) -> Result<ScalarField> {
        Ok(self.derivatives(f)?.laplacian())
    }

    /// Applies the meridian operator along every continued great circle.
    /// Returns first (and optionally second) colatitude derivatives.
    fn colatitude(&self, f: &[f64], second: bool) -> (Vec<f64>, Vec<f64>) {
        let nlon = self.phi.len();
        let nlat = self.theta.len();
        let half = nlon / 2;
        let len = 2 * nlat;
        let meridian = self.meridian.as_ref().expect("sphere grid");
        let mut d1 = vec![0.0; self.len];
        let mut d2 = if second { vec![0.0; self.len] } else { Vec::new() };
        let mut c = vec![0.0; len];
        let mut c1 = vec![0.0; len];
        let mut c2 = vec![0.0; len];
        for j in 0..half {
            for m in 0..nlat {
                c[m] = f[m * nlon + j];
                c[len - 1 - m] = f[m * nlon + j + half];
            }
            meridian.apply(&c, &mut c1, if second { Some(&mut c2) } else { None });
            for m in 0..nlat {
                d1[m * nlon + j] = c1[m];
                d1[m * nlon + j + half] = -c1[len - 1 - m];
                if second {
                    d2[m * nlon + j] = c2[m];
                    d2[m * nlon + j + half] = c2[len - 1 - m];
                }
            }
        }
        (d1, d2)
    }

    fn sphere_derivatives(&self, f: &[f64]) -> Derivatives {
        let nlon = self.phi.len();
        let mut fp = vec![0.0; self.len];
        let mut fpp = vec![0.0; self.len];
        for (a, (b, c)) in f.chunks(nlon).zip(fp.chunks_mut(nlon).zip(fpp.chunks_mut(nlon))) {
            self.ring.apply(a, b, Some(c));
        }
        let (ft, ftt) = self.colatitude(f, true);
        let (ftp, _) = self.colatitude(&fp, false);
        let mut grad = Vec::with_capacity(2 * self.len);
        let mut hess = Vec::with_capacity(4 * self.len);
        for i in 0..self.len {
            let t = self.theta[i / nlon];
            let (st, ct) = t.sin_cos();
            let cot = ct / st;
            grad.extend([ft[i], fp[i] / st]);
            let htp = (ftp[i] - cot * fp[i]) / st;
            let hpp = fpp[i] / (st * st) + cot * ft[i];
            hess.extend([ftt[i], htp, htp, hpp]);
        }
        Derivatives { dim: 2, grad, hess }
    }

    /// Orthonormal harmonic of the given degree and order (see [`harmonics`]).
    pub fn harmonic(&self, degree: usize, order: i64) -> ScalarField {
        (0..self.len)
            .map(|i| {
                let (t, p) = self.angles(i);
                if self.dim() == 1 {
                    harmonics::circle_mode(degree, order, p)
                } else {
                    harmonics::sphere_modes(degree, t, p)[harmonics::sphere_index(degree, order)]
                }
            })
            .collect()
    }

    /// All orthonormal harmonics of degree at most `lmax`, tagged `(degree, order)`.
    pub fn harmonic_basis(&self, lmax: usize) -> Vec<(usize, i64, ScalarField)> {
        let labels: Vec<(usize, i64)> = if self.dim() == 1 {
            std::iter::once((0, 0))
                .chain((1..=lmax).flat_map(|m| [(m, 0), (m, -1)]))
                .collect()
        } else {
            (0..=lmax).flat_map(|l| (-(l as i64)..=l as i64).map(move |m| (l, m))).collect()
        };
        let mut cols = vec![vec![0.0; self.len]; labels.len()];
        for i in 0..self.len {
            let (t, p) = self.angles(i);
            if self.dim() == 1 {
                for (c, &(d, o)) in cols.iter_mut().zip(&labels) {
                    c[i] = harmonics::circle_mode(d, o, p);
                }
            } else {
                let y = harmonics::sphere_modes(lmax, t, p);
                for (c, &(d, o)) in cols.iter_mut().zip(&labels) {
                    c[i] = y[harmonics::sphere_index(d, o)];
                }
            }
        }
        labels.into_iter().zip(cols).map(|((d, o), c)| (d, o, ScalarField(c))).collect()
    }

    /// Interpolates a field onto another grid of the same dimension through
    /// its trigonometric (circle) or spherical-harmonic (sphere) expansion.
    pub fn resample(&self, f: &[f64], target: &SphereGrid) -> Result<ScalarField> {
        self.check(f)?;
        if target.dim() != self.dim() {
            return Err(GridError::UnsupportedDimension(target.dim()));
        }
        if self.dim() == 1 {
            let (a, b) = self.ring.coefficients(f);
            return Ok((0..target.len)
                .map(|i| {
                    let t = target.phi[i];
                    a.iter()
                        .zip(&b)
                        .enumerate()
                        .map(|(k, (ak, bk))| ak * (k as f64 * t).cos() + bk * (k as f64 * t).sin())
                        .sum()
                })
                .collect());
        }
        let lmax = (self.theta.len() - 1).min(self.phi.len() / 2 - 1);
        let nmodes = (lmax + 1) * (lmax + 1);
        let mut coef = vec![0.0; nmodes];
        for i in 0..self.len {
            let (t, p) = self.angles(i);
            let y = harmonics::sphere_modes(lmax, t, p);
            let wf = self.weights[i] * f[i];
            for (c, yv) in coef.iter_mut().zip(&y) {
                *c += wf * yv;
            }
        }
        Ok((0..target.len)
            .map(|i| {
                let (t, p) = target.angles(i);
                harmonics::sphere_modes(lmax, t, p).iter().zip(&coef).map(|(y, c)| y * c).sum()
            })
            .collect())
    }
}
