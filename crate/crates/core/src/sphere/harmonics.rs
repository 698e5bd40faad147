//! Real orthonormal harmonics: Fourier modes on the circle and spherical
//! harmonics on the 2-sphere.

use std::f64::consts::PI;

/// Index of the circle mode `(m, cos|sin)` in the ordering `1, cos t, sin t, cos 2t, ...`.
/// `order >= 0` selects the cosine, `order < 0` the sine.
pub fn circle_index(degree: usize, order: i64) -> usize {
    match degree {
        0 => 0,
        m if order >= 0 => 2 * m - 1,
        m => 2 * m,
    }
}

/// Orthonormal circle mode of the given degree at angle `t`.
pub fn circle_mode(degree: usize, order: i64, t: f64) -> f64 {
    if degree == 0 {
        return 1.0 / (2.0 * PI).sqrt();
    }
    let m = degree as f64;
    if order >= 0 {
        (m * t).cos() / PI.sqrt()
    } else {
        (m * t).sin() / PI.sqrt()
    }
}

/// Index of `Y_{l,m}` in the ordering by degree then order `-l..=l`.
pub fn sphere_index(degree: usize, order: i64) -> usize {
    (degree * degree) as usize + (degree as i64 + order) as usize
}

/// All real orthonormal spherical harmonics up to degree `lmax` at colatitude
/// `theta` and longitude `phi`, ordered by [`sphere_index`]. Negative orders
/// carry `sin(|m| phi)`.
pub fn sphere_modes(lmax: usize, theta: f64, phi: f64) -> Vec<f64> {
    let x = theta.cos();
    let s = theta.sin();
    let mut out = vec![0.0; (lmax + 1) * (lmax + 1)];
    // Normalized associated Legendre functions, column by column in m.
    let mut pmm = 1.0 / (4.0 * PI).sqrt();
    for m in 0..=lmax {
        if m > 0 {
            pmm *= ((2 * m + 1) as f64 / (2 * m) as f64).sqrt() * s;
        }
        let mut plm2 = 0.0;
        let mut plm1 = pmm;
        for l in m..=lmax {
            let p = if l == m {
                pmm
            } else if l == m + 1 {
                x * ((2 * m + 3) as f64).sqrt() * pmm
            } else {
                let (lf, mf) = (l as f64, m as f64);
                let a = ((4.0 * lf * lf - 1.0) / (lf * lf - mf * mf)).sqrt();
                let b = (((lf - 1.0) * (lf - 1.0) - mf * mf) / (4.0 * (lf - 1.0) * (lf - 1.0) - 1.0)).sqrt();
                a * (x * plm1 - b * plm2)
            };
            if l > m {
                plm2 = plm1;
                plm1 = p;
            }
            if m == 0 {
                out[sphere_index(l, 0)] = p;
            } else {
                let mf = m as f64;
                out[sphere_index(l, m as i64)] = 2f64.sqrt() * p * (mf * phi).cos();
                out[sphere_index(l, -(m as i64))] = 2f64.sqrt() * p * (mf * phi).sin();
            }
        }
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::sphere::quadrature::gauss_legendre;

    #[test]
    fn spherical_harmonics_are_orthonormal() {
        let lmax = 6;
        let (x, w) = gauss_legendre(12);
        let nphi = 16;
        let k = (lmax + 1) * (lmax + 1);
        let mut gram = vec![0.0; k * k];
        for (xi, wi) in x.iter().zip(&w) {
            for j in 0..nphi {
                let phi = 2.0 * PI * j as f64 / nphi as f64;
                let y = sphere_modes(lmax, xi.acos(), phi);
                let wt = wi * 2.0 * PI / nphi as f64;
                for a in 0..k {
                    for b in 0..k {
                        gram[a * k + b] += wt * y[a] * y[b];
                    }
                }
            }
        }
        for a in 0..k {
            for b in 0..k {
                let e = if a == b { 1.0 } else { 0.0 };
                assert!((gram[a * k + b] - e).abs() < 1e-13, "{a},{b}: {}", gram[a * k + b]);
            }
        }
    }

    #[test]
    fn degree_one_is_coordinate() {
        let (t, p) = (0.7, 1.9);
        let y = sphere_modes(1, t, p);
        let c = (3.0 / (4.0 * PI)).sqrt();
        assert!((y[sphere_index(1, 0)] - c * t.cos()).abs() < 1e-15);
        assert!((y[sphere_index(1, 1)] - c * t.sin() * p.cos()).abs() < 1e-15);
        assert!((y[sphere_index(1, -1)] - c * t.sin() * p.sin()).abs() < 1e-15);
    }
}
