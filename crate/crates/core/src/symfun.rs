//! Normalized elementary symmetric functions `P_k = sigma_k / C(n, k)`, their
//! polarized (mixed) forms, Garding cones and the classical inequalities
//! relating them.
//!
//! Matrix arguments are plain `DMatrix<f64>`; most functions accept general
//! square matrices since `sigma_k` is defined through the characteristic
//! polynomial. [`SymMatrix`] is used where symmetry is part of the contract.

use nalgebra::{DMatrix, SymmetricEigen};
use serde::{Deserialize, Serialize};
use thiserror::Error;

/// Relative gap below which an inequality is reported as an equality.
pub const EQUALITY_TOL: f64 = 1e-9;

/// Cone membership tolerance, relative to the matrix norm.
pub const CONE_TOL: f64 = 1e-10;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum SymfunError {
    #[error("index k={k} out of range for dimension {n}")]
    IndexOutOfRange { k: usize, n: usize },
    #[error("argument is not in the cone Gamma_{k}")]
    NotInCone { k: usize },
    #[error("combined index {value} is not an integer in 0..={n}")]
    NonIntegerIndex { value: f64, n: usize },
    #[error("weights must satisfy alpha + beta = 1 with alpha, beta in (0, 1); got alpha={alpha}")]
    InvalidWeights { alpha: f64 },
    #[error("mixed evaluation with {k} slots in dimension {n} is not supported")]
    MixedTooLarge { k: usize, n: usize },
    #[error("dimension mismatch: expected {expected}, got {got}")]
    DimensionMismatch { expected: usize, got: usize },
    #[error("matrix is not square and symmetric")]
    NotSymmetric,
}

pub type Result<T> = std::result::Result<T, SymfunError>;

/// Binomial coefficient as a float (exact for the small sizes used here).
pub fn binomial(n: usize, k: usize) -> f64 {
    if k > n {
        return 0.0;
    }
    let k = k.min(n - k);
    (0..k).fold(1.0, |acc, i| acc * (n - i) as f64 / (i + 1) as f64)
}

fn factorial(k: usize) -> f64 {
    (1..=k).map(|i| i as f64).product()
}

/// A symmetric square matrix.
#[derive(Debug, Clone, PartialEq)]
pub struct SymMatrix(DMatrix<f64>);

impl SymMatrix {
    /// Accepts a square matrix whose asymmetry is at round-off level and
    /// stores its symmetric part.
    pub fn try_new(m: DMatrix<f64>) -> Result<Self> {
        if !m.is_square() {
            return Err(SymfunError::NotSymmetric);
        }
        let scale = 1.0 + m.amax();
        let asym = (&m - m.transpose()).amax();
        if asym > 1e-12 * scale {
            return Err(SymfunError::NotSymmetric);
        }
        Ok(Self((&m + m.transpose()) * 0.5))
    }

    pub fn from_diagonal(d: &[f64]) -> Self {
        Self(DMatrix::from_diagonal(&nalgebra::DVector::from_column_slice(d)))
    }

    pub fn identity(n: usize) -> Self {
        Self(DMatrix::identity(n, n))
    }

    pub fn dim(&self) -> usize {
        self.0.nrows()
    }

    pub fn as_matrix(&self) -> &DMatrix<f64> {
        &self.0
    }

    pub fn into_matrix(self) -> DMatrix<f64> {
        self.0
    }

    /// Eigenvalues in ascending order.
    pub fn eigenvalues(&self) -> Vec<f64> {
        let mut ev: Vec<f64> = SymmetricEigen::new(self.0.clone()).eigenvalues.iter().copied().collect();
        ev.sort_by(|a, b| a.total_cmp(b));
        ev
    }
}

/// Unnormalized `sigma_0 ..= sigma_n` of a tuple: coefficients of `prod (1 + t x_i)`.
pub fn elem_sym_raw(lambda: &[f64]) -> Vec<f64> {
    let n = lambda.len();
    let mut e = vec![0.0; n + 1];
    e[0] = 1.0;
    for (m, &x) in lambda.iter().enumerate() {
        for j in (1..=m + 1).rev() {
            e[j] += x * e[j - 1];
        }
    }
    e
}

/// Normalized `P_0 ..= P_n` of a tuple.
pub fn elem_sym(lambda: &[f64]) -> Vec<f64> {
    let n = lambda.len();
    elem_sym_raw(lambda)
        .into_iter()
        .enumerate()
        .map(|(k, s)| s / binomial(n, k))
        .collect()
}

/// `P_k` of a tuple; zero for `k > n`.
pub fn elem_sym_k(lambda: &[f64], k: usize) -> f64 {
    elem_sym(lambda).get(k).copied().unwrap_or(0.0)
}

/// Unnormalized `sigma_0 ..= sigma_n` of a general square matrix, read off the
/// characteristic polynomial of its Hessenberg form.
pub fn sigma_matrix(a: &DMatrix<f64>) -> Vec<f64> {
    let n = a.nrows();
    match n {
        0 => vec![1.0],
        1 => vec![1.0, a[(0, 0)]],
        2 => vec![
            1.0,
            a[(0, 0)] + a[(1, 1)],
            a[(0, 0)] * a[(1, 1)] - a[(0, 1)] * a[(1, 0)],
        ],
        _ => {
            let h = a.clone().hessenberg().h();
            // p[m] holds det(t I - H_m) for the leading m x m block, ascending in t.
            let mut p: Vec<Vec<f64>> = vec![vec![1.0]];
            for m in 0..n {
                let prev = &p[m];
                let mut next = vec![0.0; m + 2];
                for (d, &c) in prev.iter().enumerate() {
                    next[d + 1] += c;
                    next[d] -= h[(m, m)] * c;
                }
                let mut prod = 1.0;
                for i in (0..m).rev() {
                    prod *= h[(i + 1, i)];
                    let coef = h[(i, m)] * prod;
                    if coef != 0.0 {
                        for (d, &c) in p[i].iter().enumerate() {
                            next[d] -= coef * c;
                        }
                    }
                }
                p.push(next);
            }
            let cp = &p[n];
            (0..=n)
                .map(|k| if k % 2 == 0 { cp[n - k] } else { -cp[n - k] })
                .collect()
        }
    }
}

/// Normalized `P_0 ..= P_n` of a square matrix (eigen-free).
pub fn elem_sym_matrix(a: &DMatrix<f64>) -> Vec<f64> {
    let n = a.nrows();
    sigma_matrix(a)
        .into_iter()
        .enumerate()
        .map(|(k, s)| s / binomial(n, k))
        .collect()
}

/// Same as [`elem_sym_matrix`] but through the eigenvalues; kept as a cross-check.
pub fn elem_sym_matrix_eigen(a: &SymMatrix) -> Vec<f64> {
    elem_sym(&a.eigenvalues())
}

/// Largest `k` such that `P_1 .. P_k` are all positive beyond the tolerance
/// `CONE_TOL * scale^j`.
fn cone_index(p: &[f64], scale: f64) -> usize {
    p.iter()
        .enumerate()
        .skip(1)
        .take_while(|(j, &v)| v > CONE_TOL * scale.powi(*j as i32))
        .count()
}

/// Largest `k` with `lambda` in the Garding cone `Gamma_k` (0 if none).
pub fn gamma_index(lambda: &[f64]) -> usize {
    let scale = lambda.iter().map(|x| x * x).sum::<f64>().sqrt();
    cone_index(&elem_sym(lambda), scale)
}

/// Largest `k` with the matrix in `Gamma_k` (0 if none).
pub fn gamma_index_matrix(a: &DMatrix<f64>) -> usize {
    cone_index(&elem_sym_matrix(a), a.norm())
}

pub fn in_gamma_k(lambda: &[f64], k: usize) -> bool {
    gamma_index(lambda) >= k
}

/// Newton tensor `T^k(A)`: `T^0 = I`, `T^k = sigma_k I - T^{k-1} A`.
/// Its transpose is the derivative of `sigma_{k+1}` with respect to `A`.
pub fn newton_tensor(a: &DMatrix<f64>, k: usize) -> Result<DMatrix<f64>> {
    let n = a.nrows();
    if k > n {
        return Err(SymfunError::IndexOutOfRange { k, n });
    }
    let s = sigma_matrix(a);
    let mut t = DMatrix::identity(n, n);
    for &sj in s.iter().take(k + 1).skip(1) {
        t = DMatrix::identity(n, n) * sj - &t * a;
    }
    Ok(t)
}

fn check_slots(mats: &[&DMatrix<f64>]) -> Result<usize> {
    let n = mats.first().map_or(0, |m| m.nrows());
    for m in mats {
        if m.nrows() != n || m.ncols() != n {
            return Err(SymfunError::DimensionMismatch { expected: n, got: m.nrows().max(m.ncols()) });
        }
    }
    if mats.len() > n {
        return Err(SymfunError::IndexOutOfRange { k: mats.len(), n });
    }
    Ok(n)
}

/// Polarization: `k! sigma_k(A^1..A^k) = sum_S (-1)^{k-|S|} sigma_k(sum_S A^s)`.
fn mixed_sigma_polarized(mats: &[&DMatrix<f64>], n: usize) -> f64 {
    let k = mats.len();
    let mut acc = 0.0;
    for mask in 1u32..(1 << k) {
        let mut sum = DMatrix::zeros(n, n);
        for (s, m) in mats.iter().enumerate() {
            if mask & (1 << s) != 0 {
                sum += *m;
            }
        }
        let v = sigma_matrix(&sum)[k];
        if (k - mask.count_ones() as usize) % 2 == 0 {
            acc += v;
        } else {
            acc -= v;
        }
    }
    acc / factorial(k)
}

fn small_det(m: &mut [f64], k: usize) -> f64 {
    let mut det = 1.0;
    for c in 0..k {
        let piv = (c..k)
            .max_by(|&a, &b| m[a * k + c].abs().total_cmp(&m[b * k + c].abs()))
            .unwrap_or(c);
        if m[piv * k + c] == 0.0 {
            return 0.0;
        }
        if piv != c {
            for j in 0..k {
                m.swap(piv * k + j, c * k + j);
            }
            det = -det;
        }
        let d = m[c * k + c];
        det *= d;
        for r in c + 1..k {
            let f = m[r * k + c] / d;
            for j in c..k {
                m[r * k + j] -= f * m[c * k + j];
            }
        }
    }
    det
}

/// Generalized Kronecker expansion: sum over ordered tuples of distinct indices
/// of the determinant whose row `s` is taken from `A^s`.
fn mixed_sigma_expanded(mats: &[&DMatrix<f64>], n: usize) -> f64 {
    let k = mats.len();
    let mut idx = Vec::with_capacity(k);
    let mut used = vec![false; n];
    let mut buf = vec![0.0; k * k];
    fn rec(
        mats: &[&DMatrix<f64>],
        n: usize,
        idx: &mut Vec<usize>,
        used: &mut [bool],
        buf: &mut [f64],
    ) -> f64 {
        let k = mats.len();
        if idx.len() == k {
            for s in 0..k {
                for t in 0..k {
                    buf[s * k + t] = mats[s][(idx[s], idx[t])];
                }
            }
            return small_det(buf, k);
        }
        let mut acc = 0.0;
        for i in 0..n {
            if !used[i] {
                used[i] = true;
                idx.push(i);
                acc += rec(mats, n, idx, used, buf);
                idx.pop();
                used[i] = false;
            }
        }
        acc
    }
    rec(mats, n, &mut idx, &mut used, &mut buf) / factorial(k)
}

/// Unnormalized mixed `sigma_k(A^1, ..., A^k)` with `sigma_k(A, ..., A) = sigma_k(A)`.
///
/// Up to four slots this uses polarization in any dimension; beyond that the
/// Kronecker expansion is used and the dimension is limited to 6.
pub fn mixed_sigma(mats: &[&DMatrix<f64>]) -> Result<f64> {
    let n = check_slots(mats)?;
    let k = mats.len();
    match k {
        0 => Ok(1.0),
        1 => Ok(mats[0].trace()),
        _ if k <= 4 => Ok(mixed_sigma_polarized(mats, n)),
        _ if n <= 6 => Ok(mixed_sigma_expanded(mats, n)),
        _ => Err(SymfunError::MixedTooLarge { k, n }),
    }
}

/// Kronecker-expansion path exposed for cross-checking (`n <= 6`).
pub fn mixed_sigma_by_expansion(mats: &[&DMatrix<f64>]) -> Result<f64> {
    let n = check_slots(mats)?;
    if n > 6 {
        return Err(SymfunError::MixedTooLarge { k: mats.len(), n });
    }
    Ok(mixed_sigma_expanded(mats, n))
}

/// Normalized mixed `P_k(A^1, ..., A^k)`.
pub fn mixed_elem_sym(mats: &[&DMatrix<f64>]) -> Result<f64> {
    let n = check_slots(mats)?;
    Ok(mixed_sigma(mats)? / binomial(n, mats.len()))
}

/// `P_{k,l}(A, B)`: `P_{k+l}` with `k` copies of `A` and `l` copies of `B`.
pub fn mixed_pkl(a: &DMatrix<f64>, b: &DMatrix<f64>, k: usize, l: usize) -> Result<f64> {
    let mut slots: Vec<&DMatrix<f64>> = vec![a; k];
    slots.extend(std::iter::repeat_n(b, l));
    if slots.is_empty() {
        return Ok(1.0);
    }
    mixed_elem_sym(&slots)
}

/// `P_{k,l}` for diagonal arguments, read off `prod_i (1 + s x_i + t y_i)`.
pub fn mixed_pkl_diag(x: &[f64], y: &[f64], k: usize, l: usize) -> Result<f64> {
    let n = x.len();
    if y.len() != n {
        return Err(SymfunError::DimensionMismatch { expected: n, got: y.len() });
    }
    if k + l > n {
        return Ok(0.0);
    }
    let mut c = vec![vec![0.0; l + 1]; k + 1];
    c[0][0] = 1.0;
    for (&xi, &yi) in x.iter().zip(y) {
        for a in (0..=k).rev() {
            for b in (0..=l).rev() {
                let mut add = 0.0;
                if a > 0 {
                    add += c[a - 1][b] * xi;
                }
                if b > 0 {
                    add += c[a][b - 1] * yi;
                }
                c[a][b] += add;
            }
        }
    }
    Ok(c[k][l] / (binomial(k + l, l) * binomial(n, k + l)))
}

/// Signed gap of an inequality `lhs >= rhs`, with the magnitude of the terms
/// kept for relative comparisons.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Gap {
    pub gap: f64,
    pub scale: f64,
}

impl Gap {
    fn new(lhs: f64, rhs: f64) -> Self {
        Self { gap: lhs - rhs, scale: lhs.abs() + rhs.abs() }
    }

    pub fn relative(&self) -> f64 {
        if self.scale == 0.0 {
            0.0
        } else {
            self.gap / self.scale
        }
    }

    pub fn is_equality(&self) -> bool {
        self.relative().abs() < EQUALITY_TOL
    }
}

fn require_cone(lambda: &[f64], k: usize) -> Result<()> {
    if in_gamma_k(lambda, k) {
        Ok(())
    } else {
        Err(SymfunError::NotInCone { k })
    }
}

/// `P_l P_{k-1} - P_k P_{l-1} >= 0` for `lambda` in `Gamma_k`, `1 <= l < k <= n`.
pub fn newton_maclaurin_gap(lambda: &[f64], k: usize, l: usize) -> Result<Gap> {
    let n = lambda.len();
    if l == 0 || l >= k || k > n {
        return Err(SymfunError::IndexOutOfRange { k, n });
    }
    require_cone(lambda, k)?;
    let p = elem_sym(lambda);
    Ok(Gap::new(p[l] * p[k - 1], p[k] * p[l - 1]))
}

/// `P_{k alpha + l beta} >= P_k^alpha P_l^beta` with `alpha + beta = 1` and an
/// integer combined index.
pub fn interpolation_gap(lambda: &[f64], k: usize, l: usize, alpha: f64) -> Result<Gap> {
    let n = lambda.len();
    if !(alpha > 0.0 && alpha < 1.0) {
        return Err(SymfunError::InvalidWeights { alpha });
    }
    if k > n || l > n {
        return Err(SymfunError::IndexOutOfRange { k: k.max(l), n });
    }
    let beta = 1.0 - alpha;
    let m = k as f64 * alpha + l as f64 * beta;
    let mr = m.round();
    if (m - mr).abs() > 1e-9 || mr < 0.0 || mr > n as f64 {
        return Err(SymfunError::NonIntegerIndex { value: m, n });
    }
    require_cone(lambda, k.max(l))?;
    let p = elem_sym(lambda);
    Ok(Gap::new(p[mr as usize], p[k].powf(alpha) * p[l].powf(beta)))
}

/// Garding: `P_k(A^1..A^k) >= prod_i P_k(A^i)^{1/k}` for each `A^i` in `Gamma_k`.
pub fn garding_gap(mats: &[SymMatrix]) -> Result<Gap> {
    let k = mats.len();
    let refs: Vec<&DMatrix<f64>> = mats.iter().map(|m| m.as_matrix()).collect();
    let n = check_slots(&refs)?;
    if k == 0 {
        return Err(SymfunError::IndexOutOfRange { k, n });
    }
    let mut prod = 1.0;
    for m in &refs {
        if gamma_index_matrix(m) < k {
            return Err(SymfunError::NotInCone { k });
        }
        prod *= elem_sym_matrix(m)[k].powf(1.0 / k as f64);
    }
    Ok(Gap::new(mixed_elem_sym(&refs)?, prod))
}

/// `P_{k,l}(x, y) >= P_{k+l}(x)^{k/(k+l)} P_{k+l}(y)^{l/(k+l)}` for `x, y` in `Gamma_{k+l}`.
pub fn mixed_power_gap(x: &[f64], y: &[f64], k: usize, l: usize) -> Result<Gap> {
    let n = x.len();
    let m = k + l;
    if m == 0 || m > n {
        return Err(SymfunError::IndexOutOfRange { k: m, n });
    }
    require_cone(x, m)?;
    require_cone(y, m)?;
    let lhs = mixed_pkl_diag(x, y, k, l)?;
    let px = elem_sym(x)[m];
    let py = elem_sym(y)[m];
    let (a, b) = (k as f64 / m as f64, l as f64 / m as f64);
    Ok(Gap::new(lhs, px.powf(a) * py.powf(b)))
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    // Brute-force oracle: sum of products over all k-subsets.
    fn sigma_bruteforce(x: &[f64], k: usize) -> f64 {
        let n = x.len();
        (0u32..(1 << n))
            .filter(|m| m.count_ones() as usize == k)
            .map(|m| (0..n).filter(|i| m & (1 << i) != 0).map(|i| x[i]).product::<f64>())
            .sum()
    }

    fn diag(d: &[f64]) -> DMatrix<f64> {
        SymMatrix::from_diagonal(d).into_matrix()
    }

    fn sym_from(n: usize, v: &[f64]) -> DMatrix<f64> {
        let mut m = DMatrix::zeros(n, n);
        let mut it = v.iter();
        for i in 0..n {
            for j in i..n {
                let x = *it.next().unwrap();
                m[(i, j)] = x;
                m[(j, i)] = x;
            }
        }
        m
    }

    #[test]
    fn small_tuple_values() {
        let p = elem_sym(&[1.0, 2.0, 3.0]);
        let want = [1.0, 2.0, 11.0 / 3.0, 6.0];
        for (a, b) in p.iter().zip(want) {
            assert!((a - b).abs() < 1e-15);
        }
        assert_eq!(elem_sym(&[]), vec![1.0]);
        assert_eq!(elem_sym_k(&[1.0, 2.0], 5), 0.0);
    }

    #[test]
    fn matches_subset_enumeration() {
        let x = [0.7, -1.3, 2.2, 0.1, 1.9, -0.4];
        let raw = elem_sym_raw(&x);
        for k in 0..=x.len() {
            assert!((raw[k] - sigma_bruteforce(&x, k)).abs() < 1e-12);
        }
    }

    #[test]
    fn hessenberg_path_matches_eigen_path() {
        let m = sym_from(5, &[
            2.0, 0.3, -0.1, 0.5, 0.2, 1.5, 0.4, -0.3, 0.1, 3.0, 0.2, 0.0, 1.1, -0.6, 0.8,
        ]);
        let a = SymMatrix::try_new(m.clone()).unwrap();
        let p = elem_sym_matrix(&m);
        let q = elem_sym_matrix_eigen(&a);
        for (x, y) in p.iter().zip(&q) {
            assert!((x - y).abs() <= 1e-12 * (1.0 + y.abs()), "{x} vs {y}");
        }
    }

    #[test]
    fn mixed_two_slot_matches_determinant_polarization() {
        let a = diag(&[1.0, 2.0]);
        let b = diag(&[3.0, 4.0]);
        // P_2(A, B) = (det(A + B) - det A - det B) / 2
        let oracle = ((&a + &b).determinant() - a.determinant() - b.determinant()) / 2.0;
        let v = mixed_elem_sym(&[&a, &b]).unwrap();
        assert!((v - oracle).abs() < 1e-14);
        assert!((v - 5.0).abs() < 1e-14);
    }

    #[test]
    fn polarization_matches_expansion() {
        let mats: Vec<DMatrix<f64>> = (0..4)
            .map(|s| {
                let v: Vec<f64> = (0..15).map(|i| ((i * 7 + s * 13) % 11) as f64 / 5.0 - 1.0).collect();
                sym_from(5, &v)
            })
            .collect();
        let refs: Vec<&DMatrix<f64>> = mats.iter().collect();
        for k in 1..=4 {
            let a = mixed_sigma(&refs[..k]).unwrap();
            let b = mixed_sigma_by_expansion(&refs[..k]).unwrap();
            assert!((a - b).abs() < 1e-10 * (1.0 + b.abs()), "k={k}: {a} vs {b}");
        }
    }

    #[test]
    fn large_mixed_rejected() {
        let m = DMatrix::<f64>::identity(7, 7);
        let refs = vec![&m; 5];
        assert!(matches!(mixed_sigma(&refs), Err(SymfunError::MixedTooLarge { .. })));
    }

    #[test]
    fn newton_tensor_values() {
        let a = diag(&[1.0, 2.0, 3.0]);
        let t1 = newton_tensor(&a, 1).unwrap();
        assert_eq!(t1, diag(&[5.0, 4.0, 3.0]));
        let t2 = newton_tensor(&a, 2).unwrap();
        assert!((t2.trace() - 11.0).abs() < 1e-13);
    }

    #[test]
    fn cone_examples() {
        assert_eq!(gamma_index_matrix(&diag(&[3.0, -1.0])), 1);
        assert_eq!(gamma_index_matrix(&DMatrix::zeros(3, 3)), 0);
        assert_eq!(gamma_index(&[1.0, 2.0, 3.0]), 3);
    }

    #[test]
    fn inequality_examples() {
        let g = newton_maclaurin_gap(&[1.0, 2.0, 3.0], 2, 1).unwrap();
        assert!((g.gap - 1.0 / 3.0).abs() < 1e-14);
        let gg = garding_gap(&[SymMatrix::from_diagonal(&[1.0, 2.0]), SymMatrix::from_diagonal(&[3.0, 4.0])]).unwrap();
        assert!((gg.gap - (5.0 - 24f64.sqrt())).abs() < 1e-14);
        let eq = garding_gap(&[SymMatrix::from_diagonal(&[1.0, 2.0]), SymMatrix::from_diagonal(&[2.0, 4.0])]).unwrap();
        assert!(eq.is_equality());
        assert!(matches!(interpolation_gap(&[1.0, 2.0, 3.0], 2, 1, 0.3), Err(SymfunError::NonIntegerIndex { .. })));
        let ip = interpolation_gap(&[1.0, 2.0, 3.0], 3, 1, 0.5).unwrap();
        assert!((ip.gap - (11.0 / 3.0 - (6.0f64 * 2.0).sqrt())).abs() < 1e-14);
        assert!(matches!(newton_maclaurin_gap(&[1.0, -3.0], 2, 1), Err(SymfunError::NotInCone { k: 2 })));
    }

    #[test]
    fn mixed_diag_matches_general() {
        let x = [1.0, 0.5, 2.0, -0.2];
        let y = [0.3, 1.5, 0.7, 1.1];
        for k in 0..=2 {
            for l in 0..=2 {
                let a = mixed_pkl_diag(&x, &y, k, l).unwrap();
                let b = mixed_pkl(&diag(&x), &diag(&y), k, l).unwrap();
                assert!((a - b).abs() < 1e-12, "{k},{l}: {a} vs {b}");
            }
        }
    }

    fn mat_strategy(n: usize) -> impl Strategy<Value = DMatrix<f64>> {
        proptest::collection::vec(-2.0..2.0f64, n * (n + 1) / 2).prop_map(move |v| sym_from(n, &v))
    }

    proptest! {
        #[test]
        fn mixed_is_symmetric_and_multilinear(
            a in mat_strategy(4), b in mat_strategy(4), c in mat_strategy(4), t in -2.0..2.0f64
        ) {
            let v = mixed_sigma(&[&a, &b, &c]).unwrap();
            let w = mixed_sigma(&[&c, &a, &b]).unwrap();
            prop_assert!((v - w).abs() <= 1e-10 * (1.0 + v.abs()));
            let ta = &a * t + &b;
            let lhs = mixed_sigma(&[&ta, &b, &c]).unwrap();
            let rhs = t * v + mixed_sigma(&[&b, &b, &c]).unwrap();
            prop_assert!((lhs - rhs).abs() <= 1e-9 * (1.0 + lhs.abs() + rhs.abs()));
        }

        #[test]
        fn diagonal_of_mixed_is_plain(a in mat_strategy(4), k in 0usize..=4) {
            let refs = vec![&a; k];
            let m = if k == 0 { 1.0 } else { mixed_elem_sym(&refs).unwrap() };
            let p = elem_sym_matrix(&a)[k];
            prop_assert!((m - p).abs() <= 1e-10 * (1.0 + p.abs()));
        }

        #[test]
        fn identity_slots_reduce_order(a in mat_strategy(3), b in mat_strategy(3)) {
            let id = DMatrix::identity(3, 3);
            let full = mixed_elem_sym(&[&a, &b, &id]).unwrap();
            let red = mixed_elem_sym(&[&a, &b]).unwrap();
            prop_assert!((full - red).abs() <= 1e-10 * (1.0 + red.abs()));
        }

        #[test]
        fn newton_tensor_trace(a in mat_strategy(4), k in 0usize..=4) {
            let t = newton_tensor(&a, k).unwrap();
            let s = sigma_matrix(&a)[k];
            prop_assert!((t.trace() - (4 - k) as f64 * s).abs() <= 1e-9 * (1.0 + s.abs()));
        }

        #[test]
        fn newton_maclaurin_holds_in_cone(x in proptest::collection::vec(0.01..3.0f64, 2..7), shift in -0.5..0.0f64) {
            let y: Vec<f64> = x.iter().enumerate().map(|(i, v)| if i == 0 { v + shift } else { *v }).collect();
            let kmax = gamma_index(&y);
            for k in 2..=kmax {
                for l in 1..k {
                    let g = newton_maclaurin_gap(&y, k, l).unwrap();
                    prop_assert!(g.relative() >= -1e-12);
                }
            }
        }
    }
}
