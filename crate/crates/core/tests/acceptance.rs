//! Acceptance suite: one numbered criterion per check, each with a runtime
//! budget. Prints a PASS/FAIL line per criterion and exits non-zero if any
//! criterion fails.

use std::sync::Arc;
use std::time::{Duration, Instant};

use minklab::body::{Shape, SupportBody};
use minklab::functions::{BivariateFn, ScalarFn};
use minklab::hypotheses::{
    alpha_constraints, alpha_star, check_phi_product, phi_product, region_member, Region, SampleGrid, Witness,
};
use minklab::integrals::{identity_battery, BatterySpec};
use minklab::solver::{
    newton_solve, residual, sweep, Family, Linearization, NewtonOptions, ProblemSpec, SweepSpec,
};
use minklab::spectral::{bm_eigenvalues, bm_gap, multiplicity, radial_weight_gap, SpectralProblem};
use minklab::sphere::{make_grid, GridSpec, LatitudeScheme, ScalarField, SphereGrid};
use minklab::symfun::{
    garding_gap, in_gamma_k, interpolation_gap, mixed_power_gap, newton_maclaurin_gap, Gap, SymMatrix,
};
use nalgebra::DMatrix;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

type Check = Result<String, String>;

fn ensure(ok: bool, msg: impl FnOnce() -> String) -> Result<(), String> {
    if ok {
        Ok(())
    } else {
        Err(msg())
    }
}

fn sup(v: &[f64]) -> f64 {
    v.iter().fold(0.0, |m, x| m.max(x.abs()))
}

// 1 -------------------------------------------------------------------------

fn gamma_tuple(rng: &mut impl Rng, n: usize, k: usize) -> Vec<f64> {
    loop {
        let shift = rng.random_range(0.0..2.0);
        let v: Vec<f64> = (0..n).map(|_| rng.random_range(-2.0..2.0) + shift).collect();
        if in_gamma_k(&v, k) {
            return v;
        }
    }
}

fn gamma_matrix(rng: &mut impl Rng, n: usize, k: usize) -> SymMatrix {
    loop {
        let shift = rng.random_range(0.0..2.0);
        let mut m = DMatrix::from_fn(n, n, |_, _| rng.random_range(-1.0..1.0));
        m = (&m + m.transpose()) * 0.5 + DMatrix::identity(n, n) * shift;
        let s = SymMatrix::try_new(m).unwrap();
        if in_gamma_k(&s.eigenvalues(), k) {
            return s;
        }
    }
}

fn criterion_1() -> Check {
    const FLOOR: f64 = -1e-12;
    let mut rng = ChaCha8Rng::seed_from_u64(1);
    let mut worst = f64::INFINITY;
    let mut evaluated = 0usize;
    let mut track = |g: Gap, what: &str| -> Result<(), String> {
        evaluated += 1;
        worst = worst.min(g.relative());
        ensure(g.relative() >= FLOOR, || format!("{what}: relative gap {}", g.relative()))
    };
    for _ in 0..10_000 {
        let n = rng.random_range(2..=6);
        let k = rng.random_range(1..=n);
        let lam = gamma_tuple(&mut rng, n, k);
        for l in 1..k {
            track(newton_maclaurin_gap(&lam, k, l).unwrap(), "newton-maclaurin")?;
        }
        // P_{(k+l)/2} >= sqrt(P_k P_l) when k + l is even
        for l in (0..k).filter(|l| (k + l) % 2 == 0) {
            track(interpolation_gap(&lam, k, l, 0.5).unwrap(), "interpolation")?;
        }
        let m = rng.random_range(1..=n);
        let x = gamma_tuple(&mut rng, n, m);
        let y = gamma_tuple(&mut rng, n, m);
        let split = rng.random_range(0..=m);
        track(mixed_power_gap(&x, &y, split, m - split).unwrap(), "mixed power")?;
        let g = rng.random_range(1..=n.min(4));
        let mats: Vec<SymMatrix> = (0..g).map(|_| gamma_matrix(&mut rng, n, g)).collect();
        track(garding_gap(&mats).unwrap(), "garding")?;
    }

    // equality at proportional inputs
    let mut eq_worst: f64 = 0.0;
    for n in 2..=6 {
        let c = rng.random_range(0.5..3.0);
        let lam = vec![c; n];
        for k in 2..=n {
            for l in 1..k {
                eq_worst = eq_worst.max(newton_maclaurin_gap(&lam, k, l).unwrap().relative().abs());
            }
        }
        for k in 1..=n.min(4) {
            let a = gamma_matrix(&mut rng, n, k);
            let mats: Vec<SymMatrix> = (0..k)
                .map(|i| SymMatrix::try_new(a.as_matrix() * (1.0 + i as f64)).unwrap())
                .collect();
            eq_worst = eq_worst.max(garding_gap(&mats).unwrap().relative().abs());
        }
        let x = gamma_tuple(&mut rng, n, n);
        let y: Vec<f64> = x.iter().map(|v| 2.5 * v).collect();
        for k in 0..=n {
            eq_worst = eq_worst.max(mixed_power_gap(&x, &y, k, n - k).unwrap().relative().abs());
        }
    }
    ensure(eq_worst <= 1e-12, || format!("equality cases: worst |gap| {eq_worst:e}"))?;
    Ok(format!("{evaluated} gaps, worst relative {worst:.2e}; equality cases within {eq_worst:.1e}"))
}

// 2 -------------------------------------------------------------------------

fn criterion_2() -> Check {
    let mut notes = Vec::new();
    for (n, tol) in [(1usize, 1e-8), (2, 1e-3)] {
        let spec = BatterySpec::default_for(n);
        let reports = identity_battery(&spec).map_err(|e| e.to_string())?;
        let bodies: std::collections::BTreeSet<&str> = reports.iter().map(|r| r.name.split('/').next().unwrap()).collect();
        ensure(bodies.len() == 20, || format!("n={n}: {} bodies", bodies.len()))?;
        let worst = reports.iter().max_by(|a, b| a.relative().total_cmp(&b.relative())).unwrap();
        ensure(worst.relative() <= tol, || format!("n={n}: {} relative {:e}", worst.name, worst.relative()))?;
        let mut min_order = f64::INFINITY;
        if n == 2 {
            for r in &reports {
                if let Some(o) = r.order {
                    min_order = min_order.min(o);
                    ensure(o >= 1.6, || format!("n=2: {} order {o:.2}", r.name))?;
                }
            }
        }
        let alphas = ["alpha=-1]", "alpha=0]", "alpha=1]", "alpha=2]"];
        ensure(alphas.iter().all(|a| reports.iter().any(|r| r.name.ends_with(a))), || "missing weights".into())?;
        notes.push(if n == 1 {
            format!("n=1 {} residuals <= {:.1e}", reports.len(), worst.relative())
        } else {
            format!("n=2 {} residuals <= {:.1e}, order >= {min_order:.2}", reports.len(), worst.relative())
        });
    }
    Ok(notes.join("; "))
}

// 3 -------------------------------------------------------------------------

fn random_field(grid: &SphereGrid, rng: &mut impl Rng) -> ScalarField {
    let basis = grid.harmonic_basis(5);
    let mut f = vec![0.0; grid.len()];
    for (_, _, h) in basis.iter().skip(1) {
        let c = rng.random_range(-1.0..1.0);
        for (fi, hi) in f.iter_mut().zip(h.iter()) {
            *fi += c * hi;
        }
    }
    f.into()
}

fn criterion_3() -> Check {
    let mut rng = ChaCha8Rng::seed_from_u64(3);
    let mut worst_eig: f64 = 0.0;
    for n in [1usize, 2] {
        let g = make_grid(n, &if n == 1 { vec![256] } else { vec![64, 128] }).map_err(|e| e.to_string())?;
        let s = Shape::unit_sphere().build(&g).map_err(|e| e.to_string())?;
        let vals = bm_eigenvalues(&SpectralProblem::top(&s).unwrap(), n + 3).map_err(|e| e.to_string())?;
        ensure((vals[0] - 1.0).abs() <= 0.01, || format!("sphere n={n}: smallest eigenvalue {}", vals[0]))?;
        let mult = multiplicity(&vals, 0.01);
        ensure(mult == n + 1, || format!("sphere n={n}: multiplicity {mult}"))?;
    }
    let mut worst_gap = f64::INFINITY;
    let mut worst_weighted = f64::INFINITY;
    for j in 0..20u64 {
        for n in [1usize, 2] {
            let g = make_grid(n, &if n == 1 { vec![256] } else { vec![32, 64] }).map_err(|e| e.to_string())?;
            let b = Shape::random(n, 1.0, 4, 0.15, false, 100 + j).build(&g).map_err(|e| e.to_string())?;
            let top = SpectralProblem::top(&b).unwrap();
            let v = bm_eigenvalues(&top, 1).map_err(|e| e.to_string())?[0];
            worst_eig = worst_eig.max((v - 1.0).abs());
            ensure((v - 1.0).abs() <= 0.01, || format!("body {j} n={n}: smallest eigenvalue {v}"))?;
            for _ in 0..3 {
                let gap = bm_gap(&top, &random_field(&g, &mut rng)).map_err(|e| e.to_string())?;
                worst_gap = worst_gap.min(gap.relative());
                ensure(gap.gap >= -1e-8 * gap.scale, || format!("body {j} n={n}: bm gap {:e}", gap.relative()))?;
            }
            let mut cases: Vec<(usize, f64)> = [-1.0, 0.0, 0.5, 2.0].iter().map(|&a| (n, a)).collect();
            if n == 2 {
                cases.extend([0.0, 0.5, 1.0].iter().map(|&a| (1, a)));
            }
            for (k, a) in cases {
                let p = SpectralProblem::new(&b, k).unwrap();
                let gap = radial_weight_gap(&p, a).map_err(|e| e.to_string())?;
                worst_weighted = worst_weighted.min(gap.relative());
                ensure(gap.gap >= -1e-8 * gap.scale, || format!("body {j} n={n} k={k} alpha={a}: {:e}", gap.relative()))?;
            }
        }
    }
    Ok(format!(
        "sphere multiplicity n+1; |lambda_1 - 1| <= {worst_eig:.1e} on 20 bodies; bm gap >= {worst_gap:.1e}; weighted gap >= {worst_weighted:.1e}"
    ))
}

// 4 -------------------------------------------------------------------------

fn families(n: usize) -> Vec<Family> {
    let mut v = vec![
        Family::LpDual { p: 2.0, q: 1.0 },
        Family::LpDual { p: -1.5, q: 2.5 },
        Family::LpGauss { p: 1.5 },
        Family::OrliczCm { k: n, phi: ScalarFn::power(-0.5) },
        Family::QuotientIsotropic { k: n, l: n - 1, psi: BivariateFn::Product { u_exponent: 0.5, r: ScalarFn::power(1.0) } },
    ];
    for k in 1..=n {
        v.push(Family::LpDualCm { k, p: 0.5, q: 2.0 });
    }
    if n == 2 {
        v.push(Family::OrliczCm { k: 1, phi: ScalarFn::Exp { coef: 1.0, rate: -1.0 } });
    }
    v
}

fn criterion_4() -> Check {
    let mut worst: f64 = 0.0;
    let mut count = 0;
    for n in [1usize, 2] {
        let g = make_grid(n, &if n == 1 { vec![128] } else { vec![16, 32] }).unwrap();
        let s = Shape::unit_sphere().build(&g).unwrap();
        for f in families(n) {
            let spec = ProblemSpec::new(n, f.clone()).normalized_for_unit_sphere();
            let r = sup(&residual(&s, &spec).map_err(|e| e.to_string())?);
            worst = worst.max(r);
            count += 1;
            ensure(r <= 1e-12, || format!("unit sphere n={n} {f:?}: {r:e}"))?;
        }
    }
    let g = make_grid(1, &[256]).unwrap();
    let a: f64 = 1.6;
    let e = Shape::Ellipsoid { axes: vec![a, 1.0 / a] }.build(&g).unwrap();
    let re = sup(&residual(&e, &ProblemSpec::new(1, Family::LpDual { p: -2.0, q: 2.0 })).unwrap());
    ensure(re <= 1e-8, || format!("ellipse residual {re:e}"))?;

    let mut scale_err: f64 = 0.0;
    for n in [1usize, 2] {
        let g = make_grid(n, &if n == 1 { vec![128] } else { vec![16, 32] }).unwrap();
        let b = Shape::random(n, 1.0, 4, 0.15, false, 7).build(&g).unwrap();
        for p in [-1.0, 0.5, 2.0] {
            let spec = ProblemSpec::new(n, Family::LpDual { p, q: p });
            let r0 = residual(&b, &spec).unwrap();
            let r1 = residual(&b.scaled(1.7).unwrap(), &spec).unwrap();
            let d = r0.iter().zip(r1.iter()).map(|(x, y)| (x - y).abs()).fold(0.0, f64::max);
            scale_err = scale_err.max(d);
        }
    }
    // log residuals built from spectral derivatives: round-off sits near 1e-11
    ensure(scale_err <= 1e-10, || format!("p = q scaling changed the residual by {scale_err:e}"))?;
    Ok(format!(
        "{count} sphere residuals <= {worst:.1e}; ellipse ab=1 {re:.1e}; p=q scaling {scale_err:.1e}"
    ))
}

// 5 -------------------------------------------------------------------------

fn criterion_5() -> Check {
    let mut worst: f64 = 0.0;
    let mut pairs = 0;
    for n in [1usize, 2] {
        let g = make_grid(n, &if n == 1 { vec![64] } else { vec![12, 24] }).unwrap();
        for f in families(n) {
            let spec = ProblemSpec::new(n, f.clone());
            for j in 0..20u64 {
                let b = Shape::random(n, 1.0, 3, 0.12, false, 500 + j).build(&g).unwrap();
                let dir = Shape::random(n, 0.0, 3, 1.0, false, 900 + j);
                let Shape::Perturbed { modes, .. } = dir else { unreachable!() };
                let mut dv = minklab::body::perturbation(&g, &modes).unwrap();
                dv.0.iter_mut().for_each(|x| *x += 0.3);
                let lin = Linearization::at(&b, &spec).map_err(|e| e.to_string())?.apply(&g, &dv).map_err(|e| e.to_string())?;
                let h = 1e-5;
                let shifted = |s: f64| -> Result<ScalarField, String> {
                    let u: ScalarField = b.support().iter().zip(dv.iter()).map(|(u, d)| u + s * d).collect();
                    let body = SupportBody::from_function(g.clone(), u).map_err(|e| e.to_string())?;
                    residual(&body, &spec).map_err(|e| e.to_string())
                };
                let (rp, rm) = (shifted(h)?, shifted(-h)?);
                let fd: Vec<f64> = rp.iter().zip(rm.iter()).map(|(a, b)| (a - b) / (2.0 * h)).collect();
                let err = fd.iter().zip(lin.iter()).map(|(a, b)| (a - b).abs()).fold(0.0, f64::max) / sup(&fd).max(1e-300);
                worst = worst.max(err);
                pairs += 1;
                ensure(err <= 1e-6, || format!("n={n} {f:?} pair {j}: relative error {err:e}"))?;
            }
        }
    }
    Ok(format!("{pairs} (body, direction) pairs, worst relative error {worst:.1e}"))
}

// 6 -------------------------------------------------------------------------

/// 5 x 5 lattice strictly inside the general upper region.
fn interior_points(n: usize) -> Vec<(f64, f64)> {
    let nf = n as f64;
    let mut pts = Vec::new();
    for i in 1..=5 {
        let p = -1.0 - nf * i as f64 / 6.0;
        let upper = nf + 0.5 + (0.25 - (1.0 + p) * (nf + 1.0 + p) / (nf * (nf + 2.0))).sqrt();
        for j in 1..=5 {
            pts.push((p, nf + 1.0 + (upper - nf - 1.0) * j as f64 / 6.0));
        }
    }
    pts
}

fn degenerate_solutions(n: usize) -> Result<Vec<SupportBody>, String> {
    let (grid, axes, tol): (Arc<SphereGrid>, Vec<Vec<f64>>, f64) = if n == 1 {
        (make_grid(1, &[128]).unwrap(), vec![vec![1.25, 0.8], vec![1.6, 0.5]], 1e-10)
    } else {
        let g = SphereGrid::new(GridSpec::sphere(16, 32).with_scheme(LatitudeScheme::Uniform)).unwrap();
        (Arc::new(g), vec![vec![1.2, 1.0 / 1.2, 1.0], vec![1.0, 1.2, 1.0 / 1.2]], 1e-7)
    };
    let nf = n as f64;
    let spec = ProblemSpec::new(n, Family::LpDual { p: -nf - 1.0, q: nf + 1.0 });
    let bump = grid.harmonic(3, if n == 1 { 0 } else { 1 });
    let mut out = Vec::new();
    for ax in axes {
        let e = Shape::Ellipsoid { axes: ax }.build(&grid).map_err(|e| e.to_string())?;
        let u: ScalarField = e.support().iter().zip(bump.iter()).map(|(u, h)| u + 0.01 * h).collect();
        let init = SupportBody::from_support(grid.clone(), u).map_err(|e| e.to_string())?;
        let rep = newton_solve(&spec, &init, &NewtonOptions { tol, ..Default::default() }).map_err(|e| e.to_string())?;
        ensure(rep.converged && rep.residual <= tol, || format!("degenerate n={n}: residual {:e}", rep.residual))?;
        ensure(rep.roundness.deviation > 1e-3, || format!("degenerate n={n}: collapsed to a sphere"))?;
        out.push(rep.body);
    }
    Ok(out)
}

fn criterion_6() -> Check {
    let mut notes = Vec::new();
    for n in [1usize, 2] {
        let points = interior_points(n);
        for &(p, q) in &points {
            let v = region_member(Region::GeneralUpper, n, None, p, q).unwrap();
            ensure(v.satisfied, || format!("({p}, {q}) is not inside the region"))?;
        }
        let spec = SweepSpec {
            problem: ProblemSpec::new(n, Family::LpDual { p: -1.5, q: 2.0 }),
            points,
            inits_per_point: 10,
            seed: 6,
            grid: if n == 1 { GridSpec::circle(128) } else { GridSpec::sphere(16, 32) },
            amplitude: 0.15,
            max_degree: 4,
            radius_spread: 0.2,
            symmetric: false,
            warm_start: false,
            newton: NewtonOptions::default(),
        };
        let result = sweep(&spec).map_err(|e| e.to_string())?;
        let converged: usize = result.iter().map(|p| p.converged).sum();
        let round = result.iter().map(|p| p.max_roundness).fold(0.0, f64::max);
        let center = result.iter().map(|p| p.max_center).fold(0.0, f64::max);
        for pt in &result {
            ensure(pt.converged > 0, || format!("n={n} ({}, {}): no converged run", pt.p, pt.q))?;
            ensure(pt.max_roundness <= 1e-6 && pt.max_center <= 1e-6, || {
                format!("n={n} ({}, {}): roundness {:e}, center {:e}", pt.p, pt.q, pt.max_roundness, pt.max_center)
            })?;
        }
        let sols = degenerate_solutions(n)?;
        let m0 = sols[0].mean_support();
        let m1 = sols[1].mean_support();
        let dist = sols[0].support().iter().zip(sols[1].support().iter()).map(|(a, b)| (a / m0 - b / m1).abs()).fold(0.0, f64::max);
        ensure(dist > 1e-3, || format!("degenerate n={n}: solutions coincide"))?;
        notes.push(format!(
            "n={n}: {converged}/250 converged, roundness <= {round:.1e}, center <= {center:.1e}, degenerate point gives distinct ellipsoids"
        ));
    }
    Ok(notes.join("; "))
}

// 7 -------------------------------------------------------------------------

fn criterion_7() -> Check {
    let a = alpha_star(2, 1, 1.0).map_err(|e| e.to_string())?;
    let exact = (944f64.sqrt() - 30.0) / 22.0;
    let steps = 10_000_000;
    let scanned = (0..=steps)
        .map(|i| i as f64 / steps as f64)
        .filter(|&x| alpha_constraints(2, 1, 1.0, x).iter().all(|m| *m >= 0.0))
        .fold(0.0, f64::max);
    ensure((a - scanned).abs() <= 1e-6 && (a - exact).abs() <= 1e-6, || {
        format!("alpha_*(2,1,1) = {a}, scan {scanned}, closed form {exact}")
    })?;
    for n in 2..=8 {
        for k in 1..n {
            let z = alpha_star(n, k, 1.0 - k as f64).map_err(|e| e.to_string())?;
            ensure(z == 0.0, || format!("alpha_*({n},{k},{}) = {z}", 1 - k as i64))?;
        }
    }
    let mut rng = ChaCha8Rng::seed_from_u64(7);
    let mut worst = f64::INFINITY;
    for _ in 0..10_000 {
        let n = rng.random_range(2..=8);
        let k = rng.random_range(1..n);
        let p = 1.0 - k as f64 + rng.random_range(0.0..20.0);
        let a = alpha_star(n, k, p).map_err(|e| e.to_string())?;
        let m = alpha_constraints(n, k, p, a).into_iter().fold(f64::INFINITY, f64::min);
        worst = worst.min(m);
        ensure(m >= -1e-12, || format!("alpha_*({n},{k},{p}) = {a} violates by {m:e}"))?;
    }
    Ok(format!("alpha_*(2,1,1) = {a:.9} (scan {scanned:.7}); zero at p = 1-k; margins >= {worst:.1e}"))
}

// 8 -------------------------------------------------------------------------

fn criterion_8() -> Check {
    let grid = SampleGrid::default();
    ensure(check_phi_product(&ScalarFn::power(-0.5), 1, &grid).is_err(), || "k=1 accepted".into())?;
    for k in [2usize, 3, 4] {
        for p in [1.5, k as f64 + 0.5] {
            let v = check_phi_product(&ScalarFn::power(1.0 - p), k, &grid).map_err(|e| e.to_string())?;
            ensure(v.satisfied, || format!("k={k} p={p}: rejected"))?;
        }
        let phi = ScalarFn::power(1.0 - (k as f64 + 2.0));
        let v = check_phi_product(&phi, k, &grid).map_err(|e| e.to_string())?;
        ensure(!v.satisfied, || format!("k={k} p=k+2: accepted"))?;
        let Some(Witness::Pair { s, t }) = v.witness else {
            return Err(format!("k={k} p=k+2: no witness"));
        };
        let again = phi_product(&phi, k, s, t).map_err(|e| e.to_string())?;
        ensure(s != t && again >= 0.0 && Some(again) == v.value, || format!("k={k}: witness ({s}, {t}) gives {again}"))?;
    }
    let mut rng = ChaCha8Rng::seed_from_u64(8);
    let mut checked = 0;
    for _ in 0..100 {
        let n = rng.random_range(1..=5);
        let p = rng.random_range(-8.0..8.0);
        let q = rng.random_range(-8.0..8.0);
        for region in Region::ALL {
            let Some(dual) = region.dual() else { continue };
            let a = region_member(region, n, None, p, q).map_err(|e| e.to_string())?;
            let b = region_member(dual, n, None, -q, -p).map_err(|e| e.to_string())?;
            ensure(a.satisfied == b.satisfied, || format!("{region} at n={n} ({p}, {q}) disagrees with its dual"))?;
            ensure(a.dual_consistent == Some(true), || format!("{region}: dual flag"))?;
            checked += 1;
        }
    }
    Ok(format!("power phi accepted and rejected as expected with witnesses; {checked} duality checks"))
}

fn main() {
    let criteria: [(&str, fn() -> Check, Duration); 8] = [
        ("symmetric-function inequalities", criterion_1, Duration::from_secs(30)),
        ("integral-identity battery", criterion_2, Duration::from_secs(60)),
        ("spectral estimates", criterion_3, Duration::from_secs(60)),
        ("exact-solution residuals", criterion_4, Duration::from_secs(10)),
        ("linearization vs differences", criterion_5, Duration::from_secs(30)),
        ("uniqueness probes", criterion_6, Duration::from_secs(600)),
        ("alpha_* computation", criterion_7, Duration::from_secs(1)),
        ("hypothesis checkers", criterion_8, Duration::from_secs(10)),
    ];
    let only: Vec<usize> = std::env::args().skip(1).filter_map(|a| a.parse().ok()).collect();
    let mut failed = 0;
    for (i, (name, run, budget)) in criteria.iter().enumerate() {
        let id = i + 1;
        if !only.is_empty() && !only.contains(&id) {
            continue;
        }
        let t = Instant::now();
        let result = run();
        let dt = t.elapsed();
        let over = dt > *budget;
        let (status, detail) = match (&result, over) {
            (Ok(msg), false) => ("PASS", msg.clone()),
            (Ok(msg), true) => ("FAIL", format!("{msg}; over budget {budget:?}")),
            (Err(msg), _) => ("FAIL", msg.clone()),
        };
        if status == "FAIL" {
            failed += 1;
        }
        println!("criterion {id} [{name}]: {status} in {:.2}s - {detail}", dt.as_secs_f64());
    }
    if failed > 0 {
        println!("{failed} criteria failed");
        std::process::exit(1);
    }
}
