//! Browser bindings for the demo page: planar convex bodies, the planar
//! L_p dual Minkowski solver, and closed-form region and alpha_* checks.
//!
//! Every entry point returns a JSON string; errors come back as
//! `{"error": "..."}` so the page never has to catch exceptions.

use std::sync::Arc;

use minklab::body::{Shape, SupportBody};
use minklab::hypotheses::{alpha_star, region_member, Region};
use minklab::solver::{newton_solve, Family, NewtonOptions, ProblemSpec};
use minklab::sphere::{make_grid, SphereGrid};
use serde_json::{json, Value};
use wasm_bindgen::prelude::*;

fn respond(r: Result<Value, String>) -> String {
    r.unwrap_or_else(|e| json!({ "error": e })).to_string()
}

fn circle(resolution: usize) -> Result<Arc<SphereGrid>, String> {
    make_grid(1, &[resolution]).map_err(|e| e.to_string())
}

fn outline(body: &SupportBody) -> Value {
    let pts: Vec<[f64; 2]> = (0..body.len()).map(|i| [body.position(i)[0], body.position(i)[1]]).collect();
    json!(pts)
}

fn shape(kind: &str, a: f64, b: f64, amplitude: f64, seed: u64) -> Result<Shape, String> {
    Ok(match kind {
        "sphere" => Shape::Sphere { radius: a, center: vec![b, 0.0] },
        "ellipse" => Shape::Ellipsoid { axes: vec![a, b] },
        "random" => Shape::random(1, a, 4, amplitude, false, seed),
        other => return Err(format!("unknown shape '{other}'")),
    })
}

/// Boundary, curvature radii and roundness of a planar body.
///
/// `kind` is `sphere` (radius `a`, center offset `b`), `ellipse` (semi-axes
/// `a`, `b`) or `random` (mean radius `a`, perturbation `amplitude`).
#[wasm_bindgen]
pub fn planar_body(kind: &str, a: f64, b: f64, amplitude: f64, seed: u32, resolution: usize) -> String {
    respond((|| {
        let g = circle(resolution)?;
        let body = shape(kind, a, b, amplitude, seed as u64)?.build(&g).map_err(|e| e.to_string())?;
        let r = body.roundness();
        Ok(json!({
            "outline": outline(&body),
            "support": body.support().0,
            "curvature_radius": (0..body.len()).map(|i| body.radii_at(i)[0]).collect::<Vec<_>>(),
            "roundness": r.deviation,
            "center": r.center_norm(),
            "radius": r.radius,
        }))
    })())
}

/// Newton solve of `u^{1-p} r^{q-2} (u'' + u) = 1` from a seeded random
/// perturbation of the unit circle.
#[wasm_bindgen]
pub fn solve_planar(p: f64, q: f64, amplitude: f64, seed: u32, resolution: usize) -> String {
    respond((|| {
        let g = circle(resolution)?;
        let init = Shape::random(1, 1.0, 4, amplitude, false, seed as u64).build(&g).map_err(|e| e.to_string())?;
        let spec = ProblemSpec::new(1, Family::LpDual { p, q }).normalized_for_unit_sphere();
        let opts = NewtonOptions { tol: 1e-10, ..Default::default() };
        let rep = newton_solve(&spec, &init, &opts).map_err(|e| e.to_string())?;
        Ok(json!({
            "initial": outline(&init),
            "solution": outline(&rep.body),
            "converged": rep.converged,
            "iterations": rep.iterations,
            "residual": rep.residual,
            "history": rep.history,
            "roundness": rep.roundness.deviation,
            "center": rep.roundness.center_norm(),
        }))
    })())
}

/// Closed-form membership of `(p, q)` in a uniqueness region; `k = 0`
/// means "not given".
#[wasm_bindgen]
pub fn check_region(region: &str, n: usize, k: usize, p: f64, q: f64) -> String {
    respond((|| {
        let region: Region = region.parse().map_err(|e: minklab::hypotheses::HypothesisError| e.to_string())?;
        let v = region_member(region, n, (k > 0).then_some(k), p, q).map_err(|e| e.to_string())?;
        let mut out = serde_json::to_value(&v).map_err(|e| e.to_string())?;
        out["verdict"] = json!(v.label());
        Ok(out)
    })())
}

/// Membership of a `cols x rows` lattice over `[p0, p1] x [q0, q1]`,
/// row-major from `q1` down, as a string of `0`/`1`.
#[wasm_bindgen]
#[allow(clippy::too_many_arguments)]
pub fn region_map(region: &str, n: usize, k: usize, p0: f64, p1: f64, q0: f64, q1: f64, cols: usize, rows: usize) -> String {
    respond((|| {
        let region: Region = region.parse().map_err(|e: minklab::hypotheses::HypothesisError| e.to_string())?;
        let k = (k > 0).then_some(k);
        let mut bits = String::with_capacity(cols * rows);
        for j in 0..rows {
            let q = q1 - (q1 - q0) * (j as f64 + 0.5) / rows as f64;
            for i in 0..cols {
                let p = p0 + (p1 - p0) * (i as f64 + 0.5) / cols as f64;
                let inside = region_member(region, n, k, p, q).map_err(|e| e.to_string())?.satisfied;
                bits.push(if inside { '1' } else { '0' });
            }
        }
        Ok(json!({ "cols": cols, "rows": rows, "bits": bits }))
    })())
}

/// `alpha_*(n, k, p)` and the resulting bound on `q`.
#[wasm_bindgen]
pub fn alpha_star_bound(n: usize, k: usize, p: f64) -> String {
    respond(
        alpha_star(n, k, p)
            .map(|a| json!({ "alpha_star": a, "q_bound": k as f64 + 1.0 + 2.0 * a }))
            .map_err(|e| e.to_string()),
    )
}

#[cfg(test)]
mod tests {
    use super::*;

    fn parse(s: String) -> Value {
        serde_json::from_str(&s).unwrap()
    }

    #[test]
    fn ellipse_outline_lies_on_the_ellipse() {
        let v = parse(planar_body("ellipse", 1.5, 1.0, 0.0, 0, 64));
        for pt in v["outline"].as_array().unwrap() {
            let (x, y) = (pt[0].as_f64().unwrap(), pt[1].as_f64().unwrap());
            assert!(((x / 1.5).powi(2) + (y / 1.0).powi(2) - 1.0).abs() < 1e-10);
        }
    }

    #[test]
    fn planar_solve_rounds_out() {
        let v = parse(solve_planar(2.0, 2.0, 0.15, 3, 64));
        assert_eq!(v["converged"], true);
        assert!(v["roundness"].as_f64().unwrap() < 1e-6);
    }

    #[test]
    fn region_and_errors() {
        assert_eq!(parse(check_region("1.12i", 1, 0, -1.0, 2.0))["verdict"], "member");
        assert!(parse(check_region("nope", 1, 0, 0.0, 0.0))["error"].is_string());
        let m = parse(region_map("1.10i", 1, 0, -3.0, 1.0, 0.0, 4.0, 8, 8));
        assert_eq!(m["bits"].as_str().unwrap().len(), 64);
        let a = parse(alpha_star_bound(2, 1, 1.0))["alpha_star"].as_f64().unwrap();
        assert!((a - 0.032935590521565125).abs() < 1e-12);
    }
}
