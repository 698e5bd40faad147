use std::path::Path;
use std::sync::Arc;

use minklab::body::{Shape, SupportBody};
use minklab::functions::{BivariateFn, ScalarFn};
use minklab::hypotheses::{self, ConditionVerdict, HypothesisError, Region, SampleGrid, Strictness};
use minklab::integrals::{identity_battery, BatterySpec};
use minklab::solver::{
    flow_run, newton_solve, stable_step, sweep, Data, Family, FlowOptions, NewtonOptions, ProblemSpec, SolveRecord, SolveReport,
    SolverError, SweepSpec,
};
use minklab::spectral::{bm_eigenpairs, multiplicity, SpectralProblem};
use minklab::sphere::{GridSpec, LatitudeScheme, SphereGrid};
use serde_json::{json, Value};

use crate::config::{parse_range, RunConfig, Scheme};
use crate::error::CliError;
use crate::output::{record, Record};

/// Records to emit, notes for stderr, and the failure (if any) that sets
/// the exit status once everything has been written.
#[derive(Debug, Default)]
pub struct Outcome {
    pub records: Vec<Record>,
    pub notes: Vec<String>,
    pub failure: Option<String>,
    /// Extra CSV file requested by the run: path and rows.
    pub summary: Option<(std::path::PathBuf, Vec<Record>)>,
}

pub fn run(cfg: &RunConfig) -> Result<Outcome, CliError> {
    if !(1..=2).contains(&cfg.n) {
        return Err(CliError::Usage(format!("n must be 1 or 2, got {}", cfg.n)));
    }
    match cfg.command.as_str() {
        "verify-integrals" => verify_integrals(cfg),
        "solve" => solve(cfg),
        "flow" => flow(cfg),
        "sweep" => run_sweep(cfg),
        "spectrum" => spectrum(cfg),
        "check" => check(cfg),
        "" => Err(CliError::Usage("no command given (use a subcommand or set `command` in the config)".into())),
        other => Err(CliError::Usage(format!("unknown command '{other}'"))),
    }
}

fn usage<E: std::fmt::Display>(e: E) -> CliError {
    CliError::Usage(e.to_string())
}

fn solver_error(e: SolverError) -> CliError {
    match e {
        SolverError::InvalidSpec(_) | SolverError::BadInit(_) | SolverError::Unstable { .. } => usage(e),
        e => CliError::Failure(e.to_string()),
    }
}

/// Resolution for a command: the configured one or the per-command default.
fn grid_spec(cfg: &RunConfig, heavy: bool) -> Result<GridSpec, CliError> {
    let resolution = if !cfg.resolution.is_empty() {
        cfg.resolution.clone()
    } else {
        match (cfg.n, heavy) {
            (1, true) => vec![128],
            (1, false) => vec![256],
            (_, true) => vec![16, 32],
            (_, false) => vec![64, 128],
        }
    };
    let want = if cfg.n == 1 { 1 } else { 2 };
    if resolution.len() != want {
        return Err(CliError::Usage(format!("resolution needs {want} entries for n={}", cfg.n)));
    }
    let scheme = match cfg.scheme {
        Scheme::GaussLegendre => LatitudeScheme::GaussLegendre,
        Scheme::Uniform => LatitudeScheme::Uniform,
    };
    Ok(GridSpec { dim: cfg.n, resolution, scheme })
}

fn grid(cfg: &RunConfig, heavy: bool) -> Result<Arc<SphereGrid>, CliError> {
    SphereGrid::new(grid_spec(cfg, heavy)?).map(Arc::new).map_err(usage)
}

fn numbers(s: &str, what: &str) -> Result<Vec<f64>, CliError> {
    s.split(',').map(|x| x.trim().parse::<f64>().map_err(|_| CliError::Usage(format!("bad {what} '{s}'")))).collect()
}

/// `sphere[:R]`, `unit-sphere`, `ellipsoid:a,b[,c]`, `random`, `file:path`.
fn body(cfg: &RunConfig, grid: &Arc<SphereGrid>) -> Result<SupportBody, CliError> {
    let (head, arg) = cfg.shape.split_once(':').unwrap_or((cfg.shape.as_str(), ""));
    let shape = match head {
        "unit-sphere" | "unit_sphere" => Shape::unit_sphere(),
        "sphere" => {
            let radius = if arg.is_empty() { cfg.radius } else { numbers(arg, "radius")?[0] };
            Shape::Sphere { radius, center: Vec::new() }
        }
        "ellipsoid" => Shape::Ellipsoid { axes: numbers(arg, "axes")? },
        "random" => Shape::random(cfg.n, cfg.radius, cfg.max_degree, cfg.amplitude, cfg.symmetric, cfg.seed),
        "file" => {
            let text = std::fs::read_to_string(arg).map_err(|e| CliError::Usage(format!("cannot read {arg}: {e}")))?;
            let b = SupportBody::from_json(&text).map_err(usage)?;
            if b.dim() != cfg.n {
                return Err(CliError::Usage(format!("body in {arg} has dimension {}, expected {}", b.dim(), cfg.n)));
            }
            return Ok(b);
        }
        other => return Err(CliError::Usage(format!("unknown shape '{other}'"))),
    };
    shape.build(grid).map_err(usage)
}

fn family(cfg: &RunConfig) -> Result<Family, CliError> {
    Ok(match cfg.family.as_str() {
        "lp_dual" => Family::LpDual { p: cfg.require_p()?, q: cfg.require_q()? },
        "lp_gauss" => Family::LpGauss { p: cfg.require_p()? },
        "lp_dual_cm" => Family::LpDualCm { k: cfg.require_k()?, p: cfg.require_p()?, q: cfg.require_q()? },
        "orlicz_cm" => {
            let phi = match (&cfg.phi, cfg.p) {
                (Some(s), _) => s.parse::<ScalarFn>().map_err(usage)?,
                (None, Some(p)) => ScalarFn::power(1.0 - p),
                (None, None) => return Err(CliError::Usage("orlicz_cm needs phi or p".into())),
            };
            Family::OrliczCm { k: cfg.require_k()?, phi }
        }
        "quotient_isotropic" => {
            let psi = cfg.psi.as_deref().unwrap_or("const:1").parse::<BivariateFn>().map_err(usage)?;
            let l = cfg.l.ok_or_else(|| CliError::Usage("missing l".into()))?;
            Family::QuotientIsotropic { k: cfg.require_k()?, l, psi }
        }
        other => return Err(CliError::Usage(format!("unknown family '{other}'"))),
    })
}

fn problem(cfg: &RunConfig) -> Result<ProblemSpec, CliError> {
    let spec = ProblemSpec::new(cfg.n, family(cfg)?);
    let spec = match cfg.data {
        Some(c) if c > 0.0 => spec.with_data(Data::Constant(c)),
        Some(c) => return Err(CliError::Usage(format!("data must be positive, got {c}"))),
        None => spec.normalized_for_unit_sphere(),
    };
    spec.validate().map_err(usage)?;
    Ok(spec)
}

fn newton_options(cfg: &RunConfig) -> NewtonOptions {
    NewtonOptions {
        tol: cfg.tol.unwrap_or(NewtonOptions::default().tol),
        max_iter: cfg.max_iter,
        symmetric: cfg.symmetric,
        ..Default::default()
    }
}

fn head(cfg: &RunConfig, spec: &ProblemSpec, grid: &GridSpec) -> Vec<(&'static str, Value)> {
    let mut h = vec![("command", json!(cfg.command)), ("family", json!(spec.family.label())), ("n", json!(cfg.n))];
    if let Some((p, q)) = spec.family.pq() {
        h.push(("p", json!(p)));
        if q.is_finite() {
            h.push(("q", json!(q)));
        }
    }
    h.push(("resolution", json!(grid.label())));
    h
}

fn write_body(path: &Path, report: &SolveReport) -> Result<(), CliError> {
    std::fs::write(path, report.body.to_json())?;
    Ok(())
}

fn verify_integrals(cfg: &RunConfig) -> Result<Outcome, CliError> {
    let mut spec = BatterySpec::default_for(cfg.n);
    if !cfg.resolution.is_empty() {
        let finest = grid_spec(cfg, false)?;
        if finest.resolution.iter().any(|r| r % 4 != 0) {
            return Err(CliError::Usage("verify-integrals resolution must be divisible by 4".into()));
        }
        let coarse = |f: usize| GridSpec { resolution: finest.resolution.iter().map(|r| r / f).collect(), ..finest.clone() };
        spec.grids = vec![coarse(4), coarse(2), finest.clone()];
    } else if cfg.scheme == Scheme::Uniform {
        spec.grids = spec.grids.into_iter().map(|g| g.with_scheme(LatitudeScheme::Uniform)).collect();
    }
    spec.bodies = cfg.bodies;
    spec.seed = cfg.seed;
    spec.alphas = cfg.alphas.clone();
    spec.max_degree = cfg.max_degree;
    spec.amplitude = cfg.amplitude;
    let tol = cfg.tol.unwrap_or(if cfg.n == 1 { 1e-8 } else { 1e-3 });
    let min_order = cfg.min_order.or(if cfg.n == 1 { None } else { Some(1.6) });
    let reports = identity_battery(&spec).map_err(|e| CliError::Failure(e.to_string()))?;

    let mut out = Outcome::default();
    let mut failed = 0;
    for r in &reports {
        let rel = r.relative();
        // an order is only meaningful above round-off, where one is fitted
        let order_ok = match (min_order, r.order) {
            (Some(m), Some(o)) => o >= m,
            _ => true,
        };
        let pass = rel <= tol && order_ok;
        let mut rec = record(&[("command", json!("verify-integrals")), ("n", json!(cfg.n))], r);
        rec.insert("relative".into(), json!(rel));
        rec.insert("tol".into(), json!(tol));
        rec.insert("pass".into(), json!(pass));
        if !pass {
            failed += 1;
            out.notes.push(format!(
                "FAIL {} relative={rel:.3e} order={}",
                r.name,
                r.order.map_or("-".into(), |o| format!("{o:.2}"))
            ));
        }
        out.records.push(rec);
    }
    let worst = reports.iter().map(|r| r.relative()).fold(0.0, f64::max);
    let min_seen = reports.iter().filter_map(|r| r.order).fold(f64::INFINITY, f64::min);
    out.notes.push(format!(
        "verify-integrals n={}: {} records, {} failed, worst relative {worst:.3e}, lowest fitted order {}",
        cfg.n,
        reports.len(),
        failed,
        if min_seen.is_finite() { format!("{min_seen:.2}") } else { "-".into() }
    ));
    if failed > 0 {
        out.failure = Some(format!("{failed} of {} identity residuals failed", reports.len()));
    }
    Ok(out)
}

fn solve(cfg: &RunConfig) -> Result<Outcome, CliError> {
    let spec = problem(cfg)?;
    let g = grid(cfg, true)?;
    let init = body(cfg, &g)?;
    let report = newton_solve(&spec, &init, &newton_options(cfg)).map_err(solver_error)?;
    let mut out = Outcome::default();
    out.records.push(record(&head(cfg, &spec, g.spec()), &report.record()));
    out.notes.push(format!(
        "solve: converged={} iterations={} residual={:.3e} roundness={:.3e}",
        report.converged, report.iterations, report.residual, report.roundness.deviation
    ));
    if let Some(path) = &cfg.body_out {
        write_body(path, &report)?;
    }
    if !report.converged {
        out.failure = Some(format!("Newton did not converge (residual {:.3e})", report.residual));
    }
    Ok(out)
}

fn flow(cfg: &RunConfig) -> Result<Outcome, CliError> {
    let spec = problem(cfg)?;
    let g = grid(cfg, true)?;
    let init = body(cfg, &g)?;
    let dt = match cfg.dt {
        Some(dt) => dt,
        None => 0.5 * stable_step(&spec, &init).map_err(solver_error)?,
    };
    let opts = FlowOptions {
        steps: cfg.steps,
        dt,
        symmetric: cfg.symmetric,
        stationary_tol: cfg.tol.unwrap_or(0.0),
        ..Default::default()
    };
    let report = flow_run(&spec, &init, &opts).map_err(solver_error)?;
    let mut out = Outcome::default();
    out.records.push(record(&head(cfg, &spec, g.spec()), &report.record()));
    out.notes.push(format!(
        "flow: dt={dt:.3e} steps={} residual={:.3e} roundness={:.3e} distance={:.3e}",
        report.iterations,
        report.residual,
        report.roundness.deviation,
        report.fixed_point_distance.unwrap_or(f64::NAN)
    ));
    if let Some(path) = &cfg.body_out {
        write_body(path, &report)?;
    }
    Ok(out)
}

fn sweep_points(cfg: &RunConfig) -> Result<Vec<(f64, f64)>, CliError> {
    if !cfg.points.is_empty() {
        return Ok(cfg.points.iter().map(|&[p, q]| (p, q)).collect());
    }
    let (Some(pr), Some(qr)) = (&cfg.p_range, &cfg.q_range) else {
        return Err(CliError::Usage("sweep needs points or both p_range and q_range".into()));
    };
    let ps = parse_range(pr)?;
    let qs = parse_range(qr)?;
    Ok(ps.iter().flat_map(|&p| qs.iter().map(move |&q| (p, q))).collect())
}

fn run_sweep(cfg: &RunConfig) -> Result<Outcome, CliError> {
    let points = sweep_points(cfg)?;
    let (p0, q0) = points[0];
    let base = RunConfig { p: Some(p0), q: Some(q0), ..cfg.clone() };
    let problem = problem(&base)?;
    if problem.family.pq().is_none() {
        return Err(CliError::Usage(format!("family {} has no (p, q) to sweep", problem.family.label())));
    }
    let grid = grid_spec(cfg, true)?;
    let spec = SweepSpec {
        problem: problem.clone(),
        points,
        inits_per_point: cfg.inits,
        seed: cfg.seed,
        grid: grid.clone(),
        amplitude: cfg.amplitude,
        max_degree: cfg.max_degree,
        radius_spread: 0.2,
        symmetric: cfg.symmetric,
        warm_start: cfg.warm_start,
        newton: newton_options(cfg),
    };
    let result = sweep(&spec).map_err(solver_error)?;
    let mut out = Outcome::default();
    let mut summary = Vec::new();
    let mut empty = 0;
    let head = [
        ("command", json!("sweep")),
        ("family", json!(problem.family.label())),
        ("n", json!(cfg.n)),
        ("resolution", json!(grid.label())),
    ];
    for pt in &result {
        if pt.converged == 0 {
            empty += 1;
            out.notes.push(format!("no converged run at p={} q={}", pt.p, pt.q));
        }
        let mut rec = record(&head, pt);
        rec.insert("inits".into(), json!(pt.runs.len()));
        out.records.push(rec);
        for (i, run) in pt.runs.iter().enumerate() {
            summary.push(summary_row(pt.p, pt.q, i, run));
        }
    }
    out.notes.push(format!("sweep: {} points, {} without a converged run", result.len(), empty));
    if empty > 0 {
        out.failure = Some(format!("{empty} sweep points had no converged run"));
    }
    out.summary = cfg.summary_csv.clone().map(|p| (p, summary));
    Ok(out)
}

fn summary_row(p: f64, q: f64, run: usize, r: &SolveRecord) -> Record {
    let mut m = Record::new();
    m.insert("p".into(), json!(p));
    m.insert("q".into(), json!(q));
    m.insert("run".into(), json!(run));
    m.insert("converged".into(), json!(r.converged));
    m.insert("roundness".into(), json!(r.roundness));
    m.insert("residual".into(), json!(r.residual));
    m.insert("iterations".into(), json!(r.iterations));
    m
}

fn spectrum(cfg: &RunConfig) -> Result<Outcome, CliError> {
    let g = grid(cfg, false)?;
    let b = body(cfg, &g)?;
    let k = cfg.k.unwrap_or(cfg.n);
    let problem = SpectralProblem::new(&b, k).map_err(usage)?;
    let count = cfg.count.unwrap_or(cfg.n + 2);
    let pairs = bm_eigenpairs(&problem, count, cfg.degree).map_err(|e| CliError::Failure(e.to_string()))?;
    let values: Vec<f64> = pairs.iter().map(|e| e.value).collect();
    let mult = multiplicity(&values, 0.01);
    let mut out = Outcome::default();
    for (i, v) in values.iter().enumerate() {
        out.records.push(record(
            &[
                ("command", json!("spectrum")),
                ("n", json!(cfg.n)),
                ("k", json!(k)),
                ("shape", json!(cfg.shape)),
                ("resolution", json!(g.spec().label())),
                ("index", json!(i)),
            ],
            &json!({ "eigenvalue": v }),
        ));
    }
    let first = values.first().copied().unwrap_or(f64::NAN);
    out.notes.push(format!("spectrum: smallest eigenvalue {first:.6} with multiplicity {mult} (1% tolerance)"));
    if !((first - 1.0).abs() <= 0.01) {
        out.failure = Some(format!("smallest eigenvalue {first} is not 1 within 1%"));
    }
    Ok(out)
}

fn hypothesis(e: HypothesisError) -> CliError {
    CliError::Usage(e.to_string())
}

fn check(cfg: &RunConfig) -> Result<Outcome, CliError> {
    let target = cfg.target.as_deref().ok_or_else(|| CliError::Usage("check needs a target".into()))?;
    let sample = SampleGrid::new(cfg.s_range[0], cfg.s_range[1], cfg.samples);
    let scalar = |v: &Option<String>, name: &str| -> Result<ScalarFn, CliError> {
        v.as_deref().ok_or_else(|| CliError::Usage(format!("missing {name}")))?.parse().map_err(usage)
    };
    let phi = || match (&cfg.phi, cfg.p) {
        (None, Some(p)) => Ok(ScalarFn::power(1.0 - p)),
        _ => scalar(&cfg.phi, "phi (or p for phi = s^(1-p))"),
    };
    let psi = || -> Result<BivariateFn, CliError> {
        cfg.psi.as_deref().ok_or_else(|| CliError::Usage("missing psi".into()))?.parse().map_err(usage)
    };
    let mut head = vec![("command", json!("check")), ("target", json!(target))];
    let verdict: ConditionVerdict = match target {
        "region" => {
            let id = cfg.region.as_deref().ok_or_else(|| CliError::Usage("check region needs a region id".into()))?;
            let region: Region = id.parse().map_err(hypothesis)?;
            head.extend([("region", json!(region.id())), ("n", json!(cfg.n))]);
            hypotheses::region_member(region, cfg.n, cfg.k, cfg.require_p()?, cfg.require_q()?).map_err(hypothesis)?
        }
        "alpha-star" | "alpha_star" => {
            let k = cfg.require_k()?;
            let p = cfg.require_p()?;
            let a = hypotheses::alpha_star(cfg.n, k, p).map_err(hypothesis)?;
            let rec = record(
                &[("command", json!("check")), ("target", json!("alpha-star")), ("n", json!(cfg.n)), ("k", json!(k))],
                &json!({ "p": p, "alpha_star": a, "q_bound": k as f64 + 1.0 + 2.0 * a, "method": "closed_form" }),
            );
            return Ok(Outcome {
                records: vec![rec],
                notes: vec![format!("alpha_*({}, {k}, {p}) = {a:.12}", cfg.n)],
                ..Default::default()
            });
        }
        "phi-product" | "phi_product" => {
            let k = cfg.require_k()?;
            head.push(("k", json!(k)));
            hypotheses::check_phi_product(&phi()?, k, &sample).map_err(hypothesis)?
        }
        "phi-log-derivative" | "phi_log_derivative" => {
            let k = cfg.require_k()?;
            head.push(("k", json!(k)));
            hypotheses::check_phi_log_derivative(&phi()?, k, &sample).map_err(hypothesis)?
        }
        "psi-eta-product" | "psi_eta_product" => {
            let k = cfg.require_k()?;
            let l = cfg.l.ok_or_else(|| CliError::Usage("missing l".into()))?;
            head.extend([("k", json!(k)), ("l", json!(l))]);
            hypotheses::check_psi_eta_product(&psi()?, &scalar(&cfg.eta, "eta")?, k, l, &sample).map_err(hypothesis)?
        }
        "psi-monotone" | "psi_monotone" => {
            let strictness: Strictness = cfg.strictness.parse().map_err(hypothesis)?;
            hypotheses::check_psi_monotone(&psi()?, &sample, strictness).map_err(hypothesis)?
        }
        other => return Err(CliError::Usage(format!("unknown check target '{other}'"))),
    };
    let mut rec = record(&head, &json!({ "verdict": verdict.label() }));
    rec.extend(record(&[], &verdict));
    let mut out = Outcome::default();
    out.notes.push(format!("{}: {}", verdict.condition, verdict.label()));
    if !verdict.satisfied {
        out.failure = Some(format!("{} {}", verdict.condition, verdict.label()));
    }
    out.records.push(rec);
    Ok(out)
}
