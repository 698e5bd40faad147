//! `minklab`: integral-identity checks, curvature-equation solves, flows,
//! parameter sweeps, spectral analysis and hypothesis checks.
//!
//! Exit status: 0 success, 1 quantitative failure, 2 usage or config error.

mod commands;
mod config;
mod error;
mod output;

use std::io::Write;
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use serde::Serialize;

use config::{Format, Layers, Scheme};
use error::CliError;

#[derive(Parser, Debug)]
#[command(name = "minklab", version, about = "Support-function geometry toolkit")]
struct Cli {
    #[command(subcommand)]
    command: Option<Command>,
    #[command(flatten)]
    flags: Flags,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Run the integral-identity battery with refinement orders.
    VerifyIntegrals(Assignments),
    /// Damped Newton solve from the configured shape.
    Solve(Assignments),
    /// Normalized expanding flow from the configured shape.
    Flow(Assignments),
    /// Newton solves over a (p, q) grid from seeded initial shapes.
    Sweep(Assignments),
    /// Smallest constrained eigenvalues of the local Brunn-Minkowski form.
    Spectrum(Assignments),
    /// Region membership, alpha_* or a sampled hypothesis check.
    ///
    /// Targets: region <id>, alpha-star, phi-product, phi-log-derivative,
    /// psi-eta-product, psi-monotone.
    Check(CheckArgs),
}

#[derive(Args, Debug)]
struct Assignments {
    /// Config overrides as key=value (values parsed as TOML).
    #[arg(value_name = "KEY=VALUE")]
    set: Vec<String>,
}

#[derive(Args, Debug)]
struct CheckArgs {
    /// Target, then the region id for `region`, then key=value overrides.
    #[arg(value_name = "ARGS")]
    args: Vec<String>,
}

#[derive(Args, Debug)]
struct Flags {
    /// TOML run configuration.
    #[arg(long, global = true)]
    config: Option<PathBuf>,
    /// Print the resolved configuration as TOML and exit.
    #[arg(long, global = true)]
    dump_config: bool,
    /// Worker threads for sweeps (default: all cores).
    #[arg(long, global = true, env = "MINKLAB_THREADS")]
    threads: Option<usize>,

    #[arg(long, global = true)]
    n: Option<usize>,
    /// `N` on the circle, `NLATxNLON` on the sphere.
    #[arg(long, global = true)]
    resolution: Option<String>,
    #[arg(long, global = true, value_enum)]
    scheme: Option<Scheme>,
    #[arg(long, global = true, allow_negative_numbers = true)]
    p: Option<f64>,
    #[arg(long, global = true, allow_negative_numbers = true)]
    q: Option<f64>,
    #[arg(long, global = true)]
    k: Option<usize>,
    #[arg(long, global = true)]
    l: Option<usize>,
    /// lp_dual, lp_gauss, lp_dual_cm, orlicz_cm or quotient_isotropic.
    #[arg(long, global = true)]
    family: Option<String>,
    /// sphere[:R], unit-sphere, ellipsoid:a,b[,c], random or file:PATH.
    #[arg(long, global = true)]
    shape: Option<String>,
    #[arg(long, global = true)]
    seed: Option<u64>,
    #[arg(long, global = true)]
    tol: Option<f64>,
    /// Write records here instead of stdout.
    #[arg(long, global = true)]
    out: Option<PathBuf>,
    #[arg(long, global = true, value_enum)]
    format: Option<Format>,

    #[arg(long, global = true)]
    steps: Option<usize>,
    #[arg(long, global = true)]
    dt: Option<f64>,
    /// lo:hi:count
    #[arg(long, global = true, allow_hyphen_values = true)]
    p_range: Option<String>,
    /// lo:hi:count
    #[arg(long, global = true, allow_hyphen_values = true)]
    q_range: Option<String>,
    /// Initial shapes per sweep point.
    #[arg(long, global = true)]
    inits: Option<usize>,
    /// Number of eigenvalues.
    #[arg(long, global = true)]
    count: Option<usize>,
    /// e.g. power:-1, exp:-1, const:2 or a JSON object.
    #[arg(long, global = true, allow_hyphen_values = true)]
    phi: Option<String>,
    /// e.g. u^0.5*power:2 or a JSON object.
    #[arg(long, global = true, allow_hyphen_values = true)]
    psi: Option<String>,
    #[arg(long, global = true, allow_hyphen_values = true)]
    eta: Option<String>,
    /// global or per-point.
    #[arg(long, global = true)]
    strictness: Option<String>,
    #[arg(long, global = true)]
    samples: Option<usize>,
    /// lo:hi sample range for sampled checks.
    #[arg(long, global = true)]
    s_range: Option<String>,
    /// Per-run CSV summary of a sweep.
    #[arg(long, global = true)]
    summary_csv: Option<PathBuf>,
}

fn set<T: Serialize>(layers: &mut Layers, key: &str, value: &Option<T>) -> Result<(), CliError> {
    if let Some(v) = value {
        let v = toml::Value::try_from(v).map_err(|e| CliError::Usage(format!("{key}: {e}")))?;
        layers.set(key, v);
    }
    Ok(())
}

fn parse_resolution(s: &str) -> Result<Vec<usize>, CliError> {
    s.split(['x', 'X', ','])
        .map(|r| r.trim().parse::<usize>().map_err(|_| CliError::Usage(format!("bad resolution '{s}'"))))
        .collect()
}

fn parse_pair(s: &str) -> Result<[f64; 2], CliError> {
    let bad = || CliError::Usage(format!("expected lo:hi, got '{s}'"));
    let (a, b) = s.split_once(':').ok_or_else(bad)?;
    Ok([a.trim().parse().map_err(|_| bad())?, b.trim().parse().map_err(|_| bad())?])
}

fn layers(cli: &Cli) -> Result<Layers, CliError> {
    let f = &cli.flags;
    let mut l = match &f.config {
        Some(path) => Layers::from_file(path)?,
        None => Layers::default(),
    };
    let (name, positional): (Option<&str>, &[String]) = match &cli.command {
        None => (None, &[]),
        Some(Command::VerifyIntegrals(a)) => (Some("verify-integrals"), &a.set),
        Some(Command::Solve(a)) => (Some("solve"), &a.set),
        Some(Command::Flow(a)) => (Some("flow"), &a.set),
        Some(Command::Sweep(a)) => (Some("sweep"), &a.set),
        Some(Command::Spectrum(a)) => (Some("spectrum"), &a.set),
        Some(Command::Check(a)) => (Some("check"), &a.args),
    };
    set(&mut l, "command", &name)?;
    set(&mut l, "n", &f.n)?;
    set(&mut l, "resolution", &f.resolution.as_deref().map(parse_resolution).transpose()?)?;
    set(&mut l, "scheme", &f.scheme)?;
    set(&mut l, "p", &f.p)?;
    set(&mut l, "q", &f.q)?;
    set(&mut l, "k", &f.k)?;
    set(&mut l, "l", &f.l)?;
    set(&mut l, "family", &f.family)?;
    set(&mut l, "shape", &f.shape)?;
    set(&mut l, "seed", &f.seed)?;
    set(&mut l, "tol", &f.tol)?;
    set(&mut l, "out", &f.out)?;
    set(&mut l, "format", &f.format)?;
    set(&mut l, "steps", &f.steps)?;
    set(&mut l, "dt", &f.dt)?;
    set(&mut l, "p_range", &f.p_range)?;
    set(&mut l, "q_range", &f.q_range)?;
    set(&mut l, "inits", &f.inits)?;
    set(&mut l, "count", &f.count)?;
    set(&mut l, "phi", &f.phi)?;
    set(&mut l, "psi", &f.psi)?;
    set(&mut l, "eta", &f.eta)?;
    set(&mut l, "strictness", &f.strictness)?;
    set(&mut l, "samples", &f.samples)?;
    set(&mut l, "s_range", &f.s_range.as_deref().map(parse_pair).transpose()?)?;
    set(&mut l, "summary_csv", &f.summary_csv)?;

    let mut bare = Vec::new();
    for arg in positional {
        if arg.contains('=') {
            l.assign(arg)?;
        } else {
            bare.push(arg.as_str());
        }
    }
    match (name, bare.as_slice()) {
        (_, []) => {}
        (Some("check"), [target]) => set(&mut l, "target", &Some(*target))?,
        (Some("check"), [target, region]) => {
            set(&mut l, "target", &Some(*target))?;
            set(&mut l, "region", &Some(*region))?;
        }
        (_, extra) => return Err(CliError::Usage(format!("unexpected arguments: {}", extra.join(" ")))),
    }
    Ok(l)
}

fn execute(cli: Cli) -> Result<(), CliError> {
    let cfg = layers(&cli)?.resolve()?;
    if cli.flags.dump_config {
        print!("{}", cfg.to_toml());
        return Ok(());
    }
    if let Some(t) = cli.flags.threads {
        rayon::ThreadPoolBuilder::new()
            .num_threads(t)
            .build_global()
            .map_err(|e| CliError::Usage(format!("thread pool: {e}")))?;
    }
    let outcome = commands::run(&cfg)?;
    match &cfg.out {
        Some(path) => {
            let mut f = std::io::BufWriter::new(std::fs::File::create(path)?);
            output::write_records(&mut f, cfg.format, &outcome.records)?;
            f.flush()?;
        }
        None => {
            let stdout = std::io::stdout();
            let mut lock = stdout.lock();
            output::write_records(&mut lock, cfg.format, &outcome.records)?;
            lock.flush()?;
        }
    }
    if let Some((path, rows)) = &outcome.summary {
        let mut f = std::fs::File::create(path)?;
        output::write_csv(&mut f, rows)?;
    }
    for note in &outcome.notes {
        eprintln!("{note}");
    }
    match outcome.failure {
        Some(msg) => Err(CliError::Failure(msg)),
        None => Ok(()),
    }
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(c) => c,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() { ExitCode::from(2) } else { ExitCode::SUCCESS };
        }
    };
    match execute(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            e.exit_code()
        }
    }
}
