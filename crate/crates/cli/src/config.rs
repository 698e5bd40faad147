//! Run configuration: one flat TOML table, versioned by `schema_version`.
//!
//! Precedence, lowest first: built-in defaults, `--config` file, flags,
//! trailing `key=value` assignments. `--dump-config` prints the resolved
//! table, which re-runs to the same output.

use std::path::PathBuf;

use serde::{Deserialize, Serialize};

use crate::error::CliError;

pub const SCHEMA_VERSION: u32 = 1;

#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Serialize, Deserialize, clap::ValueEnum)]
#[serde(rename_all = "snake_case")]
pub enum Format {
    #[default]
    Jsonl,
    Text,
    Csv,
}

#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Serialize, Deserialize, clap::ValueEnum)]
#[serde(rename_all = "snake_case")]
pub enum Scheme {
    #[default]
    GaussLegendre,
    Uniform,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct RunConfig {
    pub schema_version: u32,
    /// verify-integrals, solve, flow, sweep, spectrum or check.
    pub command: String,
    pub n: usize,
    /// Grid resolution; empty selects the per-command default.
    pub resolution: Vec<usize>,
    pub scheme: Scheme,
    pub seed: u64,
    pub tol: Option<f64>,
    pub format: Format,
    pub out: Option<PathBuf>,
    /// solve/flow: write the final body as JSON here.
    pub body_out: Option<PathBuf>,

    // equation
    pub family: String,
    pub p: Option<f64>,
    pub q: Option<f64>,
    pub k: Option<usize>,
    pub l: Option<usize>,
    pub phi: Option<String>,
    pub psi: Option<String>,
    pub eta: Option<String>,
    /// Constant right-hand side; unset makes the unit sphere a solution.
    pub data: Option<f64>,

    // initial or analysed body
    pub shape: String,
    pub radius: f64,
    pub amplitude: f64,
    pub max_degree: usize,

    // newton and flow
    pub max_iter: usize,
    pub symmetric: bool,
    pub steps: usize,
    /// Flow time step; unset picks half the explicit stability limit.
    pub dt: Option<f64>,

    // sweep
    /// `lo:hi:count` grids for p and q; ignored when `points` is given.
    pub p_range: Option<String>,
    pub q_range: Option<String>,
    pub points: Vec<[f64; 2]>,
    pub inits: usize,
    pub warm_start: bool,
    pub summary_csv: Option<PathBuf>,

    // verify-integrals
    pub bodies: usize,
    pub alphas: Vec<f64>,
    pub min_order: Option<f64>,

    // spectrum
    pub count: Option<usize>,
    pub degree: Option<usize>,

    // check
    pub target: Option<String>,
    pub region: Option<String>,
    pub s_range: [f64; 2],
    pub samples: usize,
    pub strictness: String,
}

impl Default for RunConfig {
    fn default() -> Self {
        Self {
            schema_version: SCHEMA_VERSION,
            command: String::new(),
            n: 1,
            resolution: Vec::new(),
            scheme: Scheme::GaussLegendre,
            seed: 1,
            tol: None,
            format: Format::Jsonl,
            out: None,
            body_out: None,
            family: "lp_dual".into(),
            p: None,
            q: None,
            k: None,
            l: None,
            phi: None,
            psi: None,
            eta: None,
            data: None,
            shape: "random".into(),
            radius: 1.0,
            amplitude: 0.15,
            max_degree: 4,
            max_iter: 40,
            symmetric: false,
            steps: 1000,
            dt: None,
            p_range: None,
            q_range: None,
            points: Vec::new(),
            inits: 4,
            warm_start: false,
            summary_csv: None,
            bodies: 20,
            alphas: vec![-1.0, 0.0, 1.0, 2.0],
            min_order: None,
            count: None,
            degree: None,
            target: None,
            region: None,
            s_range: [1e-2, 1e2],
            samples: 200,
            strictness: "global".into(),
        }
    }
}

/// Parses the right-hand side of a `key=value` assignment as a TOML value,
/// falling back to a plain string.
pub fn parse_value(raw: &str) -> toml::Value {
    let doc = format!("v = {raw}");
    match toml::from_str::<toml::Table>(&doc) {
        Ok(mut t) => t.remove("v").unwrap_or_else(|| toml::Value::String(raw.into())),
        Err(_) => toml::Value::String(raw.into()),
    }
}

/// Layered key/value overrides, resolved into a [`RunConfig`].
#[derive(Debug, Default)]
pub struct Layers {
    table: toml::Table,
}

impl Layers {
    pub fn from_file(path: &std::path::Path) -> Result<Self, CliError> {
        let text = std::fs::read_to_string(path)
            .map_err(|e| CliError::Usage(format!("cannot read config {}: {e}", path.display())))?;
        let table: toml::Table =
            toml::from_str(&text).map_err(|e| CliError::Usage(format!("invalid config {}: {e}", path.display())))?;
        if let Some(v) = table.get("schema_version") {
            if v.as_integer() != Some(SCHEMA_VERSION as i64) {
                return Err(CliError::Usage(format!("unsupported schema_version {v}, expected {SCHEMA_VERSION}")));
            }
        }
        Ok(Self { table })
    }

    pub fn set(&mut self, key: &str, value: toml::Value) {
        self.table.insert(key.replace('-', "_"), value);
    }

    pub fn assign(&mut self, assignment: &str) -> Result<(), CliError> {
        let (k, v) = assignment
            .split_once('=')
            .ok_or_else(|| CliError::Usage(format!("expected key=value, got '{assignment}'")))?;
        self.set(k.trim(), parse_value(v.trim()));
        Ok(())
    }

    pub fn resolve(self) -> Result<RunConfig, CliError> {
        let cfg: RunConfig =
            toml::Value::Table(self.table).try_into().map_err(|e| CliError::Usage(format!("invalid configuration: {e}")))?;
        if cfg.schema_version != SCHEMA_VERSION {
            return Err(CliError::Usage(format!("unsupported schema_version {}", cfg.schema_version)));
        }
        Ok(cfg)
    }
}

impl RunConfig {
    pub fn to_toml(&self) -> String {
        toml::to_string(self).expect("config is always representable in TOML")
    }

    pub fn require_p(&self) -> Result<f64, CliError> {
        self.p.ok_or_else(|| CliError::Usage("missing p".into()))
    }

    pub fn require_q(&self) -> Result<f64, CliError> {
        self.q.ok_or_else(|| CliError::Usage("missing q".into()))
    }

    pub fn require_k(&self) -> Result<usize, CliError> {
        self.k.ok_or_else(|| CliError::Usage("missing k".into()))
    }
}

/// `lo:hi:count`, endpoints included.
pub fn parse_range(s: &str) -> Result<Vec<f64>, CliError> {
    let bad = || CliError::Usage(format!("expected lo:hi:count, got '{s}'"));
    let parts: Vec<&str> = s.split(':').collect();
    let [lo, hi, count] = parts.as_slice() else { return Err(bad()) };
    let lo: f64 = lo.trim().parse().map_err(|_| bad())?;
    let hi: f64 = hi.trim().parse().map_err(|_| bad())?;
    let count: usize = count.trim().parse().map_err(|_| bad())?;
    Ok(match count {
        0 => return Err(bad()),
        1 => vec![lo],
        c => (0..c).map(|i| lo + (hi - lo) * i as f64 / (c - 1) as f64).collect(),
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn defaults_roundtrip_through_toml() {
        let cfg = RunConfig { command: "solve".into(), p: Some(2.0), ..Default::default() };
        let back: RunConfig = toml::from_str(&cfg.to_toml()).unwrap();
        assert_eq!(back, cfg);
    }

    #[test]
    fn assignments_override() {
        let mut l = Layers::default();
        l.assign("p=-1").unwrap();
        l.assign("q=2").unwrap();
        l.assign("family=lp_dual_cm").unwrap();
        l.assign("resolution=[16, 32]").unwrap();
        let cfg = l.resolve().unwrap();
        assert_eq!(cfg.p, Some(-1.0));
        assert_eq!(cfg.family, "lp_dual_cm");
        assert_eq!(cfg.resolution, vec![16, 32]);
    }

    #[test]
    fn unknown_keys_are_rejected() {
        let mut l = Layers::default();
        l.assign("pp=1").unwrap();
        assert!(l.resolve().is_err());
        assert!(Layers::default().assign("novalue").is_err());
    }

    #[test]
    fn ranges() {
        assert_eq!(parse_range("0:1:3").unwrap(), vec![0.0, 0.5, 1.0]);
        assert_eq!(parse_range("-2:-2:1").unwrap(), vec![-2.0]);
        assert!(parse_range("0:1").is_err());
    }
}
