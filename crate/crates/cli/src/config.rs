//! Experiment configuration files (TOML).
//!
//! ```toml
//! [problem]
//! kind = "quadratic"     # scalar2 | quadratic | rlr
//! m = 20
//! d = 50
//! n = 500
//! seed = 1
//! # alpha = 5.0          # rlr heterogeneity
//! # radius_x = 10.0      # optional origin-centred balls
//! # radius_y = 10.0
//! # data = "dump.bin"    # replay a `gen-data` dump instead of generating
//!
//! [[algo]]
//! name = "FedGDAGT"      # GDA | LocalSGDA | FedGDAGT
//! K = 20
//! eta = 1e-4             # or "auto"; or eta_x / eta_y (not for FedGDAGT)
//! rounds = 1000
//! # label = "gt-20"
//! # init_x = [...]       # default: zeros
//! # init_y = [...]
//!
//! [output]
//! trace = "trace.csv"
//! emit_plot_data = false
//! record_timing = false
//! ```
//!
//! Unknown keys are rejected. The `FEDMM_SEED` environment variable, when
//! set, overrides `problem.seed`.

use std::path::{Path, PathBuf};

use serde::Deserialize;

use crate::error::{CliError, CliResult};

pub const SEED_ENV: &str = "FEDMM_SEED";

#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RunConfig {
    pub problem: ProblemConfig,
    #[serde(default)]
    pub algo: Vec<AlgoBlock>,
    /// Required by `run` and `compare`; `gen-data` only reads `[problem]`.
    pub output: Option<OutputConfig>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum ProblemKind {
    Scalar2,
    Quadratic,
    Rlr,
}

#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ProblemConfig {
    pub kind: ProblemKind,
    pub m: Option<usize>,
    pub d: Option<usize>,
    pub n: Option<usize>,
    pub alpha: Option<f64>,
    #[serde(default)]
    pub seed: u64,
    pub radius_x: Option<f64>,
    pub radius_y: Option<f64>,
    pub data: Option<PathBuf>,
}

#[derive(Debug, Clone, PartialEq, Deserialize)]
#[serde(untagged)]
pub enum EtaSpec {
    Value(f64),
    Keyword(String),
}

#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct AlgoBlock {
    pub name: String,
    #[serde(rename = "K", default = "one")]
    pub k: usize,
    pub eta: Option<EtaSpec>,
    pub eta_x: Option<f64>,
    pub eta_y: Option<f64>,
    pub rounds: usize,
    pub label: Option<String>,
    pub init_x: Option<Vec<f64>>,
    pub init_y: Option<Vec<f64>>,
}

fn one() -> usize {
    1
}

#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct OutputConfig {
    pub trace: PathBuf,
    #[serde(default)]
    pub emit_plot_data: bool,
    /// Fill the `elapsed_ns` column. Off by default so that repeated runs
    /// produce identical files.
    #[serde(default)]
    pub record_timing: bool,
}

/// Stepsize request after parsing `eta` / `eta_x` / `eta_y`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum StepsizeRequest {
    Auto,
    Shared(f64),
    Separate { x: f64, y: f64 },
}

impl AlgoBlock {
    pub fn stepsize_request(&self) -> CliResult<StepsizeRequest> {
        match (&self.eta, self.eta_x, self.eta_y) {
            (Some(EtaSpec::Value(v)), None, None) => Ok(StepsizeRequest::Shared(*v)),
            (Some(EtaSpec::Keyword(k)), None, None) if k == "auto" => Ok(StepsizeRequest::Auto),
            (Some(EtaSpec::Keyword(k)), None, None) => Err(CliError::config(format!(
                "algo {:?}: eta must be a number or \"auto\" (got {k:?})",
                self.name
            ))),
            (None, Some(x), Some(y)) => Ok(StepsizeRequest::Separate { x, y }),
            (None, None, None) => Err(CliError::config(format!(
                "algo {:?}: missing stepsize (set eta, or eta_x and eta_y)",
                self.name
            ))),
            _ => Err(CliError::config(format!(
                "algo {:?}: give either eta or both eta_x and eta_y",
                self.name
            ))),
        }
    }
}

impl RunConfig {
    pub fn from_toml(text: &str) -> CliResult<Self> {
        let mut cfg: RunConfig =
            toml::from_str(text).map_err(|e| CliError::config(e.to_string()))?;
        cfg.apply_seed_override(std::env::var(SEED_ENV).ok().as_deref())?;
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn load(path: &Path) -> CliResult<Self> {
        let text = std::fs::read_to_string(path)
            .map_err(|e| CliError::config(format!("cannot read {}: {e}", path.display())))?;
        let mut cfg = Self::from_toml(&text)?;
        // Relative paths resolve against the config file's directory.
        let base = path.parent().unwrap_or(Path::new(""));
        if let Some(out) = &mut cfg.output {
            if out.trace.is_relative() {
                out.trace = base.join(&out.trace);
            }
        }
        if let Some(data) = &cfg.problem.data {
            if data.is_relative() {
                cfg.problem.data = Some(base.join(data));
            }
        }
        Ok(cfg)
    }

    pub fn apply_seed_override(&mut self, value: Option<&str>) -> CliResult<()> {
        if let Some(v) = value {
            self.problem.seed = v.trim().parse().map_err(|_| {
                CliError::config(format!(
                    "{SEED_ENV} must be an unsigned integer (got {v:?})"
                ))
            })?;
        }
        Ok(())
    }

    pub fn validate(&self) -> CliResult<()> {
        let p = &self.problem;
        let need = |v: Option<usize>, key: &str| -> CliResult<usize> {
            match v {
                Some(x) if x >= 1 => Ok(x),
                Some(_) => Err(CliError::config(format!("problem.{key} must be >= 1"))),
                None => Err(CliError::config(format!(
                    "problem.{key} is required for kind {:?}",
                    p.kind
                ))),
            }
        };
        match p.kind {
            ProblemKind::Scalar2 => {
                for (key, v) in [("m", p.m), ("d", p.d), ("n", p.n)] {
                    if v.is_some() {
                        return Err(CliError::config(format!(
                            "problem.{key} is not used by kind scalar2"
                        )));
                    }
                }
                if p.alpha.is_some() || p.data.is_some() {
                    return Err(CliError::config("scalar2 takes no alpha or data"));
                }
            }
            ProblemKind::Quadratic | ProblemKind::Rlr if p.data.is_none() => {
                need(p.m, "m")?;
                let d = need(p.d, "d")?;
                let n = need(p.n, "n")?;
                if p.kind == ProblemKind::Quadratic {
                    if n < d {
                        return Err(CliError::config("quadratic needs n >= d"));
                    }
                    if p.alpha.is_some() {
                        return Err(CliError::config("problem.alpha is only used by kind rlr"));
                    }
                } else {
                    match p.alpha {
                        Some(a) if a.is_finite() && a >= 0.0 => {}
                        Some(_) => return Err(CliError::config("problem.alpha must be >= 0")),
                        None => {
                            return Err(CliError::config("problem.alpha is required for kind rlr"))
                        }
                    }
                }
            }
            _ => {}
        }
        for (key, r) in [("radius_x", p.radius_x), ("radius_y", p.radius_y)] {
            if let Some(r) = r {
                if !(r.is_finite() && r > 0.0) {
                    return Err(CliError::config(format!("problem.{key} must be positive")));
                }
            }
        }
        for a in &self.algo {
            a.name
                .parse::<fedmm::algorithms::Algorithm>()
                .map_err(|e| CliError::config(e.to_string()))?;
            if a.k == 0 {
                return Err(CliError::config(format!(
                    "algo {:?}: K must be >= 1",
                    a.name
                )));
            }
            a.stepsize_request()?;
        }
        Ok(())
    }
}
