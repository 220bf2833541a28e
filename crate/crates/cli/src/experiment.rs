//! Builds problems from configs and runs algorithm blocks against them.

use std::collections::HashMap;
use std::fs::File;
use std::io::BufReader;

use fedmm::algorithms::{self, auto_stepsize, AlgoConfig, Algorithm, Metrics, RunTrace};
use fedmm::analysis::robust_loss;
use fedmm::datagen::{
    gen_quadratic, gen_rlr, read_dataset, DatasetKind, QuadraticGenSpec, RlrGenSpec,
};
use fedmm::problems::{ProblemInstance, ScalarTwoAgent};
use fedmm::{FeasibleSet, Iterate, MinimaxProblem, ProductSet};

use crate::config::{AlgoBlock, ProblemConfig, ProblemKind, RunConfig, StepsizeRequest};
use crate::error::{CliError, CliResult};

/// A generated (or replayed) problem with its reference data.
pub struct Experiment {
    pub problem: ProblemInstance<f64>,
    /// Minimax point, when known in closed form and feasible.
    pub z_star: Option<Iterate<f64>>,
}

/// One finished algorithm block.
pub struct LabelledTrace {
    pub label: String,
    pub trace: RunTrace<f64>,
}

pub fn build_problem(cfg: &ProblemConfig) -> CliResult<ProblemInstance<f64>> {
    let mut problem = match (cfg.kind, &cfg.data) {
        (ProblemKind::Scalar2, _) => ProblemInstance::ScalarTwoAgent(ScalarTwoAgent::new()),
        (kind, Some(path)) => {
            let file = File::open(path)
                .map_err(|e| CliError::config(format!("cannot open {}: {e}", path.display())))?;
            let ds = read_dataset::<f64, _>(&mut BufReader::new(file))?;
            let expected = match kind {
                ProblemKind::Quadratic => DatasetKind::Quadratic,
                _ => DatasetKind::Rlr,
            };
            if ds.header.kind != expected {
                return Err(CliError::config(format!(
                    "{} holds a {:?} dataset, config asks for {:?}",
                    path.display(),
                    ds.header.kind,
                    kind
                )));
            }
            ds.problem
        }
        (ProblemKind::Quadratic, None) => {
            ProblemInstance::Quadratic(gen_quadratic(&QuadraticGenSpec {
                m: cfg.m.unwrap_or_default(),
                d: cfg.d.unwrap_or_default(),
                n: cfg.n.unwrap_or_default(),
                seed: cfg.seed,
            })?)
        }
        (ProblemKind::Rlr, None) => ProblemInstance::Rlr(gen_rlr(&RlrGenSpec {
            m: cfg.m.unwrap_or_default(),
            d: cfg.d.unwrap_or_default(),
            n: cfg.n.unwrap_or_default(),
            alpha: cfg.alpha.unwrap_or_default(),
            seed: cfg.seed,
        })?),
    };
    if cfg.radius_x.is_some() || cfg.radius_y.is_some() {
        let (p, q) = problem.dims();
        let ball =
            |dim, r: Option<f64>, current: &FeasibleSet<f64>| -> CliResult<FeasibleSet<f64>> {
                Ok(match r {
                    Some(r) => FeasibleSet::origin_ball(dim, r)?,
                    None => current.clone(),
                })
            };
        let sets = problem.sets().clone();
        let sets = ProductSet::new(
            ball(p, cfg.radius_x, &sets.set_x)?,
            ball(q, cfg.radius_y, &sets.set_y)?,
        );
        problem = problem.with_sets(sets)?;
    }
    Ok(problem)
}

impl Experiment {
    pub fn new(cfg: &ProblemConfig) -> CliResult<Self> {
        let problem = build_problem(cfg)?;
        let z_star = match &problem {
            ProblemInstance::Rlr(_) => None,
            p => {
                let z = p.closed_form_minimax()?;
                let sets = p.sets();
                let feasible = sets.set_x.contains(&z.x, 1e-12) && sets.set_y.contains(&z.y, 1e-12);
                feasible.then_some(z)
            }
        };
        Ok(Self { problem, z_star })
    }

    /// Stepsizes `(η_x, η_y)` for one block; `"auto"` uses
    /// `½·min{2μ/L², 1/(2μK)}` on closed-form families and `1/(2L_x)` on
    /// robust regression.
    pub fn resolve_stepsizes(&self, block: &AlgoBlock, algo: Algorithm) -> CliResult<(f64, f64)> {
        let k = if algo == Algorithm::Gda { 1 } else { block.k };
        match block.stepsize_request()? {
            StepsizeRequest::Shared(eta) => Ok((eta, eta)),
            StepsizeRequest::Separate { x, y } => {
                if algo == Algorithm::FedGdaGt {
                    return Err(CliError::config(format!(
                        "algo {:?}: FedGDAGT takes a single eta",
                        block.name
                    )));
                }
                Ok((x, y))
            }
            StepsizeRequest::Auto => {
                let eta = match &self.problem {
                    ProblemInstance::Rlr(p) => 0.5 / p.x_smoothness()?,
                    p => auto_stepsize(p.estimate_constants()?, k)?,
                };
                Ok((eta, eta))
            }
        }
    }

    pub fn algo_config(&self, block: &AlgoBlock) -> CliResult<AlgoConfig<f64>> {
        let algo: Algorithm = block
            .name
            .parse()
            .map_err(|e: fedmm::FedError| CliError::config(e.to_string()))?;
        let (eta_x, eta_y) = self.resolve_stepsizes(block, algo)?;
        let (p, q) = self.problem.dims();
        let init_block = |v: &Option<Vec<f64>>, dim: usize, key: &str| -> CliResult<Vec<f64>> {
            match v {
                None => Ok(vec![0.0; dim]),
                Some(v) if v.len() == dim => Ok(v.clone()),
                Some(v) => Err(CliError::config(format!(
                    "algo {:?}: {key} has {} entries, problem needs {dim}",
                    block.name,
                    v.len()
                ))),
            }
        };
        let init = Iterate::new(
            init_block(&block.init_x, p, "init_x")?,
            init_block(&block.init_y, q, "init_y")?,
        )?;
        let cfg = match algo {
            Algorithm::Gda => {
                if block.k != 1 {
                    return Err(CliError::config(format!(
                        "algo {:?}: GDA runs one step per round (K must be 1)",
                        block.name
                    )));
                }
                AlgoConfig::gda(eta_x, eta_y, block.rounds, init)
            }
            Algorithm::LocalSgda => {
                AlgoConfig::local_sgda(eta_x, eta_y, block.k, block.rounds, init)
            }
            Algorithm::FedGdaGt => AlgoConfig::fedgda_gt(eta_x, block.k, block.rounds, init),
        };
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn run_block(&self, block: &AlgoBlock) -> CliResult<RunTrace<f64>> {
        let cfg = self.algo_config(block)?;
        let loss;
        let mut metrics = Metrics {
            z_star: self.z_star.as_ref(),
            robust_loss: None,
        };
        if let ProblemInstance::Rlr(p) = &self.problem {
            loss =
                move |z: &Iterate<f64>| robust_loss(p, &z.x).map(|r| r.value).unwrap_or(f64::NAN);
            metrics.robust_loss = Some(&loss);
        }
        Ok(algorithms::run(&self.problem, &cfg, &metrics)?)
    }
}

/// Series labels: the block's `label`, else its algorithm name, with
/// `-K{K}` appended when several blocks share a name.
pub fn labels(blocks: &[AlgoBlock]) -> CliResult<Vec<String>> {
    let mut counts: HashMap<&str, usize> = HashMap::new();
    for b in blocks.iter().filter(|b| b.label.is_none()) {
        *counts.entry(b.name.as_str()).or_default() += 1;
    }
    let labels: Vec<String> = blocks
        .iter()
        .map(|b| match &b.label {
            Some(l) => l.clone(),
            None if counts[b.name.as_str()] > 1 => format!("{}-K{}", b.name, b.k),
            None => b.name.clone(),
        })
        .collect();
    let mut seen = std::collections::HashSet::new();
    for l in &labels {
        if !seen.insert(l) {
            return Err(CliError::config(format!(
                "duplicate series label {l:?}; set distinct `label` keys"
            )));
        }
    }
    Ok(labels)
}

/// Runs every block of `cfg` on one shared problem.
pub fn run_all(cfg: &RunConfig) -> CliResult<(Experiment, Vec<LabelledTrace>)> {
    let labels = labels(&cfg.algo)?;
    let exp = Experiment::new(&cfg.problem)?;
    // Validate every block before spending time on any run.
    for b in &cfg.algo {
        exp.algo_config(b)?;
    }
    let mut out = Vec::with_capacity(cfg.algo.len());
    for (block, label) in cfg.algo.iter().zip(labels) {
        let trace = exp.run_block(block)?;
        out.push(LabelledTrace { label, trace });
    }
    Ok((exp, out))
}
