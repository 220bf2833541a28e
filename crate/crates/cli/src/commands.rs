use std::fs::File;
use std::io::{BufWriter, Write};
use std::path::{Path, PathBuf};

use fedmm::analysis::fixed_point_report;
use fedmm::datagen::write_dataset;
use fedmm::genbounds::{
    fixed_y_bound, vc_rademacher_bound, worst_case_bound, BoundInputs, BoundTerms,
};
use fedmm::problems::ProblemInstance;
use serde::Deserialize;

use crate::config::{OutputConfig, ProblemKind, RunConfig};
use crate::error::{CliError, CliResult};
use crate::experiment::{run_all, LabelledTrace};
use crate::trace_csv::{fmt_float, write_plot_data, write_trace};

/// `<trace stem>.plot.csv` next to the trace file.
pub fn plot_path(trace: &Path) -> PathBuf {
    let stem = trace
        .file_stem()
        .and_then(|s| s.to_str())
        .unwrap_or("trace");
    trace.with_file_name(format!("{stem}.plot.csv"))
}

fn write_outputs(out: &OutputConfig, series: &[LabelledTrace]) -> CliResult<()> {
    let file = File::create(&out.trace)
        .map_err(|e| CliError::Other(format!("cannot create {}: {e}", out.trace.display())))?;
    write_trace(BufWriter::new(file), series, out.record_timing)?;
    if out.emit_plot_data {
        let path = plot_path(&out.trace);
        let file = File::create(&path)
            .map_err(|e| CliError::Other(format!("cannot create {}: {e}", path.display())))?;
        write_plot_data(BufWriter::new(file), series)?;
    }
    Ok(())
}

fn summarize<W: Write>(w: &mut W, series: &[LabelledTrace]) -> CliResult<()> {
    for s in series {
        let last = s.trace.final_record();
        write!(
            w,
            "{}: {} rounds, grad_norm {}",
            s.label,
            last.round,
            fmt_float(last.grad_norm)
        )?;
        if let Some(g) = last.gap_sq {
            write!(w, ", gap_sq {}", fmt_float(g))?;
        }
        if let Some(l) = last.robust_loss {
            write!(w, ", robust_loss {}", fmt_float(l))?;
        }
        writeln!(w)?;
    }
    Ok(())
}

fn output_of(cfg: &RunConfig) -> CliResult<&OutputConfig> {
    cfg.output
        .as_ref()
        .ok_or_else(|| CliError::config("missing [output] section"))
}

pub fn cmd_run<W: Write>(config: &Path, stdout: &mut W) -> CliResult<()> {
    let cfg = RunConfig::load(config)?;
    if cfg.algo.len() != 1 {
        return Err(CliError::config(format!(
            "run takes exactly one [[algo]] block (found {}); use compare for more",
            cfg.algo.len()
        )));
    }
    let out = output_of(&cfg)?;
    let (_, series) = run_all(&cfg)?;
    write_outputs(out, &series)?;
    summarize(stdout, &series)
}

pub fn cmd_compare<W: Write>(config: &Path, stdout: &mut W) -> CliResult<()> {
    let cfg = RunConfig::load(config)?;
    if cfg.algo.len() < 2 {
        return Err(CliError::config(format!(
            "compare needs at least two [[algo]] blocks (found {})",
            cfg.algo.len()
        )));
    }
    let out = output_of(&cfg)?;
    let (_, series) = run_all(&cfg)?;
    write_outputs(out, &series)?;
    summarize(stdout, &series)
}

pub fn cmd_fixed_point<W: Write>(
    k: usize,
    eta: f64,
    eta_y: Option<f64>,
    max_rounds: usize,
    stdout: &mut W,
) -> CliResult<()> {
    let r = fixed_point_report(k, eta, eta_y.unwrap_or(eta), max_rounds)?;
    writeln!(stdout, "K                      {}", r.local_steps)?;
    writeln!(stdout, "eta_x                  {}", fmt_float(r.eta_x))?;
    writeln!(stdout, "eta_y                  {}", fmt_float(r.eta_y))?;
    writeln!(
        stdout,
        "closed_form_x          {}",
        fmt_float(r.z_fixed.x[0])
    )?;
    writeln!(
        stdout,
        "closed_form_y          {}",
        fmt_float(r.z_fixed.y[0])
    )?;
    writeln!(
        stdout,
        "simulated_x            {}",
        fmt_float(r.simulated.z.x[0])
    )?;
    writeln!(
        stdout,
        "simulated_y            {}",
        fmt_float(r.simulated.z.y[0])
    )?;
    writeln!(stdout, "simulated_rounds       {}", r.simulated.rounds)?;
    writeln!(stdout, "simulated_converged    {}", r.simulated.converged)?;
    writeln!(
        stdout,
        "formula_vs_simulation  {}",
        fmt_float(r.formula_vs_simulation)
    )?;
    writeln!(
        stdout,
        "minimax_point          {}",
        fmt_float(r.z_star.x[0])
    )?;
    writeln!(stdout, "gap_sq                 {}", fmt_float(r.gap))?;
    writeln!(
        stdout,
        "residual_norm          {}",
        fmt_float(r.residual_norm)
    )?;
    writeln!(stdout, "grad_norm              {}", fmt_float(r.grad_norm))?;
    Ok(())
}

/// Input file of the `bounds` subcommand.
#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct BoundsFile {
    pub m: usize,
    pub n: usize,
    #[serde(rename = "M_i")]
    pub m_i: Vec<f64>,
    #[serde(rename = "M_i_profiles", default)]
    pub m_i_profiles: Vec<Vec<f64>>,
    pub cover_size: f64,
    pub delta: f64,
    pub epsilon: f64,
    #[serde(rename = "L_y")]
    pub l_y: f64,
    pub rademacher: f64,
    pub vc_dim: Option<usize>,
    #[serde(default)]
    pub empirical_risk: f64,
    #[serde(default)]
    pub worst_case_empirical: f64,
}

fn print_terms<W: Write>(w: &mut W, name: &str, t: &BoundTerms<f64>) -> CliResult<()> {
    writeln!(w, "[{name}]")?;
    writeln!(w, "empirical        {}", fmt_float(t.empirical))?;
    writeln!(w, "complexity       {}", fmt_float(t.complexity))?;
    writeln!(w, "concentration    {}", fmt_float(t.concentration))?;
    writeln!(w, "discretization   {}", fmt_float(t.discretization))?;
    writeln!(w, "total            {}", fmt_float(t.total))?;
    Ok(())
}

pub fn cmd_bounds<W: Write>(inputs: &Path, stdout: &mut W) -> CliResult<()> {
    let text = std::fs::read_to_string(inputs)
        .map_err(|e| CliError::config(format!("cannot read {}: {e}", inputs.display())))?;
    let f: BoundsFile = toml::from_str(&text).map_err(|e| CliError::config(e.to_string()))?;
    let b = BoundInputs {
        m: f.m,
        n: f.n,
        m_i: f.m_i,
        m_i_profiles: f.m_i_profiles,
        cover_size: f.cover_size,
        delta: f.delta,
        epsilon: f.epsilon,
        l_y: f.l_y,
        rademacher: f.rademacher,
    };
    let fixed = fixed_y_bound(&b, f.empirical_risk)?;
    let worst = worst_case_bound(&b, f.worst_case_empirical)?;
    print_terms(stdout, "fixed_y", &fixed)?;
    print_terms(stdout, "worst_case", &worst)?;
    if let Some(d) = f.vc_dim {
        let v = vc_rademacher_bound(f.m, f.n, d, b.max_sum_m2())?;
        writeln!(stdout, "[vc_rademacher]")?;
        writeln!(stdout, "bound            {}", fmt_float(v))?;
    }
    Ok(())
}

pub fn cmd_gen_data<W: Write>(config: &Path, out: &Path, stdout: &mut W) -> CliResult<()> {
    let cfg = RunConfig::load(config)?;
    let p = &cfg.problem;
    if p.kind == ProblemKind::Scalar2 {
        return Err(CliError::config("scalar2 has no generated data to dump"));
    }
    if p.data.is_some() {
        return Err(CliError::config(
            "gen-data generates from a recipe; remove problem.data",
        ));
    }
    let problem = crate::experiment::build_problem(p)?;
    let n = p.n.unwrap_or_default();
    let alpha = match problem {
        ProblemInstance::Rlr(_) => p.alpha.unwrap_or_default(),
        _ => 0.0,
    };
    let file = File::create(out)
        .map_err(|e| CliError::Other(format!("cannot create {}: {e}", out.display())))?;
    let mut w = BufWriter::new(file);
    write_dataset(&mut w, &problem, p.seed, n, alpha)?;
    w.flush()?;
    writeln!(
        stdout,
        "wrote {} dataset (seed {}) to {}",
        problem.kind(),
        p.seed,
        out.display()
    )?;
    Ok(())
}
