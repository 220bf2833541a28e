//! CSV trace output.
//!
//! Trace files have the header
//! `round,algorithm,K,eta_x,eta_y,gap_sq,grad_norm,robust_loss,elapsed_ns`
//! with one row per (series, round), grouped by series in config order.
//! Missing metrics are empty fields. Floats use Rust's shortest
//! round-trip scientific notation, so identical runs give identical bytes.
//!
//! Plot files are long-form `algorithm,round,metric,value`, carrying the
//! headline metric of each problem family: `gap_sq` when a reference point
//! is known, else `robust_loss`, else `grad_norm`.

use std::io::Write;

use crate::error::CliResult;
use crate::experiment::LabelledTrace;

pub const TRACE_HEADER: [&str; 9] = [
    "round",
    "algorithm",
    "K",
    "eta_x",
    "eta_y",
    "gap_sq",
    "grad_norm",
    "robust_loss",
    "elapsed_ns",
];

pub fn fmt_float(v: f64) -> String {
    format!("{v:e}")
}

fn opt(v: Option<f64>) -> String {
    v.map(fmt_float).unwrap_or_default()
}

pub fn write_trace<W: Write>(
    out: W,
    series: &[LabelledTrace],
    record_timing: bool,
) -> CliResult<()> {
    let mut w = csv::Writer::from_writer(out);
    w.write_record(TRACE_HEADER)?;
    for s in series {
        let cfg = &s.trace.config;
        let (k, ex, ey) = (
            cfg.local_steps.to_string(),
            fmt_float(cfg.eta_x()),
            fmt_float(cfg.eta_y()),
        );
        for r in &s.trace.records {
            let elapsed = if record_timing {
                r.elapsed_ns.to_string()
            } else {
                String::new()
            };
            w.write_record([
                r.round.to_string(),
                s.label.clone(),
                k.clone(),
                ex.clone(),
                ey.clone(),
                opt(r.gap_sq),
                fmt_float(r.grad_norm),
                opt(r.robust_loss),
                elapsed,
            ])?;
        }
    }
    w.flush()?;
    Ok(())
}

pub fn write_plot_data<W: Write>(out: W, series: &[LabelledTrace]) -> CliResult<()> {
    let mut w = csv::Writer::from_writer(out);
    w.write_record(["algorithm", "round", "metric", "value"])?;
    for s in series {
        for r in &s.trace.records {
            let (metric, value) = match (r.gap_sq, r.robust_loss) {
                (Some(g), _) => ("gap_sq", g),
                (None, Some(l)) => ("robust_loss", l),
                (None, None) => ("grad_norm", r.grad_norm),
            };
            w.write_record([
                s.label.clone(),
                r.round.to_string(),
                metric.to_string(),
                fmt_float(value),
            ])?;
        }
    }
    w.flush()?;
    Ok(())
}
