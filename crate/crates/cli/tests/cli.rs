use std::path::{Path, PathBuf};
use std::process::{Command, Output};

use tempfile::TempDir;

const HEADER: &str = "round,algorithm,K,eta_x,eta_y,gap_sq,grad_norm,robust_loss,elapsed_ns";

fn fedmm(args: &[&str], env_seed: Option<&str>) -> Output {
    let mut cmd = Command::new(env!("CARGO_BIN_EXE_fedmm"));
    cmd.args(args).env_remove("FEDMM_SEED");
    if let Some(s) = env_seed {
        cmd.env("FEDMM_SEED", s);
    }
    cmd.output().expect("spawn fedmm")
}

fn write(dir: &Path, name: &str, text: &str) -> PathBuf {
    let p = dir.join(name);
    std::fs::write(&p, text).unwrap();
    p
}

fn arg(p: &Path) -> &str {
    p.to_str().unwrap()
}

struct Row {
    round: usize,
    algorithm: String,
    gap_sq: Option<f64>,
    grad_norm: f64,
    robust_loss: Option<f64>,
    elapsed: String,
}

fn read_trace(path: &Path) -> Vec<Row> {
    let text = std::fs::read_to_string(path).unwrap();
    let mut lines = text.lines();
    assert_eq!(lines.next(), Some(HEADER));
    let num = |s: &str| (!s.is_empty()).then(|| s.parse::<f64>().unwrap());
    lines
        .map(|l| {
            let f: Vec<&str> = l.split(',').collect();
            assert_eq!(f.len(), 9, "{l}");
            Row {
                round: f[0].parse().unwrap(),
                algorithm: f[1].to_string(),
                gap_sq: num(f[5]),
                grad_norm: f[6].parse().unwrap(),
                robust_loss: num(f[7]),
                elapsed: f[8].to_string(),
            }
        })
        .collect()
}

fn stdout_value(out: &Output, key: &str) -> f64 {
    String::from_utf8_lossy(&out.stdout)
        .lines()
        .find_map(|l| {
            l.strip_prefix(key)
                .map(|v| v.trim().parse::<f64>().unwrap())
        })
        .unwrap_or_else(|| panic!("no {key} in output"))
}

const SCALAR_GT: &str = r#"
[problem]
kind = "scalar2"

[[algo]]
name = "FedGDAGT"
K = 5
eta = "auto"
rounds = ROUNDS

[output]
trace = "trace.csv"
emit_plot_data = true
"#;

#[test]
fn run_scalar_fedgda_gt_auto_stepsize() {
    let dir = TempDir::new().unwrap();
    let cfg = write(dir.path(), "c.toml", &SCALAR_GT.replace("ROUNDS", "300"));
    let out = fedmm(&["run", arg(&cfg)], None);
    assert!(
        out.status.success(),
        "{}",
        String::from_utf8_lossy(&out.stderr)
    );
    let rows = read_trace(&dir.path().join("trace.csv"));
    assert_eq!(rows.len(), 301);
    assert!(rows
        .iter()
        .enumerate()
        .all(|(t, r)| r.round == t && r.algorithm == "FedGDAGT"));
    assert!(rows.last().unwrap().grad_norm <= 1e-10);
    assert!(rows
        .iter()
        .all(|r| r.gap_sq.is_some() && r.robust_loss.is_none() && r.elapsed.is_empty()));

    let plot = std::fs::read_to_string(dir.path().join("trace.plot.csv")).unwrap();
    assert!(plot.starts_with("algorithm,round,metric,value\nFedGDAGT,0,gap_sq,"));
    assert_eq!(plot.lines().count(), 302);
}

#[test]
fn zero_rounds_gives_only_the_initial_record() {
    let dir = TempDir::new().unwrap();
    let cfg = write(dir.path(), "c.toml", &SCALAR_GT.replace("ROUNDS", "0"));
    assert!(fedmm(&["run", arg(&cfg)], None).status.success());
    let rows = read_trace(&dir.path().join("trace.csv"));
    assert_eq!(rows.len(), 1);
    assert_eq!(rows[0].round, 0);
}

#[test]
fn timing_column_is_opt_in() {
    let dir = TempDir::new().unwrap();
    let text = SCALAR_GT
        .replace("ROUNDS", "3")
        .replace("emit_plot_data = true", "record_timing = true");
    let cfg = write(dir.path(), "c.toml", &text);
    assert!(fedmm(&["run", arg(&cfg)], None).status.success());
    let rows = read_trace(&dir.path().join("trace.csv"));
    assert!(rows.iter().all(|r| r.elapsed.parse::<u64>().is_ok()));
}

#[test]
fn unknown_keys_are_config_errors() {
    let dir = TempDir::new().unwrap();
    let text = SCALAR_GT
        .replace("ROUNDS", "3")
        .replace("K = 5", "K = 5\nstepsize = 0.1");
    let cfg = write(dir.path(), "c.toml", &text);
    let out = fedmm(&["run", arg(&cfg)], None);
    assert_eq!(out.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&out.stderr).contains("stepsize"));

    let cfg = write(
        dir.path(),
        "d.toml",
        &SCALAR_GT
            .replace("ROUNDS", "3")
            .replace("FedGDAGT", "FedAvg"),
    );
    assert_eq!(fedmm(&["run", arg(&cfg)], None).status.code(), Some(2));

    let text = SCALAR_GT
        .replace("ROUNDS", "3")
        .replace("eta = \"auto\"", "eta_x = 0.1\neta_y = 0.2");
    let cfg = write(dir.path(), "e.toml", &text);
    assert_eq!(fedmm(&["run", arg(&cfg)], None).status.code(), Some(2));

    assert_eq!(
        fedmm(&["run", "/nonexistent/c.toml"], None).status.code(),
        Some(2)
    );
    assert_eq!(fedmm(&["frobnicate"], None).status.code(), Some(2));
}

#[test]
fn run_rejects_several_blocks_and_compare_needs_two() {
    let dir = TempDir::new().unwrap();
    let cfg = write(dir.path(), "c.toml", &SCALAR_GT.replace("ROUNDS", "3"));
    assert_eq!(fedmm(&["compare", arg(&cfg)], None).status.code(), Some(2));
}

#[test]
fn divergence_exits_with_three() {
    let dir = TempDir::new().unwrap();
    let text = r#"
[problem]
kind = "scalar2"
[[algo]]
name = "GDA"
eta = 1.0
rounds = 1000
init_x = [1.0]
init_y = [1.0]
[output]
trace = "t.csv"
"#;
    let cfg = write(dir.path(), "c.toml", text);
    let out = fedmm(&["run", arg(&cfg)], None);
    assert_eq!(out.status.code(), Some(3));
    assert!(String::from_utf8_lossy(&out.stderr).contains("round"));
}

#[test]
fn fixed_point_reports() {
    let out = fedmm(&["fixed-point", "--K", "1", "--eta", "0.1"], None);
    assert!(out.status.success());
    assert!(stdout_value(&out, "gap_sq") <= 1e-10);

    let mut last = 0.0;
    for k in ["10", "20", "50"] {
        let out = fedmm(&["fixed-point", "--K", k, "--eta", "0.001"], None);
        assert!(out.status.success());
        let gap = stdout_value(&out, "gap_sq");
        assert!(gap > last);
        last = gap;
        assert!(stdout_value(&out, "formula_vs_simulation") <= 1e-6);
    }

    assert_eq!(
        fedmm(&["fixed-point", "--K", "10", "--eta", "0.3"], None)
            .status
            .code(),
        Some(2)
    );
}

const QUAD_COMPARE: &str = r#"
[problem]
kind = "quadratic"
m = 6
d = 5
n = 20
seed = 4

[[algo]]
name = "GDA"
eta = 1e-3
rounds = 40

[[algo]]
name = "LocalSGDA"
K = 20
eta = 1e-3
rounds = 40

[[algo]]
name = "FedGDAGT"
K = 20
eta = 1e-3
rounds = 40

[output]
trace = "cmp.csv"
"#;

#[test]
fn compare_writes_grouped_series() {
    let dir = TempDir::new().unwrap();
    let cfg = write(dir.path(), "c.toml", QUAD_COMPARE);
    let out = fedmm(&["compare", arg(&cfg)], None);
    assert!(
        out.status.success(),
        "{}",
        String::from_utf8_lossy(&out.stderr)
    );
    let rows = read_trace(&dir.path().join("cmp.csv"));
    assert_eq!(rows.len(), 3 * 41);
    for (g, name) in ["GDA", "LocalSGDA", "FedGDAGT"].iter().enumerate() {
        let group = &rows[g * 41..(g + 1) * 41];
        assert!(group
            .iter()
            .enumerate()
            .all(|(t, r)| r.round == t && r.algorithm == *name));
    }
}

#[test]
fn duplicate_algorithms_get_k_suffixes() {
    let dir = TempDir::new().unwrap();
    let text = QUAD_COMPARE.replacen(
        "name = \"GDA\"\neta = 1e-3",
        "name = \"LocalSGDA\"\nK = 5\neta = 1e-3",
        1,
    );
    let cfg = write(dir.path(), "c.toml", &text);
    assert!(fedmm(&["compare", arg(&cfg)], None).status.success());
    let rows = read_trace(&dir.path().join("cmp.csv"));
    assert_eq!(rows[0].algorithm, "LocalSGDA-K5");
    assert_eq!(rows[41].algorithm, "LocalSGDA-K20");
}

#[test]
fn fedgda_gt_beats_local_sgda_on_heterogeneous_quadratics() {
    let dir = TempDir::new().unwrap();
    let text = r#"
[problem]
kind = "quadratic"
m = 20
d = 50
n = 500
seed = 1

[[algo]]
name = "LocalSGDA"
K = 20
eta = 1e-4
rounds = 200

[[algo]]
name = "FedGDAGT"
K = 20
eta = 1e-4
rounds = 200

[output]
trace = "q.csv"
"#;
    let cfg = write(dir.path(), "c.toml", text);
    assert!(fedmm(&["compare", arg(&cfg)], None).status.success());
    let rows = read_trace(&dir.path().join("q.csv"));
    let local = rows[200].gap_sq.unwrap();
    let gt = rows[401].gap_sq.unwrap();
    assert!(local >= 1e4 * gt, "local {local}, gt {gt}");
}

#[test]
fn rlr_sweep_has_robust_loss_every_round() {
    let dir = TempDir::new().unwrap();
    for alpha in ["1.0", "5.0", "20.0"] {
        let text = format!(
            r#"
[problem]
kind = "rlr"
m = 4
d = 3
n = 20
alpha = {alpha}
seed = 2

[[algo]]
name = "LocalSGDA"
K = 5
eta = "auto"
rounds = 15

[[algo]]
name = "FedGDAGT"
K = 5
eta = "auto"
rounds = 15

[output]
trace = "rlr.csv"
"#
        );
        let cfg = write(dir.path(), "c.toml", &text);
        assert!(fedmm(&["compare", arg(&cfg)], None).status.success());
        let rows = read_trace(&dir.path().join("rlr.csv"));
        assert_eq!(rows.len(), 32);
        assert!(rows
            .iter()
            .all(|r| r.robust_loss.is_some_and(f64::is_finite) && r.gap_sq.is_none()));
    }
}

#[test]
fn identical_seeds_give_identical_bytes() {
    let dir = TempDir::new().unwrap();
    let cfg = write(dir.path(), "c.toml", QUAD_COMPARE);
    assert!(fedmm(&["compare", arg(&cfg)], None).status.success());
    let first = std::fs::read(dir.path().join("cmp.csv")).unwrap();
    assert!(fedmm(&["compare", arg(&cfg)], None).status.success());
    assert_eq!(first, std::fs::read(dir.path().join("cmp.csv")).unwrap());

    // The environment override changes the generated problem.
    assert!(fedmm(&["compare", arg(&cfg)], Some("5")).status.success());
    assert_ne!(first, std::fs::read(dir.path().join("cmp.csv")).unwrap());
    // Overriding with the config's own seed reproduces it.
    assert!(fedmm(&["compare", arg(&cfg)], Some("4")).status.success());
    assert_eq!(first, std::fs::read(dir.path().join("cmp.csv")).unwrap());

    assert_eq!(
        fedmm(&["compare", arg(&cfg)], Some("abc")).status.code(),
        Some(2)
    );
}

#[test]
fn generated_data_replays_identically() {
    let dir = TempDir::new().unwrap();
    let cfg = write(dir.path(), "c.toml", QUAD_COMPARE);
    let dump = dir.path().join("q.bin");
    assert!(fedmm(&["gen-data", arg(&cfg), "--out", arg(&dump)], None)
        .status
        .success());
    assert!(fedmm(&["compare", arg(&cfg)], None).status.success());
    let generated = std::fs::read(dir.path().join("cmp.csv")).unwrap();

    let replay = QUAD_COMPARE
        .replace("m = 6\nd = 5\nn = 20\nseed = 4", "data = \"q.bin\"")
        .replace("cmp.csv", "replay.csv");
    let cfg2 = write(dir.path(), "r.toml", &replay);
    let out = fedmm(&["compare", arg(&cfg2)], None);
    assert!(
        out.status.success(),
        "{}",
        String::from_utf8_lossy(&out.stderr)
    );
    assert_eq!(
        generated,
        std::fs::read(dir.path().join("replay.csv")).unwrap()
    );

    let scalar = write(dir.path(), "s.toml", &SCALAR_GT.replace("ROUNDS", "3"));
    assert_eq!(
        fedmm(&["gen-data", arg(&scalar), "--out", arg(&dump)], None)
            .status
            .code(),
        Some(2)
    );
}

#[test]
fn bounds_subcommand() {
    let dir = TempDir::new().unwrap();
    let text = r#"
m = 1
n = 100
M_i = [1.0]
cover_size = 1.0
delta = 0.36787944117144233
epsilon = 0.1
L_y = 0.0
rademacher = 0.0
vc_dim = 5
empirical_risk = 0.25
"#;
    let f = write(dir.path(), "b.toml", text);
    let out = fedmm(&["bounds", arg(&f)], None);
    assert!(
        out.status.success(),
        "{}",
        String::from_utf8_lossy(&out.stderr)
    );
    let s = String::from_utf8_lossy(&out.stdout);
    assert!(s.contains("[fixed_y]") && s.contains("[worst_case]") && s.contains("[vc_rademacher]"));
    let total = stdout_value(&out, "total");
    assert!((total - (0.25 + 0.005f64.sqrt())).abs() <= 1e-12);

    let bad = write(
        dir.path(),
        "bad.toml",
        &text.replace("delta = 0.36787944117144233", "delta = 1.5"),
    );
    assert_eq!(fedmm(&["bounds", arg(&bad)], None).status.code(), Some(2));
    let bad = write(dir.path(), "bad2.toml", &text.replace("L_y", "Ly"));
    assert_eq!(fedmm(&["bounds", arg(&bad)], None).status.code(), Some(2));
}
