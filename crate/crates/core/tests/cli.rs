use std::fs;
use std::path::Path;
use std::process::Command as Proc;

use tvdecay::cli::{execute, run, Command, RunOptions};
use tvdecay::config::Scenario;
use tvdecay::Error;

const SMALL: &str = "\
potential.family = gaussian
grid.n_points = 401
initial.shape = shifted_gaussian
initial.shift = 0.5
sim.dt = 5e-3
sim.t_end = 2
sim.save_every = 10
envelopes = poincare_l2, truncation_poincare, logsob
bounds.n = 25
";

fn file<'a>(out: &'a tvdecay::cli::Outputs, name: &str) -> &'a str {
    &out.files.iter().find(|(n, _)| n == name).unwrap().1
}

fn csv_shape(body: &str) -> (Vec<String>, Vec<usize>) {
    let mut lines = body.lines();
    let header: Vec<String> = lines.next().unwrap().split(',').map(String::from).collect();
    let widths = lines.map(|l| l.split(',').count()).collect();
    (header, widths)
}

#[test]
fn bounds_writes_requested_grid() {
    let out = execute(Command::Bounds, Scenario::parse(SMALL).unwrap(), Some(17), 0).unwrap();
    let (header, rows) = csv_shape(file(&out, "curves.csv"));
    assert_eq!(header, ["t", "bound_poincare_l2", "bound_truncation_poincare", "bound_logsob"]);
    assert_eq!(rows.len(), 17);
    assert!(rows.iter().all(|&w| w == 4));
    let c: serde_json::Value = serde_json::from_str(file(&out, "constants.json")).unwrap();
    assert!(c["provenance"]["tool_version"].is_string());
}

#[test]
fn simulate_columns_and_summary() {
    let out = execute(Command::Simulate, Scenario::parse(SMALL).unwrap(), None, 0).unwrap();
    let (header, rows) = csv_shape(file(&out, "curves.csv"));
    assert_eq!(
        header,
        ["t", "tv", "hellinger", "variance", "entropy", "i_psi", "v_reverse", "e_reverse"]
    );
    assert_eq!(rows.len(), 41);
    let s: serde_json::Value = serde_json::from_str(file(&out, "summary.json")).unwrap();
    assert_eq!(s["simulation"]["non_increasing"]["tv"], true);
}

#[test]
fn compare_flags_a_shrunken_poincare_constant() {
    let good = execute(Command::Compare, Scenario::parse(SMALL).unwrap(), None, 0).unwrap();
    let g: serde_json::Value = serde_json::from_str(file(&good, "summary.json")).unwrap();
    assert_eq!(g["all_dominated"], true);

    let text = format!("{SMALL}constants.c_p_scale = 0.1\n");
    let bad = execute(Command::Compare, Scenario::parse(&text).unwrap(), None, 0).unwrap();
    let b: serde_json::Value = serde_json::from_str(file(&bad, "summary.json")).unwrap();
    assert_eq!(b["all_dominated"], false);
    let flagged: Vec<&str> = b["envelopes"]
        .as_array()
        .unwrap()
        .iter()
        .filter(|e| e["flagged"] == true)
        .map(|e| e["name"].as_str().unwrap())
        .collect();
    assert!(flagged.contains(&"poincare_l2"));
}

#[test]
fn outputs_are_deterministic() {
    let a = execute(Command::Analyze, Scenario::parse(SMALL).unwrap(), None, 5).unwrap();
    let b = execute(Command::Analyze, Scenario::parse(SMALL).unwrap(), None, 5).unwrap();
    assert_eq!(a.files, b.files);
}

#[test]
fn config_errors() {
    let missing = Scenario::parse("grid.n_points = 401\n").unwrap_err();
    assert!(matches!(missing, Error::Config { ref key, .. } if key == "potential.family"));
    let unknown = Scenario::parse("potential.family = gaussian\ngrid.size = 3\n").unwrap_err();
    assert!(matches!(unknown, Error::Config { line: 2, .. }));
    let dup = Scenario::parse("potential.family = gaussian\npotential.family = power\n").unwrap_err();
    assert!(matches!(dup, Error::Config { line: 2, .. }));
    let env = Scenario::parse("potential.family = gaussian\nenvelopes = nonsense\n");
    assert!(env.is_err());
}

#[test]
fn config_text_roundtrip() {
    let text = fs::read_to_string(Path::new(env!("CARGO_MANIFEST_DIR")).join("scenarios/double_exponential.cfg")).unwrap();
    let sc = Scenario::parse(&text).unwrap();
    let again = Scenario::parse(&sc.to_config_text()).unwrap();
    assert_eq!(sc, again);
}

#[test]
fn run_writes_files() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = dir.path().join("s.cfg");
    fs::write(&cfg, SMALL).unwrap();
    let opts = RunOptions {
        command: Command::Bounds,
        config: cfg,
        out: dir.path().join("out"),
        t_grid: Some(5),
        seed: 0,
    };
    let files = run(&opts).unwrap();
    assert_eq!(files.len(), 2);
    assert!(files.iter().all(|f| f.exists()));
}

#[test]
fn binary_exit_codes() {
    let exe = env!("CARGO_BIN_EXE_tvdecay");
    let dir = tempfile::tempdir().unwrap();
    let good = dir.path().join("good.cfg");
    fs::write(&good, SMALL).unwrap();
    let bad = dir.path().join("bad.cfg");
    fs::write(&bad, "potential.family = banana\n").unwrap();
    let out = dir.path().join("o");

    let ok = Proc::new(exe)
        .args(["analyze", good.to_str().unwrap(), "--out", out.to_str().unwrap()])
        .env("TVDECAY_THREADS", "1")
        .status()
        .unwrap();
    assert!(ok.success());
    assert!(out.join("constants.json").exists());

    let cfg_err = Proc::new(exe).args(["analyze", bad.to_str().unwrap()]).output().unwrap();
    assert_eq!(cfg_err.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&cfg_err.stderr).contains("potential.family"));

    let usage = Proc::new(exe).arg("frobnicate").output().unwrap();
    assert!(!usage.status.success());
}
