//! Runs the `compare` pipeline on a bundled scenario and prints the
//! domination summary. Pass another scenario file as the first argument.

use std::path::PathBuf;

use tvdecay::cli::{execute, Command};
use tvdecay::config::Scenario;

fn main() {
    let path = std::env::args()
        .nth(1)
        .map(PathBuf::from)
        .unwrap_or_else(|| PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("scenarios/gaussian.cfg"));
    let scenario = match Scenario::from_file(&path) {
        Ok(s) => s,
        Err(e) => {
            eprintln!("{e}");
            std::process::exit(2);
        }
    };
    let out = match execute(Command::Compare, scenario, None, 0) {
        Ok(o) => o,
        Err(f) => {
            eprintln!("{f}");
            std::process::exit(f.exit_code());
        }
    };
    let summary = &out.files.iter().find(|(n, _)| n == "summary.json").unwrap().1;
    let v: serde_json::Value = serde_json::from_str(summary).unwrap();
    for e in v["envelopes"].as_array().unwrap() {
        println!(
            "{:<26} dominated {:>6.1}%  bound slope {:>8.4}  measured slope {:>8.4}",
            e["name"].as_str().unwrap(),
            100.0 * e["domination_fraction"].as_f64().unwrap(),
            e["bound_log_slope"].as_f64().unwrap_or(f64::NAN),
            e["measured_log_slope"].as_f64().unwrap_or(f64::NAN),
        );
    }
    println!("all dominated: {}", v["all_dominated"]);
}
