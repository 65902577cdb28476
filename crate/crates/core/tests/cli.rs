use std::path::Path;
use std::process::{Command, Output};

use rko::experiments::RUNS_HEADER;

fn rko(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_rko"))
        .args(args)
        .output()
        .expect("binary runs")
}

fn generate(dir: &Path, n: usize) -> String {
    let path = dir.join(format!("t{n}.json"));
    let p = path.to_str().unwrap().to_string();
    let out = rko(&["generate", "--n", &n.to_string(), "--seed", "4", "--out", &p]);
    assert!(out.status.success());
    p
}

#[test]
fn schema_error_exits_two() {
    let dir = tempfile::tempdir().unwrap();
    let bad = dir.path().join("bad.json");
    std::fs::write(&bad, r#"{"n": 3}"#).unwrap();
    let out = rko(&["solve", "--instance", bad.to_str().unwrap(), "--kind", "tdtsp"]);
    assert_eq!(out.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&out.stderr).starts_with("error:"));
}

#[test]
fn oversized_oracle_exits_three() {
    let dir = tempfile::tempdir().unwrap();
    let inst = generate(dir.path(), 12);
    let out = rko(&["oracle", "--instance", &inst, "--kind", "tdtsp"]);
    assert_eq!(out.status.code(), Some(3));
}

#[test]
fn portfolio_file_without_cardinality_is_rejected() {
    let dir = tempfile::tempdir().unwrap();
    let f = dir.path().join("port.txt");
    std::fs::write(&f, "2\n0.01 0.1\n0.02 0.2\n1 1 1.0\n1 2 0.3\n2 2 1.0\n").unwrap();
    let out = rko(&["solve", "--instance", f.to_str().unwrap(), "--kind", "portfolio"]);
    assert_eq!(out.status.code(), Some(2));
}

#[test]
fn solve_then_rpd_round_trip() {
    let dir = tempfile::tempdir().unwrap();
    let inst = generate(dir.path(), 6);
    let out_dir = dir.path().join("run");
    let out = rko(&[
        "solve", "--instance", &inst, "--kind", "tdtsp", "--deterministic",
        "--decoder-calls", "3000", "--seeds", "3", "--out", out_dir.to_str().unwrap(),
    ]);
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    let runs = std::fs::read_to_string(out_dir.join("runs.csv")).unwrap();
    assert_eq!(runs.lines().next().unwrap(), RUNS_HEADER.join(","));
    assert_eq!(runs.lines().count(), 4);
    let summary: serde_json::Value =
        serde_json::from_str(&std::fs::read_to_string(out_dir.join("result.json")).unwrap()).unwrap();
    let best = summary["best_cost"].as_f64().unwrap();

    let rpd = rko(&[
        "rpd", "--results", out_dir.join("runs.csv").to_str().unwrap(),
        "--reference-ub", &best.to_string(),
    ]);
    assert!(rpd.status.success());
    let text = String::from_utf8(rpd.stdout).unwrap();
    let row: Vec<&str> = text.lines().nth(1).unwrap().split(',').collect();
    // best run sits exactly on the reference
    assert_eq!(row[3], "0.000000");
}
