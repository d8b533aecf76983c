use std::path::PathBuf;
use std::process::{Command, Output};

fn spectra(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_spectra")).args(args).output().unwrap()
}

fn scratch(name: &str) -> PathBuf {
    let dir = std::env::temp_dir().join(format!("spectra-cli-{name}-{}", std::process::id()));
    std::fs::create_dir_all(&dir).unwrap();
    dir
}

#[test]
fn generate_then_spectrum() {
    let dir = scratch("spectrum");
    let graph = dir.join("grid.json");
    let out = spectra(&["generate", "--family", "znxn", "--levels", "6", "--out", graph.to_str().unwrap()]);
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));

    let csv = dir.join("s.csv");
    let out = spectra(&[
        "spectrum", "--graph", graph.to_str().unwrap(), "--radii", "2,4,6", "--out", csv.to_str().unwrap(),
    ]);
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    let text = std::fs::read_to_string(&csv).unwrap();
    let mut lines = text.lines();
    assert_eq!(lines.next().unwrap(), "radius,lower,upper,hausdorff_to_previous");
    let rows: Vec<Vec<f64>> = lines.map(|l| l.split(',').map(|x| x.parse().unwrap()).collect()).collect();
    assert_eq!(rows.len(), 3);
    assert!(rows[0][3].is_nan());
    for pair in rows.windows(2) {
        // nested balls: hulls grow
        assert!(pair[1][1] <= pair[0][1] && pair[1][2] >= pair[0][2]);
    }
    assert!(rows.iter().all(|r| r[1] >= -4.0 && r[2] <= 4.0 && (r[1] + r[2]).abs() < 1e-9));
    std::fs::remove_dir_all(dir).unwrap();
}

#[test]
fn rlimits_on_a_tree() {
    let dir = scratch("rlimits");
    let graph = dir.join("t.json");
    assert!(spectra(&["generate", "--family", "tree", "--degree", "3", "--depth", "8", "--out", graph.to_str().unwrap()])
        .status
        .success());
    let report = dir.join("r.json");
    let out = spectra(&[
        "rlimits", "--graph", graph.to_str().unwrap(), "--rmax", "2", "--margin", "3", "--out", report.to_str().unwrap(),
    ]);
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    let parsed: serde_json::Value = serde_json::from_str(&std::fs::read_to_string(&report).unwrap()).unwrap();
    let entries = parsed.as_array().unwrap();
    assert!(!entries.is_empty());
    for e in entries {
        assert!(e["witnesses"].as_array().unwrap().len() >= 3);
        assert!(e["canonical_hash"].as_str().unwrap().len() >= 16);
        assert!(e["spectrum"]["intervals"].is_array());
    }
    std::fs::remove_dir_all(dir).unwrap();
}

#[test]
fn experiment_exit_codes() {
    let dir = scratch("experiment");
    let out = spectra(&["experiment", "znxn", "--out", dir.to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(0));
    let stdout = String::from_utf8_lossy(&out.stdout);
    assert!(stdout.contains("PASS") && !stdout.contains("FAIL"));
    assert!(dir.join("znxn.json").exists());

    assert_eq!(spectra(&["experiment", "no-such-thing"]).status.code(), Some(2));
    assert_eq!(spectra(&["experiment", "znxn", "--param", "bogus=1"]).status.code(), Some(2));
    std::fs::remove_dir_all(dir).unwrap();
}

#[test]
fn missing_graph_is_an_error() {
    let out = spectra(&["spectrum", "--graph", "/nonexistent/g.json", "--radii", "1", "--out", "/tmp/x.csv"]);
    assert!(!out.status.success());
}
