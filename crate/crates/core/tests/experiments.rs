use std::collections::BTreeMap;

use spectra_core::experiments::{run_experiment, SCENARIOS};
use spectra_core::Error;

fn params(pairs: &[(&str, &str)]) -> BTreeMap<String, String> {
    pairs.iter().map(|(k, v)| (k.to_string(), v.to_string())).collect()
}

#[test]
fn shnol_scenario_passes() {
    let report = run_experiment("shnol", &BTreeMap::new(), 1, None).unwrap();
    assert!(report.passed(), "{}", report.to_json());
}

#[test]
fn reports_are_deterministic() {
    for name in ["znxn", "shnol"] {
        let a = run_experiment(name, &BTreeMap::new(), 7, None).unwrap();
        let b = run_experiment(name, &BTreeMap::new(), 7, None).unwrap();
        assert_eq!(a.to_json(), b.to_json());
    }
}

#[test]
fn artifacts_are_written() {
    let dir = std::env::temp_dir().join(format!("spectra-artifacts-{}", std::process::id()));
    let report = run_experiment("znxn", &BTreeMap::new(), 1, Some(&dir)).unwrap();
    let json = dir.join("znxn.json");
    assert!(report.artifacts.contains(&json));
    let parsed: serde_json::Value = serde_json::from_str(&std::fs::read_to_string(&json).unwrap()).unwrap();
    assert_eq!(parsed["name"], "znxn");
    assert!(parsed["claims"].as_array().unwrap().iter().all(|c| c["pass"] == true));
    assert_eq!(report.tables.len() + 1, report.artifacts.len());
    for table in &report.tables {
        assert!(table.rows.iter().all(|r| r.len() == table.header.len()));
        let path = dir.join(format!("znxn-{}.csv", table.name));
        assert_eq!(std::fs::read_to_string(path).unwrap(), table.to_csv());
    }
    std::fs::remove_dir_all(dir).unwrap();
}

#[test]
fn overrides_are_recorded() {
    let report = run_experiment("sparse-tree", &params(&[("k_max", "3"), ("size", "500")]), 1, None).unwrap();
    assert!(report.passed());
    assert_eq!(report.parameters["k_max"], "3");
    assert!(report.claims.iter().any(|c| c.description.contains("J_(3)")));
    assert!(!report.claims.iter().any(|c| c.description.contains("J_(4)")));
}

#[test]
fn bad_requests_are_rejected() {
    assert!(matches!(run_experiment("nope", &BTreeMap::new(), 1, None), Err(Error::UnknownExperiment(_))));
    assert!(matches!(
        run_experiment("znxn", &params(&[("bogus", "1")]), 1, None),
        Err(Error::Parameter(_))
    ));
    assert!(matches!(
        run_experiment("sparse-tree", &params(&[("d", "three")]), 1, None),
        Err(Error::Parameter(_))
    ));
    assert_eq!(SCENARIOS.len(), 7);
}
