use std::fs;
use std::process::{Command, Output};

use serde_json::Value;

fn run(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_toric-series"))
        .args(args)
        .output()
        .expect("binary runs")
}

fn json(args: &[&str]) -> Value {
    let out = run(args);
    assert!(out.status.success(), "{args:?}: {}", String::from_utf8_lossy(&out.stderr));
    serde_json::from_slice(&out.stdout).unwrap()
}

#[test]
fn mld_of_cyclic_quotient() {
    let v = json(&["mld", "--r", "5", "--weights", "1,2,3,4"]);
    assert_eq!(v["mld"], "2/1");
    assert_eq!(v["witness"], serde_json::json!(["1/5", "2/5", "3/5", "4/5"]));
    let v = json(&["mld", "--r", "1", "--weights", "0,0,0"]);
    assert_eq!(v["mld"], "3/1");
    assert_eq!(v["convention"], "smooth-point");
}

#[test]
fn exit_codes() {
    assert_eq!(run(&["mld", "--r", "4", "--weights", "2,1"]).status.code(), Some(1));
    assert_eq!(run(&["mld", "--r", "2", "--weights", "1,1", "--cap", "1"]).status.code(), Some(2));
    assert_eq!(run(&["avoiders", "--dim", "2", "--eps", "0.5"]).status.code(), Some(1));
    assert_eq!(run(&["mld", "--r", "5", "--weights", "1,2", "--format", "csv"]).status.code(), Some(1));
}

#[test]
fn canonical_form_and_check() {
    assert_eq!(json(&["canon", "--r", "7", "--weights", "3,4"])["canonical"], "1/7(1,6)");
    assert_eq!(json(&["check", "--r", "6", "--weights", "2,3"])["axis_condition"], false);
    assert_eq!(json(&["check", "--r", "5", "--weights", "1,2,3,4"])["axis_condition"], true);
}

#[test]
fn enumerate_csv() {
    let out = run(&[
        "enumerate", "--dim", "2", "--r-min", "2", "--r-max", "5", "--up-to-equivalence", "--format", "csv",
    ]);
    assert!(out.status.success());
    let text = String::from_utf8(out.stdout).unwrap();
    let lines: Vec<&str> = text.lines().collect();
    assert_eq!(lines[0], "r,weights,canonical,mld");
    assert_eq!(lines.len(), 5);
    assert!(lines[1..].iter().all(|l| l.ends_with(",1/1")));
}

#[test]
fn synthesize_then_query() {
    let dir = tempfile::tempdir().unwrap();
    let db = dir.path().join("db.json");
    let db_arg = db.to_str().unwrap();
    let out = run(&["series-synthesize", "--dim", "2", "--eps", "1", "--non-strict", "--out", db_arg]);
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));

    let v = json(&["series-validate", "--series-db", db_arg]);
    assert_eq!(v["valid"], true);

    let v = json(&["series-membership", "--series-db", db_arg, "--r", "7", "--weights", "1,6"]);
    assert_eq!(v["stable"], true);
    let v = json(&["series-membership", "--series-db", db_arg, "--r", "7", "--weights", "1,2"]);
    assert_eq!(v["stable"], false);

    let v = json(&["series-hilbert", "--series-db", db_arg]);
    assert_eq!(v[0]["hilbert"], "x");

    let v = json(&["classify", "--series-db", db_arg, "--r-min", "2", "--r-max", "6"]);
    let stable: Vec<bool> = v["items"].as_array().unwrap().iter().map(|i| i["stable"].as_bool().unwrap()).collect();
    assert!(stable.iter().any(|&s| s) && stable.iter().any(|&s| !s));
}

#[test]
fn malformed_database_is_reported() {
    let dir = tempfile::tempdir().unwrap();
    let db = dir.path().join("bad.json");
    fs::write(
        &db,
        r#"{"ambient_dim":2,"eps":"1/1","strict":false,
            "series":[{"V":[[1,1]],"constraints":[{"Vi":[[1,1]],"Vij":[[[1,0],[0,1]]]}]}]}"#,
    )
    .unwrap();
    let out = run(&["series-validate", "--series-db", db.to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(1));
    let v: Value = serde_json::from_slice(&out.stdout).unwrap();
    assert_eq!(v["violations"][0]["violations"][0], "V_1 not proper in V");
}

#[test]
fn family_spectrum() {
    let v = json(&["spectrum", "--family", "1,1", "--r-max", "4"]);
    let values: Vec<&str> = v["values"].as_array().unwrap().iter().map(|x| x["mld"].as_str().unwrap()).collect();
    assert_eq!(values, ["2/1", "1/1", "2/3", "1/2"]);
    assert_eq!(v["strictly_decreasing"], true);
}

#[test]
fn output_is_independent_of_jobs() {
    let a = run(&["--jobs", "1", "avoiders", "--dim", "2", "--strict"]);
    let b = run(&["--jobs", "3", "avoiders", "--dim", "2", "--strict"]);
    assert!(a.status.success());
    assert_eq!(a.stdout, b.stdout);
}
