use std::process::{Command, Output};

use serde_json::Value;

fn qmf(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_qmf"))
        .args(args)
        .env_remove("QMF_CACHE_DIR")
        .output()
        .expect("binary runs")
}

fn json(out: &Output) -> Value {
    serde_json::from_slice(&out.stdout).unwrap_or_else(|e| {
        panic!("bad JSON ({e}): {}", String::from_utf8_lossy(&out.stdout))
    })
}

#[test]
fn mass_143_both_splits() {
    let out = qmf(&["mass", "--level", "143", "--split", "11,13"]);
    assert!(out.status.success());
    let v = json(&out);
    assert_eq!(v["mass"], "35/3");
    assert_eq!(v["numerator"], "35");
    let v = json(&qmf(&["mass", "--level", "143", "--split", "13,11"]));
    assert_eq!(v["mass"], "12");
    // default split maximizes the numerator
    assert_eq!(json(&qmf(&["mass", "--level", "143"]))["N1"], "11");
}

#[test]
fn usage_errors_exit_2() {
    assert_eq!(qmf(&["mass"]).status.code(), Some(2));
    assert_eq!(qmf(&["mass", "--level", "143", "--split", "11,12"]).status.code(), Some(2));
    let out = qmf(&["mass", "--level", "36"]);
    assert_eq!(out.status.code(), Some(2));
    assert_eq!(json(&out)["error"], "invalid_level");
    assert_eq!(qmf(&["brandt", "--level", "11", "--ell", "4"]).status.code(), Some(2));
}

#[test]
fn lvalue_minus_23() {
    let out = qmf(&["lvalue", "--level", "11", "--disc", "-23", "--char", "0"]);
    assert!(out.status.success());
    let v = json(&out);
    assert_eq!(v["Lalg"], "1");
    assert_eq!(v["P"][0], "-1");
    let all = json(&qmf(&["lvalue", "--level", "11", "--disc", "-23", "--p", "5"]));
    let all = all.as_array().unwrap();
    assert_eq!(all.len(), 3);
    assert_eq!(all[1]["Lalg"], "25");
    assert!(all.iter().all(|r| r["verdict"] == true));
}

#[test]
fn split_discriminant_is_refused() {
    let out = qmf(&["lvalue", "--level", "11", "--disc", "-7"]);
    assert_eq!(out.status.code(), Some(1));
    assert_eq!(json(&out)["error"], "not_inert");
}

#[test]
fn congruence_certificates() {
    let out = qmf(&["congruence", "--level", "11", "--p", "5"]);
    assert!(out.status.success());
    let v = json(&out);
    assert_eq!(v["phi"], serde_json::json!(["6", "-4"]));
    assert_eq!(v["converse_scalar"], "2");
    assert_eq!(v["verified"], true);

    let out = qmf(&["congruence", "--level", "11", "--p", "7"]);
    assert_eq!(out.status.code(), Some(1));
    assert_eq!(json(&out)["error"], "precondition");

    let out = qmf(&["congruence", "--level", "11", "--p", "5", "--r", "2"]);
    assert_eq!(out.status.code(), Some(1));
    assert_eq!(json(&out)["error"], "infeasible");
}

#[test]
fn brandt_level_11() {
    let v = json(&qmf(&["brandt", "--level", "11", "--ell", "2,11", "--eigen"]));
    assert_eq!(v["operators"][0]["op"], "T2");
    assert_eq!(v["operators"][0]["matrix"], serde_json::json!([["0", "3"], ["2", "1"]]));
    assert_eq!(v["operators"][1]["op"], "W11");
    assert_eq!(v["blocks"][0]["eigenvalues"]["T2"], "-2");
}

#[test]
fn cache_gives_identical_output() {
    let dir = tempfile::tempdir().unwrap();
    let run = || {
        Command::new(env!("CARGO_BIN_EXE_qmf"))
            .args(["classes", "--level", "143", "--split", "13,11"])
            .env("QMF_CACHE_DIR", dir.path())
            .output()
            .unwrap()
    };
    let a = run();
    assert!(a.status.success());
    assert_eq!(std::fs::read_dir(dir.path()).unwrap().count(), 1);
    let b = run();
    assert_eq!(a.stdout, b.stdout);
    assert_eq!(json(&a)["h"], "12");
}

#[test]
fn scan_is_prefix_stable() {
    let short = qmf(&["scan", "--from", "10", "--to", "12", "--ell-max", "20"]);
    let long = qmf(&["scan", "--from", "10", "--to", "15", "--ell-max", "20"]);
    assert!(short.status.success() && long.status.success());
    let s = String::from_utf8(short.stdout).unwrap();
    let l = String::from_utf8(long.stdout).unwrap();
    assert!(l.starts_with(&s));
    let first: Value = serde_json::from_str(s.lines().next().unwrap()).unwrap();
    assert_eq!(first["N"], "10");
    assert_eq!(first["N1"], "2");
    let eleven: Value = serde_json::from_str(s.lines().find(|l| l.contains("\"N\":\"11\"")).unwrap()).unwrap();
    assert_eq!(eleven["primes"][0]["p"], "5");
    assert_eq!(eleven["primes"][0]["converse_scalar"], "2");
}

#[test]
fn output_file() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("m.json");
    let out = qmf(&["mass", "--level", "11", "-o", path.to_str().unwrap()]);
    assert!(out.status.success() && out.stdout.is_empty());
    let v: Value = serde_json::from_str(&std::fs::read_to_string(path).unwrap()).unwrap();
    assert_eq!(v["mass"], "5/6");
}

#[test]
fn reproduction_suite_subset() {
    let out = qmf(&["verify-paper", "--only", "2,10"]);
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    let v = json(&out);
    assert_eq!(v["passed"], "2");
}
