use std::path::{Path, PathBuf};
use std::process::{Command, Output};

use serde_json::Value;

fn qlax(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_qlax")).args(args).env("QLAX_THREADS", "2").output().unwrap()
}

fn code(o: &Output) -> i32 {
    o.status.code().unwrap()
}

fn write(dir: &Path, name: &str, text: &str) -> PathBuf {
    let p = dir.join(name);
    std::fs::write(&p, text).unwrap();
    p
}

fn json(path: &Path) -> Value {
    serde_json::from_str(&std::fs::read_to_string(path).unwrap()).unwrap()
}

const PARAMS: &str = r#"{"a0": "2", "a1": "3", "lambda": "1", "q": "2", "f0": "1", "f1": "2"}"#;

#[test]
fn theorem_iv_symbolic() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("report.json");
    let o = qlax(&["verify", "theorem", "--case", "iv", "--mode", "symbolic", "--out", out.to_str().unwrap()]);
    assert_eq!(code(&o), 0, "{}", String::from_utf8_lossy(&o.stderr));
    let v = json(&out);
    assert_eq!(v["case"], "iv");
    assert_eq!(v["verified"], true);
    assert_eq!(v["negative_control"], true);
    assert!(v["entries"].as_array().unwrap().iter().all(|e| e["zero"] == true));
}

#[test]
fn theorem_sampled_records_seed_and_parameters() {
    let o = qlax(&["verify", "theorem", "--case", "siii", "--mode", "sampled", "--samples", "5", "--seed", "11"]);
    assert_eq!(code(&o), 0);
    let v: Value = serde_json::from_slice(&o.stdout).unwrap();
    assert_eq!(v["mode"]["seed"], 11);
    assert_eq!(v["parameters"].as_array().unwrap().len(), 5);
}

#[test]
fn siii_orbit_csv() {
    let dir = tempfile::tempdir().unwrap();
    let params = write(dir.path(), "params.json", PARAMS);
    let out = dir.path().join("orbit.csv");
    let o = qlax(&[
        "evolve", "painleve", "--case", "siii", "--steps", "20", "--backend", "exact", "--params",
        params.to_str().unwrap(), "--out", out.to_str().unwrap(),
    ]);
    assert_eq!(code(&o), 0, "{}", String::from_utf8_lossy(&o.stderr));
    let text = std::fs::read_to_string(&out).unwrap();
    let lines: Vec<&str> = text.lines().collect();
    assert_eq!(lines[0], "n,lambda_or_t,f0,f1,f2,singular");
    assert_eq!(lines.len(), 22);
    // t = a0 for SIII; the first step reads f1 off f0
    assert_eq!(lines[1], "0,2,1,2,1/2,");
    assert!(lines[2].starts_with("1,2/3,"));
    assert_eq!(lines[2].split(',').nth(3), Some("1"));
}

#[test]
fn float_orbit_uses_re_im_pairs() {
    let dir = tempfile::tempdir().unwrap();
    let params = write(dir.path(), "params.json", PARAMS);
    let o = qlax(&["evolve", "painleve", "--case", "iv", "--steps", "2", "--backend", "float", "--params", params.to_str().unwrap()]);
    assert_eq!(code(&o), 0);
    let text = String::from_utf8(o.stdout).unwrap();
    assert_eq!(text.lines().nth(2).unwrap().split(',').nth(2), Some("1.2:0"));
}

#[test]
fn base_point_exits_3() {
    let dir = tempfile::tempdir().unwrap();
    let params = write(dir.path(), "params.json", r#"{"a0": "2", "a1": "5", "lambda": "1", "q": "3", "f0": "-2", "f1": "3"}"#);
    let out = dir.path().join("orbit.csv");
    let o = qlax(&["evolve", "painleve", "--case", "siii", "--steps", "4", "--params", params.to_str().unwrap(), "--out", out.to_str().unwrap()]);
    assert_eq!(code(&o), 3);
    let text = std::fs::read_to_string(&out).unwrap();
    assert_eq!(text.lines().count(), 2);
    assert!(text.lines().nth(1).unwrap().ends_with(",a0+f0"));
}

#[test]
fn usage_errors_exit_2() {
    let dir = tempfile::tempdir().unwrap();
    let derived = write(dir.path(), "a2.json", r#"{"a0": "2", "a1": "3", "a2": "1/3", "lambda": "1", "q": "2", "f0": "1", "f1": "2"}"#);
    let bad_lit = write(dir.path(), "lit.json", r#"{"a0": "2/0", "a1": "3", "lambda": "1", "q": "2", "f0": "1", "f1": "2"}"#);
    let params = write(dir.path(), "params.json", PARAMS);
    for args in [
        vec!["evolve", "painleve", "--case", "iv", "--steps", "3", "--params", derived.to_str().unwrap()],
        vec!["evolve", "painleve", "--case", "iv", "--steps", "3", "--params", bad_lit.to_str().unwrap()],
        vec!["evolve", "painleve", "--case", "all", "--steps", "3", "--params", params.to_str().unwrap()],
        vec!["compare", "projective", "--params", params.to_str().unwrap()],
        vec!["verify", "lax4d", "--at", "1,2,3"],
        vec!["verify", "theorem", "--case", "v"],
        vec!["frobnicate"],
    ] {
        let o = qlax(&args);
        assert_eq!(code(&o), 2, "{args:?}");
    }
}

#[test]
fn no_artifact_on_failure() {
    let dir = tempfile::tempdir().unwrap();
    let bad = write(dir.path(), "bad.json", "{");
    let out = dir.path().join("orbit.csv");
    let o = qlax(&["evolve", "painleve", "--case", "iv", "--steps", "3", "--params", bad.to_str().unwrap(), "--out", out.to_str().unwrap()]);
    assert_eq!(code(&o), 2);
    assert!(!out.exists());
    assert_eq!(std::fs::read_dir(dir.path()).unwrap().count(), 1);
}

#[test]
fn reports_are_reproducible() {
    let args = ["--no-timing", "verify", "consistency", "--samples", "6", "--seed", "3", "--instances", "4"];
    let a = qlax(&args);
    let b = qlax(&args);
    assert_eq!(code(&a), 0);
    assert_eq!(a.stdout, b.stdout);
    let seq = qlax(&["--sequential", "--no-timing", "verify", "consistency", "--samples", "6", "--seed", "3", "--instances", "4"]);
    assert_eq!(a.stdout, seq.stdout);
    let v: Value = serde_json::from_slice(&a.stdout).unwrap();
    assert_eq!(v["seed"], 3);
    assert_eq!(v["cubes"].as_array().unwrap().len(), 4);
}

#[test]
fn regularity_and_projective() {
    let dir = tempfile::tempdir().unwrap();
    let params = write(dir.path(), "params.json", PARAMS);
    let o = qlax(&["verify", "regularity", "--params", params.to_str().unwrap()]);
    assert_eq!(code(&o), 0);
    let v: Value = serde_json::from_slice(&o.stdout).unwrap();
    assert_eq!(v["parameters"]["a2"], "1/3");
    let proj = write(dir.path(), "proj.json", r#"{"a0": "5/7", "lambda": "2/3", "f0": "2", "f1": "1/3", "p": "3/2"}"#);
    let o = qlax(&["compare", "projective", "--params", proj.to_str().unwrap(), "--steps", "5"]);
    assert_eq!(code(&o), 0, "{}", String::from_utf8_lossy(&o.stderr));
    let v: Value = serde_json::from_slice(&o.stdout).unwrap();
    assert_eq!(v["parameters"]["q"], "9/4");
    assert_eq!(v["steps_compared"], 6);
}

#[test]
fn lax4d_and_reduction() {
    let o = qlax(&["verify", "lax4d", "--at", "1,-2,0,3"]);
    assert_eq!(code(&o), 0);
    let o = qlax(&["verify", "reduction", "--patches", "4", "--instances", "3", "--steps", "2"]);
    assert_eq!(code(&o), 0, "{}", String::from_utf8_lossy(&o.stderr));
    let v: Value = serde_json::from_slice(&o.stdout).unwrap();
    assert_eq!(v["bridge"]["report"]["matching_instances"], 3);
}

#[test]
fn lattice_round_trip() {
    let dir = tempfile::tempdir().unwrap();
    let patch = dir.path().join("patch.json");
    let report = dir.path().join("audit.json");
    let o = qlax(&["evolve", "lattice", "--box", "2,2,2,2", "--seed", "5", "--out", patch.to_str().unwrap(), "--report", report.to_str().unwrap()]);
    assert_eq!(code(&o), 0, "{}", String::from_utf8_lossy(&o.stderr));
    let audit = json(&report);
    assert_eq!(audit["audit"]["consistent"], true);
    assert_eq!(audit["audit"]["filled"], 11);
    assert_eq!(json(&patch)["values"].as_object().unwrap().len(), 16);

    // off-axis values would overdetermine the box
    let o = qlax(&["evolve", "lattice", "--box", "2,2,2,2", "--init", patch.to_str().unwrap()]);
    assert_eq!(code(&o), 2);

    let mut init = json(&patch);
    init["values"].as_object_mut().unwrap().retain(|k, _| k.split(',').filter(|c| *c != "0").count() <= 1);
    assert_eq!(init["values"].as_object().unwrap().len(), 5);
    let init_path = write(dir.path(), "init.json", &init.to_string());
    let again = dir.path().join("again.json");
    let o = qlax(&["evolve", "lattice", "--box", "2,2,2,2", "--init", init_path.to_str().unwrap(), "--out", again.to_str().unwrap()]);
    assert_eq!(code(&o), 0, "{}", String::from_utf8_lossy(&o.stderr));
    assert_eq!(json(&again), json(&patch));
}
