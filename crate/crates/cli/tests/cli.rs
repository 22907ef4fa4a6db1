use serde_json::Value;
use std::process::{Command, Output};

fn run(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_gamma-interp")).args(args).output().expect("binary runs")
}

fn json(out: &Output) -> Value {
    serde_json::from_slice(&out.stdout).expect("stdout is JSON")
}

#[test]
fn check_point_on_distinguished_boundary() {
    let out = run(&["gamma", "check-point", r#"{"s":[2,0],"p":[1,0]}"#]);
    assert_eq!(out.status.code(), Some(0));
    assert_eq!(json(&out)["kind"], "distinguishedBoundary");
}

#[test]
fn malformed_json_exits_two() {
    let out = run(&["gamma", "check-point", r#"{"s":[2,0]"#]);
    assert_eq!(out.status.code(), Some(2));
    assert_eq!(json(&out)["error"], "input");
}

#[test]
fn unknown_flag_exits_two() {
    assert_eq!(run(&["cnu", "check", "--bogus"]).status.code(), Some(2));
}

#[test]
fn precondition_error_exits_two() {
    let out = run(&["counterexample", "--nu", "0"]);
    assert_eq!(out.status.code(), Some(2));
}

#[test]
fn np_solve_recovers_extremal_solution() {
    let out = run(&["np", "solve", r#"{"nodes":[[0.1,0],[0,0.3]],"targets":[[0.1,0],[0,0.3]]}"#]);
    assert_eq!(out.status.code(), Some(0));
    let v = json(&out);
    assert_eq!(v["status"]["kind"], "extremallySolvable");
    assert_eq!(v["solution"]["zeros"].as_array().unwrap().len(), 1);
}

#[test]
fn counterexample_output_fails_cnu_check() {
    let dir = std::env::temp_dir().join(format!("gamma-interp-cli-{}", std::process::id()));
    std::fs::create_dir_all(&dir).unwrap();
    let path = dir.join("ce.json");
    let p = path.to_str().unwrap();
    let out = run(&["counterexample", "--nu", "1", "--r", "0.5", "--out", p]);
    assert_eq!(out.status.code(), Some(0));
    let rep = json(&out);
    assert!(rep["violation"]["eigenvalue"].as_f64().unwrap() <= -1e-6);
    let out = run(&["cnu", "check", "--nu", "1", p]);
    assert_eq!(out.status.code(), Some(0));
    let v = json(&out);
    assert_eq!(v["status"], "fails");
    assert!(v["violation"].is_object());
    assert!(v["searchLog"].as_array().unwrap().is_empty());
    let out = run(&["cnu", "check", "--nu", "0", p]);
    assert_ne!(json(&out)["status"], "fails");
    std::fs::remove_dir_all(&dir).ok();
}

#[test]
fn examples_reproduce_single_id() {
    let out = run(&["examples", "reproduce", "--id", "exdm3"]);
    assert_eq!(out.status.code(), Some(0));
    let v = json(&out);
    assert_eq!(v["allPassed"], true);
    assert!(v["rows"].as_array().unwrap().iter().all(|r| r["id"] == "exdm3"));
}

#[test]
fn failing_suite_exits_one() {
    let out = run(&["examples", "reproduce", "--filter", "exdm", "--tol", "1e-17"]);
    assert_eq!(out.status.code(), Some(1));
    assert_eq!(json(&out)["allPassed"], false);
}

#[test]
fn spectral_screen_of_family_data_does_not_fail() {
    let problem = r#"{"nodes":[[0.1,0],[0,0.2],[-0.3,0]],
        "matrices":[[[[0,0],[1,0]],[[-0.01,0],[0.2,0]]],
                    [[[0,0],[1,0]],[[0.04,0],[0,0.4]]],
                    [[[0,0],[1,0]],[[-0.09,0],[-0.6,0]]]]}"#;
    let out = run(&["spectral", "screen", problem]);
    assert_eq!(out.status.code(), Some(0));
    assert_ne!(json(&out)["status"], "fails");
}

#[test]
fn config_file_is_honoured() {
    let dir = std::env::temp_dir().join(format!("gamma-interp-cfg-{}", std::process::id()));
    std::fs::create_dir_all(&dir).unwrap();
    let path = dir.join("cfg.json");
    std::fs::write(&path, r#"{"tol": 0.0}"#).unwrap();
    let out = run(&["--config", path.to_str().unwrap(), "gamma", "check-point", r#"{"s":[0,0],"p":[0,0]}"#]);
    assert_eq!(out.status.code(), Some(2));
    std::fs::remove_dir_all(&dir).ok();
}
