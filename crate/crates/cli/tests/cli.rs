//! End-to-end tests driving the `lgf` binary.

use std::process::{Command, Output};

fn lgf(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_lgf"))
        .args(args)
        .output()
        .expect("failed to spawn lgf")
}

fn stdout(out: &Output) -> String {
    String::from_utf8_lossy(&out.stdout).into_owned()
}

fn stderr(out: &Output) -> String {
    String::from_utf8_lossy(&out.stderr).into_owned()
}

#[test]
fn eval_1d_closed_form() {
    let out = lgf(&["eval", "--dim", "1", "--z", "-2", "--n", "1"]);
    assert!(out.status.success(), "{}", stderr(&out));
    let json: serde_json::Value = serde_json::from_str(&stdout(&out)).unwrap();
    assert_eq!(json["method_used"], "closed1d");
    let v = json["value"][0].as_f64().unwrap();
    assert!((v - 0.0773503).abs() < 1e-6, "value {v}");
    assert_eq!(json["value"][1].as_f64().unwrap(), 0.0);
}

#[test]
fn eval_rejects_real_spectrum_point() {
    let out = lgf(&["eval", "--dim", "2", "--z", "2", "--n", "0,0"]);
    assert_eq!(out.status.code(), Some(2));
    let msg = stderr(&out);
    assert!(msg.contains("[0, 8]"), "stderr: {msg}");
}

#[test]
fn eval_complex_literal_and_json_round_trip() {
    let out = lgf(&["eval", "--dim", "2", "--z", "4+0.5i", "--n", "2,1"]);
    assert!(out.status.success(), "{}", stderr(&out));
    let text = stdout(&out);
    let json: serde_json::Value = serde_json::from_str(&text).unwrap();
    assert_eq!(json["method_used"], "embedded2d");
    // 17-significant-digit floats must survive a parse/serialize round trip
    let v = json["value"][0].as_f64().unwrap();
    assert!(text.contains(&format!("{v:.16e}")));
}

#[test]
fn eval_parse_error_exits_4() {
    let out = lgf(&["eval", "--dim", "1", "--z", "nonsense", "--n", "0"]);
    assert_eq!(out.status.code(), Some(4));
    let out = lgf(&["eval", "--dim", "2", "--z", "-1", "--n", "1"]);
    assert_eq!(out.status.code(), Some(4), "coordinate count must match dim");
}

#[test]
fn eval_methods_agree_on_overlap() {
    let mut values = Vec::new();
    for method in ["laurent", "endpoint2d", "recurrence2d", "quadrature"] {
        let out = lgf(&[
            "eval", "--dim", "2", "--z", "-0.5", "--n", "2,1", "--method", method,
        ]);
        assert!(out.status.success(), "{method}: {}", stderr(&out));
        let json: serde_json::Value = serde_json::from_str(&stdout(&out)).unwrap();
        values.push(json["value"][0].as_f64().unwrap());
    }
    for v in &values[1..] {
        assert!((v - values[0]).abs() < 1e-10, "{values:?}");
    }
}

#[test]
fn fundsol_anchor_values() {
    let out = lgf(&["fundsol", "--op", "h0", "--range", "1"]);
    assert!(out.status.success());
    let text = stdout(&out);
    let mut lines = text.lines();
    assert_eq!(
        lines.next().unwrap(),
        "n1,n2,rational,inv_pi,log2_inv_pi,float_total"
    );
    let rows: Vec<&str> = lines.collect();
    assert!(rows.contains(&"0,0,0,0,0,0.00000000000000000"));
    assert!(rows.iter().any(|r| r.starts_with("1,0,-1/4,0,0,")));
    assert!(rows.iter().any(|r| r.starts_with("1,1,0,-1,0,")));
}

#[test]
fn fundsol_dalembertian_origin() {
    let out = lgf(&["fundsol", "--op", "dalembertian", "--range", "0"]);
    assert!(out.status.success());
    let text = stdout(&out);
    // value at the origin is i·log(2)/π
    let row = text.lines().nth(1).unwrap();
    assert!(row.starts_with("0,0,0,0,1,"), "row: {row}");
    assert!(row.contains("0.22063560015265"), "row: {row}");
}

#[test]
fn fundsol_stencil_check_passes() {
    for op in ["h0", "h0-4", "h0-8", "dalembertian"] {
        let out = lgf(&["fundsol", "--op", op, "--range", "5", "--check"]);
        assert!(out.status.success(), "{op}: {}", stderr(&out));
        let json: serde_json::Value = serde_json::from_str(&stdout(&out)).unwrap();
        assert_eq!(json["pass"], true, "{op}");
    }
}

#[test]
fn fundsol_range_limit() {
    let out = lgf(&["fundsol", "--op", "h0", "--range", "65"]);
    assert_eq!(out.status.code(), Some(4));
}

#[test]
fn verify_suites_pass() {
    for suite in ["helmholtz", "oracle", "overlap", "identities", "walk"] {
        let out = lgf(&["verify", "--suite", suite]);
        assert!(
            out.status.success(),
            "suite {suite} failed: {}",
            stdout(&out)
        );
        let json: serde_json::Value = serde_json::from_str(&stdout(&out)).unwrap();
        assert_eq!(json["pass"], true, "{suite}");
        assert!(json["cases"].as_array().unwrap().len() >= 3);
    }
}

#[test]
fn verify_impossible_tolerance_exits_3() {
    let out = lgf(&["verify", "--suite", "oracle", "--tol", "1e-30"]);
    assert_eq!(out.status.code(), Some(3));
}

#[test]
fn walk_matches_kernel() {
    let out = lgf(&["walk", "--dim", "2", "--eps", "0.5", "--n", "1,1"]);
    assert!(out.status.success(), "{}", stderr(&out));
    let json: serde_json::Value = serde_json::from_str(&stdout(&out)).unwrap();
    assert!(json["deviation"].as_f64().unwrap() < 1e-10);
    assert!(json["tail_bound"].as_f64().unwrap() < 1e-12);
}

#[test]
fn unknown_flag_exits_4() {
    let out = lgf(&["eval", "--frobnicate"]);
    assert_eq!(out.status.code(), Some(4));
}
