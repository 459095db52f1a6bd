//! Black-box tests of the betaq binary: flag parsing, exit codes, and the
//! stability of the emitted JSON/CSV schemas.

use std::process::{Command, Output};

fn betaq(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_betaq"))
        .args(args)
        .output()
        .expect("binary runs")
}

fn stdout_json(out: &Output) -> serde_json::Value {
    assert!(out.status.success(), "stderr: {}", String::from_utf8_lossy(&out.stderr));
    serde_json::from_slice(&out.stdout).expect("stdout is JSON")
}

fn exit_code(out: &Output) -> i32 {
    out.status.code().expect("no signal")
}

#[test]
fn expand_example_starts_at_q2() {
    let out = betaq(&["expand", "--quotient", "4^6*8^4/2^4 @8", "--trunc", "10"]);
    let doc = stdout_json(&out);
    assert_eq!(doc["series"]["offset"], 2);
    assert_eq!(doc["series"]["truncation"], 10);
    assert_eq!(doc["series"]["coeffs"][0], "1");
    assert_eq!(doc["series"]["coeffs"][2], "4");
}

#[test]
fn expand_with_modularity_report() {
    let out = betaq(&["expand", "--quotient", "4^6*8^4/2^4 @8", "--trunc", "12", "--ghn"]);
    let doc = stdout_json(&out);
    assert_eq!(doc["modularity"]["weight"], "3");
    assert_eq!(doc["modularity"]["is_holomorphic"], true);
}

#[test]
fn expand_rejects_unparseable_quotient() {
    let out = betaq(&["expand", "--quotient", "bogus", "--trunc", "10"]);
    assert_eq!(exit_code(&out), 2);
    assert!(String::from_utf8_lossy(&out.stderr).contains("quotient"));
}

#[test]
fn trunc_floor_is_enforced() {
    let out = betaq(&["expand", "--quotient", "4^6*8^4/2^4 @8", "--trunc", "4"]);
    assert_eq!(exit_code(&out), 2);
}

#[test]
fn prec_floor_is_enforced() {
    let out = betaq(&["cm", "--k", "1", "--r", "1", "--prec", "32"]);
    assert_eq!(exit_code(&out), 2);
}

#[test]
fn verify_ramanujan_exits_zero() {
    let out = betaq(&["verify", "--identity", "ramanujan", "--trunc", "500"]);
    let doc = stdout_json(&out);
    assert_eq!(doc["holds"], true);
    assert_eq!(doc["first_mismatch"], serde_json::Value::Null);
}

#[test]
fn verify_theorem2_uses_k() {
    let out = betaq(&["verify", "--identity", "theorem2", "--k", "2", "--trunc", "100"]);
    assert_eq!(exit_code(&out), 0);
}

#[test]
fn eisenstein_twist_must_clear_the_grid() {
    let out = betaq(&["eisenstein", "--k", "1", "--psi", "chi2", "--twist", "3"]);
    assert_eq!(exit_code(&out), 2);
    assert!(String::from_utf8_lossy(&out.stderr).contains("twist"));
}

#[test]
fn eisenstein_series_has_integer_coefficients() {
    let out = betaq(&["eisenstein", "--k", "1", "--twist", "2", "--trunc", "12"]);
    let doc = stdout_json(&out);
    assert_eq!(doc["weight"], 3);
    // leading term q^2 with coefficient 1 for the weight-3 series at 2τ
    assert_eq!(doc["series"]["offset"], 2);
    assert_eq!(doc["series"]["coeffs"][0], "1");
}

#[test]
fn decompose_default_target_satisfies_cusp_conditions() {
    let out = betaq(&["decompose", "--k", "2", "--trunc", "40"]);
    let doc = stdout_json(&out);
    assert_eq!(doc["decomposition"]["residual_zero"], true);
    assert_eq!(doc["cusp_conditions"]["c1"], true);
    assert_eq!(doc["cusp_conditions"]["c2"], true);
    assert_eq!(doc["cusp_conditions"]["c3"], true);
}

#[test]
fn decompose_rejects_series_outside_the_space() {
    // f_1 has weight 3; the k = 2 basis spans weight 5, so a residual must
    // survive and the command reports a verification failure.
    let out = betaq(&["decompose", "--k", "2", "--quotient", "4^6*8^4/2^4 @8", "--trunc", "40"]);
    assert_eq!(exit_code(&out), 1);
}

#[test]
fn cm_respects_the_env_precision() {
    let out = Command::new(env!("CARGO_BIN_EXE_betaq"))
        .args(["cm", "--k", "1", "--r", "1"])
        .env("BETAQ_PREC", "96")
        .output()
        .expect("binary runs");
    let doc = stdout_json(&out);
    assert_eq!(doc["prec"], 96);
}

#[test]
fn limits_passes_for_k1() {
    let out = betaq(&["limits", "--k", "1"]);
    let doc = stdout_json(&out);
    assert_eq!(doc["pass"], true);
    assert_eq!(doc["identity_exact"], true);
    assert_eq!(doc["rows"].as_array().expect("rows").len(), 9);
}

#[test]
fn count_single_value_text() {
    let out = betaq(&["count", "--k", "1", "--n", "3"]);
    assert_eq!(exit_code(&out), 0);
    assert_eq!(String::from_utf8_lossy(&out.stdout).trim(), "t_1(3) = 16");
}

#[test]
fn count_requires_n_or_nmax() {
    let out = betaq(&["count", "--k", "1"]);
    assert_eq!(exit_code(&out), 2);
}

#[test]
fn asympt_csv_header_is_stable() {
    let out = betaq(&["asympt", "--k", "1", "--nmax", "8"]);
    assert_eq!(exit_code(&out), 0);
    let text = String::from_utf8_lossy(&out.stdout);
    let mut lines = text.lines();
    assert_eq!(lines.next(), Some("n,exact,main_term,ratio,cusp_coeff"));
    // k = 1: no cusp space, so the main term is exact and every ratio is 1
    for line in lines {
        let fields: Vec<&str> = line.split(',').collect();
        assert_eq!(fields.len(), 5);
        assert_eq!(fields[4], "0");
    }
}

#[test]
fn csv_is_rejected_where_it_has_no_meaning() {
    let out = betaq(&["cm", "--k", "1", "--r", "1", "--output", "csv"]);
    assert_eq!(exit_code(&out), 2);
}

#[test]
fn suite_small_run_exits_zero() {
    let out = betaq(&["suite", "--k-max", "2", "--output", "json"]);
    let doc = stdout_json(&out);
    assert_eq!(doc["all_pass"], true);
    assert_eq!(doc["results"].as_array().expect("results").len(), 12);
}
