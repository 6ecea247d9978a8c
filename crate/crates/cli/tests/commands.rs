use std::path::PathBuf;
use std::process::Command;

use serde_json::Value;

fn data(name: &str) -> PathBuf {
    PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("tests/data").join(name)
}

fn run(args: &[&str]) -> (Value, i32) {
    let out = Command::new(env!("CARGO_BIN_EXE_fewopt"))
        .args(args)
        .env_remove("FEWOPT_PRECISION_BITS")
        .env_remove("FEWOPT_PRECISION_CAP")
        .output()
        .expect("binary runs");
    let text = String::from_utf8(out.stdout).unwrap();
    let v: Value = serde_json::from_str(&text).unwrap_or_else(|e| panic!("bad JSON {e}: {text}"));
    (v, out.status.code().unwrap())
}

fn path(name: &str) -> String {
    data(name).to_string_lossy().into_owned()
}

fn num(v: &Value) -> f64 {
    v.as_str().expect("decimal string").parse().unwrap()
}

#[test]
fn sup_parabola_is_bounded() {
    let (v, code) = run(&["sup", &path("parabola.json")]);
    assert_eq!(code, 0);
    assert_eq!(v["outcome"], "bounded");
    assert_eq!(v["case"], "condition3");
    assert!(v["lambda_star"].as_str().unwrap().starts_with("1.25"));
    assert!((num(&v["maximizer"]["coords"][0]) - 1.5).abs() < 1e-12);
    assert!(num(&v["enclosure"]["lo"]) <= 1.25 && num(&v["enclosure"]["hi"]) >= 1.25);
}

#[test]
fn sup_unbounded_and_constant() {
    let (v, code) = run(&["sup", &path("unbounded.json")]);
    assert_eq!((code, v["outcome"].as_str()), (0, Some("unbounded")));
    assert_eq!(v["witness"]["term_index"], 1);
    let (v, code) = run(&["sup", &path("simplex.json")]);
    assert_eq!(code, 0);
    assert_eq!(v["outcome"], "constant_at_boundary");
    assert_eq!(v["lambda_star"], "5");
    let (v, code) = run(&["sup", &path("tetranomial.json"), "--eps", "1e-20"]);
    assert_eq!((code, v["case"].as_str()), (0, Some("tetranomial")));
}

#[test]
fn unsupported_class_exits_4() {
    let (v, code) = run(&["sup", &path("too_many_terms.json")]);
    assert_eq!(code, 4);
    assert_eq!(v["error"], "not_in_class");
    let (_, code) = run(&["condition", &path("too_many_terms.json")]);
    assert_eq!(code, 4);
}

#[test]
fn invalid_input_exits_2() {
    let (v, code) = run(&["sup", &path("bad_expr.json")]);
    assert_eq!(code, 2);
    assert_eq!(v["error"], "parse_error");
    assert_eq!(v["position"], 2);
    let (v, code) = run(&["sup", &path("missing.json")]);
    assert_eq!((code, v["error"].as_str()), (2, Some("invalid_input")));
    let (_, code) = run(&["oracle", &path("parabola.json"), "--range", "3,1"]);
    assert_eq!(code, 2);
}

#[test]
fn decide_reports_ties() {
    let (v, code) = run(&["decide", &path("simplex.json"), "--lambda", "5"]);
    assert_eq!(code, 3);
    assert_eq!(v["decision"], "equal_within_precision");
    assert_eq!(v["margin"], "0");
    let (v, code) = run(&["decide", &path("parabola.json"), "--lambda", "5/4 - 1/1000"]);
    assert_eq!((code, v["decision"].as_str()), (0, Some("yes")));
    let (v, code) = run(&["decide", &path("parabola.json"), "--lambda", "-1 + 3*3/4 + 1/1000"]);
    assert_eq!((code, v["decision"].as_str()), (0, Some("no")));
}

#[test]
fn roots_condition_canon() {
    let (v, code) = run(&["roots", &path("trinomial.json"), "--eps", "1e-30"]);
    assert_eq!(code, 0);
    assert_eq!(v["count"], 1);
    let r = num(&v["roots"][0]["value"]);
    assert!((-1.0 - r + r.powf(5f64.sqrt())).abs() < 1e-12);

    let (v, code) = run(&["condition", &path("parabola.json")]);
    assert_eq!(code, 0);
    assert_eq!(v["minors"].as_array().unwrap().len(), 3);
    assert!((num(&v["log_condition"]) - 6.0 * 3f64.ln()).abs() < 1e-9);

    let (v, code) = run(&["canon", &path("simplex.json")]);
    assert_eq!(code, 0);
    assert_eq!(v["ell"], 0);
    assert_eq!(v["c"], "5");
    let (_, code) = run(&["canon", &path("parabola.json")]);
    assert_eq!(code, 4);
}

#[test]
fn reduce_builds_gadget() {
    let (v, code) = run(&["reduce", &path("quartic.json"), "--delta", "0.5", "--cap-m", "3"]);
    assert_eq!(code, 0);
    assert_eq!(v["m"], 3);
    assert_eq!(v["m_formula"], "625");
    assert_eq!(v["clamped"], true);
    assert_eq!(v["instance"]["n"], 4);
    let (v, code) = run(&["reduce", &path("quartic.json"), "--delta", "0.25"]);
    assert_eq!((code, v["error"].as_str()), (2, Some("invalid_input")));
}

#[test]
fn oracle_reports_grid_value() {
    let (v, code) = run(&["oracle", &path("parabola.json"), "--grid", "30", "--range", "-2,2"]);
    assert_eq!(code, 0);
    assert!((num(&v["value"]) - 1.25).abs() < 1e-9);
    let (v, _) = run(&["oracle", &path("unbounded.json"), "--grid", "9", "--widen"]);
    assert_eq!(v["widening"]["grows"], true);
}

#[test]
fn precision_environment() {
    let out = Command::new(env!("CARGO_BIN_EXE_fewopt"))
        .args(["sup", &path("parabola.json")])
        .env("FEWOPT_PRECISION_BITS", "512")
        .env("FEWOPT_PRECISION_CAP", "1024")
        .output()
        .unwrap();
    assert_eq!(out.status.code(), Some(0));
    let v: Value = serde_json::from_slice(&out.stdout).unwrap();
    assert!(v["precision_bits"].as_u64().unwrap() >= 512);
    let out = Command::new(env!("CARGO_BIN_EXE_fewopt"))
        .args(["sup", &path("parabola.json")])
        .env("FEWOPT_PRECISION_BITS", "lots")
        .output()
        .unwrap();
    assert_eq!(out.status.code(), Some(2));
}

#[test]
fn usage_errors_exit_2() {
    let out = Command::new(env!("CARGO_BIN_EXE_fewopt")).args(["frobnicate"]).output().unwrap();
    assert_eq!(out.status.code(), Some(2));
}
