//! End-to-end tests of the `cdouble` binary: JSON output and exit codes.

use std::process::{Command, Output};

use serde_json::Value;

fn cdouble(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_cdouble")).args(args).output().expect("binary runs")
}

fn json_of(out: &Output) -> Value {
    serde_json::from_slice(&out.stdout).unwrap_or_else(|e| panic!("stdout is not JSON ({e}): {}", String::from_utf8_lossy(&out.stdout)))
}

#[test]
fn mutate_prints_pullback_formulas() {
    let out = cdouble(&["mutate", "--feed", "A2", "--k", "1", "--space", "X"]);
    assert_eq!(out.status.code(), Some(0));
    let v = json_of(&out);
    assert_eq!(v["substitution"], serde_json::json!({"X1": "1/X1", "X2": "X2*(1+X1)"}));
    assert_eq!(v["mutated_feed"]["epsilon"], serde_json::json!([[0, -1], [1, 0]]));

    let a = json_of(&cdouble(&["mutate", "--feed", "A2", "--k", "1", "--space", "A"]));
    assert_eq!(a["substitution"]["A1"], "(1+A2)/A1");
}

#[test]
fn feeds_can_be_given_inline() {
    let out = cdouble(&["mutate", "--feed", r#"{"n":2,"epsilon":[[0,1],[-1,0]]}"#, "--k", "2"]);
    assert_eq!(out.status.code(), Some(0));
    assert_eq!(json_of(&out)["substitution"]["X2"], "1/X2");
}

#[test]
fn usage_errors_exit_with_2() {
    assert_eq!(cdouble(&["mutate", "--feed", "A2", "--k", "3"]).status.code(), Some(2));
    assert_eq!(cdouble(&["mutate", "--feed", "A2", "--k", "0"]).status.code(), Some(2));
    assert_eq!(cdouble(&["mutate", "--feed", "{not json", "--k", "1"]).status.code(), Some(2));
    assert_eq!(cdouble(&["mutate", "--feed", "/no/such/file.json", "--k", "1"]).status.code(), Some(2));
    assert_eq!(cdouble(&["verify", "nonsense"]).status.code(), Some(2));
    assert_eq!(cdouble(&["frobnicate"]).status.code(), Some(2));
    assert_eq!(cdouble(&["surface", "flip", "--triangulation", "disc-5", "--edge", "4"]).status.code(), Some(2));
}

#[test]
fn verify_hgon_reports_four_sorted_exact_passes() {
    let out = cdouble(&["verify", "hgon"]);
    assert_eq!(out.status.code(), Some(0));
    let v = json_of(&out);
    let checks = v["checks"].as_array().unwrap();
    assert_eq!(checks.len(), 4);
    assert!(checks.iter().all(|c| c["status"] == "exact-pass"));
    let names: Vec<&str> = checks.iter().map(|c| c["name"].as_str().unwrap()).collect();
    let mut sorted = names.clone();
    sorted.sort();
    assert_eq!(names, sorted);
    assert_eq!(v["counts"]["exact-pass"], 4);
}

#[test]
fn randomized_suites_are_deterministic_for_a_seed() {
    let strip = |v: Value| -> Vec<(Value, Value)> { v["checks"].as_array().unwrap().iter().map(|c| (c["name"].clone(), c["detail"].clone())).collect() };
    let args = ["verify", "decompose", "--seed", "9", "--samples", "12"];
    let a = strip(json_of(&cdouble(&args)));
    let b = strip(json_of(&cdouble(&args)));
    assert_eq!(a, b);
    let c = strip(json_of(&cdouble(&["verify", "positivity", "--seed", "9", "--samples", "12"])));
    assert_ne!(a, c);
}

#[test]
fn failing_suites_exit_with_1() {
    // the semiclassical-limit trend converges at first order only
    let out = cdouble(&["verify", "phi", "--hbar", "0.7"]);
    assert_eq!(out.status.code(), Some(1));
    let v = json_of(&out);
    let failed: Vec<&str> = v["checks"].as_array().unwrap().iter().filter(|c| c["status"] == "fail").map(|c| c["name"].as_str().unwrap()).collect();
    assert_eq!(failed, vec!["phi/B1-trend"]);
    assert_eq!(v["counts"]["numeric-pass"], 16);
}

#[test]
fn exchange_graph_sizes() {
    for (feed, n) in [("A2", 5), ("B2", 6), ("G2", 8)] {
        let v = json_of(&cdouble(&["exchange-graph", "--feed", feed]));
        assert_eq!(v["graph"]["vertices"], n, "{feed}");
        assert_eq!(v["graph"]["complete"], true);
    }
    // the Markov feed has an infinite exchange graph: depth-limited output
    let markov = r#"{"n":3,"epsilon":[[0,2,-2],[-2,0,2],[2,-2,0]]}"#;
    let v = json_of(&cdouble(&["exchange-graph", "--feed", markov, "--max-depth", "3"]));
    assert_eq!(v["graph"]["complete"], false);
}

#[test]
fn phi_eval_and_check() {
    let v = json_of(&cdouble(&["phi", "eval", "--z", "0", "--hbar", "1"]));
    // Φ^ℏ has unit modulus on the real axis
    let (re, im) = (v["value"][0].as_f64().unwrap(), v["value"][1].as_f64().unwrap());
    assert!(((re * re + im * im).sqrt() - 1.0).abs() < 1e-10, "{v}");
    let out = cdouble(&["phi", "check", "--property", "B2,A5", "--hbar", "0.7"]);
    assert_eq!(out.status.code(), Some(0));
    assert_eq!(json_of(&out)["checks"].as_array().unwrap().len(), 2);
}

#[test]
fn intertwine_check_reports_lambda() {
    let out = cdouble(&["intertwine", "check", "--word", "pentagon", "--hbar", "0.7", "--grid", "128"]);
    assert_eq!(out.status.code(), Some(0));
    let v = json_of(&out);
    let (re, im) = (v["lambda"][0].as_f64().unwrap(), v["lambda"][1].as_f64().unwrap());
    assert!(((re * re + im * im).sqrt() - 1.0).abs() < 1e-3);
    assert!(v["phase_spread"].as_f64().unwrap() < 1e-3);
    assert!(v["residuals"]["unitarity"].as_f64().unwrap() < 1e-6);

    // a single mutation is not a relation
    let single = r#"{"source":{"n":2,"epsilon":[[0,1],[-1,0]]},"steps":[{"mut":0}]}"#;
    assert_eq!(cdouble(&["intertwine", "check", "--word", single, "--grid", "128"]).status.code(), Some(1));
}

#[test]
fn surface_flip_is_the_mutation() {
    let out = cdouble(&["surface", "flip", "--triangulation", "disc-5", "--edge", "0", "--pretty"]);
    assert_eq!(out.status.code(), Some(0));
    assert!(String::from_utf8_lossy(&out.stdout).contains('\n'));
    let v = json_of(&out);
    assert_eq!(v["feed_is_mutated_feed"], true);
    assert_eq!(v["feed"]["epsilon"], serde_json::json!([[0, -1], [1, 0]]));
    let t = json_of(&cdouble(&["surface", "feed", "--triangulation", "punctured-torus"]));
    assert_eq!(t["feed"]["epsilon"], serde_json::json!([[0, 2, -2], [-2, 0, 2], [2, -2, 0]]));
    assert_eq!(t["triangulation"]["genus"], 1);
}
