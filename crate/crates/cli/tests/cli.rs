use std::process::{Command, Output};

use bellcover::json::{certificate_to_json, form_from_json};
use bellcover::inequality::hardy_base;
use serde_json::Value;

fn bellcover(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_bellcover"))
        .args(args)
        .current_dir(concat!(env!("CARGO_MANIFEST_DIR"), "/tests/fixtures"))
        .output()
        .expect("binary runs")
}

fn lines(out: &Output) -> Vec<Value> {
    String::from_utf8_lossy(&out.stdout).lines().map(|l| serde_json::from_str(l).expect("NDJSON line")).collect()
}

#[test]
fn certify_hardy_form_is_proven() {
    let out = bellcover(&["certify", "hardy_form.json"]);
    assert_eq!(out.status.code(), Some(0));
    let docs = lines(&out);
    assert_eq!(docs.len(), 1);
    assert_eq!(docs[0]["verdict"], "proven");
    assert_eq!(docs[0], certificate_to_json(&hardy_base().certify()));
}

#[test]
fn certify_refutable_form_prints_witness() {
    let out = bellcover(&["certify", "refutable_form.json"]);
    assert_eq!(out.status.code(), Some(1));
    let doc = &lines(&out)[0];
    assert_eq!(doc["verdict"], "refuted");
    assert!(doc["witness"].is_array());
}

#[test]
fn certify_under_zero_assumptions() {
    let out = bellcover(&["certify", "refutable_form.json", "--zero", "P_00(0,0)"]);
    assert_eq!(out.status.code(), Some(0));
}

#[test]
fn truncated_input_is_a_usage_error() {
    let out = bellcover(&["certify", "truncated_form.json"]);
    assert_eq!(out.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&out.stderr).contains("malformed JSON"));
    assert_eq!(bellcover(&["certify", "missing.json"]).status.code(), Some(2));
}

#[test]
fn catalog_families() {
    for (family, count) in [("hardy64", 64), ("nhardy:4", 1), ("chsh", 8), ("zukowski", 1), ("threeaxes", 1)] {
        let out = bellcover(&["catalog", family]);
        assert_eq!(out.status.code(), Some(0), "{family}");
        let docs = lines(&out);
        assert_eq!(docs.len(), count, "{family}");
        for d in &docs {
            assert_eq!(d["verdict"], "proven");
            form_from_json(d).expect("catalog output parses back");
        }
    }
    assert_eq!(bellcover(&["catalog", "nonsense"]).status.code(), Some(2));
}

#[test]
fn deduce_exit_codes() {
    let zeros = ["--zero", "P_10(0,0)", "--zero", "P_01(0,0)", "--zero", "P_11(1,1)"];
    let mut args = vec!["deduce"];
    args.extend(zeros);
    args.extend(["--target", "P_00(0,0)"]);
    assert_eq!(bellcover(&args).status.code(), Some(0));
    let out = bellcover(&["deduce", "--zero", "P_10(0,0)", "--target", "P_00(0,0)"]);
    assert_eq!(out.status.code(), Some(1));
    assert!(lines(&out)[0]["witness"].is_array());
}

#[test]
fn quantum_eval_reports_violation() {
    let out = bellcover(&["quantum-eval", "--state", "singlet", "--axes", "chsh_axes.json", "--form", "chsh_lower.json"]);
    assert_eq!(out.status.code(), Some(1));
    let doc = &lines(&out)[0];
    let v = doc["forms"][0]["value"].as_f64().unwrap();
    assert!((v - (2.0 - 2.0 * 2f64.sqrt())).abs() < 1e-12);
    assert!(doc["max_signaling"].as_f64().unwrap() < 1e-12);

    let out = bellcover(&["quantum-eval", "--state", "singlet", "--axes", "chsh_axes.json", "--form", "hardy_form.json"]);
    assert_eq!(out.status.code(), Some(0));
}

#[test]
fn scan_finds_the_chsh_violation() {
    let out = bellcover(&["scan", "chsh_lower.json", "--state", "singlet", "--grid-steps", "5"]);
    assert_eq!(out.status.code(), Some(1));
    let best = lines(&out)[0]["best_value"].as_f64().unwrap();
    assert!((best - (2.0 - 2.0 * 2f64.sqrt())).abs() < 1e-3, "{best}");
    assert_eq!(bellcover(&["scan", "chsh_lower.json", "--state", "zero2", "--grid-steps", "3"]).status.code(), Some(0));
}

#[test]
fn ghz_is_a_violation() {
    let out = bellcover(&["ghz"]);
    assert_eq!(out.status.code(), Some(1));
    assert_eq!(lines(&out)[0]["lhs"].as_f64().unwrap(), -4.0);
}

#[test]
fn membership_verdicts() {
    let out = bellcover(&["membership", "pr_box.json"]);
    assert_eq!(out.status.code(), Some(1));
    assert_eq!(lines(&out)[0]["verdict"], "infeasible");
    assert_eq!(bellcover(&["membership", "uniform.json"]).status.code(), Some(0));
    assert_eq!(bellcover(&["membership", "uniform.json", "--mode", "float"]).status.code(), Some(0));
}

#[test]
fn render_is_deterministic() {
    let a = bellcover(&["render", "hardy_form.json"]);
    let b = bellcover(&["render", "hardy_form.json"]);
    assert_eq!(a.status.code(), Some(0));
    assert_eq!(a.stdout, b.stdout);
    let expected = include_str!("../../core/tests/fixtures/hardy_form.txt");
    assert_eq!(String::from_utf8(a.stdout).unwrap(), expected);

    let svg = bellcover(&["render", "--event", "P_01(0,0)", "--format", "svg"]);
    assert!(String::from_utf8(svg.stdout).unwrap().starts_with("<?xml"));
    assert_eq!(bellcover(&["render"]).status.code(), Some(2));
}

#[test]
fn bad_flags_are_usage_errors() {
    assert_eq!(bellcover(&["membership", "uniform.json", "--mode", "decimal"]).status.code(), Some(2));
    assert_eq!(bellcover(&["frobnicate"]).status.code(), Some(2));
}

#[test]
fn reproduce_emits_a_passing_report() {
    let out = bellcover(&["reproduce"]);
    let stderr = String::from_utf8_lossy(&out.stderr);
    assert_eq!(out.status.code(), Some(0), "{stderr}");
    assert_eq!(stderr.lines().filter(|l| l.starts_with("PASS")).count(), 12);
    let report = &lines(&out)[0];
    assert_eq!(report["passed"], true);
    assert_eq!(report["results"].as_array().unwrap().len(), 12);
    assert_eq!(report["inputs_digest"].as_str().unwrap().len(), 64);
    let chsh = report["results"][7]["measured"]["chsh_value"].as_f64().unwrap();
    assert!((chsh - 2.0 * 2f64.sqrt()).abs() < 1e-3);
    let hardy = report["results"][8]["measured"]["probability"].as_f64().unwrap();
    assert!((hardy - 0.0902).abs() < 1e-3);
}
