use std::path::PathBuf;
use std::process::{Command, Output};

use serde_json::Value;

fn run(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_cendalg")).args(args).output().expect("binary runs")
}

fn stdout(out: &Output) -> String {
    String::from_utf8(out.stdout.clone()).expect("utf-8 output")
}

fn schema(name: &str) -> Value {
    let path: PathBuf = [env!("CARGO_MANIFEST_DIR"), "..", "..", "schemas", &format!("{name}.schema.json")]
        .iter()
        .collect();
    serde_json::from_str(&std::fs::read_to_string(&path).expect("schema file")).expect("schema parses")
}

fn assert_valid(schema_name: &str, doc: &Value) {
    let validator = jsonschema::validator_for(&schema(schema_name)).expect("schema compiles");
    let errors: Vec<String> = validator.iter_errors(doc).map(|e| format!("{} at {}", e, e.instance_path)).collect();
    assert!(errors.is_empty(), "{schema_name}: {errors:?}");
}

/// Runs with `--json`, checks the exit code and validates the output.
fn json_of(schema_name: &str, args: &[&str], code: i32) -> Value {
    let mut full = vec!["--json"];
    full.extend_from_slice(args);
    let out = run(&full);
    assert_eq!(out.status.code(), Some(code), "{args:?}: {}", String::from_utf8_lossy(&out.stderr));
    let doc: Value = serde_json::from_str(&stdout(&out)).expect("JSON output");
    assert_valid(schema_name, &doc);
    if let Some(report) = doc.get("report") {
        assert_valid("lift_report", report);
    }
    doc
}

#[test]
fn product_example() {
    let out = run(&["product", "--n", "1", "[[v]]", "[[v^2]]"]);
    assert_eq!(out.status.code(), Some(0));
    assert_eq!(stdout(&out).trim(), "[[2*v^2]]");
}

#[test]
fn unbalanced_bracket_exits_2() {
    let out = run(&["product", "--n", "1", "[[v]", "[[v]]"]);
    assert_eq!(out.status.code(), Some(2));
    let err = String::from_utf8_lossy(&out.stderr);
    assert!(err.contains("unbalanced bracket"), "{err}");
    assert!(err.contains("column 5"), "{err}");
    assert!(stdout(&out).is_empty());
}

#[test]
fn obstruction_certificate_for_k3() {
    let out = run(&["counterexample", "obstruction", "--K", "3"]);
    assert_eq!(out.status.code(), Some(0));
    let doc: Value = serde_json::from_str(&stdout(&out)).unwrap();
    assert_valid("obstruction_certificate", &doc);
    assert_eq!(doc["k_bound"], 3);
    assert_eq!(doc["constant"], "1");
    assert_eq!(doc["replay_ok"], true);
}

#[test]
fn bad_flags_exit_2() {
    assert_eq!(run(&["product", "--n", "x", "v", "v"]).status.code(), Some(2));
    assert_eq!(run(&["counterexample", "obstruction", "--K", "0"]).status.code(), Some(2));
    assert_eq!(run(&["product", "v", "[[v, 0],[0, v]]"]).status.code(), Some(2));
    assert_eq!(run(&["identities", "v", "v"]).status.code(), Some(2));
    assert_eq!(run(&["product", "@/nonexistent/element.txt", "v"]).status.code(), Some(2));
    assert_eq!(run(&["frobnicate"]).status.code(), Some(2));
}

#[test]
fn elements_from_files() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("a.txt");
    std::fs::write(&path, "[[v]]\n").unwrap();
    let arg = format!("@{}", path.display());
    let out = run(&["product", "--n", "1", &arg, "[[v^2]]"]);
    assert_eq!(stdout(&out).trim(), "[[2*v^2]]");
}

#[test]
fn products_and_braces_validate() {
    let doc = json_of("product", &["product", "v", "v^2"], 0);
    assert_eq!(doc["locality"], 3);
    assert_eq!(doc["entries"][1]["value"], "[[2*v^2]]");
    let doc = json_of("product", &["brace", "--n", "2", "v", "v^2"], 0);
    assert_eq!(doc["entries"][0]["value"], "[[2*v]]");
    let doc = json_of("locality", &["locality", "1", "D"], 0);
    assert_eq!(doc["locality"], 2);
}

#[test]
fn identities_validate() {
    let doc = json_of("identity_report", &["identities", "v", "D", "[[v^2 + 1/2]]"], 0);
    assert_eq!(doc["passed"], true);
    let doc = json_of(
        "identity_report",
        &["identities", "--random", "3", "--seed", "5", "--size", "2", "--max-d", "1", "--max-v", "2"],
        0,
    );
    assert_eq!(doc["triples"].as_array().unwrap().len(), 3);
    assert_eq!(doc["seed"], 5);
}

#[test]
fn realize_crosscheck_span_validate() {
    let doc = json_of("realize", &["realize", "v^2", "--k", "2"], 0);
    assert_eq!(doc["operator"], "[[p^2*q^2]]");
    let doc = json_of("crosscheck", &["crosscheck", "[[v, D],[1, v^2]]", "[[D, 0],[v, 1]]"], 0);
    assert_eq!(doc["cases"].as_array().unwrap().len(), 25);
    let doc = json_of("span", &["span", "--gen", "v", "--gen", "D", "--member", "v + D", "--member", "v^3"], 0);
    assert_eq!(doc["rank"], 2);
    assert_eq!(doc["members"][0]["member"], true);
    assert_eq!(doc["members"][1]["member"], false);
}

#[test]
fn lift_targets_validate() {
    for target in ["idempotent", "generator", "family", "matrix-units"] {
        let doc = json_of("lift", &["lift", target], 0);
        assert_eq!(doc["passed"], true, "{target}");
    }
    let doc = json_of("lift", &["lift", "idempotent"], 0);
    assert_eq!(doc["value"], "[[1, 0, 0],[0, 1, 0],[0, 0, 0]]");
}

#[test]
fn split_fixtures_validate() {
    for fixture in ["triangular", "current-radical"] {
        let doc = json_of("split", &["split", "--fixture", fixture], 0);
        assert_eq!(doc["passed"], true);
    }
    let doc = json_of("split", &["split", "--fixture", "counterexample"], 1);
    let stages: Vec<&str> = doc["report"]["stages"]
        .as_array()
        .unwrap()
        .iter()
        .map(|s| s["stage"].as_str().unwrap())
        .collect();
    assert_eq!(stages, ["radical", "unit of C/R"]);
}

#[test]
fn counterexample_checks_validate() {
    for check in ["verify-closure", "verify-radical", "verify-theta"] {
        let doc = json_of("counterexample_check", &["counterexample", check, "--pairs", "10", "--seed", "3"], 0);
        assert_eq!(doc["passed"], true, "{check}");
    }
    let doc = json_of("forced_psi", &["counterexample", "forced-psi", "--K", "3"], 0);
    assert_eq!(doc["solution"]["dimension"], 3);
}

#[test]
fn output_is_deterministic() {
    for args in [
        &["--json", "identities", "--random", "2", "--seed", "11"][..],
        &["counterexample", "obstruction", "--K", "2"],
        &["--json", "split", "--fixture", "current-radical"],
    ] {
        assert_eq!(run(args).stdout, run(args).stdout, "{args:?}");
    }
}
