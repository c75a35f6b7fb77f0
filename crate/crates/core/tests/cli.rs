use std::path::PathBuf;
use std::process::{Command, Output};

fn root() -> PathBuf {
    PathBuf::from(env!("CARGO_MANIFEST_DIR"))
}

fn eulerchar(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_eulerchar")).args(args).output().expect("binary runs")
}

fn scenario_path(name: &str) -> String {
    root().join("scenarios").join(name).display().to_string()
}

fn write_tmp(name: &str, text: &str) -> PathBuf {
    let dir = std::env::temp_dir().join(format!("eulerchar-cli-{}", std::process::id()));
    std::fs::create_dir_all(&dir).unwrap();
    let path = dir.join(name);
    std::fs::write(&path, text).unwrap();
    path
}

fn golden(out: &Output, file: &str) {
    let want = std::fs::read_to_string(root().join("tests/golden").join(file)).unwrap();
    assert_eq!(String::from_utf8_lossy(&out.stdout), want, "output differs from {file}");
}

#[test]
fn example1_matches_golden_json() {
    let out = eulerchar(&["run", &scenario_path("example1_sqrt-5.json")]);
    assert_eq!(out.status.code(), Some(0));
    golden(&out, "example1_sqrt-5.json");
}

#[test]
fn example2_matches_golden_text_and_flags_discrepancy() {
    let out = eulerchar(&["--format", "text", "run", &scenario_path("example2_sqrt-120.json")]);
    assert_eq!(out.status.code(), Some(4));
    golden(&out, "example2_sqrt-120.txt");
    assert!(String::from_utf8_lossy(&out.stdout).contains("DISCREPANCY: h2_dim"));
}

#[test]
fn repeated_runs_are_byte_identical() {
    let path = scenario_path("reduction_identities.json");
    let a = eulerchar(&["run", &path]);
    let b = eulerchar(&["run", &path]);
    assert_eq!(a.stdout, b.stdout);
    let v = eulerchar(&["verify-examples"]);
    let w = eulerchar(&["verify-examples"]);
    assert_eq!(v.stdout, w.stdout);
}

#[test]
fn batch_preserves_input_order() {
    let out = eulerchar(&["verify-examples"]);
    let reports: Vec<serde_json::Value> = serde_json::from_slice(&out.stdout).unwrap();
    let ids: Vec<&str> = reports.iter().map(|r| r["scenario_id"].as_str().unwrap()).collect();
    let expected: Vec<String> = eulerchar::selftest::bundled_scenarios().into_iter().map(|s| s.id).collect();
    assert_eq!(ids, expected);
    assert_eq!(out.status.code(), Some(4));
}

#[test]
fn empty_scenario_list_exits_2() {
    let path = write_tmp("empty.json", r#"{"scenarios": []}"#);
    assert_eq!(eulerchar(&["run", path.to_str().unwrap()]).status.code(), Some(2));
}

#[test]
fn malformed_and_missing_files_exit_2() {
    let path = write_tmp("broken.json", r#"{"scenarios": [{"id": 1}]}"#);
    assert_eq!(eulerchar(&["run", path.to_str().unwrap()]).status.code(), Some(2));
    assert_eq!(eulerchar(&["run", "/nonexistent/file.json"]).status.code(), Some(2));
}

#[test]
fn invalid_input_inside_a_scenario_exits_2() {
    let text = r#"{"scenarios": [{"id": "bad", "field": {"poly": [1, 0, 2]}, "group": {"builtin": "trivial"},
        "archimedean": ["complex"], "module": {"p": 2, "exponents": [1]}, "outputs": ["tate"]}]}"#;
    let path = write_tmp("nonmonic.json", text);
    let out = eulerchar(&["run", path.to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&out.stdout).contains("not monic"));
}

#[test]
fn oversized_cochains_exit_3() {
    let text = r#"{"scenarios": [{"id": "big", "field": {"builtin": "Q(sqrt,-5)"}, "group": {"builtin": "C_200"},
        "archimedean": ["complex"], "module": {"p": 2, "exponents": [1], "cyclo_char": "trivial"},
        "flags": {"quotient_is_full": true}, "outputs": ["exact"]}]}"#;
    let path = write_tmp("big.json", text);
    let out = eulerchar(&["run", path.to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(3));
    assert!(String::from_utf8_lossy(&out.stdout).contains("\"engine\""));
}

#[test]
fn selftest_filter_runs_one_suite() {
    let out = eulerchar(&["--format", "text", "selftest", "--filter", "cyclic"]);
    assert_eq!(out.status.code(), Some(0));
    let text = String::from_utf8_lossy(&out.stdout);
    assert_eq!(text.lines().count(), 1, "{text}");
    assert!(text.starts_with("pass cyclic"));
}

#[test]
fn selftest_rejects_corrupted_table() {
    let fixture = root().join("tests/fixtures/corrupt_table.json");
    let out = eulerchar(&["--format", "text", "selftest", "--filter", "group_tables", "--table", fixture.to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(1));
    let text = String::from_utf8_lossy(&out.stdout);
    assert!(text.contains("FAIL group_tables") && text.contains("violated"), "{text}");
}

#[test]
fn selftest_unknown_suite_exits_2() {
    assert_eq!(eulerchar(&["selftest", "--filter", "nope"]).status.code(), Some(2));
}

#[test]
fn selftest_accepts_seeds() {
    for seed in ["7", "8"] {
        let out = eulerchar(&["selftest", "--filter", "product_formula", "--seed", seed]);
        assert_eq!(out.status.code(), Some(0));
    }
}
