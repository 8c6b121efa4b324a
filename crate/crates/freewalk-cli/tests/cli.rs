//! End-to-end behavior of the `freewalk` binary: output formats,
//! determinism, the exit-code contract, and file output.

use std::process::{Command, Output};

fn freewalk(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_freewalk"))
        .args(args)
        .output()
        .expect("binary must run")
}

fn stdout_of(args: &[&str]) -> String {
    let out = freewalk(args);
    assert!(
        out.status.success(),
        "command {args:?} failed: {}",
        String::from_utf8_lossy(&out.stderr)
    );
    String::from_utf8(out.stdout).expect("utf-8 output")
}

#[test]
fn identical_invocations_are_byte_identical() {
    for format in ["text", "json", "csv"] {
        let args = ["green", "--points", "e,a,ab,abA", "--format", format];
        let first = freewalk(&args);
        let second = freewalk(&args);
        assert!(first.status.success());
        assert_eq!(
            first.stdout, second.stdout,
            "{format} output must be deterministic"
        );
    }
    let seeded = [
        "zeta-sample",
        "--length",
        "5",
        "--seed",
        "42",
        "--count",
        "8",
    ];
    assert_eq!(freewalk(&seeded).stdout, freewalk(&seeded).stdout);
}

#[test]
fn json_output_is_versioned_and_parseable() {
    let text = stdout_of(&["green", "--points", "e,ab", "--format", "json"]);
    let doc: serde_json::Value = serde_json::from_str(&text).expect("valid JSON");
    assert_eq!(doc["schema_version"], 1);
    assert_eq!(doc["command"], "green");
    assert_eq!(doc["rows"][0][2], "3/2");
    assert_eq!(doc["rows"][1][2], "1/6");
}

#[test]
fn csv_output_has_headers_and_exact_cells() {
    let text = stdout_of(&[
        "kernel", "--ray", "e|a", "--points", "a,A", "--format", "csv",
    ]);
    let mut lines = text.lines();
    assert_eq!(
        lines.next(),
        Some("point,exponent,value,value_float,harmonic_defect")
    );
    assert_eq!(lines.next(), Some("a,-1,1/3,0.3333333333333333,0/1"));
    assert_eq!(lines.next(), Some("A,1,3/1,3,0/1"));
}

#[test]
fn malformed_input_exits_2() {
    // Letter outside rank 2.
    let out = freewalk(&["green", "--points", "ac"]);
    assert_eq!(out.status.code(), Some(2));
    // Family that needs a radius, given none.
    let out = freewalk(&["defect-mk", "--reference", "sigma:e", "--test-sets", "e"]);
    assert_eq!(out.status.code(), Some(2));
    // Ray with a cancelling junction.
    let out = freewalk(&["kernel", "--ray", "a|Ab"]);
    assert_eq!(out.status.code(), Some(2));
    // --expected together with --ray.
    let out = freewalk(&[
        "lightness",
        "--expected",
        "--ray",
        "e|a",
        "--set",
        "sigma:e@6",
    ]);
    assert_eq!(out.status.code(), Some(2));
    // Unknown check name.
    let out = freewalk(&["verify-all", "--only", "no-such-check"]);
    assert_eq!(out.status.code(), Some(2));
    // Clap-level usage error.
    let out = freewalk(&["no-such-subcommand"]);
    assert_eq!(out.status.code(), Some(2));
}

#[test]
fn exhausted_budgets_exit_3() {
    // The closed per-sphere count overflows long before r = 200.
    let out = freewalk(&["growth", "--set", "aaa:a", "--r-max", "200"]);
    assert_eq!(out.status.code(), Some(3));
    // A sparse-family block inside the radius but over the enumeration cap.
    let out = freewalk(&["injectivity", "--radius", "64", "--cap", "12"]);
    assert_eq!(out.status.code(), Some(3));
}

#[test]
fn unwritable_output_exits_1() {
    let out = freewalk(&["green", "--output", "/nonexistent-dir/out.txt"]);
    assert_eq!(out.status.code(), Some(1));
}

#[test]
fn output_file_receives_the_rendering() {
    let dir = tempfile::tempdir().expect("tempdir");
    let path = dir.path().join("table.json");
    let out = freewalk(&[
        "injectivity",
        "--format",
        "json",
        "--output",
        path.to_str().expect("utf-8 path"),
    ]);
    assert!(out.status.success());
    assert!(out.stdout.is_empty(), "file output should not also print");
    let written = std::fs::read_to_string(&path).expect("file written");
    let doc: serde_json::Value = serde_json::from_str(&written).expect("valid JSON");
    assert_eq!(doc["command"], "injectivity");
    assert_eq!(doc["rows"][0][4], "0", "no collisions");
}

#[test]
fn single_check_runs_pass_through_verify_all() {
    let text = stdout_of(&["verify-all", "--only", "product-injectivity"]);
    assert!(
        text.contains("PASS"),
        "expected a passing line, got:\n{text}"
    );
    assert!(!text.contains("FAIL"));
}

#[test]
fn defect_subcommands_report_exact_matches() {
    let text = stdout_of(&[
        "defect-mk",
        "--reference",
        "sphere@1",
        "--stage",
        "3",
        "--test-sets",
        "e,ab;a",
        "--format",
        "csv",
    ]);
    for line in text.lines().skip(1) {
        assert!(
            line.contains(",true,"),
            "averaged defect row not exact: {line}"
        );
    }
    let text = stdout_of(&[
        "defect-green",
        "--reference",
        "explicit:e",
        "--translator",
        "a",
        "--test-sets",
        "A;e,ab",
        "--format",
        "csv",
    ]);
    for line in text.lines().skip(1) {
        assert!(
            line.ends_with(",true"),
            "translate defect row not exact: {line}"
        );
    }
}

#[test]
fn growth_reports_counts_and_estimates() {
    let text = stdout_of(&["growth", "--set", "sigma:e", "--r-max", "8"]);
    assert!(text.contains("tail growth estimates"));
    let csv = stdout_of(&[
        "growth", "--set", "sigma:e", "--r-max", "8", "--format", "csv",
    ]);
    let last = csv.lines().last().expect("rows");
    assert_eq!(last, "8,108");
}
