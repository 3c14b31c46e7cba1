//! End-to-end runs of the `gluepo` binary: exit statuses, the exact
//! summary strings, structured output formats, and the max-events cap.

use std::io::Write as _;
use std::path::Path;
use std::process::{Command, Output};

fn fixture(name: &str) -> String {
    Path::new(env!("CARGO_MANIFEST_DIR"))
        .join("fixtures")
        .join(name)
        .display()
        .to_string()
}

fn gluepo(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_gluepo"))
        .args(args)
        .output()
        .expect("the binary runs")
}

fn stdout(out: &Output) -> String {
    String::from_utf8(out.stdout.clone()).expect("stdout is UTF-8")
}

fn stderr(out: &Output) -> String {
    String::from_utf8(out.stderr.clone()).expect("stderr is UTF-8")
}

#[test]
fn unfold_and_glue_report_fig1_counts() {
    let out = gluepo(&[
        "unfold",
        &fixture("fig1.pti"),
        "--max-events",
        "4",
        "--maximal-only",
    ]);
    assert_eq!(out.status.code(), Some(0), "{}", stderr(&out));
    assert_eq!(stdout(&out), "3 LPOs\n");

    let out = gluepo(&[
        "glue",
        &fixture("fig1.pti"),
        "--max-events",
        "4",
        "--maximal-only",
    ]);
    assert_eq!(out.status.code(), Some(0), "{}", stderr(&out));
    assert_eq!(stdout(&out), "2 g-LPOs\n");
}

#[test]
fn unfold_json_is_versioned_and_counted() {
    let out = gluepo(&[
        "unfold",
        &fixture("fig1.pti"),
        "--max-events",
        "4",
        "--maximal-only",
        "--format",
        "json",
    ]);
    assert_eq!(out.status.code(), Some(0), "{}", stderr(&out));
    let doc: serde_json::Value = serde_json::from_str(&stdout(&out)).expect("valid JSON");
    assert_eq!(doc["version"], 1);
    assert_eq!(doc["count"], 3);
    assert_eq!(doc["lpos"].as_array().map(Vec::len), Some(3));
}

#[test]
fn render_emits_dot() {
    let out = gluepo(&[
        "render",
        &fixture("fig1.pti"),
        "--max-events",
        "4",
        "--maximal-only",
        "--glued",
    ]);
    assert_eq!(out.status.code(), Some(0), "{}", stderr(&out));
    let dot = stdout(&out);
    assert!(dot.starts_with("digraph glpo {"));
    assert!(dot.contains("glue:"));

    let out = gluepo(&["render", &fixture("fig1.pti"), "--index", "99"]);
    assert_eq!(out.status.code(), Some(2));
    assert!(stderr(&out).contains("out of range"));
}

#[test]
fn check_equivalence_and_separate_succeed_on_fixtures() {
    for mode in ["listening", "cannot-receive"] {
        let out = gluepo(&[
            "check-equivalence",
            &fixture("fig2.cts"),
            "--max-events",
            "4",
            "--mode",
            mode,
        ]);
        assert_eq!(out.status.code(), Some(0), "{}", stderr(&out));
        assert_eq!(stdout(&out), "equivalence holds (both directions)\n");
    }

    let out = gluepo(&["separate", &fixture("fig1.pti"), "--max-events", "4"]);
    assert_eq!(out.status.code(), Some(0), "{}", stderr(&out));
    assert!(stdout(&out).contains("1 distinct pair(s) witnessed"));
}

#[test]
fn compose_and_baseline_respect_model_kinds() {
    let out = gluepo(&["compose", &fixture("fig2.cts")]);
    assert_eq!(out.status.code(), Some(0), "{}", stderr(&out));
    assert!(stdout(&out).starts_with("system "));

    let out = gluepo(&["baseline", &fixture("handshake.async")]);
    assert_eq!(out.status.code(), Some(0), "{}", stderr(&out));
    assert!(stdout(&out).starts_with("baseline holds:"));

    // Kind mismatches are usage errors.
    let out = gluepo(&["baseline", &fixture("fig1.pti")]);
    assert_eq!(out.status.code(), Some(2));
    let out = gluepo(&["compose", &fixture("fig1.pti")]);
    assert_eq!(out.status.code(), Some(2));
    let out = gluepo(&["check-equivalence", &fixture("handshake.async")]);
    assert_eq!(out.status.code(), Some(2));
}

#[test]
fn parse_and_io_errors_exit_2() {
    let mut bad = tempfile::NamedTempFile::new().expect("temp file");
    writeln!(bad, "net broken\nplace").expect("write");
    let out = gluepo(&["unfold", &bad.path().display().to_string()]);
    assert_eq!(out.status.code(), Some(2));
    assert!(stderr(&out).starts_with("error:"), "{}", stderr(&out));

    let out = gluepo(&["unfold", "/nonexistent/model.pti"]);
    assert_eq!(out.status.code(), Some(2));
    assert!(stderr(&out).contains("cannot read"));
}

#[test]
fn max_events_cap_is_enforced_and_overridable() {
    let out = gluepo(&["unfold", &fixture("fig1.pti"), "--max-events", "13"]);
    assert_eq!(out.status.code(), Some(2));
    assert!(stderr(&out).contains("exceeds the cap"));

    let out = Command::new(env!("CARGO_BIN_EXE_gluepo"))
        .args(["unfold", &fixture("fig1.pti"), "--max-events", "13"])
        .env("GLUEPO_MAX_EVENTS_CAP", "13")
        .output()
        .expect("the binary runs");
    assert_eq!(out.status.code(), Some(0), "{}", stderr(&out));
}
