//! End-to-end CLI behavior: exit codes, output formats, corpus handling.

use std::process::{Command, Output};

fn run(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_trapbound"))
        .args(args)
        .output()
        .expect("binary runs")
}

fn stdout(out: &Output) -> String {
    String::from_utf8(out.stdout.clone()).unwrap()
}

fn stderr(out: &Output) -> String {
    String::from_utf8(out.stderr.clone()).unwrap()
}

fn exit_code(out: &Output) -> i32 {
    out.status.code().expect("no signal")
}

#[test]
fn bounds_happy_path_json() {
    let out = run(&[
        "bounds", "--fn", "1/s^2", "--a", "1", "--b", "2", "--format", "json",
    ]);
    assert_eq!(exit_code(&out), 0, "stderr: {}", stderr(&out));
    let report: trapbound::report::Report = serde_json::from_str(stdout(&out).trim()).unwrap();
    assert!((report.mvt.x - std::f64::consts::SQRT_2).abs() < 1e-8);
    assert!((report.envelope.middle - 0.125).abs() < 1e-9);
    assert!(report.checks.sandwich_ok);
}

#[test]
fn bounds_table_and_csv() {
    let out = run(&["bounds", "--fn", "1/s^2", "--a", "1", "--b", "2"]);
    assert_eq!(exit_code(&out), 0);
    let text = stdout(&out);
    assert!(text.contains("function"));
    assert!(text.contains("1/s^2"));
    assert!(text.contains("sandwich=ok"));

    let out = run(&[
        "bounds", "--fn", "1/s^2", "--a", "1", "--b", "2", "--format", "csv",
    ]);
    assert_eq!(exit_code(&out), 0);
    let text = stdout(&out);
    let mut lines = text.lines();
    assert_eq!(lines.next().unwrap(), trapbound::report::CSV_HEADER);
    let row = lines.next().unwrap();
    assert!(row.starts_with("1/s^2,1/s^2,"));
}

#[test]
fn bounds_domain_error_exits_one() {
    let out = run(&["bounds", "--fn", "1/s", "--a", "0", "--b", "1"]);
    assert_eq!(exit_code(&out), 1);
    assert!(stderr(&out).contains("division by zero"));
}

#[test]
fn bounds_positivity_error_exits_one() {
    let out = run(&["bounds", "--fn", "s-10", "--a", "0", "--b", "1"]);
    assert_eq!(exit_code(&out), 1);
    assert!(stderr(&out).contains("positivity"));
}

#[test]
fn bounds_parse_error_exits_one() {
    let out = run(&["bounds", "--fn", "2*+s", "--a", "0", "--b", "1"]);
    assert_eq!(exit_code(&out), 1);
    assert!(stderr(&out).contains("offset 2"));
}

#[test]
fn bounds_bad_interval_exits_one() {
    let out = run(&["bounds", "--fn", "s", "--a", "2", "--b", "1"]);
    assert_eq!(exit_code(&out), 1);
}

#[test]
fn bounds_manual_x_is_reported_not_enforced() {
    // At x far from the mean-value point the sandwich generally fails for
    // 1/s^2, but a supplied x must not trip exit code 2.
    let out = run(&[
        "bounds", "--fn", "1/s^2", "--a", "1", "--b", "2", "--x", "1.05", "--format", "json",
    ]);
    assert_eq!(exit_code(&out), 0, "stderr: {}", stderr(&out));
    let report: trapbound::report::Report = serde_json::from_str(stdout(&out).trim()).unwrap();
    assert_eq!(report.mvt.roots, vec![1.05]);
}

#[test]
fn meanpoint_golden_and_degenerate() {
    let out = run(&[
        "meanpoint",
        "--fn",
        "1/s^2",
        "--a",
        "1",
        "--b",
        "4",
        "--format",
        "json",
    ]);
    assert_eq!(exit_code(&out), 0);
    let v: serde_json::Value = serde_json::from_str(stdout(&out).trim()).unwrap();
    assert!((v["x"].as_f64().unwrap() - 2.0).abs() < 1e-8);
    assert!(!v["degenerate"].as_bool().unwrap());

    let out = run(&["meanpoint", "--fn", "s^2", "--a", "0", "--b", "1"]);
    assert_eq!(exit_code(&out), 0);
    let text = stdout(&out);
    assert!(text.contains("degenerate  true"));

    let out = run(&[
        "meanpoint",
        "--fn",
        "exp(s)",
        "--a",
        "0",
        "--b",
        "1",
        "--all-roots",
    ]);
    assert_eq!(exit_code(&out), 0);
    assert!(stdout(&out).contains("roots"));
}

#[test]
fn means_table_and_chain() {
    let out = run(&["means", "--alpha", "1", "--beta", "2", "--format", "json"]);
    assert_eq!(exit_code(&out), 0);
    let v: serde_json::Value = serde_json::from_str(stdout(&out).trim()).unwrap();
    assert!((v["A"].as_f64().unwrap() - 1.5).abs() < 1e-15);
    assert!((v["H"].as_f64().unwrap() - 4.0 / 3.0).abs() < 1e-15);
    assert!(v["chain_ok"].as_bool().unwrap());

    // Equal arguments: every mean collapses to the common value.
    let out = run(&["means", "--alpha", "2", "--beta", "2", "--format", "json"]);
    assert_eq!(exit_code(&out), 0);
    let v: serde_json::Value = serde_json::from_str(stdout(&out).trim()).unwrap();
    for key in ["A", "G", "H", "L", "I", "M_2", "L_2"] {
        assert!((v[key].as_f64().unwrap() - 2.0).abs() < 1e-14, "{key}");
    }

    let out = run(&["means", "--alpha", "-1", "--beta", "2"]);
    assert_eq!(exit_code(&out), 1);
}

#[test]
fn means_application_checks() {
    let out = run(&["means", "--check-app", "recip_sq", "--a", "1", "--b", "2"]);
    assert_eq!(exit_code(&out), 0, "stderr: {}", stderr(&out));
    assert!(stdout(&out).contains("sandwich       ok"));

    let out = run(&[
        "means",
        "--check-app",
        "power",
        "--a",
        "1",
        "--b",
        "2",
        "--p",
        "3",
        "--format",
        "json",
    ]);
    assert_eq!(exit_code(&out), 0);
    let v: serde_json::Value = serde_json::from_str(stdout(&out).trim()).unwrap();
    assert!(v["sandwich_ok"].as_bool().unwrap());
    assert!(v["middle_ok"].as_bool().unwrap());

    // log below 1 violates the positivity hypothesis.
    let out = run(&["means", "--check-app", "log", "--a", "0.5", "--b", "2"]);
    assert_eq!(exit_code(&out), 1);

    let out = run(&["means", "--check-app", "bogus", "--a", "1", "--b", "2"]);
    assert_eq!(exit_code(&out), 1);
}

#[test]
fn sweep_builtin_corpus() {
    let out = run(&["sweep", "--builtin", "paper", "--grid", "128"]);
    assert_eq!(exit_code(&out), 0, "stderr: {}", stderr(&out));
    let text = stdout(&out);
    let lines: Vec<&str> = text.trim_end().lines().collect();
    assert_eq!(lines[0], trapbound::report::CSV_HEADER);
    assert!(lines.len() >= 7, "expected 6+ data rows");
    for row in &lines[1..] {
        assert!(row.ends_with(",true"), "sandwich_ok expected in {row}");
    }
}

#[test]
fn sweep_corpus_file_and_errors() {
    let dir = std::env::temp_dir();
    let path = dir.join(format!("trapbound-corpus-{}.txt", std::process::id()));
    std::fs::write(&path, "# demo\nsq | s^2+1 | 0 | 1\ninv | 1/s | 1 | 2\n").unwrap();
    let out = run(&["sweep", "--corpus", path.to_str().unwrap(), "--grid", "128"]);
    assert_eq!(exit_code(&out), 0, "stderr: {}", stderr(&out));
    assert_eq!(stdout(&out).trim_end().lines().count(), 3);
    std::fs::remove_file(&path).ok();

    // Empty corpus file: exit 1.
    let empty = dir.join(format!("trapbound-empty-{}.txt", std::process::id()));
    std::fs::write(&empty, "# nothing here\n").unwrap();
    let out = run(&["sweep", "--corpus", empty.to_str().unwrap()]);
    assert_eq!(exit_code(&out), 1);
    std::fs::remove_file(&empty).ok();

    // Missing file: exit 1.
    let out = run(&["sweep", "--corpus", "/nonexistent/corpus.txt"]);
    assert_eq!(exit_code(&out), 1);

    // Unknown builtin: exit 1.
    let out = run(&["sweep", "--builtin", "nope"]);
    assert_eq!(exit_code(&out), 1);
}

#[test]
fn usage_errors_exit_nonzero() {
    let out = run(&["bounds", "--fn", "s"]);
    assert_ne!(exit_code(&out), 0);
    let out = run(&["means"]);
    assert_eq!(exit_code(&out), 1);
    let out = run(&[
        "bounds", "--fn", "s+1", "--a", "0", "--b", "1", "--x", "zzz",
    ]);
    assert_eq!(exit_code(&out), 1);
}
