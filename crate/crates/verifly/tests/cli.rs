//! End-to-end tests spawning the `verifly` binary.

use std::io::{BufRead, BufReader, Write};
use std::process::{Command, Stdio};

const BIN: &str = env!("CARGO_BIN_EXE_verifly");

const CLEAN: &str = "\
:- entry app(X,Y,Z) : (ground(X), ground(Y), list(Y)).
app([],Y,Y).
app([X|Xs],Y,[X|Z]) :- app(Xs,Y,Z).
:- pred app(X,Y,Z) : (ground(X), ground(Y), list(Y)) => (ground(Z), list(Z)).
";

const VIOLATING: &str = "\
:- entry app(X,Y,Z) : (ground(X), ground(Y), list(Y)).
app([],Y,Y).
app([X|Xs],Y,[X|Z]) :- app(Xs,Y,Z).
:- pred app(X,Y,Z) : ground(X) => int(Z).
";

fn write_file(dir: &tempfile::TempDir, name: &str, text: &str) -> std::path::PathBuf {
    let path = dir.path().join(name);
    std::fs::write(&path, text).unwrap();
    path
}

#[test]
fn check_exits_zero_when_everything_is_checked() {
    let dir = tempfile::tempdir().unwrap();
    let path = write_file(&dir, "app.pl", CLEAN);
    let out = Command::new(BIN).arg("check").arg(&path).output().unwrap();
    assert!(out.status.success(), "stdout: {}", String::from_utf8_lossy(&out.stdout));
}

#[test]
fn check_exits_one_on_a_false_assertion() {
    let dir = tempfile::tempdir().unwrap();
    let path = write_file(&dir, "bad.pl", VIOLATING);
    let out = Command::new(BIN).arg("check").arg(&path).output().unwrap();
    assert_eq!(out.status.code(), Some(1));
    let text = String::from_utf8_lossy(&out.stdout);
    assert!(text.contains("[false]"), "missing falsified verdict in: {text}");
}

#[test]
fn check_exits_two_on_missing_file_and_syntax_errors() {
    let out = Command::new(BIN).arg("check").arg("/nonexistent/x.pl").output().unwrap();
    assert_eq!(out.status.code(), Some(2));

    let dir = tempfile::tempdir().unwrap();
    let path = write_file(&dir, "broken.pl", "p(X :- q.\n");
    let out = Command::new(BIN).arg("check").arg(&path).output().unwrap();
    assert_eq!(out.status.code(), Some(2));
}

#[test]
fn check_json_emits_a_single_parsable_object() {
    let dir = tempfile::tempdir().unwrap();
    let path = write_file(&dir, "bad.pl", VIOLATING);
    let out = Command::new(BIN).arg("check").arg(&path).arg("--json").output().unwrap();
    let v: serde_json::Value = serde_json::from_slice(&out.stdout).expect("valid JSON");
    assert!(v["diagnostics"].is_array());
    assert!(v["stats"]["analysis_ms"].is_number());
    assert_eq!(v["stats"]["incremental"], serde_json::Value::Bool(false));
}

#[test]
fn check_rejects_unknown_domain() {
    let out = Command::new(BIN)
        .args(["check", "--domains", "octagons", "x.pl"])
        .output()
        .unwrap();
    assert_eq!(out.status.code(), Some(2));
}

#[test]
fn serve_stdio_roundtrip() {
    let mut child = Command::new(BIN)
        .args(["serve", "--stdio", "--debounce-ms", "10"])
        .stdin(Stdio::piped())
        .stdout(Stdio::piped())
        .spawn()
        .unwrap();
    let mut stdin = child.stdin.take().unwrap();
    let mut lines = BufReader::new(child.stdout.take().unwrap()).lines();
    let mut send = |v: serde_json::Value| {
        writeln!(stdin, "{v}").unwrap();
        stdin.flush().unwrap();
    };
    send(serde_json::json!({"seq": 1, "method": "open", "file": "bad.pl", "text": VIOLATING}));
    send(serde_json::json!({"seq": 2, "method": "check"}));
    let resp: serde_json::Value =
        serde_json::from_str(&lines.next().unwrap().unwrap()).unwrap();
    assert_eq!(resp["seq"], 2);
    let diags = resp["diagnostics"].as_array().unwrap();
    assert!(
        diags.iter().any(|d| d["code"] == "assrt.false"),
        "expected a falsified assertion in {diags:?}"
    );
    send(serde_json::json!({"seq": 3, "method": "shutdown"}));
    let status = child.wait().unwrap();
    assert!(status.success());
}

#[test]
fn bench_writes_the_expected_csv() {
    let dir = tempfile::tempdir().unwrap();
    let spec = write_file(
        &dir,
        "spec.json",
        r#"{"seed": 1, "files": 2, "clauses_total": 40, "preds": 6,
            "shape": "chain", "assertion_density": 0.3}"#,
    );
    let out_path = dir.path().join("bench.csv");
    let out = Command::new(BIN)
        .arg("bench")
        .args(["--spec", spec.to_str().unwrap(), "--scripts", "3"])
        .args(["--out", out_path.to_str().unwrap()])
        .output()
        .unwrap();
    assert!(out.status.success(), "stderr: {}", String::from_utf8_lossy(&out.stderr));
    let csv = std::fs::read_to_string(&out_path).unwrap();
    let mut lines = csv.lines();
    assert_eq!(
        lines.next(),
        Some("edit_kind,scratch_ms,incremental_ms,speedup,nodes_reused,nodes_recomputed,graphs_equal")
    );
    assert_eq!(lines.count(), 3);
    for line in csv.lines().skip(1) {
        assert!(line.ends_with(",true"), "equivalence column not set in {line:?}");
    }
}
