//! End-to-end runs of the `moufang` binary.

use std::path::PathBuf;
use std::process::{Command, Output};

fn bin() -> Command {
    Command::new(env!("CARGO_BIN_EXE_moufang"))
}

fn tmpdir(tag: &str) -> PathBuf {
    let dir = std::env::temp_dir().join(format!("moufang-cli-{tag}-{}", std::process::id()));
    std::fs::create_dir_all(&dir).unwrap();
    dir
}

fn stdout(out: &Output) -> String {
    String::from_utf8_lossy(&out.stdout).into_owned()
}

#[test]
fn loop_info_reports_structure() {
    let out = bin().args(["loop-info", "243/56"]).output().unwrap();
    assert!(out.status.success());
    let text = stdout(&out);
    assert!(text.contains("exponent\t3"));
    assert!(text.contains("center_structure\tC3^2"));
    assert!(text.contains("moufang\ttrue"));
    assert!(text.contains("associative\tfalse"));

    let out = bin().args(["loop-info", "Z(9)"]).output().unwrap();
    assert!(out.status.success());
    let text = stdout(&out);
    assert!(text.contains("exponent\t9"));
    assert!(text.contains("center_order\t9"));
}

#[test]
fn latin_violations_are_diagnosed_with_location() {
    let dir = tmpdir("badtbl");
    let bad = dir.join("bad.tbl");
    std::fs::write(&bad, "3\n0 0 2\n1 2 0\n2 1 1\n").unwrap();
    let out = bin()
        .args(["loop-info", &format!("file:{}", bad.display())])
        .output()
        .unwrap();
    assert!(!out.status.success());
    let err = String::from_utf8_lossy(&out.stderr).into_owned();
    assert!(err.contains("not a latin square"), "stderr: {err}");
    assert!(err.contains("row 0"), "stderr names the offending row: {err}");
}

#[test]
fn classify_dump_verify_roundtrip() {
    let dir = tmpdir("classify");
    let forms = dir.join("forms");
    let out = bin()
        .args([
            "classify",
            "--loop",
            "81/1",
            "--kind",
            "distributive",
            "--out",
        ])
        .arg(&dir)
        .arg("--dump-forms")
        .arg(&forms)
        .output()
        .unwrap();
    assert!(out.status.success());
    let text = stdout(&out);
    assert!(
        text.contains("81/1\tdistributive\t2\texact"),
        "summary line: {text}"
    );
    let summary = std::fs::read_to_string(dir.join("summary.tsv")).unwrap();
    assert!(summary.contains("81/1\tdistributive\t2\texact"));

    let dump = forms.join("81_1.distributive.forms");
    let out = bin().arg("verify").arg(&dump).output().unwrap();
    assert!(out.status.success(), "verify failed: {}", stdout(&out));
    assert!(stdout(&out).contains("all 2 forms verified"));
}

#[test]
fn classify_flags_medial_regime() {
    let out = bin()
        .args(["classify", "--loop", "Z(3)", "--kind", "distributive"])
        .output()
        .unwrap();
    assert!(out.status.success());
    assert!(
        stdout(&out).contains("medial-regime"),
        "associative loops are flagged: {}",
        stdout(&out)
    );
}

#[test]
fn emit_mts_writes_the_unique_sts3() {
    let dir = tmpdir("sts3");
    let path = dir.join("sts3.txt");
    let out = bin()
        .args(["emit-mts", "Z(3)", "--index", "0", "--out"])
        .arg(&path)
        .output()
        .unwrap();
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    let text = std::fs::read_to_string(&path).unwrap();
    let payload: Vec<&str> = text
        .lines()
        .filter(|l| !l.trim_start().starts_with('#') && !l.trim().is_empty())
        .collect();
    assert_eq!(payload, vec!["STS 3", "0 1 2"]);
}

#[test]
fn tripped_budgets_are_reported_not_faked() {
    let out = bin()
        .args([
            "--budget-leaves",
            "50",
            "classify",
            "--loop",
            "81/1",
            "--kind",
            "distributive",
        ])
        .output()
        .unwrap();
    assert!(out.status.success());
    let text = stdout(&out);
    assert!(
        text.contains("skipped") && (text.contains("budget") || text.contains("incomplete")),
        "budget trips surface in the status column: {text}"
    );
    assert!(!text.contains("\texact"), "no count presented as exact: {text}");
}

#[test]
fn unknown_selector_is_rejected() {
    let out = bin().args(["loop-info", "243/1"]).output().unwrap();
    assert!(!out.status.success());
    let err = String::from_utf8_lossy(&out.stderr).into_owned();
    assert!(err.contains("imported Cayley table"), "stderr: {err}");
}
