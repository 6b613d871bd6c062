use std::fs;
use std::process::Command;

use tempfile::TempDir;

const BIN: &str = env!("CARGO_BIN_EXE_tmscheme");

fn tmscheme(args: &[&str]) -> (i32, String, String) {
    let out = Command::new(BIN).args(args).output().unwrap();
    (
        out.status.code().unwrap(),
        String::from_utf8(out.stdout).unwrap(),
        String::from_utf8(out.stderr).unwrap(),
    )
}

#[test]
fn gen_prints_word_and_summary_to_stderr() {
    let (code, out, err) = tmscheme(&["gen", "-n", "3"]);
    assert_eq!(code, 0);
    assert_eq!(out, "abbabaab\n");
    assert_eq!(err.trim(), "n=3 len=8");
}

#[test]
fn cyclic_scheme_is_rejected_with_witness() {
    let dir = TempDir::new().unwrap();
    let word = dir.path().join("t3.txt");
    let scheme = dir.path().join("bad.scheme");
    fs::write(&word, "abbabaab\n").unwrap();
    fs::write(&scheme, "v1 8 5\nC 2 3\nG b\nC 2 6\nG a\nC 2 0\n").unwrap();
    let (code, out, _) = tmscheme(&["verify", "--word", word.to_str().unwrap(), "--scheme", scheme.to_str().unwrap()]);
    assert_eq!(code, 1);
    assert_eq!(out.trim(), "size=5 valid=false reason=cycle:0->3->6->0");
}

#[test]
fn bad_input_is_a_usage_error() {
    let dir = TempDir::new().unwrap();
    let word = dir.path().join("w.txt");
    fs::write(&word, "abc\n").unwrap();
    assert_eq!(tmscheme(&["solve-b", "--word", word.to_str().unwrap()]).0, 2);
    assert_eq!(tmscheme(&["gen"]).0, 2);
    assert_eq!(tmscheme(&["verify", "--word", "/nonexistent", "--scheme", "/nonexistent"]).0, 2);
}

#[test]
fn oversized_exact_search_is_a_budget_error() {
    let dir = TempDir::new().unwrap();
    let word = dir.path().join("t6.txt");
    tmscheme(&["gen", "-n", "6", "--out", word.to_str().unwrap()]);
    assert_eq!(tmscheme(&["solve-b", "--word", word.to_str().unwrap()]).0, 3);
}

#[test]
fn reduce_writes_trace_and_meets_bound() {
    let dir = TempDir::new().unwrap();
    let path = |s: &str| dir.path().join(s).to_string_lossy().into_owned();
    tmscheme(&["gen", "-n", "7", "--out", &path("w")]);
    tmscheme(&["construct", "-n", "7", "--out", &path("s")]);
    let (code, out, _) = tmscheme(&[
        "reduce", "--word", &path("w"), "--scheme", &path("s"), "-n", "7", "--levels", "2", "--trace", &path("t"),
        "--out", &path("r"),
    ]);
    assert_eq!(code, 0, "{out}");
    assert!(out.contains("levels=2"));
    assert!(out.contains("valid=true bound_ok=true"));
    let trace = fs::read_to_string(path("t")).unwrap();
    assert!(trace.lines().all(|l| l.starts_with("level=")));
    let (code, _, _) = tmscheme(&["verify", "--word", &path("r"), "--scheme", &path("r")]);
    assert_eq!(code, 2);
    tmscheme(&["gen", "-n", "5", "--out", &path("w5")]);
    assert_eq!(tmscheme(&["verify", "--word", &path("w5"), "--scheme", &path("r")]).0, 0);
}

#[test]
fn solve_gamma_writes_positions() {
    let dir = TempDir::new().unwrap();
    let word = dir.path().join("w.txt");
    let out_file = dir.path().join("g.txt");
    fs::write(&word, "abba\n").unwrap();
    let (code, out, _) =
        tmscheme(&["solve-gamma", "--word", word.to_str().unwrap(), "--out", out_file.to_str().unwrap()]);
    assert_eq!(code, 0);
    assert!(out.contains("gamma=2"));
    assert_eq!(fs::read_to_string(out_file).unwrap(), "0 2\n");
}
