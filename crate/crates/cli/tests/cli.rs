use std::io::Cursor;
use std::process::{Command, Stdio};

use serde_json::Value;

fn run(args: &[&str], stdin: &str) -> (i32, String, String) {
    let mut out = Vec::new();
    let mut err = Vec::new();
    let argv = std::iter::once("polyaut").chain(args.iter().copied());
    let code = polyaut_cli::run(
        argv,
        &mut Cursor::new(stdin.as_bytes().to_vec()),
        &mut out,
        &mut err,
    );
    (
        code,
        String::from_utf8(out).unwrap(),
        String::from_utf8(err).unwrap(),
    )
}

fn json(args: &[&str]) -> (i32, Value) {
    let mut full = vec!["--json"];
    full.extend_from_slice(args);
    let (code, out, _) = run(&full, "");
    (code, serde_json::from_str(&out).expect("one json document"))
}

#[test]
fn stdin_operand() {
    let (code, out, _) = run(&["degenerate", "-"], "[x1, x2 + x1^2]\n");
    assert_eq!(code, 0);
    assert!(out.contains("limit      [x1 + x2^2, x2]"));
}

#[test]
fn compose_words_and_maps() {
    let (code, out, _) = run(&["compose", "nagata", "nagata^-1"], "");
    assert_eq!(code, 0);
    assert!(out.starts_with("[x1, x2, x3]"));

    let (code, v) = json(&["compose", "[x1 + x2^2, x2]", "[x1 - x2^2, x2]"]);
    assert_eq!(code, 0);
    assert_eq!(v["result"], "[x1, x2]");
}

#[test]
fn apply_evaluates_at_a_rational_point() {
    let (code, out, _) = run(&["apply", "[x1 + x2^2, x2]", "1/2,2"], "");
    assert_eq!(code, 0);
    assert_eq!(out.trim(), "(9/2, 2)");
}

#[test]
fn degenerate_json_record() {
    let (code, v) = json(&["degenerate", "[x1, x2 + x1^2]"]);
    assert_eq!(code, 0);
    assert_eq!(v["w"], 2);
    assert_eq!(v["d"], 2);
    assert_eq!(v["limit"], "[x1 + x2^2, x2]");
    assert_eq!(v["normalized"]["transposition"], serde_json::json!([1, 2]));
}

#[test]
fn non_coordinate_exits_with_a_certificate() {
    let (code, out, err) = run(&["degenerate", "[x1 + x1*x2^2, x2]"], "");
    assert_eq!(code, 2);
    assert!(out.is_empty());
    assert!(err.starts_with("error (not-a-coordinate)"));
    let cert = err.lines().find_map(|l| l.strip_prefix("certificate: ")).unwrap();
    let cert: Value = serde_json::from_str(cert).unwrap();
    assert_eq!(cert["f1"], "x1 + x1*x2^2");
}

#[test]
fn usage_errors_exit_one() {
    assert_eq!(run(&["degenerate", "[x1 +, x2]"], "").0, 1);
    assert_eq!(run(&["degenerate", "[x1, x3]"], "").0, 1);
    assert_eq!(run(&["no-such-verb"], "").0, 1);
    assert_eq!(run(&["factor2", "nagata"], "").0, 1);
}

#[test]
fn factor2_json_word_recomposes() {
    let (code, v) = json(&["factor2", "[x2 + x1^2, x1]"]);
    assert_eq!(code, 0);
    let word = v["word"].as_str().unwrap();
    let (code, out, _) = run(&["info", word], "");
    assert_eq!(code, 0);
    assert!(out.contains("map         [x2 + x1^2, x1]"));
}

#[test]
fn output_is_deterministic() {
    let runs = [
        vec!["random-tame", "--n", "3", "--seed", "11", "--length", "3"],
        vec!["witness", "nagata"],
        vec!["--json", "curve", "nagata"],
    ];
    for args in &runs {
        let a = run(args, "");
        let b = run(args, "");
        assert_eq!(a, b, "{args:?}");
        assert_eq!(a.0, 0, "{args:?}: {}", a.2);
    }
}

#[test]
fn small_selfcheck() {
    let (code, out, _) = run(&["selfcheck", "--cases", "3", "--seed", "5"], "");
    assert_eq!(code, 0, "{out}");
    assert!(out.lines().all(|l| l.contains("passed")));
}

#[test]
fn binary_reads_stdin_and_sets_the_exit_code() {
    let exe = env!("CARGO_BIN_EXE_polyaut");
    let mut child = Command::new(exe)
        .args(["factor2", "-"])
        .stdin(Stdio::piped())
        .stdout(Stdio::piped())
        .stderr(Stdio::piped())
        .spawn()
        .unwrap();
    use std::io::Write;
    child
        .stdin
        .take()
        .unwrap()
        .write_all(b"[x1, x1*x2]")
        .unwrap();
    let output = child.wait_with_output().unwrap();
    assert_eq!(output.status.code(), Some(2));
    let err = String::from_utf8(output.stderr).unwrap();
    assert!(err.contains("\"jacobian\":\"x1\""), "{err}");
}
