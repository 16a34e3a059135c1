use std::process::Command;

fn anacomb(args: &[&str]) -> (Option<i32>, String) {
    let out = Command::new(env!("CARGO_BIN_EXE_anacomb"))
        .args(args)
        .output()
        .unwrap();
    (out.status.code(), String::from_utf8(out.stdout).unwrap())
}

#[test]
fn passing_entry_exits_zero() {
    let (code, out) = anacomb(&["corpus", "run", "two_regular", "--format", "markdown"]);
    assert_eq!(code, Some(0));
    assert!(out.contains("**Verdict:** pass"));
}

#[test]
fn violation_exits_two() {
    let (code, out) = anacomb(&[
        "corpus",
        "run",
        "catalan",
        "--order",
        "200",
        "--n",
        "100,200",
        "--tolerance",
        "1e-9",
    ]);
    assert_eq!(code, Some(2));
    assert!(out.starts_with("n,exact,predicted,rel_error\n"));
}

#[test]
fn unknown_entry_exits_one() {
    assert_eq!(anacomb(&["corpus", "run", "no_such_entry"]).0, Some(1));
}

#[test]
fn list_shows_twelve_entries() {
    let (code, out) = anacomb(&["corpus", "list"]);
    assert_eq!(code, Some(0));
    assert_eq!(out.lines().count(), 12);
}

#[test]
fn coeffs_prints_counts() {
    let (code, out) = anacomb(&["coeffs", "T = Z*SEQ(T)", "--order", "5"]);
    assert_eq!(code, Some(0));
    let last = out.lines().last().unwrap();
    assert!(last.starts_with("5,14"), "{out}");
}
