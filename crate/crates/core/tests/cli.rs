use std::fs;
use std::process::{Command, Output};

fn msd(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_msd")).args(args).output().unwrap()
}

fn stdout(o: &Output) -> String {
    String::from_utf8_lossy(&o.stdout).into_owned()
}

#[test]
fn invariants_of_s2xs2() {
    let dir = tempfile::tempdir().unwrap();
    let f = dir.path().join("s2xs2.msd");
    let f = f.to_str().unwrap();
    assert!(msd(&["catalog", "s2xs2", "-o", f]).status.success());
    let o = msd(&["invariants", f]);
    let text = stdout(&o);
    assert!(text.contains("euler 4"), "{text}");
    assert!(text.contains("H2 Z^2"), "{text}");
    assert!(text.contains("form [[0, 1], [1, 0]]"), "{text}");
}

#[test]
fn reduce_writes_log_and_kirby_form() {
    let dir = tempfile::tempdir().unwrap();
    let p = |n: &str| dir.path().join(n).to_string_lossy().into_owned();
    assert!(msd(&["catalog", "two-piece-cp2", "-o", &p("in.msd")]).status.success());
    assert!(msd(&["reduce", &p("in.msd"), "-o", &p("out.msd"), "--log", &p("log.txt")]).status.success());
    assert_eq!(fs::read_to_string(p("log.txt")).unwrap(), "move merge H1\n");
    let out = msd::io::parse(&fs::read_to_string(p("out.msd")).unwrap()).unwrap();
    assert_eq!(out, msd::catalog::standard("cp2").unwrap());
}

#[test]
fn equiv_writes_a_replayable_witness() {
    let dir = tempfile::tempdir().unwrap();
    let p = |n: &str| dir.path().join(n).to_string_lossy().into_owned();
    let d = msd::catalog::standard("s2xs2").unwrap();
    let mut e = d.clone();
    e.reverse_circle(&msd::Id::from("C1"));
    fs::write(p("a.msd"), msd::io::serialize(&d)).unwrap();
    fs::write(p("b.msd"), msd::io::serialize(&e)).unwrap();
    let o = msd(&["equiv", &p("a.msd"), &p("b.msd"), "--budget", "16", "--witness", &p("w.txt")]);
    assert_eq!(o.status.code(), Some(0), "{}", stdout(&o));
    let w = msd::io::moves::parse_witness(&fs::read_to_string(p("w.txt")).unwrap()).unwrap();
    msd::equivalence::verify_witness(&d, &e, &w).unwrap();
}

#[test]
fn conj_logs_the_enumeration() {
    let dir = tempfile::tempdir().unwrap();
    let f = dir.path().join("swap.msd");
    let f = f.to_str().unwrap();
    assert!(msd(&["catalog", "swap-diffeo", "-o", f]).status.success());
    let text = stdout(&msd(&["conj", f, f, "--budget", "8"]));
    assert!(text.starts_with("yes"), "{text}");
    assert!(text.contains("(exhaustive)"), "{text}");
}

#[test]
fn help_exits_zero() {
    assert_eq!(msd(&["--help"]).status.code(), Some(0));
    assert_eq!(msd(&[]).status.code(), Some(3));
}
