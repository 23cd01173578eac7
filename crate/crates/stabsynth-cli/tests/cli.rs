use std::path::PathBuf;
use std::process::{Command, Output};
use std::sync::atomic::{AtomicUsize, Ordering};

use proptest::prelude::*;
use stabsynth::clifford::{random_clifford_word, SymplecticMat};
use stabsynth_cli::format::{parse_circuit, parse_matrix, write_circuit, write_matrix};

fn scratch(name: &str, content: &str) -> PathBuf {
    static NEXT: AtomicUsize = AtomicUsize::new(0);
    let k = NEXT.fetch_add(1, Ordering::Relaxed);
    let p = PathBuf::from(env!("CARGO_TARGET_TMPDIR")).join(format!("cli-{}-{k}-{name}", std::process::id()));
    std::fs::write(&p, content).unwrap();
    p
}

fn run(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_stabsynth")).args(args).output().unwrap()
}

fn stdout(o: &Output) -> String {
    String::from_utf8(o.stdout.clone()).unwrap()
}

fn stderr(o: &Output) -> String {
    String::from_utf8(o.stderr.clone()).unwrap()
}

fn path(p: &PathBuf) -> &str {
    p.to_str().unwrap()
}

fn matrix_file(m: &SymplecticMat) -> PathBuf {
    scratch("m.txt", &write_matrix(m.matrix()))
}

#[test]
fn synth_verify_round_trip() {
    for (i, stages) in ["7", "9"].iter().enumerate() {
        let m = random_clifford_word(5, 80, i as u64).to_symplectic();
        let mf = matrix_file(&m);
        let out = run(&["synth", path(&mf), "--stages", stages]);
        assert_eq!(out.status.code(), Some(0), "{}", stderr(&out));
        let markers = stdout(&out).lines().filter(|l| l.starts_with("# stage")).count();
        assert_eq!(markers.to_string(), *stages);
        let cf = scratch("c.txt", &stdout(&out));
        let v = run(&["verify", path(&cf), path(&mf)]);
        assert_eq!(v.status.code(), Some(0));
        assert_eq!(stdout(&v), "ok\n");
    }
}

#[test]
fn synth_lnn_round_trip() {
    let m = random_clifford_word(6, 90, 3).to_symplectic();
    let mf = matrix_file(&m);
    let out = run(&["synth", path(&mf), "--lnn"]);
    assert_eq!(out.status.code(), Some(0));
    assert!(stderr(&out).contains("lnn true"));
    let cf = scratch("c.txt", &stdout(&out));
    assert_eq!(run(&["verify", path(&cf), path(&mf)]).status.code(), Some(0));
    let d = run(&["depth", path(&cf)]);
    assert!(stdout(&d).contains("lnn true"));
}

#[test]
fn identity_synthesizes_to_depth_zero() {
    let mf = matrix_file(&SymplecticMat::identity(4));
    let out = run(&["synth", path(&mf)]);
    assert_eq!(out.status.code(), Some(0));
    assert!(stderr(&out).contains("depth 0"), "{}", stderr(&out));
}

#[test]
fn verify_reports_mismatch() {
    let cf = scratch("h.txt", "qubits 1\nH 0\n");
    let mf = matrix_file(&SymplecticMat::identity(1));
    let out = run(&["verify", path(&cf), path(&mf)]);
    assert_eq!(out.status.code(), Some(1));
    assert!(stdout(&out).starts_with("mismatch at row 0"));
}

#[test]
fn malformed_inputs_exit_2() {
    let bad = scratch("bad.txt", "qubits 2\nFOO 0\n");
    let out = run(&["depth", path(&bad)]);
    assert_eq!(out.status.code(), Some(2));
    assert!(stderr(&out).contains("line 2"));
    let ragged = scratch("ragged.txt", "n 1\n10\n1\n");
    assert_eq!(run(&["synth", path(&ragged)]).status.code(), Some(2));
    let singular = scratch("sing.txt", "n 1\n11\n11\n");
    assert_eq!(run(&["synth", path(&singular)]).status.code(), Some(2));
}

#[test]
fn fold_rejects_hadamard() {
    let cf = scratch("h.txt", "qubits 2\nH 0\nCNOT 0 1\n");
    assert_eq!(run(&["fold", path(&cf)]).status.code(), Some(1));
}

#[test]
fn fold_reads_stdin() {
    let mut child = Command::new(env!("CARGO_BIN_EXE_stabsynth"))
        .args(["fold", "-", "--order", "CZ-P-C"])
        .stdin(std::process::Stdio::piped())
        .stdout(std::process::Stdio::piped())
        .stderr(std::process::Stdio::piped())
        .spawn()
        .unwrap();
    use std::io::Write;
    child.stdin.take().unwrap().write_all(b"qubits 3\nCNOT 0 1\nP 1\nCNOT 0 1\nCZ 1 2\n").unwrap();
    let out = child.wait_with_output().unwrap();
    assert_eq!(out.status.code(), Some(0));
    let tags: Vec<String> = stdout(&out).lines().filter_map(|l| l.strip_prefix("# stage ")).map(String::from).collect();
    assert_eq!(tags, ["CZ", "P", "C"]);
}

#[test]
fn oracle_table1_small() {
    let out = run(&["oracle", "--table1", "-n", "3"]);
    assert_eq!(out.status.code(), Some(0));
    assert_eq!(stdout(&out), "3 3 6 6\n");
}

#[test]
fn oracle_cost_of_swap() {
    let mf = matrix_file(&SymplecticMat::permutation(&[1, 0]));
    let out = run(&["oracle", path(&mf), "--alphabet", "H,P,CNOT"]);
    assert_eq!(stdout(&out), "3\n");
}

#[test]
fn all_hadamard_cell() {
    let mf = matrix_file(&SymplecticMat::hadamards(3, &[0, 1, 2]));
    let out = run(&["cell", path(&mf)]);
    let s = stdout(&out);
    assert!(s.contains("k=3\n") && s.contains("pi=identity\n"), "{s}");
}

#[test]
fn random_is_deterministic() {
    for extra in [&[][..], &["--tableau"], &["--cell"]] {
        let args = [&["random", "-n", "4", "--seed", "9"][..], extra].concat();
        let (a, b) = (run(&args), run(&args));
        assert_eq!(a.status.code(), Some(0));
        assert_eq!(a.stdout, b.stdout);
        let c = run(&[&["random", "-n", "4", "--seed", "10"][..], extra].concat());
        assert_ne!(a.stdout, c.stdout);
    }
}

#[test]
fn synth_is_deterministic() {
    let mf = matrix_file(&random_clifford_word(6, 100, 11).to_symplectic());
    for flag in ["--stages=7", "--stages=9", "--lnn"] {
        assert_eq!(run(&["synth", path(&mf), flag]).stdout, run(&["synth", path(&mf), flag]).stdout);
    }
}

/// `verify` against a direct tableau comparison, on pairs that agree
/// about half the time.
#[test]
fn verify_fuzz() {
    for seed in 0..100u64 {
        let n = 1 + seed as usize % 4;
        let c = random_clifford_word(n, 6, seed);
        let other = if seed % 2 == 0 { c.clone() } else { random_clifford_word(n, 6, seed + 1000) };
        let cf = scratch("c.txt", &write_circuit(&c));
        let mf = matrix_file(&other.to_symplectic());
        let expect = c.to_symplectic() == other.to_symplectic();
        let out = run(&["verify", path(&cf), path(&mf)]);
        assert_eq!(out.status.code(), Some(if expect { 0 } else { 1 }), "seed {seed}");
    }
}

proptest! {
    #[test]
    fn formats_round_trip(n in 1usize..8, len in 0usize..40, seed: u64) {
        let c = random_clifford_word(n, len, seed);
        prop_assert_eq!(parse_circuit(&write_circuit(&c)).unwrap(), c.clone());
        let m = c.to_symplectic().into_matrix();
        prop_assert_eq!(parse_matrix(&write_matrix(&m)).unwrap(), m);
    }
}
