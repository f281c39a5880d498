use std::path::{Path, PathBuf};
use std::process::{Command, Output};

use tempfile::TempDir;

fn vcsynth(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_vcsynth"))
        .args(args)
        .output()
        .expect("binary runs")
}

fn stdout(o: &Output) -> String {
    String::from_utf8_lossy(&o.stdout).into_owned()
}

fn write(dir: &Path, name: &str, text: &str) -> PathBuf {
    let p = dir.join(name);
    std::fs::write(&p, text).unwrap();
    p
}

const K4: &str = "p vc 4 6\ne 0 1\ne 0 2\ne 0 3\ne 1 2\ne 1 3\ne 2 3\n";
const C5: &str = "p vc 5 5\ne 0 1\ne 1 2\ne 2 3\ne 3 4\ne 4 0\n";
const C8: &str = "p vc 8 8\ne 0 1\ne 1 2\ne 2 3\ne 3 4\ne 4 5\ne 5 6\ne 6 7\ne 7 0\n";
const PETERSEN: &str = "p vc 10 15\ne 0 1\ne 1 2\ne 2 3\ne 3 4\ne 4 0\ne 0 5\ne 1 6\ne 2 7\ne 3 8\ne 4 9\ne 5 7\ne 7 9\ne 9 6\ne 6 8\ne 8 5\n";

fn generic_table(dir: &Path, mode: &str) -> PathBuf {
    let out = dir.join(mode);
    let o = vcsynth(&[
        "generate",
        "--measure",
        "k-mode",
        "a=1",
        "--mode",
        mode,
        "--subspace",
        "generic",
        "--out",
        out.to_str().unwrap(),
    ]);
    assert!(o.status.success(), "{}", stdout(&o));
    out.join("generic.json")
}

#[test]
fn bound_examples() {
    let o = vcsynth(&["bound", "--vector", "1:1,1:3"]);
    assert_eq!(o.status.code(), Some(0));
    assert_eq!(stdout(&o).trim(), "1.46557");
    let o = vcsynth(&[
        "bound",
        "--combine",
        "a=0.59303",
        "b=0.03958",
        "base_n=1.13735",
    ]);
    let text = stdout(&o);
    let e: f64 = text
        .lines()
        .last()
        .unwrap()
        .trim_start_matches("e^d = ")
        .parse()
        .unwrap();
    assert!((1.21103..=1.21106).contains(&e), "{text}");
    let o = vcsynth(&["bound", "--combine", "a=1", "b=0", "base_n=1"]);
    assert!(stdout(&o).contains("e^d = 1.00000"));
    assert_eq!(
        vcsynth(&["bound", "--vector", "1:x"]).status.code(),
        Some(3)
    );
}

#[test]
fn classify_and_oracle() {
    let dir = TempDir::new().unwrap();
    let c8 = write(dir.path(), "c8.txt", C8);
    let c5 = write(dir.path(), "c5.txt", C5);
    assert_eq!(
        stdout(&vcsynth(&["classify", c8.to_str().unwrap()])).trim(),
        "P6"
    );
    assert_eq!(
        stdout(&vcsynth(&["oracle", c5.to_str().unwrap()])).trim(),
        "3"
    );
    let missing = dir.path().join("none.txt");
    assert_eq!(
        vcsynth(&["oracle", missing.to_str().unwrap()])
            .status
            .code(),
        Some(3)
    );
    let mut big = String::from("p vc 30 29\n");
    for i in 0..29 {
        big.push_str(&format!("e {i} {}\n", i + 1));
    }
    let big = write(dir.path(), "big.txt", &big);
    let o = vcsynth(&["oracle", big.to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(3));
    assert!(String::from_utf8_lossy(&o.stderr).contains("solve"));
}

#[test]
fn solve_deterministic_answers() {
    let dir = TempDir::new().unwrap();
    let table = generic_table(dir.path(), "det");
    let table = table.to_str().unwrap();
    for (graph, k, code) in [
        (K4, 3, 0),
        (K4, 2, 1),
        (PETERSEN, 6, 0),
        (PETERSEN, 5, 1),
        (C5, 2, 1),
    ] {
        let inst = write(dir.path(), "inst.txt", &format!("{graph}k {k}\n"));
        let o = vcsynth(&["solve", inst.to_str().unwrap(), "--tables", table]);
        assert_eq!(o.status.code(), Some(code), "{graph} k={k}: {}", stdout(&o));
        assert!(stdout(&o).contains(if code == 0 { "YES" } else { "NO" }));
    }
}

#[test]
fn solve_randomized_is_reproducible() {
    let dir = TempDir::new().unwrap();
    let table = generic_table(dir.path(), "rand");
    let inst = write(dir.path(), "k4.txt", &format!("{K4}k 3\n"));
    let args = [
        "solve",
        inst.to_str().unwrap(),
        "--tables",
        table.to_str().unwrap(),
        "--seed",
        "7",
        "--trace",
    ];
    let a = vcsynth(&args);
    let b = vcsynth(&args);
    assert_eq!(a.status.code(), Some(0));
    assert_eq!(stdout(&a), stdout(&b));
    let text = stdout(&a);
    assert!(text.contains("trials = 160"), "{text}");
    assert!(text.lines().any(|l| l.starts_with("* ")), "{text}");
}

#[test]
fn tampered_tables_are_refused() {
    let dir = TempDir::new().unwrap();
    let table = generic_table(dir.path(), "det");
    let text = std::fs::read_to_string(&table).unwrap();
    let tampered = text.replacen("\"1\"", "\"0.5\"", 1);
    assert_ne!(text, tampered);
    let bad = write(dir.path(), "bad.json", &tampered);
    let o = vcsynth(&["verify", bad.to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(2));
    assert!(stdout(&o).contains("FAIL leaf"), "{}", stdout(&o));
    let inst = write(dir.path(), "k4.txt", &format!("{K4}k 3\n"));
    let o = vcsynth(&[
        "solve",
        inst.to_str().unwrap(),
        "--tables",
        bad.to_str().unwrap(),
    ]);
    assert_eq!(o.status.code(), Some(3));
    assert!(String::from_utf8_lossy(&o.stderr).contains("not certified"));
    assert_eq!(
        vcsynth(&["verify", table.to_str().unwrap()]).status.code(),
        Some(0)
    );
}

#[test]
fn generate_outcomes() {
    let dir = TempDir::new().unwrap();
    let out = dir.path().join("p19");
    let o = vcsynth(&[
        "generate",
        "--measure",
        "k-mode",
        "a=1",
        "--mode",
        "det",
        "--subspace",
        "P19",
        "--out",
        out.to_str().unwrap(),
    ]);
    assert_eq!(o.status.code(), Some(0), "{}", stdout(&o));
    assert!(stdout(&o).contains("certificate PASS"));
    assert!(out.join("P19.json").exists());
    let o = vcsynth(&[
        "generate",
        "--measure",
        "n-mode",
        "b3=0.001",
        "--depth",
        "3",
        "--subspace",
        "P19",
        "--out",
        out.to_str().unwrap(),
    ]);
    assert_eq!(o.status.code(), Some(2));
    assert!(stdout(&o).contains("generation failed"));
    let o = vcsynth(&[
        "generate",
        "--measure",
        "k-mode",
        "a=1",
        "b1=1",
        "--out",
        out.to_str().unwrap(),
    ]);
    assert_eq!(o.status.code(), Some(3));
}
