mod common;

use std::path::{Path, PathBuf};
use std::process::{Command, Output};

use common::{max_abs_diff, Cases};
use cs_secrecy::codec::SparseMessage;
use serde_json::Value;

fn bin() -> Command {
    let mut c = Command::new(env!("CARGO_BIN_EXE_cs-secrecy"));
    c.env_remove("CS_SECRECY_BUDGET");
    c
}

fn run(args: &[&str]) -> Output {
    bin().args(args).output().unwrap()
}

fn path(dir: &Path, name: &str) -> PathBuf {
    dir.join(name)
}

fn s(p: &Path) -> &str {
    p.to_str().unwrap()
}

fn stderr(o: &Output) -> String {
    String::from_utf8_lossy(&o.stderr).into_owned()
}

fn keygen(dir: &Path, name: &str, seed: &str, m: &str, n: &str) -> PathBuf {
    let p = path(dir, name);
    let o = run(&["keygen", "--seed", seed, "--m", m, "--n", n, "-o", s(&p)]);
    assert_eq!(o.status.code(), Some(0), "{}", stderr(&o));
    p
}

/// Writes key and ciphertext for a 3-sparse message drawn from `case`.
fn setup(dir: &Path, case: u64) -> (PathBuf, PathBuf, SparseMessage) {
    let key = keygen(dir, "key.json", "42", "16", "32");
    let x = SparseMessage::new(Cases::new(case).signed_sparse(32, 3)).unwrap();
    let xp = path(dir, "x.json");
    std::fs::write(&xp, x.to_json()).unwrap();
    let yp = path(dir, "y.json");
    let o = run(&["encrypt", "--key", s(&key), "--message", s(&xp), "-o", s(&yp)]);
    assert_eq!(o.status.code(), Some(0), "{}", stderr(&o));
    (key, yp, x)
}

#[test]
fn keygen_encrypt_decrypt_round_trip() {
    let dir = tempfile::tempdir().unwrap();
    let (key, yp, x) = setup(dir.path(), 9);

    for solver in ["omp", "l0", "auto"] {
        let out = path(dir.path(), &format!("xhat-{solver}.json"));
        let o = run(&["decrypt", "--key", s(&key), "--cipher", s(&yp), "--k", "3", "--solver", solver, "-o", s(&out)]);
        assert_eq!(o.status.code(), Some(0), "{solver}: {}", stderr(&o));
        let xhat = SparseMessage::from_json(&std::fs::read_to_string(&out).unwrap()).unwrap();
        assert!(max_abs_diff(xhat.entries(), x.entries()) <= 1e-6, "{solver}");
    }
}

#[test]
fn greedy_miss_exits_two_while_exhaustive_recovers() {
    let dir = tempfile::tempdir().unwrap();
    let (key, yp, x) = setup(dir.path(), 11);
    let o = run(&["decrypt", "--key", s(&key), "--cipher", s(&yp), "--k", "3", "--solver", "omp"]);
    assert_eq!(o.status.code(), Some(2), "{}", stderr(&o));
    assert!(stderr(&o).contains("residual"));
    let o = run(&["decrypt", "--key", s(&key), "--cipher", s(&yp), "--k", "3", "--solver", "l0"]);
    assert_eq!(o.status.code(), Some(0), "{}", stderr(&o));
    let xhat = SparseMessage::from_json(std::str::from_utf8(&o.stdout).unwrap()).unwrap();
    assert!(max_abs_diff(xhat.entries(), x.entries()) <= 1e-6);
}

#[test]
fn ideal_t1_report_matches_four_message_value() {
    let o = run(&["mi-ideal", "--model", "t1", "--t", "4"]);
    assert_eq!(o.status.code(), Some(0), "{}", stderr(&o));
    let v: Value = serde_json::from_slice(&o.stdout).unwrap();
    assert_eq!(v["tool"], "cs-secrecy");
    assert!(v["version"].is_string());
    assert_eq!(v["command"], "mi-ideal");
    let mi = v["result"]["mi_bits"].as_f64().unwrap();
    // 2 - (3/4) log2 3
    assert!((mi - 0.811278124459133).abs() <= 1e-6, "{mi}");
}

#[test]
fn mismatched_dimensions_exit_one_and_name_the_mismatch() {
    let dir = tempfile::tempdir().unwrap();
    let key = keygen(dir.path(), "key.json", "1", "8", "16");
    let yp = path(dir.path(), "y.json");
    std::fs::write(&yp, r#"{"n":5,"entries":[1,2,3,4,5]}"#).unwrap();
    let o = run(&["decrypt", "--key", s(&key), "--cipher", s(&yp), "--k", "2"]);
    assert_eq!(o.status.code(), Some(1));
    let err = stderr(&o);
    assert!(err.contains("ciphertext has length 5"), "{err}");
}

#[test]
fn malformed_key_file_exits_one_and_names_the_field() {
    let dir = tempfile::tempdir().unwrap();
    let key = path(dir.path(), "key.json");
    std::fs::write(&key, r#"{"version":1,"seed":"42","m":16}"#).unwrap();
    let o = run(&["export-matrix", "--key", s(&key)]);
    assert_eq!(o.status.code(), Some(1));
    let err = stderr(&o);
    assert!(err.contains("`n`"), "{err}");
}

#[test]
fn exhausted_enumeration_budget_exits_two() {
    let dir = tempfile::tempdir().unwrap();
    let key = keygen(dir.path(), "key.json", "3", "16", "32");
    let o = bin().args(["rip", "--key", s(&key), "--k", "3"]).env("CS_SECRECY_BUDGET", "100").output().unwrap();
    assert_eq!(o.status.code(), Some(2), "{}", stderr(&o));
    assert!(stderr(&o).contains("budget"));
}

#[test]
fn argument_errors_exit_one() {
    assert_eq!(run(&["keygen", "--seed", "1"]).status.code(), Some(1));
    assert_eq!(run(&["no-such-command"]).status.code(), Some(1));
    assert_eq!(run(&["--help"]).status.code(), Some(0));
}
