use std::path::PathBuf;
use std::process::{Command, Output};

fn bin() -> PathBuf {
    // target/<profile>/eqdom, next to the test executable's deps dir
    let mut p = std::env::current_exe().unwrap();
    p.pop();
    p.pop();
    p.push("eqdom");
    p
}

fn run(args: &[&str]) -> Output {
    Command::new(bin())
        .args(args)
        .env("EQDOM_THREADS", "2")
        .output()
        .expect("spawn eqdom")
}

fn write_alg(dir: &tempfile::TempDir, name: &str, text: &str) -> String {
    let path = dir.path().join(name);
    std::fs::write(&path, text).unwrap();
    path.display().to_string()
}

const MAJORITY_ALG: &str = "algebra d2\nsize 2\nop h 3\n0 0\n0 1\n0 1\n1 1\n";
const NEGATION_ALG: &str = "algebra n2\nsize 2\nop not 1\n1 0\n";

#[test]
fn check_verdicts_drive_the_exit_code() {
    let dir = tempfile::tempdir().unwrap();
    let pos = write_alg(&dir, "d2.alg", MAJORITY_ALG);
    let neg = write_alg(&dir, "n2.alg", NEGATION_ALG);

    let out = run(&["check", &pos]);
    assert_eq!(out.status.code(), Some(0), "{out:?}");
    let text = String::from_utf8(out.stdout).unwrap();
    assert!(text.contains("verdict: proven"), "{text}");

    let out = run(&["check", &neg, "--mode", "polynomial"]);
    assert_eq!(out.status.code(), Some(1));

    let out = run(&["check", dir.path().join("missing.alg").to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(3));
}

#[test]
fn json_output_is_versioned_and_deterministic() {
    let dir = tempfile::tempdir().unwrap();
    let pos = write_alg(&dir, "d2.alg", MAJORITY_ALG);
    let a = run(&["check", &pos, "--format", "json"]);
    let b = run(&["check", &pos, "--format", "json"]);
    assert_eq!(a.stdout, b.stdout, "identical runs must be byte-identical");
    let v: serde_json::Value = serde_json::from_slice(&a.stdout).unwrap();
    assert_eq!(v["schema"], 1);
    assert_eq!(v["verdict"], "proven");
}

#[test]
fn clone_enum_counts_the_quaternary_part() {
    let dir = tempfile::tempdir().unwrap();
    let t = write_alg(&dir, "s00.alg", "algebra s00\nsize 2\nop t 3\n0 0\n0 1\n1 1\n1 1\n");
    let out = run(&["clone", "enum", &t, "-k", "4", "--format", "json"]);
    assert_eq!(out.status.code(), Some(0));
    let v: serde_json::Value = serde_json::from_slice(&out.stdout).unwrap();
    assert_eq!(v["count"], 53);
    assert_eq!(v["complete"], true);
}

#[test]
fn gen_roundtrips_through_the_other_subcommands() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("zpl.alg").display().to_string();
    let out = run(&["gen", "zpl", "--p", "2", "--l", "3", "--i", "2", "-o", &path]);
    assert_eq!(out.status.code(), Some(0), "{out:?}");

    let out = run(&["classify", "malcev", &path, "--format", "json"]);
    assert_eq!(out.status.code(), Some(0));
    let v: serde_json::Value = serde_json::from_slice(&out.stdout).unwrap();
    assert_eq!(v["verdict"]["additive"], true);
    assert_eq!(v["verdict"]["si"], true);

    let out = run(&["con", "lattice", &path, "--format", "json"]);
    assert_eq!(out.status.code(), Some(0));
    let v: serde_json::Value = serde_json::from_slice(&out.stdout).unwrap();
    assert_eq!(v["count"], 4);

    let out = run(&["commutator", &path, "--alpha", "0:4", "--beta", "0:4", "--format", "json"]);
    assert_eq!(out.status.code(), Some(0));
    let v: serde_json::Value = serde_json::from_slice(&out.stdout).unwrap();
    assert_eq!(v["is_bottom"], false);

    // bad pair syntax is an input error
    let out = run(&["commutator", &path, "--alpha", "0-4", "--beta", "0:4"]);
    assert_eq!(out.status.code(), Some(3));
}

#[test]
fn classify_selfdual_negative_exit() {
    let dir = tempfile::tempdir().unwrap();
    // the affine operation a(x,y) = 2x + 2y + 1 mod 3
    let a = write_alg(&dir, "a.alg", "algebra a-only\nsize 3\nop a 2\n1 0 2\n0 2 1\n2 1 0\n");
    let out = run(&["classify", "selfdual", &a]);
    assert_eq!(out.status.code(), Some(1));
}

#[test]
fn paper_verify_single_claims() {
    let out = run(&["paper", "verify", "remark64-53", "--format", "json"]);
    assert_eq!(out.status.code(), Some(0));
    let v: serde_json::Value = serde_json::from_slice(&out.stdout).unwrap();
    assert_eq!(v["claim"]["status"], "pass");
    assert_eq!(v["claim"]["details"]["count"], 53);

    let out = run(&["paper", "verify", "no-such-claim"]);
    assert_eq!(out.status.code(), Some(3));
}

#[test]
fn catalog_list_names_the_families() {
    let out = run(&["catalog", "list", "--format", "json"]);
    assert_eq!(out.status.code(), Some(0));
    let v: serde_json::Value = serde_json::from_slice(&out.stdout).unwrap();
    let ids: Vec<&str> = v["boolean"]
        .as_array()
        .unwrap()
        .iter()
        .map(|e| e["id"].as_str().unwrap())
        .collect();
    for id in ["i2", "n2", "e2", "v2", "l2", "d2", "s00", "s10", "m2"] {
        assert!(ids.contains(&id), "missing {id}");
    }
    assert!(v["selfdual"].as_array().unwrap().len() >= 10);
}
