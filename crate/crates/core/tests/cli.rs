use std::path::{Path, PathBuf};
use std::process::{Command, Output};

use serde_json::Value;

const BIN: &str = env!("CARGO_BIN_EXE_winf");

struct Workdir {
    dir: tempfile::TempDir,
}

impl Workdir {
    fn new() -> Self {
        Self { dir: tempfile::tempdir().unwrap() }
    }

    fn path(&self, name: &str) -> PathBuf {
        self.dir.path().join(name)
    }

    fn write(&self, name: &str, text: &str) -> PathBuf {
        let p = self.path(name);
        std::fs::write(&p, text).unwrap();
        p
    }

    fn measures(&self, mu: &str, nu: &str) -> (PathBuf, PathBuf) {
        (self.write("mu.json", mu), self.write("nu.json", nu))
    }
}

fn run(args: &[&str]) -> Output {
    Command::new(BIN).args(args).env_remove("WINF_TOL").output().unwrap()
}

fn s(p: &Path) -> &str {
    p.to_str().unwrap()
}

fn json(path: &Path) -> Value {
    serde_json::from_str(&std::fs::read_to_string(path).unwrap()).unwrap()
}

const E1_MU: &str = r#"{"pieces":[{"a":0.0,"b":1.0,"density":1.0}]}"#;
const E1_NU: &str = r#"{"pieces":[{"a":1.0,"b":2.0,"density":1.0}]}"#;
const E4_MU: &str = r#"{"pieces":[{"a":0.0,"b":2.0,"density":0.5}]}"#;
const E4_NU: &str =
    r#"{"pieces":[{"a":0.0,"b":1.0,"density":0.5},{"a":1.0,"b":2.0,"density":0.25},{"a":2.0,"b":2.5,"density":0.5}]}"#;

#[test]
fn winf_reports_translation() {
    let w = Workdir::new();
    let (mu, nu) = w.measures(E1_MU, E1_NU);
    let out = run(&["winf", "--mu", s(&mu), "--nu", s(&nu)]);
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    let v: Value = serde_json::from_slice(&out.stdout).unwrap();
    assert_eq!(v["lambda_c"].as_f64(), Some(1.0));
    assert_eq!(v["m_plus"], serde_json::json!([[0.0, 1.0]]));
    assert_eq!(v["m_minus"], serde_json::json!([]));
}

#[test]
fn potentials_then_verify_dual() {
    let w = Workdir::new();
    let (mu, nu) = w.measures(E4_MU, E4_NU);
    let pot = w.path("pot.json");
    let csv = w.path("pot.csv");
    let out = run(&["potentials", "--mu", s(&mu), "--nu", s(&nu), "--out", s(&pot), "--csv", s(&csv)]);
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    assert!(std::fs::read_to_string(&csv).unwrap().starts_with("x,phi,psi\n"));

    let rep = w.path("dual.json");
    let out = run(&["verify-dual", "--mu", s(&mu), "--nu", s(&nu), "--phi", s(&pot), "--out", s(&rep)]);
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    let v = json(&rep);
    assert_eq!(v["feasible"], Value::Bool(true));
    assert!(v["dual_value"].as_f64().unwrap().abs() <= 1e-9);

    // The same potentials are infeasible for a wider band.
    let out = run(&["verify-dual", "--mu", s(&mu), "--nu", s(&nu), "--phi", s(&pot), "--lambda", "1.0"]);
    assert_eq!(out.status.code(), Some(1));
}

#[test]
fn decompose_sample_validate_round_trip() {
    let w = Workdir::new();
    let (mu, nu) = w.measures(E4_MU, E4_NU);
    let dec = w.path("dec.json");
    assert!(run(&["decompose", "--mu", s(&mu), "--nu", s(&nu), "--out", s(&dec)]).status.success());
    assert_eq!(json(&dec)["components"].as_array().unwrap().len(), 1);

    let plan = w.path("plan.json");
    let out = run(&["sample-plan", "--dec", s(&dec), "--seed", "7", "--n", "500", "--out", s(&plan)]);
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    assert_eq!(json(&plan)["atoms"].as_array().unwrap().len(), 500);

    let out = run(&["validate-plan", "--plan", s(&plan), "--dec", s(&dec)]);
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    let v: Value = serde_json::from_slice(&out.stdout).unwrap();
    assert_eq!(v["passed"], Value::Bool(true));

    // Moving one atom off the band makes validation fail with exit code 1.
    let mut bad = json(&plan);
    let y = bad["atoms"][0]["y"].as_f64().unwrap();
    bad["atoms"][0]["y"] = Value::from(y + 5.0);
    let bad_path = w.write("bad.json", &bad.to_string());
    let out = run(&["validate-plan", "--plan", s(&bad_path), "--dec", s(&dec)]);
    assert_eq!(out.status.code(), Some(1));
}

#[test]
fn outputs_are_byte_identical_on_repeat() {
    let w = Workdir::new();
    let (mu, nu) = w.measures(E4_MU, E4_NU);
    let dec = w.path("dec.json");
    assert!(run(&["decompose", "--mu", s(&mu), "--nu", s(&nu), "--out", s(&dec)]).status.success());
    for args in [
        vec!["winf", "--mu", s(&mu), "--nu", s(&nu)],
        vec!["potentials", "--mu", s(&mu), "--nu", s(&nu)],
        vec!["decompose", "--mu", s(&mu), "--nu", s(&nu)],
        vec!["sample-plan", "--dec", s(&dec), "--seed", "3", "--n", "200"],
        vec!["oracle", "--mu", s(&mu), "--nu", s(&nu), "--n", "300"],
    ] {
        let (a, b) = (run(&args), run(&args));
        assert!(a.status.success(), "{args:?}: {}", String::from_utf8_lossy(&a.stderr));
        assert_eq!(a.stdout, b.stdout, "{args:?}");
    }
    let seeds: Vec<Vec<u8>> =
        ["1", "2"].iter().map(|k| run(&["sample-plan", "--dec", s(&dec), "--seed", k, "--n", "200"]).stdout).collect();
    assert_ne!(seeds[0], seeds[1]);
}

#[test]
fn input_errors_exit_with_code_two() {
    let w = Workdir::new();
    let (_, nu) = w.measures(E1_MU, E1_NU);
    let broken = w.write("broken.json", "{\"pieces\": [");
    let heavy = w.write("heavy.json", r#"{"pieces":[{"a":0.0,"b":1.0,"density":2.0}]}"#);
    let overlap =
        w.write("overlap.json", r#"{"pieces":[{"a":0.0,"b":1.0,"density":0.5},{"a":0.5,"b":1.5,"density":0.5}]}"#);
    for bad in [&broken, &heavy, &overlap] {
        let out = run(&["winf", "--mu", s(bad), "--nu", s(&nu)]);
        assert_eq!(out.status.code(), Some(2), "{}", String::from_utf8_lossy(&out.stderr));
        assert!(!out.stderr.is_empty());
    }
    let missing = w.path("missing.json");
    assert_eq!(run(&["winf", "--mu", s(&missing), "--nu", s(&nu)]).status.code(), Some(2));
}

#[test]
fn tolerance_comes_from_flag_then_environment() {
    let w = Workdir::new();
    let (mu, nu) = w.measures(E4_MU, E4_NU);
    let dec = w.path("dec.json");
    assert!(run(&["decompose", "--mu", s(&mu), "--nu", s(&nu), "--out", s(&dec)]).status.success());
    let plan = w.path("plan.json");
    assert!(run(&["sample-plan", "--dec", s(&dec), "--n", "100", "--out", s(&plan)]).status.success());

    // Push one atom slightly past the band: it fails at the default
    // tolerance and passes with a looser one.
    let mut v = json(&plan);
    let atoms = v["atoms"].as_array_mut().unwrap();
    let k = atoms
        .iter()
        .position(|a| (a["y"].as_f64().unwrap() - a["x"].as_f64().unwrap() - 0.5).abs() < 1e-12)
        .expect("an atom on the rigid line");
    let y = atoms[k]["y"].as_f64().unwrap();
    atoms[k]["y"] = Value::from(y + 1e-6);
    let nudged = w.write("nudged.json", &v.to_string());

    let args = ["validate-plan", "--plan", s(&nudged), "--dec", s(&dec)];
    assert_eq!(run(&args).status.code(), Some(1));
    let env = Command::new(BIN).args(args).env("WINF_TOL", "1e-5").output().unwrap();
    assert_eq!(env.status.code(), Some(0));
    let flag = Command::new(BIN).args(args).args(["--tol", "1e-9"]).env("WINF_TOL", "1e-5").output().unwrap();
    assert_eq!(flag.status.code(), Some(1));
    let garbage = Command::new(BIN).args(args).env("WINF_TOL", "loose").output().unwrap();
    assert_eq!(garbage.status.code(), Some(2));
}

#[test]
fn oracle_and_selftest() {
    let w = Workdir::new();
    let (mu, nu) = w.measures(E4_MU, E4_NU);
    let out = run(&["oracle", "--mu", s(&mu), "--nu", s(&nu), "--n", "1000"]);
    assert!(out.status.success());
    let v: Value = serde_json::from_slice(&out.stdout).unwrap();
    assert_eq!(v["method_agreement"], Value::Bool(true));
    assert_eq!(v["within_tolerance"], Value::Bool(true));

    let report = w.path("selftest.json");
    let out = run(&["selftest", "--out", s(&report)]);
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    assert_eq!(json(&report)["passed"], Value::Bool(true));
}
