use std::path::PathBuf;
use std::process::{Command, Output};

use serde_json::Value;
use tempfile::TempDir;

const JORDAN: &str = r#"{"dims":[2,2],"differentials":[[["-2","-1"],["0","-2"]]],"symbols":[[["1","0"],["0","1"]]]}"#;
const JORDAN_TORUS: &str = r#"{"sigma":{"dims":[2],"differentials":[]},"deck":[[["3","1"],["0","3"]]]}"#;
const TREFOIL: &str = r#"{"V":[[-1,1],[0,-1]]}"#;
const SCALAR_FLOW: &str = r#"{"samples":[{"t":"0","Q":[[["-1/2","1"]]]},{"t":"1","Q":[[["-3/2","1"]]]}]}"#;

struct Scratch(TempDir);

impl Scratch {
    fn new() -> Self {
        Scratch(tempfile::tempdir().unwrap())
    }

    fn file(&self, name: &str, body: &str) -> String {
        let p: PathBuf = self.0.path().join(name);
        std::fs::write(&p, body).unwrap();
        p.to_string_lossy().into_owned()
    }
}

fn run(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_perindex")).args(args).output().unwrap()
}

fn json_of(out: &Output) -> Value {
    serde_json::from_slice(&out.stdout).unwrap_or_else(|e| panic!("bad JSON ({e}): {}", String::from_utf8_lossy(&out.stdout)))
}

fn ok(args: &[&str]) -> Value {
    let out = run(args);
    assert_eq!(out.status.code(), Some(0), "stderr: {}", String::from_utf8_lossy(&out.stderr));
    let v = json_of(&out);
    assert_eq!(v["schema"], "perindex/1");
    v
}

#[test]
fn spectral_set_of_jordan_block() {
    let s = Scratch::new();
    let f = s.file("jordan.json", JORDAN);
    let v = ok(&["spectral-set", "--input", &f]);
    assert_eq!(v["points"].as_array().unwrap().len(), 1);
    assert_eq!(v["points"][0]["z"], "-2");
    assert_eq!(v["points"][0]["mult"], 2);
}

#[test]
fn hhat_and_index_jump() {
    let s = Scratch::new();
    let f = s.file("jordan.json", JORDAN);
    let v = ok(&["hhat", "--input", &f, "--z", "-2"]);
    assert_eq!(v["dims"], serde_json::json!([2, 0]));
    let v = ok(&["index-jump", "--input", &f, "--strip", "-3", "0"]);
    assert_eq!(v["jump"], 2);
    let v = ok(&["hhat", "--input", &f, "--z", "1/3"]);
    assert_eq!(v["dims"], serde_json::json!([0, 0]));
}

#[test]
fn resolvent_local_expansion() {
    let s = Scratch::new();
    let f = s.file("jordan.json", JORDAN);
    let v = ok(&["resolvent", "--input", &f, "--z0", "-2", "--order", "1"]);
    assert_eq!(v["resolvent"]["pole_order"], 2);
    assert_eq!(v["residual_check"]["pass"], true);
    assert_eq!(v["residual_check"]["probes"].as_array().unwrap().len(), 5);
}

#[test]
fn resolvent_off_spectrum_is_a_domain_error() {
    let s = Scratch::new();
    let f = s.file("jordan.json", JORDAN);
    let out = run(&["resolvent", "--input", &f, "--z0", "0"]);
    assert_eq!(out.status.code(), Some(2));
    assert!(json_of(&out)["error"]["code"].is_string());
}

#[test]
fn cover_crosscheck_passes() {
    let s = Scratch::new();
    let f = s.file("torus.json", JORDAN_TORUS);
    let v = ok(&["cover", "crosscheck", "--input", &f]);
    assert_eq!(v["pass"], true);
    assert_eq!(v["index_jump"], 2);
    let v = ok(&["cover", "deck", "--input", &f]);
    assert_eq!(v["degrees"][0]["eigen"][0]["jordan_blocks"], serde_json::json!([2]));
}

#[test]
fn knot_verbs() {
    let s = Scratch::new();
    let f = s.file("trefoil.json", TREFOIL);
    assert_eq!(ok(&["knot", "sig", "--seifert", &f, "--omega", "1/2"])["signature"], -2);
    assert_eq!(ok(&["knot", "alexander", "--seifert", &f])["alexander"], "t^2 - t + 1");
    let v = ok(&["knot", "mapping-torus", "--seifert", &f, "--n", "2", "--alpha", "1/4"]);
    assert_eq!(v["signature"], -2);
    assert_eq!(v["consistency"]["pass"], true);
    let v = ok(&["alexander-module", "--seifert", &f]);
    assert_eq!(v["torsion"], true);
}

#[test]
fn omega_one_is_a_domain_error() {
    let s = Scratch::new();
    let f = s.file("trefoil.json", TREFOIL);
    let out = run(&["knot", "sig", "--seifert", &f, "--omega", "1"]);
    assert_eq!(out.status.code(), Some(2));
}

#[test]
fn specflow_scalar_family() {
    let s = Scratch::new();
    let f = s.file("fam.json", SCALAR_FLOW);
    assert_eq!(ok(&["specflow", "--family", &f])["flow"], 1);
    assert_eq!(ok(&["specflow", "--family", &f, "--eps1", "0.05"])["flow"], 1);
}

#[test]
fn malformed_input_exits_one() {
    let s = Scratch::new();
    let f = s.file("bad.json", "{\"dims\": [1,");
    let out = run(&["spectral-set", "--input", &f]);
    assert_eq!(out.status.code(), Some(1));
    assert_eq!(json_of(&out)["error"]["code"], "PARSE");
    let out = run(&["spectral-set", "--input", "/nonexistent/x.json"]);
    assert_eq!(out.status.code(), Some(1));
    let out = run(&["no-such-verb"]);
    assert_eq!(out.status.code(), Some(1));
}

#[test]
fn help_exits_zero() {
    assert_eq!(run(&["--help"]).status.code(), Some(0));
}

#[test]
fn verify_is_deterministic() {
    let a = run(&["verify", "knot-identities", "--seed", "3", "--count", "4"]);
    let b = run(&["verify", "knot-identities", "--seed", "3", "--count", "4", "--parallelism", "3"]);
    assert_eq!(a.status.code(), Some(0));
    assert_eq!(a.stdout, b.stdout);
    let v = json_of(&a);
    assert_eq!(v["passed"], 4);
}
