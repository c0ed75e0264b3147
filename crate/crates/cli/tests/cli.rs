use std::path::PathBuf;
use std::process::{Command, Output};

use serde_json::Value;
use tempfile::TempDir;
use tfm_core::fan::{standard::blown_up_plane, unimodular_equivalence};

const F1: &str = r#"{"dim":2,"rays":[[1,0],[1,1],[0,1],[-1,-1]],"cones":[[0,1],[1,2],[2,3],[3,0]]}"#;
const P112: &str = r#"{"dim":2,"rays":[[1,0],[0,1],[-1,-2]],"cones":[[0,1],[1,2],[2,0]]}"#;
const P1: &str = r#"{"dim":1,"rays":[[1],[-1]],"cones":[[0],[1]]}"#;

struct Files {
    dir: TempDir,
}

impl Files {
    fn new() -> Self {
        let f = Files {
            dir: tempfile::tempdir().unwrap(),
        };
        f.put("f1.fan.json", F1);
        f.put("p112.fan.json", P112);
        f.put("p1.fan.json", P1);
        f.put("fv.pair.json", r#"{"subspace":[["1","1"]],"delta":{}}"#);
        f.put("fw.pair.json", r#"{"subspace":[[1,0]]}"#);
        f.put("full.pair.json", r#"{"subspace":[[1,0],[0,1]],"delta":{}}"#);
        f.put("d3.div.json", r#"{"coeffs":["0","0","1"]}"#);
        f
    }

    fn put(&self, name: &str, text: &str) -> PathBuf {
        let p = self.dir.path().join(name);
        std::fs::write(&p, text).unwrap();
        p
    }

    fn path(&self, name: &str) -> String {
        self.dir.path().join(name).display().to_string()
    }
}

fn tfm(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_tfm")).args(args).output().unwrap()
}

fn json(o: &Output) -> Value {
    serde_json::from_slice(&o.stdout).unwrap_or_else(|e| panic!("{e}: {}", String::from_utf8_lossy(&o.stdout)))
}

fn code(o: &Output) -> i32 {
    o.status.code().unwrap()
}

#[test]
fn mori_reports_the_golden_lengths() {
    let f = Files::new();
    let o = tfm(&["mori", "--fan", &f.path("f1.fan.json"), "--pair", &f.path("fv.pair.json"), "--json"]);
    assert_eq!(code(&o), 0);
    let v = json(&o);
    let mut lengths: Vec<&str> = v["rays"].as_array().unwrap().iter().map(|r| r["length"].as_str().unwrap()).collect();
    lengths.sort();
    assert_eq!(lengths, ["-1", "2"]);

    let o = tfm(&["mori", "--fan", &f.path("f1.fan.json"), "--pair", &f.path("fw.pair.json"), "--json"]);
    let mut lengths: Vec<String> = json(&o)["rays"].as_array().unwrap().iter().map(|r| r["length"].as_str().unwrap().to_string()).collect();
    lengths.sort();
    assert_eq!(lengths, ["0", "1"]);
}

#[test]
fn validate_lists_violations() {
    let f = Files::new();
    let bad = f.put("bad.fan.json", r#"{"dim":2,"rays":[[1,0],[1,0],[0,1]],"cones":[[0,2],[1,2]]}"#);
    let o = tfm(&["validate", "--fan", bad.to_str().unwrap(), "--json"]);
    assert_eq!(code(&o), 1);
    let v = json(&o);
    assert_eq!(v["valid"], false);
    assert!(v["violations"][0].as_str().unwrap().contains("duplicate ray"));
    assert_eq!(code(&tfm(&["validate", "--fan", &f.path("f1.fan.json")])), 0);
}

#[test]
fn kodaira_on_the_weighted_plane() {
    let f = Files::new();
    let o = tfm(&[
        "kodaira", "--fan", &f.path("p112.fan.json"), "--pair", &f.path("full.pair.json"),
        "--divisor", &f.path("d3.div.json"), "--json",
    ]);
    assert_eq!(code(&o), 0, "{}", String::from_utf8_lossy(&o.stderr));
    let v = json(&o);
    assert_eq!(v["h"], serde_json::json!([2, 0, 0]));
    assert_eq!(v["hypothesis"]["ample"], true);

    f.put("anti.div.json", r#"{"coeffs":[-3,-3,-3]}"#);
    let o = tfm(&[
        "kodaira", "--fan", &f.path("p112.fan.json"), "--pair", &f.path("full.pair.json"),
        "--divisor", &f.path("anti.div.json"), "--json",
    ]);
    assert_eq!(code(&o), 1);
    assert_eq!(json(&o)["hypothesis"]["ample"], false);
}

#[test]
fn cohomology_respects_the_cell_cap() {
    let f = Files::new();
    let args = ["cohomology", "--fan", &f.path("p112.fan.json"), "--divisor", &f.path("d3.div.json"), "--json"];
    let o = tfm(&args);
    assert_eq!(code(&o), 0);
    assert_eq!(json(&o)["h"], serde_json::json!([2, 0, 0]));
    let capped = Command::new(env!("CARGO_BIN_EXE_tfm")).args(args).env("TFM_MAX_CELLS", "10").output().unwrap();
    assert_eq!(code(&capped), 1);
    assert!(String::from_utf8_lossy(&capped.stderr).contains("exceeds the cap"));
}

#[test]
fn parse_errors_exit_two_with_a_path() {
    let f = Files::new();
    let bad = f.put("broken.fan.json", r#"{"dim":2,"rays":[[1,0],[0,"x"]],"cones":[]}"#);
    let o = tfm(&["info", "--fan", bad.to_str().unwrap()]);
    assert_eq!(code(&o), 2);
    assert!(String::from_utf8_lossy(&o.stderr).contains("rays[1][1]"));

    let pair = f.put("bad.pair.json", r#"{"subspace":[[1,0]],"delta":{"7":"1/2"}}"#);
    let o = tfm(&["cone-check", "--fan", &f.path("f1.fan.json"), "--pair", pair.to_str().unwrap()]);
    assert_eq!(code(&o), 2);
    assert!(String::from_utf8_lossy(&o.stderr).contains("delta.7"));

    assert_eq!(code(&tfm(&["no-such-command"])), 2);
    assert_eq!(code(&tfm(&["info"])), 2);
    assert_eq!(code(&tfm(&["info", "--fan", "/nonexistent/x.json"])), 2);
}

#[test]
fn mmp_traces() {
    let f = Files::new();
    let o = tfm(&["mmp", "--fan", &f.path("f1.fan.json"), "--pair", &f.path("fw.pair.json"), "--json"]);
    assert_eq!(code(&o), 0);
    let v = json(&o);
    let kinds: Vec<&str> = v["steps"].as_array().unwrap().iter().map(|s| s["kind"].as_str().unwrap()).collect();
    assert_eq!(kinds, ["divisorial", "fiber"]);
    assert_eq!(v["terminal"], "mori_fiber_space");

    let o = tfm(&["mmp", "--fan", &f.path("f1.fan.json"), "--pair", &f.path("fw.pair.json"), "--max-steps", "1", "--json"]);
    assert_eq!(code(&o), 1);
    assert_eq!(json(&o)["steps"].as_array().unwrap().len(), 1);
}

#[test]
fn reports_are_deterministic_and_reparse() {
    let f = Files::new();
    let cases: Vec<Vec<String>> = vec![
        vec!["info".into(), "--fan".into(), f.path("f1.fan.json")],
        vec!["cone-check".into(), "--fan".into(), f.path("f1.fan.json"), "--pair".into(), f.path("fv.pair.json")],
        vec!["bundle".into(), "--fan".into(), f.path("f1.fan.json"), "--pair".into(), f.path("fv.pair.json")],
        vec!["discrepancy".into(), "--fan".into(), f.path("f1.fan.json"), "--pair".into(), f.path("fw.pair.json"), "--w".into(), "1,2".into()],
        vec!["qfact".into(), "--fan".into(), f.path("f1.fan.json")],
    ];
    for args in cases {
        let mut args: Vec<&str> = args.iter().map(String::as_str).collect();
        args.push("--json");
        let a = tfm(&args);
        let b = tfm(&args);
        assert_eq!(code(&a), 0, "{args:?}: {}", String::from_utf8_lossy(&a.stderr));
        assert_eq!(a.stdout, b.stdout, "{args:?}");
        let _ = json(&a);
    }
}

#[test]
fn build_bundle_rebuilds_the_blowup() {
    let f = Files::new();
    let o = tfm(&["build-bundle", "--fan", &f.path("p1.fan.json"), "--h", "0,1", "--json"]);
    assert_eq!(code(&o), 0);
    let fan = tfm_core::io::parse_fan(std::str::from_utf8(&o.stdout).unwrap()).unwrap();
    assert!(unimodular_equivalence(&fan, &blown_up_plane()).is_some());
    assert_eq!(code(&tfm(&["build-bundle", "--fan", &f.path("p1.fan.json"), "--h", "0,x"])), 2);
}

#[test]
fn fujita_exception_on_the_product() {
    let f = Files::new();
    f.put("pp.fan.json", r#"{"dim":2,"rays":[[1,0],[-1,0],[0,1],[0,-1]],"cones":[[0,2],[0,3],[1,2],[1,3]]}"#);
    f.put("a.div.json", r#"{"coeffs":[1,0,1,0]}"#);
    let o = tfm(&[
        "fujita", "--fan", &f.path("pp.fan.json"), "--pair", &f.path("fw.pair.json"),
        "--divisor", &f.path("a.div.json"), "--json",
    ]);
    assert_eq!(code(&o), 0, "{}", String::from_utf8_lossy(&o.stderr));
    let v = json(&o);
    assert_eq!(v["improved_nef"], false);
    assert_eq!(v["exceptions"][0]["verified"], true);
    assert_eq!(v["exceptions"][0]["a_dot_line"], "1");
}
