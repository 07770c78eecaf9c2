use std::path::Path;
use std::process::Command;

use serde_json::Value;

use eigenbouquet::cli::JobConfig;

const BIN: &str = env!("CARGO_BIN_EXE_eigenbouquet");

struct Run {
    code: i32,
    stdout: String,
}

fn run(args: &[&str]) -> Run {
    let out = Command::new(BIN).args(args).output().expect("binary runs");
    Run { code: out.status.code().expect("exit code"), stdout: String::from_utf8(out.stdout).expect("utf-8") }
}

fn json(text: &str) -> Value {
    serde_json::from_str(text).expect("report is JSON")
}

fn write(dir: &Path, name: &str, body: &str) -> String {
    let p = dir.join(name);
    std::fs::write(&p, body).unwrap();
    p.display().to_string()
}

const KUPA_BARE: &str = r#"{"structure": "symmetric", "params": ["x", "y"], "matrix": [["x^2", "x*y"], ["x*y", "y^2"]]}"#;

#[test]
fn demo_kupa_passes() {
    let r = run(&["demo", "kupa"]);
    assert_eq!(r.code, 0);
    let v = json(&r.stdout);
    assert_eq!(v["verdict"], "pass");
    assert_eq!(v["summary"][0]["s_l"], 2);
    assert_eq!(v["summary"][0]["d_l"], 1);
    let charts = v["resolution"]["charts"].as_array().unwrap();
    let leaves: Vec<&Value> = charts.iter().filter(|c| c["leaf"] == true).collect();
    assert_eq!(leaves.len(), 2);
    assert!(leaves.iter().all(|c| c["status"] == "resolved_certified"));
    for f in v["frames"].as_array().unwrap() {
        assert!(f["max_oracle_angle"].as_f64().unwrap() <= 1e-8);
    }
}

#[test]
fn every_demo_passes() {
    for name in ["rellich", "skew2", "diag3"] {
        let r = run(&["demo", name]);
        assert_eq!(r.code, 0, "{name}");
        assert_eq!(json(&r.stdout)["verdict"], "pass", "{name}");
    }
}

#[test]
fn rellich_generators_are_the_coordinates() {
    let v = json(&run(&["demo", "rellich"]).stdout);
    assert_eq!(v["summary"][0]["fitting"], serde_json::json!(["x", "y"]));
}

#[test]
fn unknown_demo_is_a_config_error() {
    let r = run(&["demo", "nope"]);
    assert_eq!(r.code, 2);
    let v = json(&r.stdout);
    assert_eq!(v["verdict"], "config_error");
    assert!(v["diagnostic"].as_str().unwrap().contains("kupa"));
}

#[test]
fn malformed_and_invalid_configs_exit_2() {
    let dir = tempfile::tempdir().unwrap();
    let cases = [
        ("syntax.json", "{"),
        ("nonsquare.json", r#"{"structure": "symmetric", "params": ["x"], "matrix": [["x", "0"]]}"#),
        ("badentry.json", r#"{"structure": "symmetric", "params": ["x"], "matrix": [["x +", "0"], ["0", "x"]]}"#),
        ("asym.json", r#"{"structure": "symmetric", "params": ["x"], "matrix": [["x", "1"], ["0", "x"]]}"#),
        (
            "tol.json",
            r#"{"structure": "symmetric", "params": ["x"], "matrix": [["x"]], "tolerances": {"angle": -1}}"#,
        ),
        (
            "center.json",
            r#"{"structure": "symmetric", "params": ["x", "y"], "matrix": [["x", "y"], ["y", "-x"]],
                "resolution": [{"chart": [], "center": ["x", "q"]}]}"#,
        ),
        ("unknown_field.json", r#"{"structure": "symmetric", "params": ["x"], "matrix": [["x"]], "colour": 1}"#),
    ];
    for (name, body) in cases {
        let path = write(dir.path(), name, body);
        let r = run(&["resolve", "--config", &path]);
        assert_eq!(r.code, 2, "{name}: {}", r.stdout);
        let v = json(&r.stdout);
        assert_eq!(v["verdict"], "config_error", "{name}");
        assert!(v["diagnostic"].is_string(), "{name}");
    }
    let r = run(&["analyze", "--config", "/nonexistent/job.json"]);
    assert_eq!(r.code, 2);
    let r = run(&["analyze"]);
    assert_eq!(r.code, 2);
}

#[test]
fn empty_sequence_on_kupa_is_unresolved_with_origin_witness() {
    let dir = tempfile::tempdir().unwrap();
    let path = write(dir.path(), "kupa.json", KUPA_BARE);
    let r = run(&["resolve", "--config", &path]);
    assert_eq!(r.code, 3);
    let v = json(&r.stdout);
    assert_eq!(v["verdict"], "unresolved");
    let root = &v["resolution"]["charts"][0];
    assert_eq!(root["status"], "unresolved");
    assert_eq!(root["witness"], serde_json::json!(["0", "0"]));
    assert_eq!(root["proposed_center"], serde_json::json!(["x", "y"]));

    let r = run(&["frames", "--config", &path]);
    assert_eq!(r.code, 3);
    assert!(json(&r.stdout)["diagnostic"].is_string());
}

#[test]
fn depth_cap_is_reported_as_unresolved() {
    let dir = tempfile::tempdir().unwrap();
    let body = r#"{"structure": "symmetric", "params": ["x", "y"], "matrix": [["x^2", "x*y"], ["x*y", "y^2"]],
        "resolution": [{"chart": [], "center": ["x", "y"]}, {"chart": [0], "center": ["u", "v"]}]}"#;
    let path = write(dir.path(), "deep.json", body);
    let r = run(&["resolve", "--config", &path, "--depth-cap", "1"]);
    assert_eq!(r.code, 3, "{}", r.stdout);
    assert!(json(&r.stdout)["diagnostic"].as_str().unwrap().contains("depth"));
}

#[test]
fn scalar_family_needs_no_resolution() {
    let dir = tempfile::tempdir().unwrap();
    let path =
        write(dir.path(), "scalar.json", r#"{"structure": "symmetric", "params": ["x"], "matrix": [["x^2 + 1", "0"], ["0", "x^2 + 1"]]}"#);
    for cmd in ["analyze", "resolve", "check"] {
        let r = run(&[cmd, "--config", &path]);
        assert_eq!(r.code, 0, "{cmd}");
        assert_eq!(json(&r.stdout)["verdict"], "scalar_operator", "{cmd}");
    }
}

#[test]
fn failing_invariant_exits_1() {
    let r = run(&["demo", "kupa", "--tol-angle", "1e-300"]);
    assert_eq!(r.code, 1);
    let v = json(&r.stdout);
    assert_eq!(v["verdict"], "fail");
    let failing: Vec<&Value> = v["invariants"].as_array().unwrap().iter().filter(|i| i["passed"] == false).collect();
    assert!(failing.iter().any(|i| i["name"] == "frames.oracle_angle"));
}

#[test]
fn reports_are_byte_identical_across_runs() {
    let dir = tempfile::tempdir().unwrap();
    let a = dir.path().join("a.json").display().to_string();
    let b = dir.path().join("b.json").display().to_string();
    assert_eq!(run(&["demo", "skew2", "--report", &a]).code, 0);
    assert_eq!(run(&["demo", "skew2", "--report", &b]).code, 0);
    let (ta, tb) = (std::fs::read(&a).unwrap(), std::fs::read(&b).unwrap());
    assert!(!ta.is_empty());
    assert_eq!(ta, tb);
}

#[test]
fn echoed_config_reproduces_the_job() {
    let dir = tempfile::tempdir().unwrap();
    let first = dir.path().join("first.json").display().to_string();
    assert_eq!(run(&["demo", "rellich", "--grid", "7", "--seed", "9", "--report", &first]).code, 0);
    let report = json(&std::fs::read_to_string(&first).unwrap());
    let echoed = serde_json::to_string(&report["config"]).unwrap();
    let cfg = JobConfig::from_json(&echoed).unwrap();
    assert_eq!(cfg.grid.count, 7);
    assert_eq!(cfg.seed, 9);
    let cfg_path = write(dir.path(), "cfg.json", &echoed);
    let second = run(&["check", "--config", &cfg_path]);
    assert_eq!(second.code, 0);
    assert_eq!(second.stdout, std::fs::read_to_string(&first).unwrap());
}

#[test]
fn floats_use_seventeen_significant_digits() {
    let out = run(&["demo", "diag3", "--grid", "3"]).stdout;
    let line = out.lines().find(|l| l.contains("\"max_oracle_angle\"")).unwrap();
    let value = line.split(':').nth(1).unwrap().trim().trim_end_matches(',');
    let mantissa = value.trim_start_matches('-').split('e').next().unwrap();
    assert_eq!(mantissa.replace('.', "").len(), 17, "{value}");
}
