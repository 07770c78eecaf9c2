use super::config::{GridConfig, JobConfig, Tolerances};
use crate::algebra::Field;
use crate::family::Structure;
use crate::resolve::CenterSpec;

pub const DEMO_NAMES: [&str; 4] = ["kupa", "rellich", "skew2", "diag3"];

fn rows(r: &[&[&str]]) -> Vec<Vec<String>> {
    r.iter().map(|row| row.iter().map(|s| s.to_string()).collect()).collect()
}

fn point_blowup() -> Vec<CenterSpec> {
    vec![CenterSpec { chart_path: vec![], vars: vec!["x".into(), "y".into()] }]
}

fn base(structure: Structure, matrix: Vec<Vec<String>>, resolution: Vec<CenterSpec>) -> JobConfig {
    JobConfig {
        field: Field::Rational,
        structure,
        params: vec!["x".into(), "y".into()],
        fibers: None,
        matrix,
        resolution,
        grid: GridConfig::default(),
        tolerances: Tolerances::default(),
        seed: 42,
        depth_cap: 6,
        report: None,
    }
}

/// Built-in fixtures.
pub fn demo_config(name: &str) -> Option<JobConfig> {
    Some(match name {
        "kupa" => base(Structure::Symmetric, rows(&[&["x^2", "x*y"], &["x*y", "y^2"]]), point_blowup()),
        "rellich" => base(Structure::Symmetric, rows(&[&["x", "y"], &["y", "-x"]]), point_blowup()),
        "skew2" => base(Structure::Skew, rows(&[&["0", "x - y^2"], &["-(x - y^2)", "0"]]), Vec::new()),
        "diag3" => base(Structure::Symmetric, rows(&[&["x", "0", "0"], &["0", "y", "0"], &["0", "0", "-x - y"]]), Vec::new()),
        _ => return None,
    })
}
