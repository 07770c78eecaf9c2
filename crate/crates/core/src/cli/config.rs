use std::path::Path;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::algebra::{Field, VarUniverse};
use crate::resolve::CenterSpec;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum ConfigError {
    #[error("cannot read {path}: {msg}")]
    Io { path: String, msg: String },
    #[error("malformed config: {0}")]
    Json(String),
    #[error("invalid config: {0}")]
    Invalid(String),
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Tolerances {
    #[serde(default = "default_cluster")]
    pub cluster: f64,
    #[serde(default = "default_angle")]
    pub angle: f64,
    #[serde(default = "default_residual")]
    pub residual: f64,
}

fn default_cluster() -> f64 {
    1e-6
}
fn default_angle() -> f64 {
    1e-8
}
fn default_residual() -> f64 {
    1e-8
}

impl Default for Tolerances {
    fn default() -> Self {
        Tolerances { cluster: default_cluster(), angle: default_angle(), residual: default_residual() }
    }
}

/// Per-chart grid replacing the default box.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct GridOverride {
    pub chart: Vec<usize>,
    pub lo: f64,
    pub hi: f64,
    pub count: usize,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct GridConfig {
    #[serde(default = "default_lo")]
    pub lo: f64,
    #[serde(default = "default_hi")]
    pub hi: f64,
    #[serde(default = "default_count")]
    pub count: usize,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub overrides: Vec<GridOverride>,
}

fn default_lo() -> f64 {
    -1.0
}
fn default_hi() -> f64 {
    1.0
}
fn default_count() -> usize {
    21
}

impl Default for GridConfig {
    fn default() -> Self {
        GridConfig { lo: default_lo(), hi: default_hi(), count: default_count(), overrides: Vec::new() }
    }
}

impl GridConfig {
    /// `(lo, hi, count)` for the chart at `address`.
    pub fn for_chart(&self, address: &[usize]) -> (f64, f64, usize) {
        self.overrides
            .iter()
            .find(|o| o.chart == address)
            .map_or((self.lo, self.hi, self.count), |o| (o.lo, o.hi, o.count))
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct JobConfig {
    #[serde(default = "default_field")]
    pub field: Field,
    pub structure: crate::family::Structure,
    pub params: Vec<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub fibers: Option<Vec<String>>,
    pub matrix: Vec<Vec<String>>,
    #[serde(default)]
    pub resolution: Vec<CenterSpec>,
    #[serde(default)]
    pub grid: GridConfig,
    #[serde(default)]
    pub tolerances: Tolerances,
    #[serde(default = "default_seed")]
    pub seed: u64,
    #[serde(default = "default_depth_cap")]
    pub depth_cap: usize,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub report: Option<String>,
}

fn default_field() -> Field {
    Field::Rational
}
fn default_seed() -> u64 {
    42
}
fn default_depth_cap() -> usize {
    6
}

impl JobConfig {
    pub fn from_json(text: &str) -> Result<Self, ConfigError> {
        let cfg: JobConfig = serde_json::from_str(text).map_err(|e| ConfigError::Json(e.to_string()))?;
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn from_path(path: &Path) -> Result<Self, ConfigError> {
        let text = std::fs::read_to_string(path)
            .map_err(|e| ConfigError::Io { path: path.display().to_string(), msg: e.to_string() })?;
        Self::from_json(&text)
    }

    /// Shape checks that do not need polynomial parsing.
    pub fn validate(&self) -> Result<(), ConfigError> {
        let n = self.matrix.len();
        if n == 0 || self.matrix.iter().any(|r| r.len() != n) {
            return Err(ConfigError::Invalid("matrix must be square and nonempty".into()));
        }
        VarUniverse::new(self.params.iter().cloned(), self.fibers.clone().unwrap_or_default())
            .map_err(|e| ConfigError::Invalid(e.to_string()))?;
        if let Some(f) = &self.fibers {
            if f.len() != n {
                return Err(ConfigError::Invalid(format!("expected {n} fiber names, got {}", f.len())));
            }
        }
        let t = &self.tolerances;
        if !(t.cluster > 0.0 && t.angle > 0.0 && t.residual > 0.0) {
            return Err(ConfigError::Invalid("tolerances must be positive".into()));
        }
        let grids = std::iter::once((self.grid.lo, self.grid.hi, self.grid.count))
            .chain(self.grid.overrides.iter().map(|o| (o.lo, o.hi, o.count)));
        for (lo, hi, count) in grids {
            if !(lo.is_finite() && hi.is_finite() && lo < hi) || count < 1 {
                return Err(ConfigError::Invalid(format!("bad grid [{lo}, {hi}] × {count}")));
            }
        }
        for c in &self.resolution {
            if c.vars.len() < 2 {
                return Err(ConfigError::Invalid(format!("center {:?} needs at least two variables", c.vars)));
            }
        }
        Ok(())
    }
}
