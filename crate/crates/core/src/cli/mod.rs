//! Job configuration, pipeline orchestration and canonical reports.

pub mod config;
pub mod demos;
pub mod json;
pub mod pipeline;

pub use config::{ConfigError, GridConfig, GridOverride, JobConfig, Tolerances};
pub use demos::{demo_config, DEMO_NAMES};
pub use json::canonical_string;
pub use pipeline::{prepare, run, Command, Job, RunOutcome, EXIT_CONFIG, EXIT_FAIL, EXIT_PASS, EXIT_UNRESOLVED};
