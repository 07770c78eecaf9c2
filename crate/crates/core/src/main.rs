use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use serde_json::json;

use eigenbouquet::cli::{canonical_string, demo_config, run, Command, JobConfig, DEMO_NAMES, EXIT_CONFIG};

#[derive(Parser)]
#[command(name = "eigenbouquet", version, about = "Eigen-bouquet ideals, blowup resolution and reducing frames")]
struct Cli {
    #[command(subcommand)]
    command: Sub,
}

#[derive(Subcommand)]
enum Sub {
    /// Spectral summary and quadratic system.
    Analyze(Flags),
    /// Apply the configured blowup sequence and report the chart tree.
    Resolve(Flags),
    /// Extract frames and eigenvalues on every resolved chart.
    Frames(Flags),
    /// Run every invariant suite.
    Check(Flags),
    /// Run a built-in fixture end to end.
    Demo {
        name: String,
        #[command(flatten)]
        flags: Flags,
    },
}

#[derive(Args, Clone, Default)]
struct Flags {
    #[arg(long)]
    config: Option<PathBuf>,
    #[arg(long)]
    report: Option<PathBuf>,
    #[arg(long)]
    seed: Option<u64>,
    /// Grid points per axis.
    #[arg(long)]
    grid: Option<usize>,
    #[arg(long)]
    tol_angle: Option<f64>,
    #[arg(long)]
    tol_residual: Option<f64>,
    #[arg(long)]
    depth_cap: Option<usize>,
}

impl Flags {
    fn apply(&self, cfg: &mut JobConfig) {
        if let Some(s) = self.seed {
            cfg.seed = s;
        }
        if let Some(g) = self.grid {
            cfg.grid.count = g;
            for o in &mut cfg.grid.overrides {
                o.count = g;
            }
        }
        if let Some(t) = self.tol_angle {
            cfg.tolerances.angle = t;
        }
        if let Some(t) = self.tol_residual {
            cfg.tolerances.residual = t;
        }
        if let Some(d) = self.depth_cap {
            cfg.depth_cap = d;
        }
    }
}

fn emit(text: &str, path: Option<PathBuf>) -> Result<(), String> {
    match path {
        Some(p) => std::fs::write(&p, text).map_err(|e| format!("cannot write {}: {e}", p.display())),
        None => {
            print!("{text}");
            Ok(())
        }
    }
}

fn config_failure(command: &str, msg: String, report: Option<PathBuf>) -> ExitCode {
    let v = json!({
        "command": command,
        "verdict": "config_error",
        "exit_code": EXIT_CONFIG,
        "diagnostic": msg,
    });
    if let Err(e) = emit(&canonical_string(&v), report) {
        eprintln!("{e}");
    }
    ExitCode::from(EXIT_CONFIG as u8)
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let (cmd, flags, demo) = match cli.command {
        Sub::Analyze(f) => (Command::Analyze, f, None),
        Sub::Resolve(f) => (Command::Resolve, f, None),
        Sub::Frames(f) => (Command::Frames, f, None),
        Sub::Check(f) => (Command::Check, f, None),
        Sub::Demo { name, flags } => (Command::Check, flags, Some(name)),
    };
    let label = if demo.is_some() { "demo" } else { cmd.name() };
    let loaded = match (&demo, &flags.config) {
        (Some(name), _) => demo_config(name)
            .ok_or_else(|| format!("unknown demo {name:?}; expected one of {}", DEMO_NAMES.join(", "))),
        (None, Some(path)) => JobConfig::from_path(path).map_err(|e| e.to_string()),
        (None, None) => Err("--config is required".to_string()),
    };
    let mut cfg = match loaded {
        Ok(c) => c,
        Err(msg) => return config_failure(label, msg, flags.report.clone()),
    };
    flags.apply(&mut cfg);
    let report_path = flags.report.clone().or_else(|| cfg.report.clone().map(PathBuf::from));
    let outcome = run(cmd, &cfg);
    if let Err(e) = emit(&outcome.canonical(), report_path) {
        eprintln!("{e}");
        return ExitCode::from(EXIT_CONFIG as u8);
    }
    eprintln!("verdict: {}", outcome.verdict);
    ExitCode::from(outcome.exit_code as u8)
}
