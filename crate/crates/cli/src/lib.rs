//! Config-driven experiment runner for the `boussinesq` crate.

pub mod config;
pub mod experiments;
pub mod output;

use std::path::Path;
use std::time::Instant;

use sha2::{Digest, Sha256};

pub use config::{ExperimentConfig, ExperimentKind};
use output::{write_artifacts, write_manifest, Manifest};

pub const EXIT_PASS: i32 = 0;
pub const EXIT_FAIL: i32 = 1;
pub const EXIT_INVALID: i32 = 2;
pub const EXIT_SOLVER: i32 = 3;

/// Environment variable holding the worker thread count.
pub const THREADS_VAR: &str = "BOUSSINESQ_THREADS";

#[derive(Debug, thiserror::Error)]
pub enum RunError {
    #[error("invalid config:\n  {}", .0.join("\n  "))]
    Invalid(Vec<String>),
    #[error("solver failure: {0}")]
    Solver(#[from] boussinesq::Error),
    #[error("cannot write output: {0}")]
    Io(#[from] std::io::Error),
}

impl RunError {
    pub fn exit_code(&self) -> i32 {
        match self {
            RunError::Invalid(_) => EXIT_INVALID,
            RunError::Solver(_) | RunError::Io(_) => EXIT_SOLVER,
        }
    }
}

/// Reads and parses a config file; parse failures count as invalid config.
pub fn load_config(path: &Path) -> Result<(ExperimentConfig, String), RunError> {
    let text = std::fs::read_to_string(path).map_err(|e| RunError::Invalid(vec![format!("{}: {e}", path.display())]))?;
    let cfg = ExperimentConfig::parse(&text).map_err(|e| RunError::Invalid(vec![e.to_string()]))?;
    Ok((cfg, text))
}

pub fn config_hash(text: &str) -> String {
    format!("{:x}", Sha256::digest(text.as_bytes()))
}

/// Validates, runs and writes every artifact. Returns the exit code of a
/// completed run; output paths are resolved against `base`.
pub fn run(cfg: &ExperimentConfig, text: &str, base: &Path) -> Result<i32, RunError> {
    let violations = cfg.validate();
    if !violations.is_empty() {
        return Err(RunError::Invalid(violations));
    }
    let dir = base.join(&cfg.output);
    let start = Instant::now();
    let (rows, report) = experiments::run_experiment(cfg)?;
    let code = if report.pass { EXIT_PASS } else { EXIT_FAIL };
    write_artifacts(&dir, &rows, &report)?;
    write_manifest(
        &dir,
        &Manifest {
            kind: cfg.kind.name().into(),
            config_sha256: config_hash(text),
            seed: cfg.seed,
            version: env!("CARGO_PKG_VERSION"),
            threads: rayon::current_num_threads(),
            wall_seconds: start.elapsed().as_secs_f64(),
            exit_code: code,
        },
    )?;
    Ok(code)
}
