//! Experiment runner: configuration, orchestration and result persistence.

pub mod config;
pub mod experiments;
pub mod output;

use std::path::{Path, PathBuf};

use anyhow::Result;

use config::{Experiment, RunConfig};
use output::{now, RunDir, RunRecord};

/// Output directory: `--out` as given, otherwise `<root>/<experiment>` with the root taken from
/// `MAGPL_OUT`, then the config, then `runs`.
pub fn resolve_output(config: &RunConfig, out: Option<&Path>, env_root: Option<PathBuf>) -> PathBuf {
    if let Some(o) = out {
        return o.to_owned();
    }
    let root = env_root
        .or_else(|| config.output_dir.clone())
        .unwrap_or_else(|| PathBuf::from("runs"));
    root.join(config.experiment.kind().name())
}

pub fn threads() -> usize {
    #[cfg(feature = "parallel")]
    {
        rayon::current_num_threads()
    }
    #[cfg(not(feature = "parallel"))]
    {
        1
    }
}

/// Runs one experiment and writes `config.json`, its tables and `run_record.json` into `dir`.
pub fn run(config: &RunConfig, source: Option<&Path>, dir: PathBuf) -> Result<RunRecord> {
    let started_at = now();
    let mut rd = RunDir::create(dir)?;
    rd.text("config.json", &config::to_json(config))?;
    let outcome = match &config.experiment {
        Experiment::IneqSweep(c) => experiments::ineq_sweep(c, config.seed, &mut rd)?,
        Experiment::InstantonRates(c) => experiments::instanton_rates(c, &mut rd)?,
        Experiment::Certify(c) => experiments::certify(c, &mut rd)?,
        Experiment::Solve(c) => experiments::solve(c, &mut rd)?,
        Experiment::Geometry(c) => experiments::geometry(c, config.seed, &mut rd)?,
    };
    let mut artifacts = rd.artifacts.clone();
    artifacts.push("run_record.json".into());
    let record = RunRecord {
        schema_version: config::SCHEMA_VERSION,
        experiment: config.experiment.kind().name().into(),
        config: config.clone(),
        config_source: source.map(Path::to_owned),
        started_at,
        finished_at: now(),
        threads: threads(),
        gauge_reduced: outcome.gauge_reduced,
        artifacts,
        summary: outcome.summary,
        passed: outcome.checks.iter().all(|c| c.passed),
        checks: outcome.checks,
    };
    rd.json("run_record.json", &record)?;
    Ok(record)
}
