//! Experiment driver for the quantum-walk limit checks: config resolution,
//! dispatch, CSV/plot-data output and the JSON run summary.

pub mod config;
pub mod error;
pub mod experiments;
pub mod output;

use std::collections::BTreeMap;
use std::fs;
use std::time::Instant;

use serde::Serialize;
use serde_json::Value;

pub use config::{ConfigSources, Experiment, ExperimentConfig, Params};
pub use error::{CliError, Result};

#[derive(Clone, Debug, Serialize)]
pub struct RunSummary {
    pub experiment: String,
    pub params: Params,
    pub metrics: BTreeMap<String, Value>,
    pub pass: bool,
    /// Seconds.
    pub wall_time: f64,
    pub seed: u64,
}

pub fn resolve(experiment: Experiment, src: &ConfigSources) -> Result<ExperimentConfig> {
    ExperimentConfig::resolve(experiment, &experiments::param_specs(experiment), src)
}

/// Runs one experiment, writing its data files and `summary.json` into the
/// output directory.
pub fn run(cfg: &ExperimentConfig) -> Result<RunSummary> {
    fs::create_dir_all(&cfg.output_dir).map_err(|e| CliError::io(&cfg.output_dir, e))?;
    let start = Instant::now();
    let outcome = experiments::execute(cfg)?;
    let summary = RunSummary {
        experiment: cfg.experiment.name().to_string(),
        params: cfg.params.clone(),
        metrics: outcome.metrics,
        pass: outcome.pass,
        wall_time: start.elapsed().as_secs_f64(),
        seed: cfg.seed,
    };
    let path = cfg.output_dir.join("summary.json");
    let mut text = serde_json::to_string_pretty(&summary)?;
    text.push('\n');
    fs::write(&path, text).map_err(|e| CliError::io(&path, e))?;
    Ok(summary)
}

/// Text printed by `--describe`.
pub fn describe(experiment: Experiment) -> String {
    let mut s = format!("{}\n\n", experiment.name());
    for line in textwrap(experiments::describe(experiment), 78) {
        s.push_str(&format!("  {line}\n"));
    }
    s.push_str("\nparameters (default in brackets, * = required):\n");
    let specs = experiments::param_specs(experiment);
    let width = specs.iter().map(|p| p.key.len()).max().unwrap_or(0);
    for p in specs {
        let d = p.default.map_or("*".to_string(), |d| format!("[{d}]"));
        s.push_str(&format!("  {:width$}  {:12}  {}\n", p.key, d, p.help));
    }
    s
}

fn textwrap(text: &str, width: usize) -> Vec<String> {
    let mut lines = Vec::new();
    let mut cur = String::new();
    for w in text.split_whitespace() {
        if !cur.is_empty() && cur.len() + 1 + w.len() > width {
            lines.push(std::mem::take(&mut cur));
        }
        if !cur.is_empty() {
            cur.push(' ');
        }
        cur.push_str(w);
    }
    if !cur.is_empty() {
        lines.push(cur);
    }
    lines
}
