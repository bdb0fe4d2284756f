//! Flat `key = value` config files with `--param` overrides.
//!
//! Blank lines and `#` comments are ignored. Besides experiment parameters a
//! file may set `experiment`, `seed` and `output_dir`.

use std::collections::BTreeMap;
use std::path::PathBuf;

use clap::ValueEnum;
use serde::Serialize;

use crate::error::{CliError, Result};

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, ValueEnum, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum Experiment {
    Simulate,
    GeneratorLimit,
    Divergence,
    BesselCheck,
    DecomposeCheck,
    DiracLimit,
    CtcsLimit,
    DiracType,
    Spectrum,
}

impl Experiment {
    pub fn name(self) -> &'static str {
        match self {
            Experiment::Simulate => "simulate",
            Experiment::GeneratorLimit => "generator-limit",
            Experiment::Divergence => "divergence",
            Experiment::BesselCheck => "bessel-check",
            Experiment::DecomposeCheck => "decompose-check",
            Experiment::DiracLimit => "dirac-limit",
            Experiment::CtcsLimit => "ctcs-limit",
            Experiment::DiracType => "dirac-type",
            Experiment::Spectrum => "spectrum",
        }
    }
}

/// One accepted parameter. `default: None` marks it required.
#[derive(Clone, Copy, Debug)]
pub struct ParamSpec {
    pub key: &'static str,
    pub default: Option<&'static str>,
    pub help: &'static str,
}

pub const fn opt(key: &'static str, default: &'static str, help: &'static str) -> ParamSpec {
    ParamSpec { key, default: Some(default), help }
}

pub const fn req(key: &'static str, help: &'static str) -> ParamSpec {
    ParamSpec { key, default: None, help }
}

const RESERVED: [&str; 3] = ["experiment", "seed", "output_dir"];

pub fn parse_kv(text: &str) -> Result<BTreeMap<String, String>> {
    let mut out = BTreeMap::new();
    for (i, raw) in text.lines().enumerate() {
        let line = raw.split('#').next().unwrap_or("").trim();
        if line.is_empty() {
            continue;
        }
        let (k, v) = line
            .split_once('=')
            .ok_or_else(|| CliError::config(format!("line {}: expected `key = value`", i + 1)))?;
        let (k, v) = (k.trim(), unquote(v.trim()));
        if k.is_empty() {
            return Err(CliError::config(format!("line {}: empty key", i + 1)));
        }
        if out.insert(k.to_string(), v.to_string()).is_some() {
            return Err(CliError::config(format!("line {}: duplicate key `{k}`", i + 1)));
        }
    }
    Ok(out)
}

fn unquote(v: &str) -> &str {
    v.strip_prefix('"').and_then(|s| s.strip_suffix('"')).unwrap_or(v)
}

/// `k=v` from the command line.
pub fn parse_override(s: &str) -> Result<(String, String)> {
    match s.split_once('=') {
        Some((k, v)) if !k.trim().is_empty() => Ok((k.trim().to_string(), v.trim().to_string())),
        _ => Err(CliError::config(format!("--param expects key=value, got `{s}`"))),
    }
}

/// Fully resolved parameters: every accepted key has a value.
#[derive(Clone, Debug, Default, PartialEq, Serialize)]
#[serde(transparent)]
pub struct Params(BTreeMap<String, String>);

impl Params {
    pub fn raw(&self, key: &str) -> Result<&str> {
        self.0
            .get(key)
            .map(String::as_str)
            .ok_or_else(|| CliError::config(format!("unknown parameter `{key}`")))
    }

    pub fn f64(&self, key: &str) -> Result<f64> {
        let v = self.raw(key)?;
        match v.parse::<f64>() {
            Ok(x) if x.is_finite() => Ok(x),
            _ => Err(CliError::config(format!("`{key}` must be a finite number, got `{v}`"))),
        }
    }

    pub fn int<T: std::str::FromStr>(&self, key: &str) -> Result<T> {
        let v = self.raw(key)?;
        v.parse::<T>()
            .map_err(|_| CliError::config(format!("`{key}` must be an integer in range, got `{v}`")))
    }

    pub fn choice<'a>(&self, key: &str, options: &[&'a str]) -> Result<&'a str> {
        let v = self.raw(key)?;
        options
            .iter()
            .find(|o| **o == v)
            .copied()
            .ok_or_else(|| CliError::config(format!("`{key}` must be one of {options:?}, got `{v}`")))
    }

    pub fn iter(&self) -> impl Iterator<Item = (&String, &String)> {
        self.0.iter()
    }
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct ExperimentConfig {
    pub experiment: Experiment,
    pub params: Params,
    pub output_dir: PathBuf,
    pub seed: u64,
}

pub const DEFAULT_SEED: u64 = 0;
pub const DEFAULT_OUT: &str = "qwlimits-out";

/// Inputs before resolution; flags win over the file.
#[derive(Clone, Debug, Default)]
pub struct ConfigSources {
    pub file: Option<String>,
    pub overrides: Vec<String>,
    pub output_dir: Option<PathBuf>,
    pub seed: Option<u64>,
}

impl ExperimentConfig {
    pub fn resolve(experiment: Experiment, specs: &[ParamSpec], src: &ConfigSources) -> Result<Self> {
        let mut given = match &src.file {
            Some(text) => parse_kv(text)?,
            None => BTreeMap::new(),
        };
        for o in &src.overrides {
            let (k, v) = parse_override(o)?;
            if RESERVED.contains(&k.as_str()) {
                return Err(CliError::config(format!("`{k}` has its own flag; not accepted via --param")));
            }
            given.insert(k, v);
        }
        if let Some(e) = given.remove("experiment") {
            if e != experiment.name() {
                return Err(CliError::config(format!(
                    "config is for `{e}` but `{}` was requested",
                    experiment.name()
                )));
            }
        }
        let file_seed = given
            .remove("seed")
            .map(|s| s.parse::<u64>().map_err(|_| CliError::config(format!("seed must be a u64, got `{s}`"))))
            .transpose()?;
        let file_out = given.remove("output_dir").map(PathBuf::from);

        if let Some(k) = given.keys().find(|k| !specs.iter().any(|s| s.key == k.as_str())) {
            return Err(CliError::config(format!("unknown parameter `{k}` for {}", experiment.name())));
        }
        let mut resolved = BTreeMap::new();
        for s in specs {
            let v = match (given.remove(s.key), s.default) {
                (Some(v), _) => v,
                (None, Some(d)) => d.to_string(),
                (None, None) => {
                    return Err(CliError::config(format!(
                        "missing required parameter `{}` for {}",
                        s.key,
                        experiment.name()
                    )))
                }
            };
            resolved.insert(s.key.to_string(), v);
        }
        let params = Params(resolved);
        for s in specs.iter().filter(|s| s.key.ends_with("tol")) {
            let t = params.f64(s.key)?;
            if t <= 0.0 {
                return Err(CliError::config(format!("tolerance `{}` must be > 0, got {t}", s.key)));
            }
        }
        Ok(ExperimentConfig {
            experiment,
            params,
            output_dir: src.output_dir.clone().or(file_out).unwrap_or_else(|| PathBuf::from(DEFAULT_OUT)),
            seed: src.seed.or(file_seed).unwrap_or(DEFAULT_SEED),
        })
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    const SPECS: &[ParamSpec] = &[req("n_sites", ""), opt("dx", "1.0", ""), opt("norm_tol", "1e-10", "")];

    fn src(file: &str, overrides: &[&str]) -> ConfigSources {
        ConfigSources {
            file: Some(file.into()),
            overrides: overrides.iter().map(|s| s.to_string()).collect(),
            ..Default::default()
        }
    }

    #[test]
    fn comments_defaults_and_overrides() {
        let c = ExperimentConfig::resolve(
            Experiment::Simulate,
            SPECS,
            &src("# grid\nn_sites = 64   # even\n\nseed = 7\n", &["dx=0.5"]),
        )
        .unwrap();
        assert_eq!(c.params.int::<usize>("n_sites").unwrap(), 64);
        assert_eq!(c.params.f64("dx").unwrap(), 0.5);
        assert_eq!(c.params.f64("norm_tol").unwrap(), 1e-10);
        assert_eq!(c.seed, 7);
        assert_eq!(c.output_dir, PathBuf::from(DEFAULT_OUT));
    }

    #[test]
    fn flags_win_over_file() {
        let mut s = src("n_sites = 8\ndx = 2\nseed = 1\noutput_dir = a\n", &["dx=3"]);
        s.seed = Some(9);
        s.output_dir = Some("b".into());
        let c = ExperimentConfig::resolve(Experiment::Simulate, SPECS, &s).unwrap();
        assert_eq!(c.params.f64("dx").unwrap(), 3.0);
        assert_eq!(c.seed, 9);
        assert_eq!(c.output_dir, PathBuf::from("b"));
    }

    #[test]
    fn rejects_bad_input() {
        let bad = [
            ("dx = 1", vec![]),
            ("n_sites = 8\nbogus = 1", vec![]),
            ("n_sites = 8\nnorm_tol = 0", vec![]),
            ("n_sites = 8\nnorm_tol = -1e-3", vec![]),
            ("n_sites 8", vec![]),
            ("n_sites = 8\nn_sites = 9", vec![]),
            ("n_sites = 8\nexperiment = spectrum", vec![]),
            ("n_sites = 8", vec!["seed=3"]),
            ("n_sites = 8", vec!["nokey"]),
        ];
        for (file, ov) in bad {
            let r = ExperimentConfig::resolve(Experiment::Simulate, SPECS, &src(file, &ov));
            assert!(matches!(r, Err(CliError::InvalidConfig(_))), "{file:?} {ov:?}");
        }
    }

    #[test]
    fn typed_getters_report_the_key() {
        let c = ExperimentConfig::resolve(Experiment::Simulate, SPECS, &src("n_sites = many\ndx = nan", &[])).unwrap();
        let e = c.params.int::<usize>("n_sites").unwrap_err().to_string();
        assert!(e.contains("n_sites"));
        assert!(c.params.f64("dx").is_err());
    }

    #[test]
    fn quoted_values() {
        let kv = parse_kv("coin = \"hadamard\"\n").unwrap();
        assert_eq!(kv["coin"], "hadamard");
    }
}
