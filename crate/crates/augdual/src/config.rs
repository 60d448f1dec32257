//! Experiment configuration files (JSON, one experiment per file).

use std::path::{Path, PathBuf};

use serde::de::DeserializeOwned;
use serde::{Deserialize, Serialize};

use crate::error::{CliError, CliResult};
use crate::instance::InstanceSpec;

/// Where τ comes from: `"heuristic"` or `{"value": 12.5}`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum TauSource {
    Heuristic,
    Value(f64),
}

fn default_max_iter() -> usize {
    10_000
}

fn default_primal_tol() -> f64 {
    1e-8
}

fn yes() -> bool {
    true
}

/// Relative paths are resolved against the directory of the config file.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ExperimentConfig {
    /// Generate the instance in memory...
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub instance: Option<InstanceSpec>,
    /// ...or load a stored one (directory or its `instance.json`).
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub instance_path: Option<PathBuf>,
    pub tau: TauSource,
    /// Only for `aug_l1`; defaults to `τ`.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub mu: Option<f64>,
    /// Defaults to `μ / (τ (1.01·‖A‖_est)²)`.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub step_size: Option<f64>,
    #[serde(default = "default_max_iter")]
    pub max_iter: usize,
    #[serde(default = "default_primal_tol")]
    pub primal_tol: f64,
    #[serde(default)]
    pub accelerated: bool,
    #[serde(default = "yes")]
    pub restart: bool,
    /// Dual start taken from the `y` of a solution file; requires
    /// `warm_start` when nonzero.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub y0_path: Option<PathBuf>,
    #[serde(default)]
    pub warm_start: bool,
    pub trace_path: PathBuf,
    pub report_path: PathBuf,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub solution_path: Option<PathBuf>,
    /// Record elapsed time in the report. Off by default so that repeated
    /// runs produce identical reports.
    #[serde(default)]
    pub wall_clock: bool,
}

impl ExperimentConfig {
    pub fn validate(&self) -> CliResult<()> {
        match (&self.instance, &self.instance_path) {
            (Some(_), Some(_)) => {
                return Err(CliError::Config(
                    "give either `instance` or `instance_path`, not both".into(),
                ))
            }
            (None, None) => return Err(CliError::Config("missing `instance` or `instance_path`".into())),
            (Some(spec), None) => spec.validate()?,
            (None, Some(_)) => {}
        }
        if let TauSource::Value(t) = self.tau {
            if !(t > 0.0 && t.is_finite()) {
                return Err(CliError::Config(format!("field `tau`: value {t} must be positive")));
            }
        }
        if let Some(mu) = self.mu {
            if !(mu > 0.0 && mu.is_finite()) {
                return Err(CliError::Config(format!("field `mu`: {mu} must be positive")));
            }
        }
        if !(self.primal_tol > 0.0) {
            return Err(CliError::Config("field `primal_tol` must be positive".into()));
        }
        if self.max_iter == 0 {
            return Err(CliError::Config("field `max_iter` must be at least 1".into()));
        }
        Ok(())
    }

    /// Makes every relative path absolute with respect to `base`.
    pub fn resolve_paths(mut self, base: &Path) -> Self {
        let fix = |p: &mut PathBuf| {
            if p.is_relative() {
                *p = base.join(&*p);
            }
        };
        if let Some(p) = self.instance_path.as_mut() {
            fix(p);
        }
        if let Some(p) = self.y0_path.as_mut() {
            fix(p);
        }
        if let Some(p) = self.solution_path.as_mut() {
            fix(p);
        }
        fix(&mut self.trace_path);
        fix(&mut self.report_path);
        self
    }
}

/// Deserializes JSON, naming the offending field path and line/column.
pub fn parse_json<T: DeserializeOwned>(text: &str, path: &Path) -> CliResult<T> {
    let de = &mut serde_json::Deserializer::from_str(text);
    serde_path_to_error::deserialize(de).map_err(|e| {
        let field = e.path().to_string();
        let loc = if field == "." {
            String::new()
        } else {
            format!(" field `{field}`:")
        };
        CliError::Config(format!("{}:{loc} {}", path.display(), e.inner()))
    })
}

pub fn load_config(path: &Path) -> CliResult<ExperimentConfig> {
    let text = std::fs::read_to_string(path).map_err(|e| CliError::io(path, e))?;
    let cfg: ExperimentConfig = parse_json(&text, path)?;
    let base = path.parent().unwrap_or(Path::new(""));
    let cfg = cfg.resolve_paths(base);
    cfg.validate()?;
    Ok(cfg)
}

pub fn load_instance_spec(path: &Path) -> CliResult<InstanceSpec> {
    let text = std::fs::read_to_string(path).map_err(|e| CliError::io(path, e))?;
    let spec: InstanceSpec = parse_json(&text, path)?;
    spec.validate()?;
    Ok(spec)
}
