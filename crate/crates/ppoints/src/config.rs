//! Scenario config: a single JSON file that fully determines a run.

use std::fs;
use std::path::{Path, PathBuf};

use ppoints_core::verify::CheckKind;
use ppoints_core::{BasisSpec, EllipticalModel, ModelSpec};
use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

use crate::error::CliError;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Task {
    Simulate,
    Estimate,
    Kmeans,
    ClosedForm,
    Verify,
    Report,
}

impl Task {
    pub fn name(self) -> &'static str {
        match self {
            Task::Simulate => "simulate",
            Task::Estimate => "estimate",
            Task::Kmeans => "kmeans",
            Task::ClosedForm => "closed-form",
            Task::Verify => "verify",
            Task::Report => "report",
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Suite {
    Reference,
}

#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ScenarioConfig {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub task: Option<Task>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub model: Option<ModelSpec>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub n: Option<usize>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub k: Option<usize>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub restarts: Option<usize>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub tol: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub max_iter: Option<usize>,
    /// Samples CSV to read instead of simulating (estimate, kmeans).
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub samples: Option<PathBuf>,
    /// Check names, or `["all"]`.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub checks: Option<Vec<String>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub suite: Option<Suite>,
    /// Evaluation basis for curve exports.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub basis: Option<BasisSpec>,
    /// Verification files summarized by `report`.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub inputs: Option<Vec<PathBuf>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub out: Option<PathBuf>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub seed: Option<u64>,
}

/// A parsed config plus where it came from, for anchored messages.
#[derive(Debug, Clone)]
pub struct LoadedConfig {
    pub config: ScenarioConfig,
    pub path: Option<PathBuf>,
    text: String,
}

impl LoadedConfig {
    pub fn load(path: &Path) -> Result<Self, CliError> {
        let text = fs::read_to_string(path).map_err(|e| CliError::input(path, e))?;
        Self::parse(&text, Some(path))
    }

    pub fn parse(text: &str, path: Option<&Path>) -> Result<Self, CliError> {
        let label = path.map_or_else(|| "<config>".to_string(), |p| p.display().to_string());
        let config: ScenarioConfig = serde_json::from_str(text)
            .map_err(|e| CliError::Schema(format!("{label}:{}:{}: {e}", e.line(), e.column())))?;
        Ok(Self { config, path: path.map(Path::to_path_buf), text: text.to_string() })
    }

    pub fn empty() -> Self {
        Self { config: ScenarioConfig::default(), path: None, text: String::new() }
    }

    /// Schema error pointing at the line where `key` first appears.
    pub fn error_at(&self, key: &str, msg: impl std::fmt::Display) -> CliError {
        let label = self.path.as_ref().map_or_else(|| "<config>".to_string(), |p| p.display().to_string());
        let needle = format!("\"{key}\"");
        match self.text.lines().position(|l| l.contains(&needle)) {
            Some(i) => CliError::Schema(format!("{label}:{}: `{key}`: {msg}", i + 1)),
            None => CliError::Schema(format!("{label}: `{key}`: {msg}")),
        }
    }

    /// Paths in the config are relative to the config file.
    pub fn resolve(&self, p: &Path) -> PathBuf {
        match self.path.as_ref().and_then(|c| c.parent()) {
            Some(dir) if p.is_relative() => dir.join(p),
            _ => p.to_path_buf(),
        }
    }

    pub fn model(&self) -> Result<EllipticalModel, CliError> {
        let Some(spec) = &self.config.model else {
            return Err(self.error_at("model", "a model is required for this task"));
        };
        spec.build().map_err(|e| self.error_at("model", e))
    }

    pub fn require_n(&self) -> Result<usize, CliError> {
        match self.config.n {
            Some(n) if n > 0 => Ok(n),
            Some(_) => Err(self.error_at("n", "must be positive")),
            None => Err(self.error_at("n", "required for this task")),
        }
    }

    pub fn checks(&self) -> Result<Vec<CheckKind>, CliError> {
        let Some(names) = &self.config.checks else {
            return Ok(CheckKind::ALL.to_vec());
        };
        if names.iter().any(|n| n == "all") {
            return Ok(CheckKind::ALL.to_vec());
        }
        names
            .iter()
            .map(|n| CheckKind::parse(n).ok_or_else(|| self.error_at("checks", format!("unknown check {n:?}"))))
            .collect()
    }

    /// `--seed`, then the config seed, then the model seed.
    pub fn effective_seed(&self, flag: Option<u64>) -> u64 {
        flag.or(self.config.seed).or(self.config.model.as_ref().map(|m| m.seed)).unwrap_or(0)
    }

    /// Hash of the effective config. The output directory is excluded so moving
    /// a run does not change its identity.
    pub fn sha256(&self, task: Task, seed: u64) -> String {
        let mut c = self.config.clone();
        c.task = Some(task);
        c.seed = Some(seed);
        c.out = None;
        let bytes = serde_json::to_vec(&c).unwrap_or_default();
        Sha256::digest(&bytes).iter().map(|b| format!("{b:02x}")).collect()
    }
}
