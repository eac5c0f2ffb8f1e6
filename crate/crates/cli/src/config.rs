//! Experiment configuration: one JSON file describes the repository, the
//! pipeline parameters, and any baseline score files, so a run is fully
//! reproducible from the config echo plus the seed.

use std::collections::BTreeMap;
use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};

use hiel_core::data::SchemaConfig;
use hiel_core::ensemble::EnsembleConfig;
use hiel_core::metrics::CostConfig;
use hiel_core::pwmv::PwmvConfig;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ReleaseEntry {
    pub project: String,
    pub release: String,
    pub path: PathBuf,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RepositoryConfig {
    pub name: String,
    pub schema: SchemaConfig,
    /// Metrics dropped during cross-release alignment.
    #[serde(default)]
    pub metric_exclusions: Vec<String>,
    pub releases: Vec<ReleaseEntry>,
}

/// Either every release in the repository or one specific release.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum TargetSelector {
    Keyword(String),
    One { project: String, release: String },
}

impl Default for TargetSelector {
    fn default() -> Self {
        TargetSelector::Keyword("all".to_string())
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ExperimentConfig {
    /// Master seed; every per-target stream derives from it.
    pub seed: u64,
    #[serde(default = "default_output_dir")]
    pub output_dir: PathBuf,
    pub repository: RepositoryConfig,
    #[serde(default)]
    pub target: TargetSelector,
    /// The ensemble seed here is ignored; the runner derives one per
    /// target from the master seed.
    #[serde(default)]
    pub ensemble: EnsembleConfig,
    #[serde(default)]
    pub pwmv: PwmvConfig,
    #[serde(default)]
    pub cost: CostConfig,
    /// model name -> CSV of per-target scores.
    #[serde(default)]
    pub baselines: BTreeMap<String, PathBuf>,
}

fn default_output_dir() -> PathBuf {
    PathBuf::from("out")
}

impl ExperimentConfig {
    pub fn from_json_file(path: &Path) -> anyhow::Result<ExperimentConfig> {
        let text = std::fs::read_to_string(path)
            .map_err(|e| anyhow::anyhow!("cannot read config {}: {e}", path.display()))?;
        let config: ExperimentConfig = serde_json::from_str(&text)
            .map_err(|e| anyhow::anyhow!("invalid config {}: {e}", path.display()))?;
        // file references in the config are relative to the config file
        let base = path.parent().unwrap_or_else(|| Path::new("."));
        Ok(config.rebase(base))
    }

    fn rebase(mut self, base: &Path) -> ExperimentConfig {
        let rebase_one = |p: &mut PathBuf| {
            if p.is_relative() {
                *p = base.join(&*p);
            }
        };
        for entry in &mut self.repository.releases {
            rebase_one(&mut entry.path);
        }
        for path in self.baselines.values_mut() {
            rebase_one(path);
        }
        self
    }

    /// Checks parameter domains and that every referenced file exists.
    pub fn validate(&self) -> anyhow::Result<()> {
        self.ensemble
            .validate()
            .map_err(|e| anyhow::anyhow!("ensemble config: {e}"))?;
        self.pwmv
            .validate()
            .map_err(|e| anyhow::anyhow!("pwmv config: {e}"))?;
        if !(self.cost.delta > 0.0) {
            anyhow::bail!("cost config: delta must be positive");
        }
        if self.repository.releases.is_empty() {
            anyhow::bail!("repository lists no releases");
        }
        for entry in &self.repository.releases {
            if !entry.path.exists() {
                anyhow::bail!(
                    "release {}-{} file not found: {}",
                    entry.project,
                    entry.release,
                    entry.path.display()
                );
            }
        }
        for (model, path) in &self.baselines {
            if !path.exists() {
                anyhow::bail!("baseline '{model}' file not found: {}", path.display());
            }
        }
        if let TargetSelector::Keyword(word) = &self.target {
            if word != "all" {
                anyhow::bail!("target must be \"all\" or {{project, release}}, got \"{word}\"");
            }
        }
        if let TargetSelector::One { project, release } = &self.target {
            let known = self
                .repository
                .releases
                .iter()
                .any(|e| &e.project == project && &e.release == release);
            if !known {
                anyhow::bail!("target {project}-{release} is not a configured release");
            }
        }
        Ok(())
    }

    /// Targets selected by this config, in release-list order.
    pub fn selected_targets(&self) -> Vec<(String, String)> {
        match &self.target {
            TargetSelector::Keyword(_) => self
                .repository
                .releases
                .iter()
                .map(|e| (e.project.clone(), e.release.clone()))
                .collect(),
            TargetSelector::One { project, release } => vec![(project.clone(), release.clone())],
        }
    }
}

/// Parses `project-release` (split on the last dash).
pub fn parse_target_id(id: &str) -> anyhow::Result<(String, String)> {
    match id.rsplit_once('-') {
        Some((project, release)) if !project.is_empty() && !release.is_empty() => {
            Ok((project.to_string(), release.to_string()))
        }
        _ => anyhow::bail!("target must look like <project>-<release>, got \"{id}\""),
    }
}
