//! Per-release defect datasets, metric-schema alignment across projects, and
//! the leave-one-target-project-out split.
//!
//! Input files are header-labeled, comma-separated, UTF-8 CSVs with one row
//! per module. A [`SchemaConfig`] names the label column (a defect count,
//! binarized at count > 0), the lines-of-code column (kept as cost metadata
//! even when it also serves as a feature), identifier columns, and the
//! feature columns. Rows with missing or unparseable cells fail the load
//! with the row index; nothing is imputed.

use std::collections::HashSet;
use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// One software module: metric vector plus cost metadata and defect label.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ModuleRecord {
    pub id: String,
    /// Real-valued metrics in `metric_names` order of the owning release.
    pub features: Vec<f64>,
    /// Lines of code; used as a feature when the schema includes it and
    /// always as cost metadata.
    pub loc: u64,
    /// true = defective, false = clean.
    pub label: bool,
}

/// Column selection: an explicit list, or every non-identifier numeric
/// column left after removing the label and exclusions.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum FeatureColumns {
    Named(Vec<String>),
    Keyword(String),
}

impl Default for FeatureColumns {
    fn default() -> Self {
        FeatureColumns::Keyword("auto".to_string())
    }
}

impl FeatureColumns {
    fn is_auto(&self) -> Result<bool> {
        match self {
            FeatureColumns::Named(_) => Ok(false),
            FeatureColumns::Keyword(word) if word == "auto" => Ok(true),
            FeatureColumns::Keyword(other) => Err(Error::InvalidParameter(format!(
                "feature_columns must be a list or \"auto\", got \"{other}\""
            ))),
        }
    }
}

/// Maps CSV columns onto the module record.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SchemaConfig {
    pub label_column: String,
    pub loc_column: String,
    #[serde(default)]
    pub id_columns: Vec<String>,
    #[serde(default)]
    pub feature_columns: FeatureColumns,
    /// Columns dropped outright (e.g. severity indicators).
    #[serde(default)]
    pub exclusions: Vec<String>,
}

impl SchemaConfig {
    pub fn from_json_file(path: &Path) -> Result<SchemaConfig> {
        let text = std::fs::read_to_string(path)?;
        Ok(serde_json::from_str(&text)?)
    }
}

/// One released version of a project.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ProjectRelease {
    pub project_name: String,
    pub release_id: String,
    pub metric_names: Vec<String>,
    pub modules: Vec<ModuleRecord>,
}

impl ProjectRelease {
    pub fn defect_count(&self) -> usize {
        self.modules.iter().filter(|m| m.label).count()
    }

    pub fn percent_defects(&self) -> f64 {
        100.0 * self.defect_count() as f64 / self.modules.len() as f64
    }

    pub fn total_loc(&self) -> u64 {
        self.modules.iter().map(|m| m.loc).sum()
    }

    /// `project-release`, the key used in reports and baseline files.
    pub fn target_id(&self) -> String {
        format!("{}-{}", self.project_name, self.release_id)
    }
}

/// A collection of releases projected onto one shared metric schema.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Repository {
    pub name: String,
    pub releases: Vec<ProjectRelease>,
    /// Ordered metric intersection used for training; every release's
    /// feature vectors follow exactly this order.
    pub aligned_metrics: Vec<String>,
}

impl Repository {
    pub fn find_release(&self, project: &str, release: &str) -> Option<&ProjectRelease> {
        self.releases
            .iter()
            .find(|r| r.project_name == project && r.release_id == release)
    }
}

/// Cross-project train/test split for one target release.
#[derive(Debug, Clone, PartialEq)]
pub struct SplitPair {
    /// Augmented modules of every project other than the target's.
    pub training_set: Vec<ModuleRecord>,
    /// Exactly the modules of the target release.
    pub validation_set: Vec<ModuleRecord>,
    pub target: (String, String),
    /// (project, release) of every release contributing to the training set.
    pub source_releases: Vec<(String, String)>,
}

/// Loads one release from a CSV file.
///
/// The label column is binarized (count > 0 -> defective). Identifier
/// columns are joined into the module id and never become features. A file
/// with a header but no rows is rejected as an empty release.
pub fn load_project_csv(
    path: &Path,
    schema: &SchemaConfig,
    project_name: &str,
    release_id: &str,
) -> Result<ProjectRelease> {
    let display = path.display().to_string();
    let mut reader = csv::ReaderBuilder::new().has_headers(true).from_path(path)?;
    let headers: Vec<String> = reader.headers()?.iter().map(str::to_string).collect();

    let find = |column: &str| -> Result<usize> {
        headers
            .iter()
            .position(|h| h == column)
            .ok_or_else(|| Error::MissingColumn {
                column: column.to_string(),
                path: display.clone(),
            })
    };

    let label_idx = find(&schema.label_column)?;
    let loc_idx = find(&schema.loc_column)?;
    let id_idxs: Vec<usize> = schema
        .id_columns
        .iter()
        .map(|c| find(c))
        .collect::<Result<_>>()?;

    let metric_names: Vec<String> = if schema.feature_columns.is_auto()? {
        let dropped: HashSet<&str> = schema
            .id_columns
            .iter()
            .chain(schema.exclusions.iter())
            .chain(std::iter::once(&schema.label_column))
            .map(String::as_str)
            .collect();
        headers
            .iter()
            .filter(|h| !dropped.contains(h.as_str()))
            .cloned()
            .collect()
    } else {
        match &schema.feature_columns {
            FeatureColumns::Named(names) => names.clone(),
            FeatureColumns::Keyword(_) => unreachable!("is_auto returned false"),
        }
    };
    if metric_names.is_empty() {
        return Err(Error::InvalidParameter(format!(
            "schema leaves no feature columns for {display}"
        )));
    }
    let metric_idxs: Vec<usize> = metric_names
        .iter()
        .map(|c| find(c))
        .collect::<Result<_>>()?;

    let parse_cell = |row: usize, column: &str, raw: &str| -> Result<f64> {
        let trimmed = raw.trim();
        if trimmed.is_empty() {
            return Err(Error::RowParse {
                path: display.clone(),
                row,
                column: column.to_string(),
                reason: "missing value".to_string(),
            });
        }
        trimmed.parse::<f64>().map_err(|e| Error::RowParse {
            path: display.clone(),
            row,
            column: column.to_string(),
            reason: e.to_string(),
        })
    };

    let mut modules = Vec::new();
    for (i, record) in reader.records().enumerate() {
        let record = record?;
        let row = i + 1;

        let mut features = Vec::with_capacity(metric_idxs.len());
        for (&idx, name) in metric_idxs.iter().zip(&metric_names) {
            features.push(parse_cell(row, name, record.get(idx).unwrap_or(""))?);
        }

        let label_count = parse_cell(row, &schema.label_column, record.get(label_idx).unwrap_or(""))?;
        let loc_raw = parse_cell(row, &schema.loc_column, record.get(loc_idx).unwrap_or(""))?;
        if !(loc_raw >= 0.0) || loc_raw.fract() != 0.0 {
            return Err(Error::RowParse {
                path: display.clone(),
                row,
                column: schema.loc_column.clone(),
                reason: format!("lines of code must be a nonnegative integer, got {loc_raw}"),
            });
        }

        let id = if id_idxs.is_empty() {
            row.to_string()
        } else {
            id_idxs
                .iter()
                .map(|&idx| record.get(idx).unwrap_or("").trim().to_string())
                .collect::<Vec<_>>()
                .join(":")
        };

        modules.push(ModuleRecord {
            id,
            features,
            loc: loc_raw as u64,
            label: label_count > 0.0,
        });
    }

    if modules.is_empty() {
        return Err(Error::EmptyRelease { path: display });
    }

    Ok(ProjectRelease {
        project_name: project_name.to_string(),
        release_id: release_id.to_string(),
        metric_names,
        modules,
    })
}

/// Projects every release onto the ordered intersection of their metric
/// names, minus `exclusions`. Order follows the first release's schema.
pub fn align_common_metrics(
    name: &str,
    releases: Vec<ProjectRelease>,
    exclusions: &[String],
) -> Result<Repository> {
    if releases.is_empty() {
        return Err(Error::InvalidParameter(
            "align_common_metrics requires at least one release".to_string(),
        ));
    }

    let mut common: Vec<String> = releases[0]
        .metric_names
        .iter()
        .filter(|m| !exclusions.contains(m))
        .cloned()
        .collect();
    for release in &releases[1..] {
        let present: HashSet<&str> = release.metric_names.iter().map(String::as_str).collect();
        common.retain(|m| present.contains(m.as_str()));
    }
    if common.is_empty() {
        return Err(Error::EmptyMetricIntersection);
    }

    let mut aligned_releases = Vec::with_capacity(releases.len());
    for release in releases {
        let positions: Vec<usize> = common
            .iter()
            .map(|m| {
                release
                    .metric_names
                    .iter()
                    .position(|n| n == m)
                    .expect("metric present by construction")
            })
            .collect();
        let modules = release
            .modules
            .into_iter()
            .map(|m| ModuleRecord {
                features: positions.iter().map(|&p| m.features[p]).collect(),
                ..m
            })
            .collect();
        aligned_releases.push(ProjectRelease {
            metric_names: common.clone(),
            modules,
            ..release
        });
    }

    Ok(Repository {
        name: name.to_string(),
        releases: aligned_releases,
        aligned_metrics: common,
    })
}

/// Builds the leave-one-target-project-out split: the training set augments
/// every release of every *other* project; the validation set is exactly
/// the target release.
pub fn build_cross_project_split(
    repo: &Repository,
    target_project: &str,
    target_release: &str,
) -> Result<SplitPair> {
    let target = repo
        .find_release(target_project, target_release)
        .ok_or_else(|| Error::UnknownTarget {
            project: target_project.to_string(),
            release: target_release.to_string(),
        })?;

    let mut training_set = Vec::new();
    let mut source_releases = Vec::new();
    for release in &repo.releases {
        if release.project_name == target_project {
            continue;
        }
        training_set.extend(release.modules.iter().cloned());
        source_releases.push((release.project_name.clone(), release.release_id.clone()));
    }
    if training_set.is_empty() {
        return Err(Error::NoSourceProjects {
            project: target_project.to_string(),
        });
    }

    Ok(SplitPair {
        training_set,
        validation_set: target.modules.clone(),
        target: (target_project.to_string(), target_release.to_string()),
        source_releases,
    })
}
