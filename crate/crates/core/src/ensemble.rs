//! Diversity generation: train |I| x T classifiers, one per (inducer,
//! bootstrap sample) pair, and collect their predictions on the validation
//! set.
//!
//! Each classifier's bootstrap draw and training seed derive from the
//! config seed and its (inducer, sample) position alone, so ensembles with
//! a smaller sample count are literal prefixes of larger ones and training
//! can run in parallel without affecting results.

use std::path::Path;

use rand::Rng;
use rand_chacha::ChaCha12Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::data::ModuleRecord;
use crate::error::{Error, Result};
use crate::inducers::{self, Classifier, InducerSpec};
use crate::seed;

const SAMPLE_STREAM: u64 = 1;
const TRAIN_STREAM: u64 = 2;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EnsembleConfig {
    /// Ordered inducer battery; the ensemble holds inducers x samples
    /// classifiers.
    #[serde(default = "InducerSpec::default_six")]
    pub inducers: Vec<InducerSpec>,
    /// T, the bootstrap samples drawn per inducer.
    #[serde(default = "default_samples_per_inducer")]
    pub samples_per_inducer: usize,
    /// Bootstrap sample size k; defaults to the training-set size.
    #[serde(default)]
    pub sample_size: Option<usize>,
    #[serde(default)]
    pub seed: u64,
}

fn default_samples_per_inducer() -> usize {
    10
}

impl Default for EnsembleConfig {
    fn default() -> Self {
        EnsembleConfig {
            inducers: InducerSpec::default_six(),
            samples_per_inducer: default_samples_per_inducer(),
            sample_size: None,
            seed: 0,
        }
    }
}

impl EnsembleConfig {
    pub fn validate(&self) -> Result<()> {
        if self.inducers.is_empty() {
            return Err(Error::InvalidParameter(
                "ensemble needs at least one inducer".to_string(),
            ));
        }
        if self.samples_per_inducer < 1 {
            return Err(Error::InvalidParameter(
                "samples_per_inducer must be at least 1".to_string(),
            ));
        }
        if self.sample_size == Some(0) {
            return Err(Error::InvalidParameter(
                "sample_size must be at least 1".to_string(),
            ));
        }
        Ok(())
    }

    pub fn ensemble_size(&self) -> usize {
        self.inducers.len() * self.samples_per_inducer
    }
}

/// Draws exactly `k` records uniformly with replacement.
pub fn bootstrap_sample(
    source: &[ModuleRecord],
    k: usize,
    rng: &mut ChaCha12Rng,
) -> Result<Vec<ModuleRecord>> {
    if source.is_empty() {
        return Err(Error::EmptySample {
            context: "bootstrap from an empty training set".to_string(),
        });
    }
    if k < 1 {
        return Err(Error::InvalidParameter(
            "bootstrap sample size must be at least 1".to_string(),
        ));
    }
    Ok((0..k)
        .map(|_| source[rng.gen_range(0..source.len())].clone())
        .collect())
}

/// The trained classifier matrix C[inducer][sample].
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EnsembleModel {
    classifiers: Vec<Vec<Classifier>>,
    config: EnsembleConfig,
}

const ARTIFACT_FORMAT: &str = "hiel-ensemble";
const ARTIFACT_VERSION: u32 = 1;

#[derive(Serialize, Deserialize)]
struct Artifact {
    format: String,
    version: u32,
    model: EnsembleModel,
}

impl EnsembleModel {
    pub fn config(&self) -> &EnsembleConfig {
        &self.config
    }

    pub fn n_inducers(&self) -> usize {
        self.classifiers.len()
    }

    pub fn samples_per_inducer(&self) -> usize {
        self.classifiers.first().map_or(0, Vec::len)
    }

    pub fn len(&self) -> usize {
        self.classifiers.iter().map(Vec::len).sum()
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    pub fn classifier(&self, inducer: usize, sample: usize) -> &Classifier {
        &self.classifiers[inducer][sample]
    }

    /// Experts flattened in (inducer, sample) row-major order.
    pub fn experts(&self) -> impl Iterator<Item = &Classifier> {
        self.classifiers.iter().flatten()
    }

    /// Versioned self-describing artifact; loading an artifact written by
    /// this version reproduces the model exactly.
    pub fn save(&self, path: &Path) -> Result<()> {
        let artifact = Artifact {
            format: ARTIFACT_FORMAT.to_string(),
            version: ARTIFACT_VERSION,
            model: self.clone(),
        };
        let json = serde_json::to_string(&artifact)?;
        std::fs::write(path, json)?;
        Ok(())
    }

    pub fn load(path: &Path) -> Result<EnsembleModel> {
        let text = std::fs::read_to_string(path)?;
        let artifact: Artifact = serde_json::from_str(&text)?;
        if artifact.format != ARTIFACT_FORMAT {
            return Err(Error::ModelFormat(format!(
                "expected {ARTIFACT_FORMAT}, found {}",
                artifact.format
            )));
        }
        if artifact.version != ARTIFACT_VERSION {
            return Err(Error::ModelFormat(format!(
                "unsupported version {}",
                artifact.version
            )));
        }
        Ok(artifact.model)
    }
}

/// Trains the full classifier matrix. Training tasks are independent and
/// run in parallel; results merge by (inducer, sample) index.
pub fn generate_ensemble(
    training_set: &[ModuleRecord],
    config: &EnsembleConfig,
) -> Result<EnsembleModel> {
    config.validate()?;
    if training_set.is_empty() {
        return Err(Error::EmptySample {
            context: "ensemble training set is empty".to_string(),
        });
    }
    let k = config.sample_size.unwrap_or(training_set.len());
    let t = config.samples_per_inducer;

    let trained: Vec<Result<Classifier>> = (0..config.inducers.len() * t)
        .into_par_iter()
        .map(|flat| {
            let inducer = flat / t;
            let sample_idx = flat % t;
            let mut rng = seed::rng(
                config.seed,
                &[SAMPLE_STREAM, inducer as u64, sample_idx as u64],
            );
            let sample = bootstrap_sample(training_set, k, &mut rng)?;
            let train_seed = seed::derive(
                config.seed,
                &[TRAIN_STREAM, inducer as u64, sample_idx as u64],
            );
            inducers::train(&config.inducers[inducer], &sample, train_seed).map_err(|e| {
                Error::EnsembleTraining {
                    inducer,
                    sample: sample_idx,
                    source: Box::new(e),
                }
            })
        })
        .collect();

    let mut classifiers: Vec<Vec<Classifier>> = vec![Vec::with_capacity(t); config.inducers.len()];
    for (flat, result) in trained.into_iter().enumerate() {
        classifiers[flat / t].push(result?);
    }

    Ok(EnsembleModel {
        classifiers,
        config: config.clone(),
    })
}

/// Per-expert labels and scores on a validation set, plus its true labels.
/// Experts are flattened in (inducer, sample) row-major order.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PredictionMatrix {
    pub labels: Vec<Vec<bool>>,
    pub scores: Vec<Vec<f64>>,
    pub truth: Vec<bool>,
    pub n_inducers: usize,
    pub samples_per_inducer: usize,
}

impl PredictionMatrix {
    /// Synthetic expert streams (bound checks, combiner tests): scores
    /// mirror the labels, one sample per expert.
    pub fn from_labels(labels: Vec<Vec<bool>>, truth: Vec<bool>) -> PredictionMatrix {
        let scores = labels
            .iter()
            .map(|row| row.iter().map(|&b| if b { 1.0 } else { 0.0 }).collect())
            .collect();
        PredictionMatrix {
            n_inducers: labels.len(),
            samples_per_inducer: 1,
            labels,
            scores,
            truth,
        }
    }

    pub fn expert_count(&self) -> usize {
        self.labels.len()
    }

    pub fn instance_count(&self) -> usize {
        self.truth.len()
    }

    /// Sub-matrix over the given expert rows, in the given order.
    pub fn select(&self, experts: &[usize]) -> PredictionMatrix {
        PredictionMatrix {
            labels: experts.iter().map(|&e| self.labels[e].clone()).collect(),
            scores: experts.iter().map(|&e| self.scores[e].clone()).collect(),
            truth: self.truth.clone(),
            n_inducers: experts.len(),
            samples_per_inducer: 1,
        }
    }
}

/// Fills the prediction matrix for a validation set.
pub fn predict_matrix(model: &EnsembleModel, validation: &[ModuleRecord]) -> Result<PredictionMatrix> {
    if validation.is_empty() {
        return Err(Error::EmptySample {
            context: "prediction over an empty validation set".to_string(),
        });
    }

    let experts: Vec<&Classifier> = model.experts().collect();
    let rows: Vec<Result<(Vec<bool>, Vec<f64>)>> = experts
        .par_iter()
        .map(|classifier| {
            let mut labels = Vec::with_capacity(validation.len());
            let mut scores = Vec::with_capacity(validation.len());
            for module in validation {
                let p = classifier.predict(&module.features)?;
                labels.push(p.label);
                scores.push(p.score);
            }
            Ok((labels, scores))
        })
        .collect();

    let mut labels = Vec::with_capacity(experts.len());
    let mut scores = Vec::with_capacity(experts.len());
    for row in rows {
        let (l, s) = row?;
        labels.push(l);
        scores.push(s);
    }

    Ok(PredictionMatrix {
        labels,
        scores,
        truth: validation.iter().map(|m| m.label).collect(),
        n_inducers: model.n_inducers(),
        samples_per_inducer: model.samples_per_inducer(),
    })
}

/// Expert rows composing a classifier set of the requested size: sizes
/// divisible by the inducer count take the same sample prefix from every
/// inducer (the size-30 set of a 6x10 ensemble is its T=5 sub-ensemble),
/// anything else takes the first rows in flat row-major order.
pub fn select_expert_indices(
    n_inducers: usize,
    samples_per_inducer: usize,
    size: usize,
) -> Result<Vec<usize>> {
    let total = n_inducers * samples_per_inducer;
    if size < 1 || size > total {
        return Err(Error::InvalidParameter(format!(
            "classifier set size {size} outside 1..={total}"
        )));
    }
    if size % n_inducers == 0 {
        let per_inducer = size / n_inducers;
        Ok((0..n_inducers)
            .flat_map(|j| (0..per_inducer).map(move |t| j * samples_per_inducer + t))
            .collect())
    } else {
        Ok((0..size).collect())
    }
}
