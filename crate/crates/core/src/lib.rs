//! Cross-project defect prediction toolkit.
//!
//! The pipeline: load per-release defect datasets ([`data`]), train a bag of
//! heterogeneous classifiers on bootstrap samples of the augmented source
//! projects ([`inducers`], [`ensemble`]), combine the per-expert predictions
//! with probabilistic weighted majority voting ([`pwmv`]), and score the
//! outcome with both traditional and project-level cost measures
//! ([`metrics`]), plus nonparametric comparison machinery ([`stats`]).

pub mod data;
pub mod ensemble;
pub mod error;
pub mod inducers;
pub mod metrics;
pub mod pwmv;
pub mod seed;
pub mod stats;
pub mod synthetic;

pub use data::{ModuleRecord, ProjectRelease, Repository, SchemaConfig, SplitPair};
pub use ensemble::{EnsembleConfig, EnsembleModel, PredictionMatrix};
pub use error::{Error, Result};
pub use inducers::{Classifier, InducerKind, InducerSpec, Prediction};
pub use metrics::{ConfusionMatrix, CostConfig, CostReport};
pub use pwmv::{CombinedPrediction, PwmvConfig, PwmvMode, PwmvOutcome, PwmvState};
pub use stats::{CliffsDelta, ComparisonRow, EffectCategory, WilcoxonResult};
