//! Six from-scratch base classifiers behind one train/predict interface.
//!
//! Each classifier standardizes features with statistics fitted on its own
//! training sample (z-score; zero-variance features keep their value), and
//! degenerates to a constant predictor when the sample carries a single
//! class, which bootstrap draws on imbalanced releases can produce.

mod knn;
mod logistic;
mod naive_bayes;
mod neural;
mod scaler;
mod svm;
mod tree;

pub use knn::KnnParams;
pub use logistic::LogisticParams;
pub use naive_bayes::NaiveBayesParams;
pub use neural::{NeuralParams, Topology};
pub use scaler::Scaler;
pub use svm::SvmParams;
pub use tree::{TreeNode, TreeParams};

use serde::{Deserialize, Serialize};

use crate::data::ModuleRecord;
use crate::error::{Error, Result};

/// Classification algorithm plus its hyperparameters.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "inducer", rename_all = "snake_case")]
pub enum InducerKind {
    LogisticRegression(LogisticParams),
    KNearestNeighbours(KnnParams),
    LinearSvm(SvmParams),
    NaiveBayes(NaiveBayesParams),
    NeuralNetwork(NeuralParams),
    DecisionTree(TreeParams),
}

impl InducerKind {
    pub fn name(&self) -> &'static str {
        match self {
            InducerKind::LogisticRegression(_) => "logistic_regression",
            InducerKind::KNearestNeighbours(_) => "k_nearest_neighbours",
            InducerKind::LinearSvm(_) => "linear_svm",
            InducerKind::NaiveBayes(_) => "naive_bayes",
            InducerKind::NeuralNetwork(_) => "neural_network",
            InducerKind::DecisionTree(_) => "decision_tree",
        }
    }
}

/// One inducer as configured for training.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct InducerSpec {
    #[serde(flatten)]
    pub kind: InducerKind,
    #[serde(default = "default_standardize")]
    pub standardize: bool,
}

fn default_standardize() -> bool {
    true
}

impl InducerSpec {
    pub fn new(kind: InducerKind) -> InducerSpec {
        InducerSpec {
            kind,
            standardize: true,
        }
    }

    /// The default hybrid-inducer battery, in training order.
    pub fn default_six() -> Vec<InducerSpec> {
        vec![
            InducerSpec::new(InducerKind::LogisticRegression(LogisticParams::default())),
            InducerSpec::new(InducerKind::KNearestNeighbours(KnnParams::default())),
            InducerSpec::new(InducerKind::LinearSvm(SvmParams::default())),
            InducerSpec::new(InducerKind::NaiveBayes(NaiveBayesParams::default())),
            InducerSpec::new(InducerKind::NeuralNetwork(NeuralParams::default())),
            InducerSpec::new(InducerKind::DecisionTree(TreeParams::default())),
        ]
    }
}

/// Label with the defective-class confidence behind it.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Prediction {
    pub label: bool,
    /// In [0, 1]; the label is defective exactly when score >= 0.5.
    pub score: f64,
}

impl Prediction {
    fn from_score(score: f64) -> Prediction {
        Prediction {
            label: score >= 0.5,
            score,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
enum FittedState {
    /// Single-class training sample: predict that class everywhere.
    Constant { label: bool },
    Logistic(logistic::Model),
    Knn(knn::Model),
    Svm(svm::Model),
    NaiveBayes(naive_bayes::Model),
    Neural(neural::Model),
    Tree(tree::Model),
}

/// A trained classifier; immutable, prediction is a pure function.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Classifier {
    spec: InducerSpec,
    scaler: Scaler,
    state: FittedState,
}

/// Trains one classifier on a sample. Deterministic for a fixed
/// (spec, sample, seed); the seed drives all stochastic initialization.
pub fn train(spec: &InducerSpec, sample: &[ModuleRecord], seed: u64) -> Result<Classifier> {
    if sample.is_empty() {
        return Err(Error::EmptySample {
            context: "training sample has no modules".to_string(),
        });
    }
    let dim = sample[0].features.len();
    if dim == 0 {
        return Err(Error::EmptySample {
            context: "training sample has no features".to_string(),
        });
    }
    for m in sample {
        if m.features.len() != dim {
            return Err(Error::DimensionMismatch {
                expected: dim,
                actual: m.features.len(),
            });
        }
    }

    let scaler = if spec.standardize {
        Scaler::fit(sample.iter().map(|m| m.features.as_slice()))
    } else {
        Scaler::identity(dim)
    };
    let xs: Vec<Vec<f64>> = sample.iter().map(|m| scaler.transform(&m.features)).collect();
    let ys: Vec<bool> = sample.iter().map(|m| m.label).collect();

    let state = if ys.iter().all(|&y| y == ys[0]) {
        FittedState::Constant { label: ys[0] }
    } else {
        match &spec.kind {
            InducerKind::LogisticRegression(p) => FittedState::Logistic(logistic::fit(&xs, &ys, p)),
            InducerKind::KNearestNeighbours(p) => FittedState::Knn(knn::fit(&xs, &ys, p)),
            InducerKind::LinearSvm(p) => FittedState::Svm(svm::fit(&xs, &ys, p)),
            InducerKind::NaiveBayes(p) => FittedState::NaiveBayes(naive_bayes::fit(&xs, &ys, p)),
            InducerKind::NeuralNetwork(p) => FittedState::Neural(neural::fit(&xs, &ys, p, seed)),
            InducerKind::DecisionTree(p) => FittedState::Tree(tree::fit(&xs, &ys, p)),
        }
    };

    Ok(Classifier {
        spec: spec.clone(),
        scaler,
        state,
    })
}

/// Scores one feature vector; deterministic.
pub fn predict(classifier: &Classifier, features: &[f64]) -> Result<Prediction> {
    if features.len() != classifier.scaler.dim() {
        return Err(Error::DimensionMismatch {
            expected: classifier.scaler.dim(),
            actual: features.len(),
        });
    }
    let x = classifier.scaler.transform(features);
    let score = match &classifier.state {
        FittedState::Constant { label } => {
            if *label {
                1.0
            } else {
                0.0
            }
        }
        FittedState::Logistic(m) => m.score(&x),
        FittedState::Knn(m) => m.score(&x),
        FittedState::Svm(m) => m.score(&x),
        FittedState::NaiveBayes(m) => m.score(&x),
        FittedState::Neural(m) => m.score(&x),
        FittedState::Tree(m) => m.score(&x),
    };
    Ok(Prediction::from_score(score))
}

impl Classifier {
    pub fn spec(&self) -> &InducerSpec {
        &self.spec
    }

    pub fn predict(&self, features: &[f64]) -> Result<Prediction> {
        predict(self, features)
    }

    pub fn is_constant(&self) -> bool {
        matches!(self.state, FittedState::Constant { .. })
    }

    /// Split nodes of a fitted decision tree, for structure checks.
    pub fn tree_nodes(&self) -> Option<&[TreeNode]> {
        match &self.state {
            FittedState::Tree(m) => Some(m.nodes()),
            _ => None,
        }
    }
}

/// Numerically stable logistic function, shared by the margin-based models.
pub(crate) fn sigmoid(z: f64) -> f64 {
    if z >= 0.0 {
        1.0 / (1.0 + (-z).exp())
    } else {
        let e = z.exp();
        e / (1.0 + e)
    }
}
