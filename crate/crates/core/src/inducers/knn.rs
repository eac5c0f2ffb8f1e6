//! k-nearest neighbours on standardized Euclidean distance.

use serde::{Deserialize, Serialize};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct KnnParams {
    /// Odd by convention so unweighted votes cannot tie.
    #[serde(default = "default_k")]
    pub k: usize,
}

fn default_k() -> usize {
    11
}

impl Default for KnnParams {
    fn default() -> Self {
        KnnParams { k: default_k() }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Model {
    points: Vec<Vec<f64>>,
    labels: Vec<bool>,
    k: usize,
}

pub fn fit(xs: &[Vec<f64>], ys: &[bool], params: &KnnParams) -> Model {
    Model {
        points: xs.to_vec(),
        labels: ys.to_vec(),
        k: params.k.max(1),
    }
}

impl Model {
    /// Fraction of defective neighbours among the k nearest; distance ties
    /// break on training-row order.
    pub fn score(&self, x: &[f64]) -> f64 {
        let mut distances: Vec<(f64, usize)> = self
            .points
            .iter()
            .enumerate()
            .map(|(i, p)| {
                let d2: f64 = p.iter().zip(x).map(|(a, b)| (a - b) * (a - b)).sum();
                (d2, i)
            })
            .collect();
        distances.sort_by(|a, b| a.0.partial_cmp(&b.0).expect("finite distance").then(a.1.cmp(&b.1)));
        let k = self.k.min(distances.len());
        let defective = distances[..k]
            .iter()
            .filter(|(_, i)| self.labels[*i])
            .count();
        defective as f64 / k as f64
    }
}
