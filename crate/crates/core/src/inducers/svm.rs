//! Linear soft-margin SVM trained on the primal hinge loss by
//! deterministic full-batch subgradient descent (Pegasos schedule with
//! iterate projection). The bias rides as a regularized constant feature.

use serde::{Deserialize, Serialize};

use super::sigmoid;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SvmParams {
    /// Hinge-loss cost; the ridge strength is 1 / (c * n).
    #[serde(default = "default_c")]
    pub c: f64,
    #[serde(default = "default_epochs")]
    pub epochs: usize,
}

fn default_c() -> f64 {
    1.0
}
fn default_epochs() -> usize {
    2000
}

impl Default for SvmParams {
    fn default() -> Self {
        SvmParams {
            c: default_c(),
            epochs: default_epochs(),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Model {
    /// Weights with the bias appended as the last component.
    pub weights: Vec<f64>,
}

impl Model {
    pub fn margin(&self, x: &[f64]) -> f64 {
        let (w, b) = self.weights.split_at(self.weights.len() - 1);
        w.iter().zip(x).map(|(wi, xi)| wi * xi).sum::<f64>() + b[0]
    }

    /// Logistic squashing of the signed margin.
    pub fn score(&self, x: &[f64]) -> f64 {
        sigmoid(self.margin(x))
    }
}

pub fn fit(xs: &[Vec<f64>], ys: &[bool], params: &SvmParams) -> Model {
    let n = xs.len();
    let dim = xs[0].len() + 1; // + bias feature
    let lambda = 1.0 / (params.c * n as f64);
    let radius = 1.0 / lambda.sqrt();

    let mut w = vec![0.0; dim];
    for t in 1..=params.epochs {
        let eta = 1.0 / (lambda * t as f64);

        // subgradient of lambda/2 ||w||^2 + mean hinge
        let mut grad: Vec<f64> = w.iter().map(|wi| lambda * wi).collect();
        for (x, &y) in xs.iter().zip(ys) {
            let sign = if y { 1.0 } else { -1.0 };
            let margin: f64 =
                w[..dim - 1].iter().zip(x).map(|(wi, xi)| wi * xi).sum::<f64>() + w[dim - 1];
            if sign * margin < 1.0 {
                for (g, &xi) in grad.iter_mut().zip(x) {
                    *g -= sign * xi / n as f64;
                }
                grad[dim - 1] -= sign / n as f64;
            }
        }

        for (wi, g) in w.iter_mut().zip(&grad) {
            *wi -= eta * g;
        }

        // keep the iterate inside the ball that contains the optimum
        let norm = w.iter().map(|wi| wi * wi).sum::<f64>().sqrt();
        if norm > radius {
            let shrink = radius / norm;
            for wi in &mut w {
                *wi *= shrink;
            }
        }
    }

    Model { weights: w }
}
