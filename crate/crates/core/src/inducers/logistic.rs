//! Maximum-likelihood logit model, fitted by full-batch gradient descent
//! with backtracking line search.

use serde::{Deserialize, Serialize};

use super::sigmoid;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct LogisticParams {
    /// Ridge penalty on the weights (not the intercept); keeps separable
    /// samples from driving the weights to infinity.
    #[serde(default = "default_l2")]
    pub l2: f64,
    #[serde(default = "default_max_iters")]
    pub max_iters: usize,
    /// Stop when the gradient infinity-norm falls below this.
    #[serde(default = "default_tolerance")]
    pub tolerance: f64,
}

fn default_l2() -> f64 {
    1e-6
}
fn default_max_iters() -> usize {
    5000
}
fn default_tolerance() -> f64 {
    1e-6
}

impl Default for LogisticParams {
    fn default() -> Self {
        LogisticParams {
            l2: default_l2(),
            max_iters: default_max_iters(),
            tolerance: default_tolerance(),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Model {
    pub weights: Vec<f64>,
    pub bias: f64,
}

impl Model {
    pub fn score(&self, x: &[f64]) -> f64 {
        let z: f64 = self.weights.iter().zip(x).map(|(w, v)| w * v).sum::<f64>() + self.bias;
        sigmoid(z)
    }
}

/// Mean negative log-likelihood plus the ridge term, with its gradient.
/// Exposed so the analytic gradient can be checked against finite
/// differences.
pub fn loss_and_grad(
    weights: &[f64],
    bias: f64,
    xs: &[Vec<f64>],
    ys: &[bool],
    l2: f64,
) -> (f64, Vec<f64>, f64) {
    let n = xs.len() as f64;
    let mut loss = 0.0;
    let mut grad_w = vec![0.0; weights.len()];
    let mut grad_b = 0.0;
    for (x, &y) in xs.iter().zip(ys) {
        let z: f64 = weights.iter().zip(x).map(|(w, v)| w * v).sum::<f64>() + bias;
        let target = if y { 1.0 } else { 0.0 };
        // ln(1 + exp(-m)) with m = +/- z, stable on both tails
        let m = if y { z } else { -z };
        loss += if m > 0.0 {
            (-m).exp().ln_1p()
        } else {
            -m + m.exp().ln_1p()
        };
        let residual = sigmoid(z) - target;
        for (g, &v) in grad_w.iter_mut().zip(x) {
            *g += residual * v;
        }
        grad_b += residual;
    }
    loss /= n;
    grad_b /= n;
    for (g, &w) in grad_w.iter_mut().zip(weights) {
        *g = *g / n + l2 * w;
    }
    loss += 0.5 * l2 * weights.iter().map(|w| w * w).sum::<f64>();
    (loss, grad_w, grad_b)
}

pub fn fit(xs: &[Vec<f64>], ys: &[bool], params: &LogisticParams) -> Model {
    let dim = xs[0].len();
    let mut weights = vec![0.0; dim];
    let mut bias = 0.0;

    let (mut loss, mut grad_w, mut grad_b) = loss_and_grad(&weights, bias, xs, ys, params.l2);
    let mut step = 1.0;
    for _ in 0..params.max_iters {
        let grad_norm = grad_w
            .iter()
            .chain(std::iter::once(&grad_b))
            .fold(0.0f64, |acc, g| acc.max(g.abs()));
        if grad_norm < params.tolerance {
            break;
        }

        let grad_sq: f64 =
            grad_w.iter().map(|g| g * g).sum::<f64>() + grad_b * grad_b;
        step *= 2.0; // allow the accepted step to grow back
        loop {
            let trial_w: Vec<f64> = weights
                .iter()
                .zip(&grad_w)
                .map(|(w, g)| w - step * g)
                .collect();
            let trial_b = bias - step * grad_b;
            let (trial_loss, trial_gw, trial_gb) =
                loss_and_grad(&trial_w, trial_b, xs, ys, params.l2);
            if trial_loss <= loss - 1e-4 * step * grad_sq || step < 1e-12 {
                weights = trial_w;
                bias = trial_b;
                loss = trial_loss;
                grad_w = trial_gw;
                grad_b = trial_gb;
                break;
            }
            step *= 0.5;
        }
        if step < 1e-12 {
            break;
        }
    }

    Model { weights, bias }
}
