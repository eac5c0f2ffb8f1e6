//! Two-hidden-layer perceptron trained with resilient backpropagation
//! (iRprop+ update rules with weight backtracking).
//!
//! The error function is the summed squared error over the sample; training
//! stops when its partial-derivative infinity-norm falls below the
//! threshold or the step budget runs out.

use rand::Rng;
use serde::{Deserialize, Serialize};

use super::sigmoid;
use crate::seed;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct NeuralParams {
    #[serde(default = "default_hidden")]
    pub hidden: (usize, usize),
    #[serde(default = "default_max_steps")]
    pub max_steps: usize,
    /// Stopping threshold on the error-gradient infinity-norm.
    #[serde(default = "default_grad_threshold")]
    pub gradient_threshold: f64,
    #[serde(default = "default_eta_plus")]
    pub eta_plus: f64,
    #[serde(default = "default_eta_minus")]
    pub eta_minus: f64,
    #[serde(default = "default_delta_init")]
    pub delta_init: f64,
    #[serde(default = "default_delta_min")]
    pub delta_min: f64,
    #[serde(default = "default_delta_max")]
    pub delta_max: f64,
}

fn default_hidden() -> (usize, usize) {
    (10, 5)
}
fn default_max_steps() -> usize {
    100_000
}
fn default_grad_threshold() -> f64 {
    0.5
}
fn default_eta_plus() -> f64 {
    1.2
}
fn default_eta_minus() -> f64 {
    0.5
}
fn default_delta_init() -> f64 {
    0.1
}
fn default_delta_min() -> f64 {
    1e-6
}
fn default_delta_max() -> f64 {
    50.0
}

impl Default for NeuralParams {
    fn default() -> Self {
        NeuralParams {
            hidden: default_hidden(),
            max_steps: default_max_steps(),
            gradient_threshold: default_grad_threshold(),
            eta_plus: default_eta_plus(),
            eta_minus: default_eta_minus(),
            delta_init: default_delta_init(),
            delta_min: default_delta_min(),
            delta_max: default_delta_max(),
        }
    }
}

/// Fully connected layer sizes, input through the single logistic output.
/// Parameters live in one flat vector (weights row-major, then biases, per
/// layer) so the loss can be differentiated numerically in tests.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Topology {
    pub layer_sizes: Vec<usize>,
}

impl Topology {
    pub fn new(inputs: usize, hidden: (usize, usize)) -> Topology {
        Topology {
            layer_sizes: vec![inputs, hidden.0.max(1), hidden.1.max(1), 1],
        }
    }

    pub fn n_params(&self) -> usize {
        self.layer_sizes
            .windows(2)
            .map(|w| w[0] * w[1] + w[1])
            .sum()
    }

    /// Activations per layer, input included.
    fn forward(&self, params: &[f64], x: &[f64]) -> Vec<Vec<f64>> {
        let mut activations = vec![x.to_vec()];
        let mut offset = 0;
        for w in self.layer_sizes.windows(2) {
            let (fan_in, fan_out) = (w[0], w[1]);
            let weights = &params[offset..offset + fan_in * fan_out];
            let biases = &params[offset + fan_in * fan_out..offset + fan_in * fan_out + fan_out];
            offset += fan_in * fan_out + fan_out;

            let prev = activations.last().expect("input layer present");
            let mut next = Vec::with_capacity(fan_out);
            for unit in 0..fan_out {
                let mut z = biases[unit];
                let row = &weights[unit * fan_in..(unit + 1) * fan_in];
                for (wi, &a) in row.iter().zip(prev) {
                    z += wi * a;
                }
                next.push(sigmoid(z));
            }
            activations.push(next);
        }
        activations
    }

    pub fn output(&self, params: &[f64], x: &[f64]) -> f64 {
        self.forward(params, x)
            .last()
            .and_then(|layer| layer.first())
            .copied()
            .expect("output unit")
    }

    /// Summed squared error, E = 1/2 sum (o - y)^2.
    pub fn loss(&self, params: &[f64], xs: &[Vec<f64>], ys: &[bool]) -> f64 {
        xs.iter()
            .zip(ys)
            .map(|(x, &y)| {
                let o = self.output(params, x);
                let t = if y { 1.0 } else { 0.0 };
                0.5 * (o - t) * (o - t)
            })
            .sum()
    }

    /// Analytic gradient of [`Topology::loss`] by backpropagation.
    pub fn gradient(&self, params: &[f64], xs: &[Vec<f64>], ys: &[bool]) -> Vec<f64> {
        let mut grad = vec![0.0; params.len()];
        let layers = self.layer_sizes.len() - 1;

        // per-layer parameter offsets
        let mut offsets = Vec::with_capacity(layers);
        let mut offset = 0;
        for w in self.layer_sizes.windows(2) {
            offsets.push(offset);
            offset += w[0] * w[1] + w[1];
        }

        for (x, &y) in xs.iter().zip(ys) {
            let activations = self.forward(params, x);
            let output = activations[layers][0];
            let target = if y { 1.0 } else { 0.0 };

            // delta = dE/dz per unit, starting at the output
            let mut delta = vec![(output - target) * output * (1.0 - output)];
            for layer in (0..layers).rev() {
                let (fan_in, fan_out) = (self.layer_sizes[layer], self.layer_sizes[layer + 1]);
                let base = offsets[layer];
                let prev = &activations[layer];

                for unit in 0..fan_out {
                    let row = base + unit * fan_in;
                    for (i, &a) in prev.iter().enumerate() {
                        grad[row + i] += delta[unit] * a;
                    }
                    grad[base + fan_in * fan_out + unit] += delta[unit];
                }

                if layer > 0 {
                    let mut next_delta = vec![0.0; fan_in];
                    for (i, nd) in next_delta.iter_mut().enumerate() {
                        let mut acc = 0.0;
                        for (unit, &d) in delta.iter().enumerate() {
                            acc += d * params[base + unit * fan_in + i];
                        }
                        let a = activations[layer][i];
                        *nd = acc * a * (1.0 - a);
                    }
                    delta = next_delta;
                }
            }
        }
        grad
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Model {
    topology: Topology,
    params: Vec<f64>,
}

impl Model {
    pub fn score(&self, x: &[f64]) -> f64 {
        self.topology.output(&self.params, x)
    }
}

pub fn fit(xs: &[Vec<f64>], ys: &[bool], params: &NeuralParams, seed_value: u64) -> Model {
    let topology = Topology::new(xs[0].len(), params.hidden);
    let mut rng = seed::rng(seed_value, &[0x4E]);
    let mut weights: Vec<f64> = (0..topology.n_params())
        .map(|_| rng.gen_range(-2.0..2.0))
        .collect();

    let n = topology.n_params();
    let mut deltas = vec![params.delta_init; n];
    let mut prev_grad = vec![0.0; n];
    let mut prev_step = vec![0.0; n];
    let mut prev_loss = f64::INFINITY;

    for _ in 0..params.max_steps {
        let grad = topology.gradient(&weights, xs, ys);
        let grad_norm = grad.iter().fold(0.0f64, |acc, g| acc.max(g.abs()));
        if grad_norm < params.gradient_threshold {
            break;
        }
        let loss = topology.loss(&weights, xs, ys);

        for i in 0..n {
            let direction = prev_grad[i] * grad[i];
            if direction > 0.0 {
                deltas[i] = (deltas[i] * params.eta_plus).min(params.delta_max);
                let step = -grad[i].signum() * deltas[i];
                weights[i] += step;
                prev_step[i] = step;
                prev_grad[i] = grad[i];
            } else if direction < 0.0 {
                deltas[i] = (deltas[i] * params.eta_minus).max(params.delta_min);
                // iRprop+: revert the previous step only if the error grew
                if loss > prev_loss {
                    weights[i] -= prev_step[i];
                }
                prev_step[i] = 0.0;
                prev_grad[i] = 0.0;
            } else {
                let step = -grad[i].signum() * deltas[i];
                weights[i] += step;
                prev_step[i] = step;
                prev_grad[i] = grad[i];
            }
        }
        prev_loss = loss;
    }

    Model {
        topology,
        params: weights,
    }
}
