//! Gaussian naive Bayes with Laplace-smoothed class priors.

use serde::{Deserialize, Serialize};

use super::sigmoid;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct NaiveBayesParams {
    /// Added to each class count, so priors become (n_c + a) / (n + 2a)
    /// and neither class can reach probability zero.
    #[serde(default = "default_laplace")]
    pub laplace: f64,
}

fn default_laplace() -> f64 {
    1.0
}

impl Default for NaiveBayesParams {
    fn default() -> Self {
        NaiveBayesParams {
            laplace: default_laplace(),
        }
    }
}

const VAR_FLOOR: f64 = 1e-9;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Model {
    log_prior_clean: f64,
    log_prior_defective: f64,
    /// Per-feature class-conditional statistics: [clean, defective].
    means: [Vec<f64>; 2],
    vars: [Vec<f64>; 2],
}

pub fn fit(xs: &[Vec<f64>], ys: &[bool], params: &NaiveBayesParams) -> Model {
    let dim = xs[0].len();
    let n = xs.len() as f64;
    let alpha = params.laplace;

    let mut counts = [0.0f64; 2];
    let mut means = [vec![0.0; dim], vec![0.0; dim]];
    for (x, &y) in xs.iter().zip(ys) {
        let c = y as usize;
        counts[c] += 1.0;
        for (m, &v) in means[c].iter_mut().zip(x) {
            *m += v;
        }
    }
    for c in 0..2 {
        // single-class samples never reach this model, so counts > 0
        for m in &mut means[c] {
            *m /= counts[c];
        }
    }

    let mut vars = [vec![0.0; dim], vec![0.0; dim]];
    for (x, &y) in xs.iter().zip(ys) {
        let c = y as usize;
        for ((v, &xv), &m) in vars[c].iter_mut().zip(x).zip(&means[c]) {
            let d = xv - m;
            *v += d * d;
        }
    }
    for c in 0..2 {
        for v in &mut vars[c] {
            *v = (*v / counts[c]).max(VAR_FLOOR);
        }
    }

    Model {
        log_prior_clean: ((counts[0] + alpha) / (n + 2.0 * alpha)).ln(),
        log_prior_defective: ((counts[1] + alpha) / (n + 2.0 * alpha)).ln(),
        means,
        vars,
    }
}

impl Model {
    fn log_likelihood(&self, class: usize, x: &[f64]) -> f64 {
        let mut ll = 0.0;
        for ((&v, &m), &var) in x.iter().zip(&self.means[class]).zip(&self.vars[class]) {
            let d = v - m;
            ll += -0.5 * (2.0 * std::f64::consts::PI * var).ln() - d * d / (2.0 * var);
        }
        ll
    }

    /// Posterior probability of the defective class.
    pub fn score(&self, x: &[f64]) -> f64 {
        let clean = self.log_prior_clean + self.log_likelihood(0, x);
        let defective = self.log_prior_defective + self.log_likelihood(1, x);
        sigmoid(defective - clean)
    }
}
