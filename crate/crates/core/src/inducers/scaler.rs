//! Per-feature z-score standardization fitted on a classifier's own sample.

use serde::{Deserialize, Serialize};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Scaler {
    means: Vec<f64>,
    /// Zero-variance features get a standard deviation of 1, so they pass
    /// through centred instead of dividing by zero.
    stds: Vec<f64>,
}

impl Scaler {
    pub fn fit<'a, I>(rows: I) -> Scaler
    where
        I: Iterator<Item = &'a [f64]> + Clone,
    {
        let mut count = 0usize;
        let mut means: Vec<f64> = Vec::new();
        for row in rows.clone() {
            if means.is_empty() {
                means = vec![0.0; row.len()];
            }
            for (m, &v) in means.iter_mut().zip(row) {
                *m += v;
            }
            count += 1;
        }
        let n = count.max(1) as f64;
        for m in &mut means {
            *m /= n;
        }

        let mut vars = vec![0.0; means.len()];
        for row in rows {
            for ((v, &x), &m) in vars.iter_mut().zip(row).zip(&means) {
                let d = x - m;
                *v += d * d;
            }
        }
        let stds = vars
            .into_iter()
            .map(|v| {
                let s = (v / n).sqrt();
                if s > 0.0 {
                    s
                } else {
                    1.0
                }
            })
            .collect();

        Scaler { means, stds }
    }

    pub fn identity(dim: usize) -> Scaler {
        Scaler {
            means: vec![0.0; dim],
            stds: vec![1.0; dim],
        }
    }

    pub fn dim(&self) -> usize {
        self.means.len()
    }

    pub fn transform(&self, features: &[f64]) -> Vec<f64> {
        features
            .iter()
            .zip(self.means.iter().zip(&self.stds))
            .map(|(&x, (&m, &s))| (x - m) / s)
            .collect()
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn standardizes_to_zero_mean_unit_variance() {
        let rows = [vec![1.0, 10.0], vec![3.0, 10.0], vec![5.0, 10.0]];
        let scaler = Scaler::fit(rows.iter().map(|r| r.as_slice()));
        let t: Vec<Vec<f64>> = rows.iter().map(|r| scaler.transform(r)).collect();
        let mean0: f64 = t.iter().map(|r| r[0]).sum::<f64>() / 3.0;
        assert!(mean0.abs() < 1e-12);
        // zero-variance column passes through centred
        assert!(t.iter().all(|r| r[1] == 0.0));
    }

    #[test]
    fn identity_keeps_values() {
        let scaler = Scaler::identity(2);
        assert_eq!(scaler.transform(&[4.0, -1.0]), vec![4.0, -1.0]);
    }
}
