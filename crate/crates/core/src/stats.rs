//! Nonparametric comparison machinery: one-sample Wilcoxon signed rank test
//! on paired score differences and Cliff's delta effect size.

use serde::{Deserialize, Serialize};
use statrs::distribution::{ContinuousCDF, Normal};

use crate::error::{Error, Result};

/// Largest effective sample size handled by exact enumeration; beyond it
/// the normal approximation with tie and continuity corrections is used.
pub const EXACT_LIMIT: usize = 25;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum WilcoxonMethod {
    Exact,
    NormalApproximation,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct WilcoxonResult {
    /// Non-zero differences entering the statistic.
    pub n_effective: usize,
    /// Signed-rank statistic W+ (sum of ranks of positive differences).
    pub statistic: f64,
    /// Two-sided p-value.
    pub p_value: f64,
    pub method: WilcoxonMethod,
}

impl WilcoxonResult {
    /// True when every value equalled the hypothesised location, leaving
    /// no information; the p-value is 1 by convention.
    pub fn is_degenerate(&self) -> bool {
        self.n_effective == 0
    }
}

/// Average ranks of |d| (1-based, ties averaged) and the tie-group sizes.
fn signed_ranks(diffs: &[f64]) -> (Vec<f64>, Vec<usize>) {
    let mut order: Vec<usize> = (0..diffs.len()).collect();
    order.sort_by(|&a, &b| {
        diffs[a]
            .abs()
            .partial_cmp(&diffs[b].abs())
            .expect("finite differences")
    });

    let mut ranks = vec![0.0; diffs.len()];
    let mut tie_sizes = Vec::new();
    let mut i = 0;
    while i < order.len() {
        let mut j = i;
        while j + 1 < order.len() && diffs[order[j + 1]].abs() == diffs[order[i]].abs() {
            j += 1;
        }
        let avg = (i + j + 2) as f64 / 2.0;
        for &idx in &order[i..=j] {
            ranks[idx] = avg;
        }
        tie_sizes.push(j - i + 1);
        i = j + 1;
    }
    (ranks, tie_sizes)
}

/// Exact two-sided p for the signed-rank statistic.
///
/// The null distribution assigns each rank independently to the positive
/// side with probability 1/2; doubling the (possibly half-integer) average
/// ranks makes every achievable sum an integer, so the full distribution is
/// counted with one dynamic-programming pass instead of walking all 2^n
/// sign patterns.
fn exact_p(ranks: &[f64], w_plus: f64) -> f64 {
    let doubled: Vec<u64> = ranks.iter().map(|&r| (2.0 * r) as u64).collect();
    let total: u64 = doubled.iter().sum();
    let mut counts = vec![0u64; total as usize + 1];
    counts[0] = 1;
    let mut reach = 0usize;
    for &r in &doubled {
        let r = r as usize;
        reach += r;
        for s in (0..=reach).rev() {
            if s >= r && counts[s - r] > 0 {
                counts[s] += counts[s - r];
            }
        }
    }

    let mean2 = total as f64 / 2.0;
    let dev = (2.0 * w_plus - mean2).abs();
    let extreme: u64 = counts
        .iter()
        .enumerate()
        .filter(|&(s, _)| (s as f64 - mean2).abs() >= dev - 1e-9)
        .map(|(_, &c)| c)
        .sum();
    extreme as f64 / 2f64.powi(ranks.len() as i32)
}

/// Two-sided p from the normal approximation with tie correction and a
/// 0.5 continuity correction toward the mean.
fn normal_p(ranks: &[f64], tie_sizes: &[usize], w_plus: f64) -> f64 {
    let n = ranks.len() as f64;
    let mean = n * (n + 1.0) / 4.0;
    let tie_term: f64 = tie_sizes
        .iter()
        .map(|&t| {
            let t = t as f64;
            (t * t * t - t) / 48.0
        })
        .sum();
    let variance = n * (n + 1.0) * (2.0 * n + 1.0) / 24.0 - tie_term;
    if variance <= 0.0 {
        return 1.0;
    }
    let centered = w_plus - mean;
    let corrected = if centered > 0.0 {
        centered - 0.5
    } else if centered < 0.0 {
        centered + 0.5
    } else {
        0.0
    };
    let z = corrected / variance.sqrt();
    let normal = Normal::new(0.0, 1.0).expect("unit normal");
    (2.0 * (1.0 - normal.cdf(z.abs()))).clamp(0.0, 1.0)
}

/// One-sample Wilcoxon signed rank test of location `mu0`.
///
/// Zero differences are dropped and tied absolute differences receive
/// average ranks. With every value equal to `mu0` the result is degenerate:
/// no effective observations and p = 1.
pub fn wilcoxon_one_sample(values: &[f64], mu0: f64) -> Result<WilcoxonResult> {
    wilcoxon_one_sample_with(values, mu0, None)
}

/// Same test with the method forced, for approximation studies.
pub fn wilcoxon_one_sample_with(
    values: &[f64],
    mu0: f64,
    force: Option<WilcoxonMethod>,
) -> Result<WilcoxonResult> {
    if values.is_empty() {
        return Err(Error::EmptySample {
            context: "wilcoxon test over zero values".to_string(),
        });
    }
    let diffs: Vec<f64> = values
        .iter()
        .map(|v| v - mu0)
        .filter(|d| *d != 0.0)
        .collect();
    if diffs.is_empty() {
        return Ok(WilcoxonResult {
            n_effective: 0,
            statistic: 0.0,
            p_value: 1.0,
            method: WilcoxonMethod::Exact,
        });
    }

    let (ranks, tie_sizes) = signed_ranks(&diffs);
    let w_plus: f64 = ranks
        .iter()
        .zip(&diffs)
        .filter(|(_, &d)| d > 0.0)
        .map(|(&r, _)| r)
        .sum();

    let method = force.unwrap_or(if diffs.len() <= EXACT_LIMIT {
        WilcoxonMethod::Exact
    } else {
        WilcoxonMethod::NormalApproximation
    });
    let p_value = match method {
        WilcoxonMethod::Exact => exact_p(&ranks, w_plus),
        WilcoxonMethod::NormalApproximation => normal_p(&ranks, &tie_sizes, w_plus),
    };

    Ok(WilcoxonResult {
        n_effective: diffs.len(),
        statistic: w_plus,
        p_value,
        method,
    })
}

/// Dominance bands for |delta|.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum EffectCategory {
    Negligible,
    Small,
    Medium,
    Strong,
}

impl EffectCategory {
    /// Left-closed bands: 0.147 is already Small, 0.330 Medium, 0.474 Strong.
    pub fn from_delta(delta: f64) -> EffectCategory {
        let d = delta.abs();
        if d < 0.147 {
            EffectCategory::Negligible
        } else if d < 0.330 {
            EffectCategory::Small
        } else if d < 0.474 {
            EffectCategory::Medium
        } else {
            EffectCategory::Strong
        }
    }

    pub fn label(&self) -> &'static str {
        match self {
            EffectCategory::Negligible => "Negligible",
            EffectCategory::Small => "Small",
            EffectCategory::Medium => "Medium",
            EffectCategory::Strong => "Strong",
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct CliffsDelta {
    pub delta: f64,
    pub category: EffectCategory,
}

/// Cliff's delta: the dominance of `x` over `y`,
/// (#{x_i > y_j} - #{x_i < y_j}) / (|x| * |y|).
pub fn cliffs_delta(x: &[f64], y: &[f64]) -> Result<CliffsDelta> {
    if x.is_empty() || y.is_empty() {
        return Err(Error::EmptySample {
            context: "cliffs delta over an empty sample".to_string(),
        });
    }
    let mut greater = 0i64;
    let mut less = 0i64;
    for &a in x {
        for &b in y {
            if a > b {
                greater += 1;
            } else if a < b {
                less += 1;
            }
        }
    }
    let delta = (greater - less) as f64 / (x.len() as f64 * y.len() as f64);
    Ok(CliffsDelta {
        delta,
        category: EffectCategory::from_delta(delta),
    })
}

/// Footer row of a model-comparison table: averages, relative improvement,
/// win/tie/loss counts, significance and effect size.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ComparisonRow {
    pub hiel_avg: f64,
    pub other_avg: f64,
    /// (hiel_avg - other_avg) / other_avg * 100; undefined when the
    /// baseline average is zero.
    pub improvement_percent: Option<f64>,
    pub wins: usize,
    pub ties: usize,
    pub losses: usize,
    pub p_value: f64,
    pub cliffs: CliffsDelta,
}

/// Summarises paired per-project scores of the ensemble against a baseline.
/// Ties require exact score equality; the signed-rank test runs on the
/// differences (baseline - ensemble) against location zero.
pub fn summarize_comparison(hiel_scores: &[f64], other_scores: &[f64]) -> Result<ComparisonRow> {
    if hiel_scores.len() != other_scores.len() {
        return Err(Error::DimensionMismatch {
            expected: hiel_scores.len(),
            actual: other_scores.len(),
        });
    }
    if hiel_scores.is_empty() {
        return Err(Error::EmptySample {
            context: "comparison over zero projects".to_string(),
        });
    }

    let n = hiel_scores.len() as f64;
    let hiel_avg = hiel_scores.iter().sum::<f64>() / n;
    let other_avg = other_scores.iter().sum::<f64>() / n;
    let improvement_percent = if other_avg == 0.0 {
        None
    } else {
        Some((hiel_avg - other_avg) / other_avg * 100.0)
    };

    let mut wins = 0;
    let mut ties = 0;
    let mut losses = 0;
    for (&h, &o) in hiel_scores.iter().zip(other_scores) {
        if h > o {
            wins += 1;
        } else if h == o {
            ties += 1;
        } else {
            losses += 1;
        }
    }

    let diffs: Vec<f64> = other_scores
        .iter()
        .zip(hiel_scores)
        .map(|(&o, &h)| o - h)
        .collect();
    let wilcoxon = wilcoxon_one_sample(&diffs, 0.0)?;
    let cliffs = cliffs_delta(hiel_scores, other_scores)?;

    Ok(ComparisonRow {
        hiel_avg,
        other_avg,
        improvement_percent,
        wins,
        ties,
        losses,
        p_value: wilcoxon.p_value,
        cliffs,
    })
}

impl ComparisonRow {
    pub const CSV_HEADER: &'static str =
        "baseline,metric,hiel_avg,other_avg,improvement_percent,wins,ties,losses,p_value,\
cliffs_delta,effect_category";

    pub fn csv_row(&self, baseline: &str, metric: &str) -> String {
        let improvement = match self.improvement_percent {
            Some(v) => format!("{v:.2}"),
            None => "NA".to_string(),
        };
        format!(
            "{},{},{:.4},{:.4},{},{},{},{},{:.4e},{:.4},{}",
            baseline,
            metric,
            self.hiel_avg,
            self.other_avg,
            improvement,
            self.wins,
            self.ties,
            self.losses,
            self.p_value,
            self.cliffs.delta,
            self.cliffs.category.label(),
        )
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::seed;
    use rand::Rng;

    /// Brute-force oracle: walk all 2^n sign patterns.
    fn exact_p_enumeration(ranks: &[f64], w_plus: f64) -> f64 {
        let n = ranks.len();
        let total: f64 = ranks.iter().sum();
        let mean = total / 2.0;
        let dev = (w_plus - mean).abs();
        let mut extreme = 0u64;
        for pattern in 0u64..(1 << n) {
            let sum: f64 = ranks
                .iter()
                .enumerate()
                .filter(|(i, _)| pattern >> i & 1 == 1)
                .map(|(_, &r)| r)
                .sum();
            if (sum - mean).abs() >= dev - 1e-9 {
                extreme += 1;
            }
        }
        extreme as f64 / 2f64.powi(n as i32)
    }

    #[test]
    fn all_values_at_mu0_is_degenerate() {
        let result = wilcoxon_one_sample(&[0.0, 0.0, 0.0], 0.0).unwrap();
        assert!(result.is_degenerate());
        assert_eq!(result.p_value, 1.0);
    }

    #[test]
    fn one_sided_run_has_known_exact_p() {
        // ranks 1..5 all positive: only the all-plus and all-minus patterns
        // are as extreme, so p = 2/32
        let result = wilcoxon_one_sample(&[1.0, 2.0, 3.0, 4.0, 5.0], 0.0).unwrap();
        assert_eq!(result.method, WilcoxonMethod::Exact);
        assert_eq!(result.statistic, 15.0);
        assert!((result.p_value - 0.0625).abs() < 1e-12);
    }

    #[test]
    fn antisymmetric_values_are_fully_consistent_with_the_null() {
        let result = wilcoxon_one_sample(&[-2.0, -1.0, 1.0, 2.0], 0.0).unwrap();
        assert_eq!(result.p_value, 1.0);
    }

    #[test]
    fn exact_p_matches_sign_pattern_enumeration() {
        let mut rng = seed::rng(0x51, &[11]);
        for case in 0..200 {
            let n = rng.gen_range(1..=10usize);
            // integer-valued inputs so ties and zeros are common
            let values: Vec<f64> = (0..n).map(|_| rng.gen_range(-4..=4) as f64).collect();
            let result = wilcoxon_one_sample(&values, 0.0).unwrap();
            if result.is_degenerate() {
                continue;
            }
            let diffs: Vec<f64> = values.iter().copied().filter(|d| *d != 0.0).collect();
            let (ranks, _) = signed_ranks(&diffs);
            let oracle = exact_p_enumeration(&ranks, result.statistic);
            assert_eq!(result.p_value, oracle, "case {case}: {values:?}");
        }
    }

    #[test]
    fn normal_approximation_tracks_exact_at_n20() {
        let mut rng = seed::rng(0x52, &[5]);
        for _ in 0..20 {
            let values: Vec<f64> = (0..20)
                .map(|_| rng.gen_range(-50..=50) as f64 / 10.0 + 0.4)
                .filter(|v| *v != 0.0)
                .collect();
            let exact = wilcoxon_one_sample_with(&values, 0.0, Some(WilcoxonMethod::Exact))
                .unwrap()
                .p_value;
            let approx =
                wilcoxon_one_sample_with(&values, 0.0, Some(WilcoxonMethod::NormalApproximation))
                    .unwrap()
                    .p_value;
            assert!(
                (exact - approx).abs() < 0.02,
                "exact {exact} vs normal {approx} for {values:?}"
            );
        }
    }

    #[test]
    fn large_samples_switch_to_the_normal_approximation() {
        let values: Vec<f64> = (1..=40).map(|i| i as f64 - 15.0).collect();
        let result = wilcoxon_one_sample(&values, 0.0).unwrap();
        assert_eq!(result.method, WilcoxonMethod::NormalApproximation);
        assert!(result.p_value > 0.0 && result.p_value < 1.0);
    }

    #[test]
    fn cliffs_delta_examples() {
        let same = cliffs_delta(&[1.0, 2.0, 3.0], &[3.0, 1.0, 2.0]).unwrap();
        assert_eq!(same.delta, 0.0);
        assert_eq!(same.category, EffectCategory::Negligible);

        let dominant = cliffs_delta(&[5.0, 6.0], &[1.0, 2.0]).unwrap();
        assert_eq!(dominant.delta, 1.0);
        assert_eq!(dominant.category, EffectCategory::Strong);

        let mixed = cliffs_delta(&[1.0, 2.0], &[1.0, 3.0]).unwrap();
        assert!((mixed.delta - -0.25).abs() < 1e-12);
        assert_eq!(mixed.category, EffectCategory::Small);
    }

    #[test]
    fn cliffs_delta_is_antisymmetric_and_matches_counting() {
        let mut rng = seed::rng(0x53, &[2]);
        for _ in 0..100 {
            let n = rng.gen_range(1..=100);
            let m = rng.gen_range(1..=100);
            let x: Vec<f64> = (0..n).map(|_| rng.gen_range(-10..=10) as f64).collect();
            let y: Vec<f64> = (0..m).map(|_| rng.gen_range(-10..=10) as f64).collect();
            let xy = cliffs_delta(&x, &y).unwrap().delta;
            let yx = cliffs_delta(&y, &x).unwrap().delta;
            assert_eq!(xy, -yx);

            // independent pairwise accumulation
            let mut acc = 0.0;
            for &a in &x {
                for &b in &y {
                    if a > b {
                        acc += 1.0;
                    } else if a < b {
                        acc -= 1.0;
                    }
                }
            }
            let oracle = acc / (n as f64 * m as f64);
            assert!((xy - oracle).abs() < 1e-12);
        }
    }

    #[test]
    fn category_boundaries_are_left_closed() {
        assert_eq!(EffectCategory::from_delta(0.1469), EffectCategory::Negligible);
        assert_eq!(EffectCategory::from_delta(0.147), EffectCategory::Small);
        assert_eq!(EffectCategory::from_delta(0.330), EffectCategory::Medium);
        assert_eq!(EffectCategory::from_delta(0.474), EffectCategory::Strong);
        assert_eq!(EffectCategory::from_delta(-0.474), EffectCategory::Strong);
        assert_eq!(EffectCategory::from_delta(1.0), EffectCategory::Strong);
    }

    #[test]
    fn identical_score_vectors_compare_as_pure_ties() {
        let scores = [0.5, 0.6, 0.7];
        let row = summarize_comparison(&scores, &scores).unwrap();
        assert_eq!(row.improvement_percent, Some(0.0));
        assert_eq!((row.wins, row.ties, row.losses), (0, 3, 0));
        assert_eq!(row.p_value, 1.0);
        assert_eq!(row.cliffs.delta, 0.0);
    }

    #[test]
    fn win_tie_loss_counts_follow_elementwise_comparison() {
        let row = summarize_comparison(&[0.9, 0.8], &[0.7, 0.85]).unwrap();
        assert_eq!((row.wins, row.ties, row.losses), (1, 0, 1));
    }

    #[test]
    fn improvement_uses_relative_average_gap() {
        // averages 0.7825 vs 0.3045 as in the published F-measure summary
        let row = summarize_comparison(&[0.7825, 0.7825], &[0.3045, 0.3045]).unwrap();
        let improvement = row.improvement_percent.unwrap();
        assert!((improvement - 156.98).abs() < 0.01);
        // printed value differs only through unrounded source averages
        assert!((improvement - 155.89).abs() / 155.89 < 0.02);
    }
}
