//! Probabilistic weighted majority voting over expert predictions.
//!
//! Every expert starts with weight 1. Per test instance the class weights
//! are compared (deterministic mode) or the defective class is sampled with
//! probability proportional to its weight share (probabilistic mode). In
//! online mode each expert that contradicts the revealed true label is
//! penalised by the factor beta, and the weight fraction that sat on the
//! wrong side is accumulated into the expected mistake count, which stays
//! below the multiplicative-weights bound of [`mistake_bound`].

use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::ensemble::PredictionMatrix;
use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum PwmvMode {
    /// Classify to the class with the highest weight; ties go defective.
    Deterministic,
    /// Sample the label with probability proportional to the class weight.
    Probabilistic,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct PwmvConfig {
    /// Penalty in (0, 1) applied to every mistaken expert's weight.
    pub beta: f64,
    #[serde(default = "default_mode")]
    pub mode: PwmvMode,
    /// Update weights against true labels during the pass. This consumes
    /// validation labels; a fielded predictor would run offline.
    #[serde(default = "default_online")]
    pub online: bool,
    #[serde(default)]
    pub seed: u64,
}

fn default_mode() -> PwmvMode {
    PwmvMode::Deterministic
}

fn default_online() -> bool {
    true
}

impl Default for PwmvConfig {
    fn default() -> Self {
        PwmvConfig {
            beta: 0.1,
            mode: PwmvMode::Deterministic,
            online: true,
            seed: 0,
        }
    }
}

impl PwmvConfig {
    pub fn new(beta: f64, mode: PwmvMode, online: bool, seed: u64) -> Result<PwmvConfig> {
        let config = PwmvConfig { beta, mode, online, seed };
        config.validate()?;
        Ok(config)
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.beta > 0.0 && self.beta < 1.0) {
            return Err(Error::InvalidParameter(format!(
                "beta must lie strictly between 0 and 1, got {}",
                self.beta
            )));
        }
        Ok(())
    }
}

/// Combiner state across trials.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PwmvState {
    weights: Vec<f64>,
    total: f64,
    trial: usize,
    expected_mistakes: f64,
    mistakes: Vec<u64>,
}

impl PwmvState {
    pub fn new(n_experts: usize) -> PwmvState {
        PwmvState {
            weights: vec![1.0; n_experts],
            total: n_experts as f64,
            trial: 0,
            expected_mistakes: 0.0,
            mistakes: vec![0; n_experts],
        }
    }

    pub fn n_experts(&self) -> usize {
        self.weights.len()
    }

    pub fn weights(&self) -> &[f64] {
        &self.weights
    }

    /// W, the sum of all expert weights.
    pub fn total_weight(&self) -> f64 {
        self.total
    }

    pub fn trial(&self) -> usize {
        self.trial
    }

    /// M, the accumulated weight fraction on wrong answers.
    pub fn expected_mistakes(&self) -> f64 {
        self.expected_mistakes
    }

    /// Per-expert mistake counts epsilon.
    pub fn mistake_counts(&self) -> &[u64] {
        &self.mistakes
    }

    pub fn best_expert_mistakes(&self) -> u64 {
        self.mistakes.iter().copied().min().unwrap_or(0)
    }
}

/// Final label and the defective-class weight share behind it.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct CombinedPrediction {
    pub label: bool,
    /// Defective-class weight / W; the instance score fed to AUC.
    pub class_weight_fraction: f64,
}

/// One trial: combine the expert labels for a single instance and, in
/// online mode, penalise the experts the revealed label proves wrong.
pub fn pwmv_step<R: Rng>(
    state: &mut PwmvState,
    expert_labels: &[bool],
    true_label: Option<bool>,
    config: &PwmvConfig,
    rng: &mut R,
) -> Result<CombinedPrediction> {
    config.validate()?;
    if expert_labels.len() != state.weights.len() {
        return Err(Error::DimensionMismatch {
            expected: state.weights.len(),
            actual: expert_labels.len(),
        });
    }
    if config.online != true_label.is_some() {
        return Err(Error::InvalidParameter(if config.online {
            "online combining requires the true label".to_string()
        } else {
            "offline combining must not receive true labels".to_string()
        }));
    }

    let defective_weight: f64 = state
        .weights
        .iter()
        .zip(expert_labels)
        .filter(|(_, &vote)| vote)
        .map(|(&w, _)| w)
        .sum();
    let fraction = defective_weight / state.total;
    let label = match config.mode {
        PwmvMode::Deterministic => defective_weight >= state.total - defective_weight,
        PwmvMode::Probabilistic => rng.gen_bool(fraction.clamp(0.0, 1.0)),
    };

    if let Some(truth) = true_label {
        let wrong_weight = if truth {
            state.total - defective_weight
        } else {
            defective_weight
        };
        state.expected_mistakes += wrong_weight / state.total;
        for (expert, &vote) in expert_labels.iter().enumerate() {
            if vote != truth {
                state.weights[expert] *= config.beta;
                state.mistakes[expert] += 1;
            }
        }
        state.total = state.weights.iter().sum();
    }
    state.trial += 1;

    Ok(CombinedPrediction {
        label,
        class_weight_fraction: fraction,
    })
}

/// Per-trial accounting used for bound verification and trace export.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct TrialRecord {
    /// F_i, the weight fraction on wrong answers at this trial.
    pub weight_fraction_wrong: f64,
    /// Running M after this trial.
    pub cumulative_expected_mistakes: f64,
    /// Best-expert mistake count after this trial.
    pub best_expert_mistakes: u64,
}

/// Result of a full combining pass over a prediction matrix.
#[derive(Debug, Clone, PartialEq)]
pub struct PwmvOutcome {
    pub final_labels: Vec<bool>,
    /// Defective-class weight fraction per instance.
    pub final_scores: Vec<f64>,
    pub state: PwmvState,
    /// One record per trial in online mode; empty offline.
    pub mistake_trace: Vec<TrialRecord>,
}

/// Runs the combiner sequentially over all instances of the matrix, experts
/// flattened in (inducer, sample) row-major order.
pub fn run_pwmv(matrix: &PredictionMatrix, config: &PwmvConfig) -> Result<PwmvOutcome> {
    config.validate()?;
    let n_instances = matrix.truth.len();
    if n_instances == 0 || matrix.labels.is_empty() {
        return Err(Error::EmptySample {
            context: "combining over an empty prediction matrix".to_string(),
        });
    }

    let mut state = PwmvState::new(matrix.labels.len());
    let mut rng = crate::seed::rng(config.seed, &[0x50]);
    let mut final_labels = Vec::with_capacity(n_instances);
    let mut final_scores = Vec::with_capacity(n_instances);
    let mut mistake_trace = Vec::new();

    let mut votes = vec![false; matrix.labels.len()];
    for instance in 0..n_instances {
        for (expert, row) in matrix.labels.iter().enumerate() {
            votes[expert] = row[instance];
        }
        let truth = config.online.then(|| matrix.truth[instance]);
        let before = state.expected_mistakes;
        let prediction = pwmv_step(&mut state, &votes, truth, config, &mut rng)?;
        final_labels.push(prediction.label);
        final_scores.push(prediction.class_weight_fraction);
        if config.online {
            mistake_trace.push(TrialRecord {
                weight_fraction_wrong: state.expected_mistakes - before,
                cumulative_expected_mistakes: state.expected_mistakes,
                best_expert_mistakes: state.best_expert_mistakes(),
            });
        }
    }

    Ok(PwmvOutcome {
        final_labels,
        final_scores,
        state,
        mistake_trace,
    })
}

/// Upper bound on the expected mistakes of the combiner in terms of the
/// best expert's mistake count epsilon:
/// (epsilon ln(1/beta) + ln |I| + ln T) / (1 - beta).
pub fn mistake_bound(n_inducers: usize, samples: usize, beta: f64, epsilon: u64) -> Result<f64> {
    if n_inducers < 1 || samples < 1 {
        return Err(Error::InvalidParameter(
            "mistake bound requires at least one inducer and one sample".to_string(),
        ));
    }
    if !(beta > 0.0 && beta < 1.0) {
        return Err(Error::InvalidParameter(format!(
            "beta must lie strictly between 0 and 1, got {beta}"
        )));
    }
    let eps = epsilon as f64;
    Ok(
        (eps * (1.0 / beta).ln() + (n_inducers as f64).ln() + (samples as f64).ln())
            / (1.0 - beta),
    )
}

/// Trace CSV: trial, F_i, cumulative M, and the bound evaluated at that
/// trial's best-expert mistake count.
pub fn trace_csv(trace: &[TrialRecord], n_experts: usize, beta: f64) -> Result<String> {
    let mut out = String::from("trial,f_i,m_cumulative,bound_at_trial\n");
    for (i, record) in trace.iter().enumerate() {
        let bound = mistake_bound(n_experts, 1, beta, record.best_expert_mistakes)?;
        out.push_str(&format!(
            "{},{:.6},{:.6},{:.6}\n",
            i + 1,
            record.weight_fraction_wrong,
            record.cumulative_expected_mistakes,
            bound,
        ));
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::seed;
    use rand::Rng;

    fn matrix(labels: Vec<Vec<bool>>, truth: Vec<bool>) -> PredictionMatrix {
        PredictionMatrix::from_labels(labels, truth)
    }

    fn offline() -> PwmvConfig {
        PwmvConfig {
            online: false,
            ..PwmvConfig::default()
        }
    }

    #[test]
    fn unanimous_correct_vote_changes_nothing() {
        let mut state = PwmvState::new(3);
        let mut rng = seed::rng(0, &[]);
        let prediction = pwmv_step(
            &mut state,
            &[true, true, true],
            Some(true),
            &PwmvConfig::default(),
            &mut rng,
        )
        .unwrap();
        assert!(prediction.label);
        assert_eq!(prediction.class_weight_fraction, 1.0);
        assert_eq!(state.weights(), &[1.0, 1.0, 1.0]);
        assert_eq!(state.expected_mistakes(), 0.0);
    }

    #[test]
    fn mistaken_expert_is_penalised_by_beta() {
        let mut state = PwmvState::new(1);
        let mut rng = seed::rng(0, &[]);
        pwmv_step(&mut state, &[false], Some(true), &PwmvConfig::default(), &mut rng).unwrap();
        assert_eq!(state.weights(), &[0.1]);
        assert_eq!(state.mistake_counts(), &[1]);
    }

    #[test]
    fn heavier_class_wins_in_deterministic_mode() {
        let mut state = PwmvState::new(3);
        let mut rng = seed::rng(0, &[]);
        // pre-weight the experts via two online mistakes each for experts 1, 2
        let cfg = PwmvConfig::default();
        pwmv_step(&mut state, &[true, false, false], Some(true), &cfg, &mut rng).unwrap();
        assert_eq!(state.weights(), &[1.0, 0.1, 0.1]);
        let offline_cfg = offline();
        let prediction =
            pwmv_step(&mut state, &[false, true, true], None, &offline_cfg, &mut rng).unwrap();
        assert!(!prediction.label, "W0 = 1.0 beats W1 = 0.2");
    }

    #[test]
    fn step_rejects_mismatched_inputs() {
        let mut state = PwmvState::new(2);
        let mut rng = seed::rng(0, &[]);
        let cfg = PwmvConfig::default();
        assert!(pwmv_step(&mut state, &[true], Some(true), &cfg, &mut rng).is_err());
        assert!(pwmv_step(&mut state, &[true, false], None, &cfg, &mut rng).is_err());
        let off = offline();
        assert!(pwmv_step(&mut state, &[true, false], Some(true), &off, &mut rng).is_err());
    }

    #[test]
    fn beta_domain_is_enforced() {
        assert!(PwmvConfig::new(0.0, PwmvMode::Deterministic, true, 0).is_err());
        assert!(PwmvConfig::new(1.0, PwmvMode::Deterministic, true, 0).is_err());
        assert!(PwmvConfig::new(0.5, PwmvMode::Deterministic, true, 0).is_ok());
    }

    #[test]
    fn offline_pass_is_unweighted_majority_with_defective_ties() {
        let m = matrix(
            vec![vec![true, false], vec![false, false], vec![true, true]],
            vec![false, true],
        );
        let outcome = run_pwmv(&m, &offline()).unwrap();
        assert_eq!(outcome.final_labels, vec![true, false]);
        assert_eq!(outcome.state.weights(), &[1.0, 1.0, 1.0]);
        assert!(outcome.mistake_trace.is_empty());

        // 2 experts split evenly: tie goes defective
        let m = matrix(vec![vec![true], vec![false]], vec![false]);
        let outcome = run_pwmv(&m, &offline()).unwrap();
        assert_eq!(outcome.final_labels, vec![true]);
    }

    #[test]
    fn empty_stream_is_rejected() {
        let m = matrix(vec![vec![], vec![]], vec![]);
        assert!(run_pwmv(&m, &PwmvConfig::default()).is_err());
    }

    #[test]
    fn lone_accurate_expert_takes_over_within_four_trials() {
        let truth: Vec<bool> = (0..20).map(|i| i % 2 == 0).collect();
        let labels: Vec<Vec<bool>> = vec![
            truth.clone(),
            truth.iter().map(|t| !t).collect(),
            truth.iter().map(|t| !t).collect(),
            truth.iter().map(|t| !t).collect(),
        ];
        let config = PwmvConfig {
            beta: 0.5,
            ..PwmvConfig::default()
        };
        let outcome = run_pwmv(&matrix(labels, truth.clone()), &config).unwrap();
        for (i, (&got, &want)) in outcome.final_labels.iter().zip(&truth).enumerate() {
            if i >= 4 {
                assert_eq!(got, want, "trial {i} should follow the accurate expert");
            }
        }
        assert!(outcome.final_labels[3] == truth[3], "dominance by trial 4");
    }

    #[test]
    fn never_erring_expert_keeps_full_weight() {
        let mut rng = seed::rng(0x77, &[1]);
        let truth: Vec<bool> = (0..100).map(|_| rng.gen_bool(0.5)).collect();
        let labels = vec![
            truth.clone(),
            (0..100).map(|_| rng.gen_bool(0.5)).collect::<Vec<_>>(),
        ];
        let outcome = run_pwmv(&matrix(labels, truth), &PwmvConfig::default()).unwrap();
        assert_eq!(outcome.state.weights()[0], 1.0);
        assert_eq!(outcome.state.mistake_counts()[0], 0);
    }

    #[test]
    fn weights_stay_pure_powers_of_beta() {
        let mut rng = seed::rng(0x78, &[2]);
        for &beta in &[0.1, 0.3, 0.5, 0.9] {
            let n = rng.gen_range(1..=16);
            let len = rng.gen_range(1..=200);
            let truth: Vec<bool> = (0..len).map(|_| rng.gen_bool(0.5)).collect();
            let labels: Vec<Vec<bool>> = (0..n)
                .map(|_| {
                    let err = rng.gen_range(0.0..1.0);
                    truth.iter().map(|&t| t != rng.gen_bool(err)).collect()
                })
                .collect();
            let config = PwmvConfig { beta, ..PwmvConfig::default() };
            let outcome = run_pwmv(&matrix(labels, truth), &config).unwrap();
            for (expert, &w) in outcome.state.weights().iter().enumerate() {
                let mut pure = 1.0;
                for _ in 0..outcome.state.mistake_counts()[expert] {
                    pure *= beta;
                }
                assert_eq!(w, pure, "expert {expert} weight drifted");
            }
            let w_sum: f64 = outcome.state.weights().iter().sum();
            assert!((outcome.state.total_weight() - w_sum).abs() < 1e-9);
        }
    }

    #[test]
    fn expected_mistakes_respect_the_bound() {
        let mut rng = seed::rng(0x79, &[3]);
        for _ in 0..50 {
            let n = rng.gen_range(1..=64);
            let len = rng.gen_range(1..=500);
            let truth: Vec<bool> = (0..len).map(|_| rng.gen_bool(0.5)).collect();
            let labels: Vec<Vec<bool>> = (0..n)
                .map(|_| {
                    let err = rng.gen_range(0.0..1.0);
                    truth.iter().map(|&t| t != rng.gen_bool(err)).collect()
                })
                .collect();
            let m = matrix(labels, truth);
            for &beta in &[0.1, 0.3, 0.5, 0.9] {
                let config = PwmvConfig { beta, ..PwmvConfig::default() };
                let outcome = run_pwmv(&m, &config).unwrap();
                let bound =
                    mistake_bound(n, 1, beta, outcome.state.best_expert_mistakes()).unwrap();
                assert!(
                    outcome.state.expected_mistakes() <= bound + 1e-9,
                    "M = {} exceeds bound {} (n = {n}, beta = {beta})",
                    outcome.state.expected_mistakes(),
                    bound,
                );
            }
        }
    }

    #[test]
    fn probabilistic_mode_is_seeded_and_tracks_the_weight_share() {
        let config = PwmvConfig {
            mode: PwmvMode::Probabilistic,
            online: false,
            seed: 99,
            ..PwmvConfig::default()
        };
        let labels = vec![vec![true; 50], vec![true; 50], vec![false; 50]];
        let truth = vec![true; 50];
        let first = run_pwmv(&matrix(labels.clone(), truth.clone()), &config).unwrap();
        let second = run_pwmv(&matrix(labels, truth), &config).unwrap();
        assert_eq!(first.final_labels, second.final_labels);

        // single-step frequency over 10000 replays approaches W1/W = 2/3
        let mut hits = 0;
        for replay in 0..10_000 {
            let mut state = PwmvState::new(3);
            let mut rng = seed::rng(replay, &[7]);
            let p = pwmv_step(
                &mut state,
                &[true, true, false],
                None,
                &config,
                &mut rng,
            )
            .unwrap();
            if p.label {
                hits += 1;
            }
        }
        let freq = hits as f64 / 10_000.0;
        assert!((freq - 2.0 / 3.0).abs() < 0.02, "frequency {freq}");
    }

    #[test]
    fn bound_evaluations_match_hand_values() {
        assert_eq!(mistake_bound(1, 1, 0.5, 0).unwrap(), 0.0);
        let b = mistake_bound(6, 10, 0.1, 0).unwrap();
        assert!((b - 60f64.ln() / 0.9).abs() < 1e-12);
        assert!((b - 4.54927).abs() < 1e-4, "{b}");
        let b = mistake_bound(6, 10, 0.5, 5).unwrap();
        assert!((b - 15.1201).abs() < 1e-4, "{b}");
        assert!(mistake_bound(0, 1, 0.5, 0).is_err());
        assert!(mistake_bound(1, 1, 1.5, 0).is_err());
    }

    #[test]
    fn trace_csv_has_one_row_per_trial() {
        let m = matrix(
            vec![vec![true, false, true], vec![false, false, true]],
            vec![true, false, true],
        );
        let outcome = run_pwmv(&m, &PwmvConfig::default()).unwrap();
        let csv = trace_csv(&outcome.mistake_trace, 2, 0.1).unwrap();
        assert_eq!(csv.lines().count(), 4); // header + 3 trials
        assert!(csv.starts_with("trial,f_i,m_cumulative,bound_at_trial\n"));
    }
}
