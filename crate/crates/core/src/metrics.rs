//! Confusion-matrix construction and the traditional plus project-level
//! measures derived from it.
//!
//! The economic quantities treat every line of code as costing one unit to
//! inspect: the budget saved by a prediction is the LoC of the correctly
//! predicted clean modules, and everything else (flagged modules plus
//! dormant defects) remains on the testers' desk.

use serde::{Deserialize, Serialize};

use crate::data::ModuleRecord;
use crate::error::{Error, Result};

/// Binary confusion counts. Rows are predictions, columns actual values:
/// a false positive is a clean module flagged defective, a false negative a
/// defective module passed as clean.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct ConfusionMatrix {
    /// defective predicted defective
    pub tpc: usize,
    /// clean predicted defective
    pub fpc: usize,
    /// defective predicted clean
    pub fnc: usize,
    /// clean predicted clean
    pub tnc: usize,
}

impl ConfusionMatrix {
    pub fn new(tpc: usize, fpc: usize, fnc: usize, tnc: usize) -> ConfusionMatrix {
        ConfusionMatrix { tpc, fpc, fnc, tnc }
    }

    /// Total test instances.
    pub fn total(&self) -> usize {
        self.tpc + self.fpc + self.fnc + self.tnc
    }

    /// Actual defective instances.
    pub fn defects(&self) -> usize {
        self.tpc + self.fnc
    }
}

/// Counts predictions against truth. Both slices use true = defective.
pub fn confusion(pred_labels: &[bool], true_labels: &[bool]) -> Result<ConfusionMatrix> {
    if pred_labels.len() != true_labels.len() {
        return Err(Error::DimensionMismatch {
            expected: true_labels.len(),
            actual: pred_labels.len(),
        });
    }
    if pred_labels.is_empty() {
        return Err(Error::EmptySample {
            context: "confusion matrix over zero instances".to_string(),
        });
    }
    let mut cm = ConfusionMatrix::new(0, 0, 0, 0);
    for (&pred, &actual) in pred_labels.iter().zip(true_labels) {
        match (pred, actual) {
            (true, true) => cm.tpc += 1,
            (true, false) => cm.fpc += 1,
            (false, true) => cm.fnc += 1,
            (false, false) => cm.tnc += 1,
        }
    }
    Ok(cm)
}

/// Percent of perfect cleans: the fraction of test modules correctly
/// predicted clean, TN / n.
pub fn ppc(cm: &ConfusionMatrix) -> Result<f64> {
    let n = cm.total();
    if n == 0 {
        return Err(Error::EmptySample {
            context: "ppc over an empty confusion matrix".to_string(),
        });
    }
    Ok(cm.tnc as f64 / n as f64)
}

/// Percent of non-perfect cleans, the complement (n - TN) / n.
pub fn pnpc(cm: &ConfusionMatrix) -> Result<f64> {
    let n = cm.total();
    if n == 0 {
        return Err(Error::EmptySample {
            context: "pnpc over an empty confusion matrix".to_string(),
        });
    }
    Ok((n - cm.tnc) as f64 / n as f64)
}

/// False omission rate FN / (TN + FN): the fraction of predicted-clean
/// modules that harbour a dormant defect. Undefined when nothing is
/// predicted clean; that case is an error, never 0.
pub fn for_rate(cm: &ConfusionMatrix) -> Result<f64> {
    let denom = cm.tnc + cm.fnc;
    if denom == 0 {
        return Err(Error::NotApplicable(
            "false omission rate: no predicted cleans".to_string(),
        ));
    }
    Ok(cm.fnc as f64 / denom as f64)
}

/// Harmonic mean of precision and recall. Returns 0 when there are no true
/// positives but some positives exist on either side; errors when the
/// matrix has neither actual nor predicted positives.
pub fn f_measure(cm: &ConfusionMatrix) -> Result<f64> {
    if cm.tpc == 0 {
        if cm.fpc == 0 && cm.fnc == 0 {
            return Err(Error::NotApplicable(
                "f-measure: no actual and no predicted positives".to_string(),
            ));
        }
        return Ok(0.0);
    }
    Ok(2.0 * cm.tpc as f64 / (2.0 * cm.tpc as f64 + cm.fpc as f64 + cm.fnc as f64))
}

/// Area under the ROC curve via the rank (Mann-Whitney) formulation:
/// P(score+ > score-) + 0.5 P(score+ = score-), with average ranks on ties.
pub fn auc(scores: &[f64], truth: &[bool]) -> Result<f64> {
    if scores.len() != truth.len() {
        return Err(Error::DimensionMismatch {
            expected: truth.len(),
            actual: scores.len(),
        });
    }
    let positives = truth.iter().filter(|&&t| t).count();
    let negatives = truth.len() - positives;
    if positives == 0 || negatives == 0 {
        return Err(Error::NotApplicable(
            "auc: truth contains a single class".to_string(),
        ));
    }

    let mut order: Vec<usize> = (0..scores.len()).collect();
    order.sort_by(|&a, &b| scores[a].partial_cmp(&scores[b]).expect("finite scores"));

    // average ranks over tied score runs
    let mut rank_sum_pos = 0.0;
    let mut i = 0;
    while i < order.len() {
        let mut j = i;
        while j + 1 < order.len() && scores[order[j + 1]] == scores[order[i]] {
            j += 1;
        }
        let avg_rank = (i + j + 2) as f64 / 2.0; // ranks are 1-based
        for &idx in &order[i..=j] {
            if truth[idx] {
                rank_sum_pos += avg_rank;
            }
        }
        i = j + 1;
    }

    let np = positives as f64;
    let nn = negatives as f64;
    Ok((rank_sum_pos - np * (np + 1.0) / 2.0) / (np * nn))
}

/// Lines of code serviced per project hour.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct CostConfig {
    pub delta: f64,
}

impl Default for CostConfig {
    fn default() -> Self {
        CostConfig { delta: 100.0 }
    }
}

impl CostConfig {
    pub fn new(delta: f64) -> Result<CostConfig> {
        if !(delta > 0.0) {
            return Err(Error::InvalidParameter(format!(
                "delta must be positive, got {delta}"
            )));
        }
        Ok(CostConfig { delta })
    }
}

/// Economic summary of one prediction run over a target release.
///
/// Editing rates are undefined when the release has no defective modules;
/// the false omission rate is undefined when nothing is predicted clean.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CostReport {
    pub confusion: ConfusionMatrix,
    pub total_loc: u64,
    /// LoC of correctly predicted clean modules.
    pub saved_budget: u64,
    /// LoC of every module the testers still must inspect.
    pub remaining_service_time: u64,
    /// saved_budget / total_loc, in [0, 1].
    pub percent_saved_budget: f64,
    /// remaining_service_time / total_loc, in [0, 1].
    pub percent_remaining_edits: f64,
    /// remaining_service_time / delta.
    pub project_hours: f64,
    /// Remaining LoC reviewed per discovered defect.
    pub editing_rate: Option<f64>,
    /// Total LoC per defect: the no-model review effort.
    pub original_editing_rate: Option<f64>,
    pub decreased_editing_rate: Option<f64>,
    pub ppc: f64,
    pub pnpc: f64,
    pub for_rate: Option<f64>,
    /// Actual defective modules, TP + FN.
    pub defects: usize,
}

/// Joins confusion counts with per-module LoC sums.
pub fn cost_report(
    pred_labels: &[bool],
    modules: &[ModuleRecord],
    cost: &CostConfig,
) -> Result<CostReport> {
    if pred_labels.len() != modules.len() {
        return Err(Error::DimensionMismatch {
            expected: modules.len(),
            actual: pred_labels.len(),
        });
    }
    let truth: Vec<bool> = modules.iter().map(|m| m.label).collect();
    let cm = confusion(pred_labels, &truth)?;

    let total_loc: u64 = modules.iter().map(|m| m.loc).sum();
    if total_loc == 0 {
        return Err(Error::InvalidParameter(
            "cost report over zero total lines of code".to_string(),
        ));
    }
    let saved_budget: u64 = pred_labels
        .iter()
        .zip(modules)
        .filter(|(&pred, m)| !pred && !m.label)
        .map(|(_, m)| m.loc)
        .sum();
    let remaining_service_time = total_loc - saved_budget;

    let defects = cm.defects();
    let (editing_rate, original_editing_rate, decreased_editing_rate) = if defects > 0 {
        let editing = remaining_service_time as f64 / defects as f64;
        let original = total_loc as f64 / defects as f64;
        (Some(editing), Some(original), Some(original - editing))
    } else {
        (None, None, None)
    };

    Ok(CostReport {
        confusion: cm,
        total_loc,
        saved_budget,
        remaining_service_time,
        percent_saved_budget: saved_budget as f64 / total_loc as f64,
        percent_remaining_edits: remaining_service_time as f64 / total_loc as f64,
        project_hours: remaining_service_time as f64 / cost.delta,
        editing_rate,
        original_editing_rate,
        decreased_editing_rate,
        ppc: ppc(&cm)?,
        pnpc: pnpc(&cm)?,
        for_rate: for_rate(&cm).ok(),
        defects,
    })
}

impl CostReport {
    pub const CSV_HEADER: &'static str = "project,total_loc,defects,saved_budget,\
remaining_service_time,project_hours,original_editing_rate,editing_rate,decreased_editing_rate";

    /// One row in the supplementary-details layout.
    pub fn csv_row(&self, project: &str) -> String {
        let rate = |r: Option<f64>| match r {
            Some(v) => format!("{v:.2}"),
            None => "NA".to_string(),
        };
        format!(
            "{},{},{},{},{},{:.2},{},{},{}",
            project,
            self.total_loc,
            self.defects,
            self.saved_budget,
            self.remaining_service_time,
            self.project_hours,
            rate(self.original_editing_rate),
            rate(self.editing_rate),
            rate(self.decreased_editing_rate),
        )
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::seed;
    use rand::Rng;

    fn module(loc: u64, label: bool) -> ModuleRecord {
        ModuleRecord {
            id: String::new(),
            features: vec![],
            loc,
            label,
        }
    }

    #[test]
    fn confusion_counts_follow_orientation() {
        let cm = confusion(&[true, false], &[true, false]).unwrap();
        assert_eq!(cm, ConfusionMatrix::new(1, 0, 0, 1));

        let cm = confusion(&[false; 4], &[true; 4]).unwrap();
        assert_eq!(cm, ConfusionMatrix::new(0, 0, 4, 0));

        let cm = confusion(&[true, true, false, false], &[true, false, true, false]).unwrap();
        assert_eq!(cm, ConfusionMatrix::new(1, 1, 1, 1));
    }

    #[test]
    fn confusion_rejects_mismatch_and_empty() {
        assert!(confusion(&[true], &[true, false]).is_err());
        assert!(confusion(&[], &[]).is_err());
    }

    #[test]
    fn ppc_pnpc_examples() {
        let all_clean = ConfusionMatrix::new(0, 0, 0, 10);
        assert_eq!(ppc(&all_clean).unwrap(), 1.0);
        assert_eq!(pnpc(&all_clean).unwrap(), 0.0);

        let none_clean = ConfusionMatrix::new(5, 5, 0, 0);
        assert_eq!(ppc(&none_clean).unwrap(), 0.0);
        assert_eq!(pnpc(&none_clean).unwrap(), 1.0);

        let cm = ConfusionMatrix::new(10, 10, 10, 70);
        assert!((ppc(&cm).unwrap() - 0.70).abs() < 1e-12);
        assert!((pnpc(&cm).unwrap() - 0.30).abs() < 1e-12);
        assert!((ppc(&cm).unwrap() + pnpc(&cm).unwrap() - 1.0).abs() < 1e-12);
    }

    #[test]
    fn for_rate_examples() {
        assert_eq!(for_rate(&ConfusionMatrix::new(0, 0, 0, 5)).unwrap(), 0.0);
        assert_eq!(for_rate(&ConfusionMatrix::new(0, 0, 5, 0)).unwrap(), 1.0);
        let cm = ConfusionMatrix::new(0, 0, 30, 70);
        assert!((for_rate(&cm).unwrap() - 0.30).abs() < 1e-12);
        assert!(matches!(
            for_rate(&ConfusionMatrix::new(3, 4, 0, 0)).unwrap_err(),
            Error::NotApplicable(_)
        ));
    }

    #[test]
    fn f_measure_examples() {
        // tp = 0 with positives around -> convention 0
        assert_eq!(f_measure(&ConfusionMatrix::new(0, 2, 3, 5)).unwrap(), 0.0);
        // precision == recall == F
        let cm = ConfusionMatrix::new(2, 1, 1, 0);
        assert!((f_measure(&cm).unwrap() - 2.0 / 3.0).abs() < 1e-12);
        // tp=1, fp=1, fn=0: P=0.5, R=1, F=2/3
        let cm = ConfusionMatrix::new(1, 1, 0, 4);
        assert!((f_measure(&cm).unwrap() - 2.0 / 3.0).abs() < 1e-12);
        // all-clean truth, all-clean prediction: undefined
        assert!(f_measure(&ConfusionMatrix::new(0, 0, 0, 9)).is_err());
    }

    #[test]
    fn auc_examples() {
        let perfect = auc(&[0.9, 0.8, 0.2, 0.1], &[true, true, false, false]).unwrap();
        assert_eq!(perfect, 1.0);

        let flat = auc(&[0.5; 6], &[true, false, true, false, true, false]).unwrap();
        assert_eq!(flat, 0.5);

        // pos {0.8, 0.4}, neg {0.6, 0.2}: 3 of 4 pairs ordered correctly
        let mixed = auc(&[0.8, 0.4, 0.6, 0.2], &[true, true, false, false]).unwrap();
        assert!((mixed - 0.75).abs() < 1e-12);

        assert!(auc(&[0.1, 0.2], &[true, true]).is_err());
    }

    /// All-pairs oracle: count wins and half-ties over pos x neg.
    fn auc_oracle(scores: &[f64], truth: &[bool]) -> f64 {
        let mut wins = 0.0;
        let mut pairs = 0.0;
        for (i, &ti) in truth.iter().enumerate() {
            if !ti {
                continue;
            }
            for (j, &tj) in truth.iter().enumerate() {
                if tj {
                    continue;
                }
                pairs += 1.0;
                if scores[i] > scores[j] {
                    wins += 1.0;
                } else if scores[i] == scores[j] {
                    wins += 0.5;
                }
            }
        }
        wins / pairs
    }

    #[test]
    fn auc_matches_all_pairs_oracle() {
        let mut rng = seed::rng(0xAC, &[1]);
        for _ in 0..200 {
            let n = rng.gen_range(2..=50);
            let scores: Vec<f64> = (0..n).map(|_| (rng.gen_range(0..=10) as f64) / 10.0).collect();
            let mut truth: Vec<bool> = (0..n).map(|_| rng.gen_bool(0.5)).collect();
            truth[0] = true;
            truth[n - 1] = false;
            let got = auc(&scores, &truth).unwrap();
            let want = auc_oracle(&scores, &truth);
            assert!((got - want).abs() < 1e-12, "auc {got} vs oracle {want}");
        }
    }

    #[test]
    fn cost_report_reference_economics() {
        // 20 defective modules summing to the remaining 12944 LoC, one clean
        // module carrying the saved 24755 (the Ant-1.3 release profile)
        let mut modules = vec![module(24_755, false)];
        let mut preds = vec![false];
        for i in 0..20 {
            modules.push(module(if i < 19 { 600 } else { 12_944 - 19 * 600 }, true));
            preds.push(true);
        }
        let report = cost_report(&preds, &modules, &CostConfig::default()).unwrap();
        assert_eq!(report.total_loc, 37_699);
        assert_eq!(report.saved_budget, 24_755);
        assert_eq!(report.remaining_service_time, 12_944);
        assert_eq!(report.defects, 20);
        assert!((report.project_hours - 129.44).abs() < 0.01);
        assert!((report.original_editing_rate.unwrap() - 1884.95).abs() < 0.01);
        assert!((report.editing_rate.unwrap() - 647.20).abs() < 0.01);
        assert!((report.decreased_editing_rate.unwrap() - 1237.75).abs() < 0.01);
    }

    #[test]
    fn cost_report_degenerate_and_small_cases() {
        // everything clean and predicted clean
        let modules = vec![module(10, false), module(30, false)];
        let report = cost_report(&[false, false], &modules, &CostConfig::default()).unwrap();
        assert_eq!(report.saved_budget, report.total_loc);
        assert_eq!(report.remaining_service_time, 0);
        assert_eq!(report.project_hours, 0.0);
        assert!(report.editing_rate.is_none());

        // two modules, one correct clean and one correct defective
        let modules = vec![module(100, false), module(300, true)];
        let report = cost_report(&[false, true], &modules, &CostConfig::default()).unwrap();
        assert_eq!(report.saved_budget, 100);
        assert_eq!(report.remaining_service_time, 300);
        assert!((report.percent_saved_budget - 0.25).abs() < 1e-12);
    }

    #[test]
    fn cost_report_rejects_zero_loc_and_mismatch() {
        let modules = vec![module(0, true)];
        assert!(cost_report(&[true], &modules, &CostConfig::default()).is_err());
        let modules = vec![module(5, true)];
        assert!(cost_report(&[true, false], &modules, &CostConfig::default()).is_err());
    }

    #[test]
    fn random_triples_satisfy_identities() {
        let mut rng = seed::rng(0xC0, &[7]);
        for _ in 0..1000 {
            let n = rng.gen_range(1..=60);
            let modules: Vec<ModuleRecord> = (0..n)
                .map(|_| module(rng.gen_range(1..=5000), rng.gen_bool(0.3)))
                .collect();
            let preds: Vec<bool> = (0..n).map(|_| rng.gen_bool(0.5)).collect();
            let report = match cost_report(&preds, &modules, &CostConfig::default()) {
                Ok(r) => r,
                Err(_) => continue, // zero total LoC cannot happen (loc >= 1)
            };
            assert_eq!(report.saved_budget + report.remaining_service_time, report.total_loc);
            assert!((report.ppc + report.pnpc - 1.0).abs() < 1e-12);
            assert!(report.percent_saved_budget >= 0.0 && report.percent_saved_budget <= 1.0);
            assert!(report.percent_remaining_edits >= 0.0 && report.percent_remaining_edits <= 1.0);
            if let Some(f) = report.for_rate {
                assert!((0.0..=1.0).contains(&f));
            }
            if let Some(d) = report.decreased_editing_rate {
                assert!(d >= 0.0);
            }
            let hours_delta = report.project_hours * 100.0;
            assert!((hours_delta - report.remaining_service_time as f64).abs() < 1e-9);
        }
    }

    #[test]
    fn f_measure_matches_closed_form_on_random_matrices() {
        let mut rng = seed::rng(0xF1, &[3]);
        for _ in 0..500 {
            let cm = ConfusionMatrix::new(
                rng.gen_range(0..20),
                rng.gen_range(0..20),
                rng.gen_range(0..20),
                rng.gen_range(0..20),
            );
            let closed = if cm.tpc + cm.fpc + cm.fnc == 0 {
                continue;
            } else {
                2.0 * cm.tpc as f64 / (2.0 * cm.tpc as f64 + cm.fpc as f64 + cm.fnc as f64)
            };
            assert_eq!(f_measure(&cm).unwrap(), closed);
        }
    }
}
