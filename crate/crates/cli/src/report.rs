//! Run report structures and their on-disk forms: a consolidated JSON
//! (config echo included) plus plot-ready CSVs.

use serde::{Deserialize, Serialize};

use hiel_core::metrics::CostReport;

use crate::config::ExperimentConfig;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PwmvSummary {
    pub n_experts: usize,
    /// Accumulated expected mistakes M.
    pub expected_mistakes: f64,
    pub best_expert_mistakes: u64,
    /// Bound evaluated at the final best-expert mistake count.
    pub mistake_bound: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TargetRow {
    pub target: String,
    pub modules: usize,
    pub f_measure: Option<f64>,
    pub auc: Option<f64>,
    pub cost: CostReport,
    pub pwmv: PwmvSummary,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RunReport {
    /// Parsing this echo reproduces the run.
    pub config: ExperimentConfig,
    pub seed: u64,
    pub rows: Vec<TargetRow>,
}

fn opt(v: Option<f64>) -> String {
    match v {
        Some(x) => format!("{x:.4}"),
        None => "NA".to_string(),
    }
}

impl RunReport {
    pub const METRICS_HEADER: &'static str = "target,modules,f_measure,auc,ppc,pnpc,for_rate,\
percent_saved_budget,percent_remaining_edits,expected_mistakes,mistake_bound,best_expert_mistakes";

    pub fn metrics_csv(&self) -> String {
        let mut out = String::from(Self::METRICS_HEADER);
        out.push('\n');
        for row in &self.rows {
            out.push_str(&format!(
                "{},{},{},{},{:.4},{:.4},{},{:.4},{:.4},{:.4},{:.4},{}\n",
                row.target,
                row.modules,
                opt(row.f_measure),
                opt(row.auc),
                row.cost.ppc,
                row.cost.pnpc,
                opt(row.cost.for_rate),
                row.cost.percent_saved_budget,
                row.cost.percent_remaining_edits,
                row.pwmv.expected_mistakes,
                row.pwmv.mistake_bound,
                row.pwmv.best_expert_mistakes,
            ));
        }
        out
    }

    pub fn cost_csv(&self) -> String {
        let mut out = String::from(CostReport::CSV_HEADER);
        out.push('\n');
        for row in &self.rows {
            out.push_str(&row.cost.csv_row(&row.target));
            out.push('\n');
        }
        out
    }

    pub fn to_json(&self) -> serde_json::Result<String> {
        serde_json::to_string_pretty(self)
    }

    pub fn from_json(text: &str) -> serde_json::Result<RunReport> {
        serde_json::from_str(text)
    }
}

/// One sweep measurement.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SweepRow {
    pub target: String,
    pub beta: f64,
    pub set_size: usize,
    pub f_measure: Option<f64>,
}

pub const SWEEP_HEADER: &str = "target,beta,set_size,f_measure";

pub fn sweep_csv(rows: &[SweepRow]) -> String {
    let mut out = String::from(SWEEP_HEADER);
    out.push('\n');
    for row in rows {
        out.push_str(&format!(
            "{},{},{},{}\n",
            row.target,
            row.beta,
            row.set_size,
            opt(row.f_measure)
        ));
    }
    out
}
