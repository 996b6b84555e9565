//! Structured run report and the text tables derived from it.

use frontier_core::dataframe::StatsRow;
use frontier_core::dea::{DeaModelSpec, EfficiencyScore};
use frontier_core::diagnostics::{CorrelationMatrix, CorrelationPair, PcaResult, SignCheck, SignMatch};
use frontier_core::regress::{Method, RegressionResult};
use frontier_core::render::{format_number, render_comparison, render_result, RenderSettings};
use frontier_core::selection::{ComparisonTable, ReductionTrace, StagedRun};
use serde::Serialize;

pub const GINI_CONVENTION: &str =
    "population: mean absolute pairwise difference over twice the mean, no n/(n-1) correction";

#[derive(Debug, Clone, Serialize)]
pub struct Metadata {
    pub tool: String,
    pub version: String,
    pub timestamp: String,
    pub config_path: String,
    pub config_digest: String,
    pub data_path: String,
    pub year: Option<i32>,
    pub n: usize,
    pub rows_read: usize,
    pub rows_dropped: usize,
    pub dropped_dmus: Vec<String>,
    pub seed: u64,
    pub render: RenderSettings,
}

#[derive(Debug, Clone, Serialize)]
pub struct UnitValue {
    pub dmu_id: String,
    pub value: f64,
}

#[derive(Debug, Clone, Serialize)]
pub struct GiniSection {
    pub convention: String,
    pub periods: Vec<String>,
    pub values: Vec<UnitValue>,
}

#[derive(Debug, Clone, Serialize)]
pub struct DeaSection {
    pub model: DeaModelSpec,
    /// Dataset column holding the scores for the second stage.
    pub column: String,
    pub scores: Vec<EfficiencyScore>,
}

#[derive(Debug, Clone, Serialize)]
pub struct CorrelationSection {
    pub matrix: CorrelationMatrix,
    pub ranked_pairs: Vec<CorrelationPair>,
}

#[derive(Debug, Clone, Serialize)]
pub struct RegressionEntry {
    pub label: String,
    pub regression: String,
    pub method: Method,
    pub result: RegressionResult,
}

#[derive(Debug, Clone, Serialize)]
pub struct TraceEntry {
    pub label: String,
    pub trace: ReductionTrace,
}

#[derive(Debug, Clone, Serialize)]
pub struct StagedEntry {
    pub label: String,
    pub run: StagedRun,
}

#[derive(Debug, Clone, Serialize)]
pub struct SignEntry {
    pub label: String,
    pub check: SignCheck,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct Failure {
    pub step: String,
    pub item: String,
    pub message: String,
}

/// One run's results. Field order is the key order of the JSON document.
#[derive(Debug, Clone, Serialize)]
pub struct Report {
    pub metadata: Metadata,
    pub descriptive_statistics: Vec<StatsRow>,
    pub gini: Option<GiniSection>,
    pub dea: Vec<DeaSection>,
    pub correlation: Option<CorrelationSection>,
    pub pca: Option<PcaResult>,
    pub regressions: Vec<RegressionEntry>,
    pub reduction_traces: Vec<TraceEntry>,
    pub staged_runs: Vec<StagedEntry>,
    pub comparison: Option<ComparisonTable>,
    pub sign_checks: Vec<SignEntry>,
    pub failures: Vec<Failure>,
}

impl Report {
    pub fn to_json(&self) -> String {
        let mut s = serde_json::to_string_pretty(self).expect("report serializes");
        s.push('\n');
        s
    }

    /// Every text table of the run, in report order.
    pub fn render_tables(&self) -> String {
        let st = &self.metadata.render;
        let mut out = Vec::new();
        if !self.descriptive_statistics.is_empty() {
            out.push(section("Descriptive statistics", &stats_table(&self.descriptive_statistics, st)));
        }
        for d in &self.dea {
            out.push(section(&format!("DEA scores: {}", d.model.name), &dea_table(&d.scores, st)));
        }
        for r in &self.regressions {
            out.push(section(&format!("Regression: {}", r.label), &render_result(&r.result, st)));
        }
        for t in &self.reduction_traces {
            out.push(section(&format!("Backward elimination: {}", t.label), &trace_text(&t.trace, st)));
        }
        for s in &self.staged_runs {
            for stage in &s.run.stages {
                let mut body = render_result(&stage.result, st);
                let flagged: Vec<String> = stage
                    .vif
                    .flagged()
                    .map(|e| format!("{} ({})", e.variable, vif_text(e.vif, st)))
                    .collect();
                if !flagged.is_empty() {
                    body.push_str(&format!("VIF above {}: {}\n", format_number(stage.vif.threshold, st), flagged.join(", ")));
                }
                if let Some(note) = &stage.vif_note {
                    body.push_str(&format!("VIF: {note}\n"));
                }
                out.push(section(&format!("Staged inclusion: {} [{}]", s.label, stage.label), &body));
            }
        }
        if let Some(c) = &self.comparison {
            out.push(section("Model comparison", &render_comparison(c, st)));
        }
        for s in &self.sign_checks {
            out.push(section(&format!("Sign check: {}", s.label), &sign_text(&s.check, st)));
        }
        if !self.failures.is_empty() {
            let body: String = self
                .failures
                .iter()
                .map(|f| format!("{} [{}]: {}\n", f.step, f.item, f.message))
                .collect();
            out.push(section("Failures", &body));
        }
        out.join("\n")
    }
}

fn section(title: &str, body: &str) -> String {
    let mut s = format!("{title}\n{}\n{body}", "=".repeat(title.chars().count()));
    if !s.ends_with('\n') {
        s.push('\n');
    }
    s
}

fn vif_text(v: f64, st: &RenderSettings) -> String {
    if v.is_finite() {
        format_number(v, st)
    } else {
        "inf".into()
    }
}

fn columns(header: &[&str], rows: &[Vec<String>]) -> String {
    let widths: Vec<usize> = (0..header.len())
        .map(|j| {
            rows.iter()
                .map(|r| r[j].chars().count())
                .chain([header[j].chars().count()])
                .max()
                .unwrap_or(0)
        })
        .collect();
    let fmt_row = |cells: Vec<&str>| -> String {
        let parts: Vec<String> = cells
            .iter()
            .enumerate()
            .map(|(j, c)| {
                let pad = widths[j] - c.chars().count();
                if j == 0 {
                    format!("{c}{}", " ".repeat(pad))
                } else {
                    format!("{}{c}", " ".repeat(pad))
                }
            })
            .collect();
        parts.join("  ").trim_end().to_string()
    };
    let rule = "-".repeat(widths.iter().sum::<usize>() + 2 * (widths.len() - 1));
    let mut s = String::new();
    s.push_str(&fmt_row(header.to_vec()));
    s.push('\n');
    s.push_str(&rule);
    s.push('\n');
    for r in rows {
        s.push_str(&fmt_row(r.iter().map(String::as_str).collect()));
        s.push('\n');
    }
    s
}

fn stats_table(rows: &[StatsRow], st: &RenderSettings) -> String {
    let body: Vec<Vec<String>> = rows
        .iter()
        .map(|r| {
            vec![
                r.variable.clone(),
                format_number(r.min, st),
                format_number(r.median, st),
                format_number(r.max, st),
            ]
        })
        .collect();
    columns(&["Variable", "Min", "Median", "Max"], &body)
}

fn dea_table(scores: &[EfficiencyScore], st: &RenderSettings) -> String {
    let body: Vec<Vec<String>> = scores
        .iter()
        .map(|s| {
            let peers: Vec<String> = s
                .reference_set
                .iter()
                .map(|p| format!("{} {}", p.dmu_id, format_number(p.lambda, st)))
                .collect();
            vec![s.dmu_id.clone(), format_number(s.score, st), peers.join("; ")]
        })
        .collect();
    columns(&["DMU", "Score", "Peers"], &body)
}

fn trace_text(trace: &ReductionTrace, st: &RenderSettings) -> String {
    let mut s = format!(
        "Threshold {}; start with {} regressors.\n",
        format_number(trace.threshold, st),
        trace.initial_regressors.len()
    );
    for (i, step) in trace.steps.iter().enumerate() {
        s.push_str(&format!(
            "Step {}: removed {} (p = {}), Akaike {}\n",
            i + 1,
            step.removed,
            format_number(step.p_value, st),
            format_number(step.metrics.aic, st)
        ));
    }
    if trace.steps.is_empty() {
        s.push_str("No regressor exceeded the threshold.\n");
    }
    s.push('\n');
    s.push_str(&render_result(&trace.final_result, st));
    s
}

fn sign_text(check: &SignCheck, st: &RenderSettings) -> String {
    let body: Vec<Vec<String>> = check
        .terms
        .iter()
        .map(|t| {
            let outcome = match t.outcome {
                SignMatch::Match => "match",
                SignMatch::Mismatch => "MISMATCH",
                SignMatch::AmbiguousExpected => "no expectation",
                SignMatch::ZeroEstimate => "zero",
            };
            let expected = serde_json::to_value(t.expected)
                .ok()
                .and_then(|v| v.as_str().map(str::to_string))
                .unwrap_or_default();
            vec![t.term.clone(), expected, format_number(t.coefficient, st), outcome.to_string()]
        })
        .collect();
    columns(&["Term", "Expected", "Estimate", "Outcome"], &body)
}
