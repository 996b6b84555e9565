use serde::Serialize;

use super::{vif_or_note, Result, SelectionError};
use crate::dataframe::Dataset;
use crate::diagnostics::VifReport;
use crate::regress::{fit, FitMetrics, FitOptions, RegressionResult, RegressionSpec, INTERCEPT};

pub const DEFAULT_P_THRESHOLD: f64 = 0.33;

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ReductionStep {
    pub removed: String,
    pub p_value: f64,
    pub remaining: Vec<String>,
    pub metrics: FitMetrics,
    pub vif: VifReport,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub vif_note: Option<String>,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ReductionTrace {
    pub threshold: f64,
    pub initial_regressors: Vec<String>,
    pub steps: Vec<ReductionStep>,
    #[serde(rename = "final")]
    pub final_result: RegressionResult,
}

impl ReductionTrace {
    pub fn removed(&self) -> impl Iterator<Item = &str> {
        self.steps.iter().map(|s| s.removed.as_str())
    }
}

/// Largest p-value among the regressors; on ties the later one in
/// regressor order is chosen.
fn worst_regressor(result: &RegressionResult) -> Option<(String, f64)> {
    result
        .terms
        .iter()
        .filter(|t| t.name != INTERCEPT)
        .fold(None, |worst: Option<(&str, f64)>, t| match worst {
            Some((_, p)) if t.p_value < p => worst,
            _ => Some((t.name.as_str(), t.p_value)),
        })
        .map(|(name, p)| (name.to_string(), p))
}

/// Removes, one at a time, the regressor with the largest p-value above
/// `threshold` and refits, until every p-value is at most `threshold` or a
/// single regressor is left. The intercept is never removed.
pub fn backward_eliminate(
    spec: &RegressionSpec,
    ds: &Dataset,
    threshold: f64,
    vif_threshold: f64,
    options: &FitOptions,
) -> Result<ReductionTrace> {
    if !(threshold > 0.0 && threshold < 1.0) {
        return Err(SelectionError::InvalidThreshold(threshold));
    }
    let mut current = fit(spec, ds, options).map_err(SelectionError::InitialFit)?;
    let initial_regressors = spec.regressors.clone();
    let mut regressors = initial_regressors.clone();
    let mut steps = Vec::new();

    while regressors.len() > 1 {
        let Some((name, p)) = worst_regressor(&current) else {
            break;
        };
        if p <= threshold {
            break;
        }
        regressors.retain(|r| *r != name);
        let next = spec.with_regressors(regressors.clone());
        current = fit(&next, ds, options).map_err(|source| SelectionError::StepFit {
            step: steps.len() + 1,
            removed: name.clone(),
            source,
        })?;
        let (vif, vif_note) = vif_or_note(ds, &regressors, vif_threshold);
        steps.push(ReductionStep {
            removed: name,
            p_value: p,
            remaining: regressors.clone(),
            metrics: FitMetrics {
                adj_r2: current.adj_r2,
                aic: current.aic,
                log_lik: current.log_lik,
            },
            vif,
            vif_note,
        });
    }

    Ok(ReductionTrace {
        threshold,
        initial_regressors,
        steps,
        final_result: current,
    })
}
