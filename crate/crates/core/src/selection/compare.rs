use serde::Serialize;

use super::{Result, SelectionError};
use crate::regress::{Method, RegressionResult, TermEstimate};

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ComparisonColumn {
    pub label: String,
    pub method: Method,
    pub dependent: String,
    pub adj_r2: Option<f64>,
    pub aic: f64,
    pub log_lik: f64,
    pub param_count: usize,
    pub n: usize,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ComparisonRow {
    pub term: String,
    /// One cell per column; `None` where the model lacks the term.
    pub cells: Vec<Option<TermEstimate>>,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ComparisonTable {
    pub columns: Vec<ComparisonColumn>,
    pub rows: Vec<ComparisonRow>,
    /// Column with the smallest AIC (earliest on ties).
    pub best_aic: usize,
    /// Column with the largest log-likelihood (earliest on ties).
    pub best_log_lik: usize,
}

/// Aligns fitted models by term name, in order of first appearance.
pub fn compare_models(results: Vec<(String, RegressionResult)>) -> Result<ComparisonTable> {
    if results.len() < 2 {
        return Err(SelectionError::TooFewResults(results.len()));
    }
    for (i, (label, _)) in results.iter().enumerate() {
        if results[..i].iter().any(|(l, _)| l == label) {
            return Err(SelectionError::DuplicateLabel(label.clone()));
        }
    }

    let mut terms: Vec<String> = Vec::new();
    for (_, r) in &results {
        for t in &r.terms {
            if !terms.contains(&t.name) {
                terms.push(t.name.clone());
            }
        }
    }
    let rows = terms
        .into_iter()
        .map(|term| ComparisonRow {
            cells: results.iter().map(|(_, r)| r.term(&term).cloned()).collect(),
            term,
        })
        .collect();

    let mut best_aic = 0;
    let mut best_log_lik = 0;
    for (i, (_, r)) in results.iter().enumerate() {
        if r.aic < results[best_aic].1.aic {
            best_aic = i;
        }
        if r.log_lik > results[best_log_lik].1.log_lik {
            best_log_lik = i;
        }
    }
    let columns = results
        .into_iter()
        .map(|(label, r)| ComparisonColumn {
            label,
            method: r.method,
            dependent: r.dependent,
            adj_r2: r.adj_r2,
            aic: r.aic,
            log_lik: r.log_lik,
            param_count: r.param_count,
            n: r.n,
        })
        .collect();
    Ok(ComparisonTable {
        columns,
        rows,
        best_aic,
        best_log_lik,
    })
}
