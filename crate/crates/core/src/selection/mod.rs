//! Model-selection protocols: backward elimination, five-stage inclusion and
//! side-by-side comparison of fitted models.

mod backward;
mod compare;
mod staged;

use thiserror::Error;

use crate::dataframe::Dataset;
use crate::diagnostics::{vif, VifReport};
use crate::regress::RegressError;

pub use backward::{backward_eliminate, ReductionStep, ReductionTrace, DEFAULT_P_THRESHOLD};
pub use compare::{compare_models, ComparisonColumn, ComparisonRow, ComparisonTable};
pub use staged::{staged_inclusion, Stage, StageLabel, StageMembership, StagedRun};

#[derive(Debug, Error)]
pub enum SelectionError {
    #[error("p-value threshold {0} is outside (0, 1)")]
    InvalidThreshold(f64),
    #[error("initial fit failed: {0}")]
    InitialFit(#[source] RegressError),
    #[error("refit after removing `{removed}` (step {step}) failed: {source}")]
    StepFit {
        step: usize,
        removed: String,
        #[source]
        source: RegressError,
    },
    #[error("need at least 2 results to compare, got {0}")]
    TooFewResults(usize),
    #[error("duplicate result label `{0}`")]
    DuplicateLabel(String),
    #[error("variable `{0}` is not in the catalog")]
    UnknownVariable(String),
    #[error("stage membership lists `{0}`, which is not a candidate regressor")]
    InvalidMembership(String),
    #[error("stage `{stage}` failed: {source}")]
    StageFailed {
        stage: StageLabel,
        #[source]
        source: RegressError,
        /// Stages completed before the failure.
        partial: Box<StagedRun>,
    },
}

pub type Result<T, E = SelectionError> = std::result::Result<T, E>;

/// VIF report for a regressor set; empty (with a note) when it cannot be
/// computed, e.g. for fewer than two regressors.
pub(crate) fn vif_or_note(
    ds: &Dataset,
    regressors: &[String],
    threshold: f64,
) -> (VifReport, Option<String>) {
    match vif(ds, regressors, threshold) {
        Ok(report) => (report, None),
        Err(e) => (VifReport::empty(threshold), Some(e.to_string())),
    }
}
