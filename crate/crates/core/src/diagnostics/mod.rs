//! Pre- and post-regression checks: correlation, variance inflation,
//! principal components, Gini volatility, expected-sign plausibility and the
//! labour productivity ratio.

mod correlation;
mod gini;
mod jacobi;
mod pca;
mod signs;
mod vif;

use thiserror::Error;

use crate::dataframe::DataError;
use crate::regress::RegressError;

pub use correlation::{correlation_matrix, CorrelationMatrix, CorrelationPair};
pub use gini::{gini, gini_by_unit, load_period_counts, PeriodCounts};
pub use jacobi::{jacobi_eigen, SymmetricEigen};
pub use pca::{pca, PcaResult, Retain};
pub use signs::{sign_check, SignCheck, SignMatch, TermSign};
pub use vif::{vif, VifEntry, VifReport, DEFAULT_VIF_THRESHOLD};

#[derive(Debug, Error)]
pub enum DiagnosticsError {
    #[error("column `{0}` has zero variance")]
    ZeroVariance(String),
    #[error("need at least {needed} {what}, got {got}")]
    TooFew {
        what: &'static str,
        needed: usize,
        got: usize,
    },
    #[error("negative value {value} at position {index}")]
    NegativeValue { index: usize, value: f64 },
    #[error("series sums to zero")]
    ZeroSum,
    #[error("non-finite value at position {0}")]
    NonFinite(usize),
    #[error("length mismatch: {0} vs {1}")]
    LengthMismatch(usize, usize),
    #[error("non-positive denominator {value} at position {index}")]
    NonPositiveDenominator { index: usize, value: f64 },
    #[error("term `{0}` is not in the variable catalog")]
    UnknownTerm(String),
    #[error("invalid retention rule: {0}")]
    InvalidRetain(String),
    #[error("Jacobi iteration did not converge in {0} sweeps")]
    NoConvergence(usize),
    #[error("auxiliary regression failed: {0}")]
    Auxiliary(#[source] RegressError),
    #[error(transparent)]
    Data(#[from] DataError),
}

pub type Result<T, E = DiagnosticsError> = std::result::Result<T, E>;

/// Services delivered per unit of labour, element-wise.
pub fn productivity(output: &[f64], labour_hours: &[f64]) -> Result<Vec<f64>> {
    if output.len() != labour_hours.len() {
        return Err(DiagnosticsError::LengthMismatch(output.len(), labour_hours.len()));
    }
    output
        .iter()
        .zip(labour_hours)
        .enumerate()
        .map(|(i, (&o, &h))| {
            if !(h > 0.0) {
                Err(DiagnosticsError::NonPositiveDenominator { index: i, value: h })
            } else {
                Ok(o / h)
            }
        })
        .collect()
}

pub(crate) fn mean(v: &[f64]) -> f64 {
    v.iter().sum::<f64>() / v.len() as f64
}
