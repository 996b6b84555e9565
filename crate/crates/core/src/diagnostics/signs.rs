use serde::{Deserialize, Serialize};

use super::{DiagnosticsError, Result};
use crate::dataframe::{ExpectedSign, VariableCatalog};
use crate::regress::{RegressionResult, INTERCEPT};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum SignMatch {
    Match,
    Mismatch,
    AmbiguousExpected,
    /// The estimate is exactly zero, so it carries no sign.
    ZeroEstimate,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TermSign {
    pub term: String,
    pub expected: ExpectedSign,
    pub coefficient: f64,
    pub outcome: SignMatch,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SignCheck {
    pub terms: Vec<TermSign>,
}

impl SignCheck {
    pub fn mismatches(&self) -> impl Iterator<Item = &TermSign> {
        self.terms.iter().filter(|t| t.outcome == SignMatch::Mismatch)
    }

    pub fn get(&self, term: &str) -> Option<&TermSign> {
        self.terms.iter().find(|t| t.term == term)
    }
}

pub fn classify(expected: ExpectedSign, coefficient: f64) -> SignMatch {
    match expected {
        ExpectedSign::Ambiguous => SignMatch::AmbiguousExpected,
        _ if coefficient == 0.0 => SignMatch::ZeroEstimate,
        ExpectedSign::Positive if coefficient > 0.0 => SignMatch::Match,
        ExpectedSign::Negative if coefficient < 0.0 => SignMatch::Match,
        _ => SignMatch::Mismatch,
    }
}

/// Compares each estimated coefficient's sign with the catalog expectation.
pub fn sign_check(result: &RegressionResult, catalog: &VariableCatalog) -> Result<SignCheck> {
    let terms = result
        .terms
        .iter()
        .filter(|t| t.name != INTERCEPT)
        .map(|t| {
            let spec = catalog
                .get(&t.name)
                .ok_or_else(|| DiagnosticsError::UnknownTerm(t.name.clone()))?;
            Ok(TermSign {
                term: t.name.clone(),
                expected: spec.expected_sign,
                coefficient: t.coefficient,
                outcome: classify(spec.expected_sign, t.coefficient),
            })
        })
        .collect::<Result<_>>()?;
    Ok(SignCheck { terms })
}
