use std::fmt;

use indexmap::IndexMap;
use serde::{Deserialize, Serialize};

use super::{vif_or_note, Result, SelectionError};
use crate::dataframe::{Category, Dataset, VariableCatalog};
use crate::diagnostics::VifReport;
use crate::regress::{fit, FitOptions, RegressionResult, RegressionSpec};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum StageLabel {
    #[serde(rename = "endogenous")]
    Endogenous,
    #[serde(rename = "+dummies")]
    Dummies,
    #[serde(rename = "+airspace")]
    Airspace,
    #[serde(rename = "+demand")]
    Demand,
    #[serde(rename = "all")]
    All,
}

impl StageLabel {
    pub const ORDER: [StageLabel; 5] = [
        StageLabel::Endogenous,
        StageLabel::Dummies,
        StageLabel::Airspace,
        StageLabel::Demand,
        StageLabel::All,
    ];

    pub fn as_str(self) -> &'static str {
        match self {
            StageLabel::Endogenous => "endogenous",
            StageLabel::Dummies => "+dummies",
            StageLabel::Airspace => "+airspace",
            StageLabel::Demand => "+demand",
            StageLabel::All => "all",
        }
    }
}

impl fmt::Display for StageLabel {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

/// Which candidate regressors enter at stages 2 to 4. Anything not named
/// here and not endogenous enters at the final stage.
#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
pub struct StageMembership {
    /// Named dummy groups, all added at stage 2. May be empty.
    #[serde(default)]
    pub dummy_groups: IndexMap<String, Vec<String>>,
    #[serde(default)]
    pub airspace: Vec<String>,
    #[serde(default)]
    pub demand: Vec<String>,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Stage {
    pub label: StageLabel,
    pub regressors: Vec<String>,
    /// Regressors new at this stage.
    pub added: Vec<String>,
    pub result: RegressionResult,
    pub vif: VifReport,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub vif_note: Option<String>,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct StagedRun {
    pub dummy_groups: Vec<String>,
    pub stages: Vec<Stage>,
}

impl StagedRun {
    pub fn stage(&self, label: StageLabel) -> Option<&Stage> {
        self.stages.iter().find(|s| s.label == label)
    }
}

/// Candidate pool in catalog order: `spec.regressors`, or every catalog
/// variable present in the data (except the dependent) when none are given.
fn candidate_pool(catalog: &VariableCatalog, spec: &RegressionSpec, ds: &Dataset) -> Result<Vec<String>> {
    if spec.regressors.is_empty() {
        return Ok(catalog
            .iter()
            .filter(|v| v.name != spec.dependent && ds.has_column(&v.name))
            .map(|v| v.name.clone())
            .collect());
    }
    let mut pool = spec.regressors.clone();
    for r in &pool {
        if catalog.get(r).is_none() {
            return Err(SelectionError::UnknownVariable(r.clone()));
        }
    }
    pool.sort_by_key(|r| catalog.position(r));
    Ok(pool)
}

/// Fits five nested models: endogenous factors, then the dummy groups, the
/// airspace factors, the demand factors, and finally every candidate. Each
/// stage carries a VIF report; flags are reported, not acted on.
pub fn staged_inclusion(
    catalog: &VariableCatalog,
    membership: &StageMembership,
    spec: &RegressionSpec,
    ds: &Dataset,
    vif_threshold: f64,
    options: &FitOptions,
) -> Result<StagedRun> {
    let pool = candidate_pool(catalog, spec, ds)?;
    let named = membership
        .dummy_groups
        .values()
        .flatten()
        .chain(&membership.airspace)
        .chain(&membership.demand);
    for name in named {
        if !pool.contains(name) {
            return Err(SelectionError::InvalidMembership(name.clone()));
        }
    }

    let mut included: Vec<String> = Vec::new();
    let mut run = StagedRun {
        dummy_groups: membership.dummy_groups.keys().cloned().collect(),
        stages: Vec::with_capacity(5),
    };
    for label in StageLabel::ORDER {
        let entering = |name: &String| -> bool {
            match label {
                StageLabel::Endogenous => {
                    catalog.get(name).map(|v| v.category) == Some(Category::Endogenous)
                }
                StageLabel::Dummies => membership.dummy_groups.values().any(|g| g.contains(name)),
                StageLabel::Airspace => membership.airspace.contains(name),
                StageLabel::Demand => membership.demand.contains(name),
                StageLabel::All => true,
            }
        };
        let added: Vec<String> = pool
            .iter()
            .filter(|n| !included.contains(n) && entering(n))
            .cloned()
            .collect();
        included.extend(added.iter().cloned());
        let regressors: Vec<String> = pool.iter().filter(|n| included.contains(n)).cloned().collect();

        let result = match fit(&spec.with_regressors(regressors.clone()), ds, options) {
            Ok(r) => r,
            Err(source) => {
                return Err(SelectionError::StageFailed {
                    stage: label,
                    source,
                    partial: Box::new(run),
                })
            }
        };
        let (vif, vif_note) = vif_or_note(ds, &regressors, vif_threshold);
        run.stages.push(Stage {
            label,
            regressors,
            added,
            result,
            vif,
            vif_note,
        });
    }
    Ok(run)
}
