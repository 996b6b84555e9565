use serde::{Deserialize, Serialize, Serializer};

use super::{DiagnosticsError, Result};
use crate::dataframe::Dataset;
use crate::regress::{fit_ols, Method, RegressError, RegressionSpec};

pub const DEFAULT_VIF_THRESHOLD: f64 = 10.0;

/// `1 - R²` below this is treated as exact collinearity.
const COLLINEAR_TOLERANCE: f64 = 1e-12;

fn finite_or_string<S: Serializer>(v: &f64, s: S) -> std::result::Result<S::Ok, S::Error> {
    if v.is_finite() {
        s.serialize_f64(*v)
    } else {
        s.serialize_str("inf")
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct VifEntry {
    pub variable: String,
    #[serde(serialize_with = "finite_or_string")]
    pub vif: f64,
    pub r_squared: f64,
    pub flagged: bool,
    /// Set when the regressor is an exact linear combination of the others.
    pub collinear: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct VifReport {
    pub threshold: f64,
    pub entries: Vec<VifEntry>,
}

impl VifReport {
    pub fn empty(threshold: f64) -> Self {
        Self {
            threshold,
            entries: Vec::new(),
        }
    }

    pub fn flagged(&self) -> impl Iterator<Item = &VifEntry> {
        self.entries.iter().filter(|e| e.flagged)
    }

    pub fn any_flagged(&self) -> bool {
        self.entries.iter().any(|e| e.flagged)
    }

    pub fn get(&self, name: &str) -> Option<&VifEntry> {
        self.entries.iter().find(|e| e.variable == name)
    }
}

impl<'de> Deserialize<'de> for VifEntry {
    fn deserialize<D: serde::Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        #[derive(Deserialize)]
        #[serde(untagged)]
        enum Num {
            F(f64),
            S(String),
        }
        #[derive(Deserialize)]
        struct Raw {
            variable: String,
            vif: Num,
            r_squared: f64,
            flagged: bool,
            collinear: bool,
        }
        let raw = Raw::deserialize(d)?;
        let vif = match raw.vif {
            Num::F(v) => v,
            Num::S(s) if s == "inf" => f64::INFINITY,
            Num::S(s) => return Err(serde::de::Error::custom(format!("invalid VIF `{s}`"))),
        };
        Ok(VifEntry {
            variable: raw.variable,
            vif,
            r_squared: raw.r_squared,
            flagged: raw.flagged,
            collinear: raw.collinear,
        })
    }
}

/// Variance inflation factors from the auxiliary regressions of each
/// regressor on the others plus an intercept.
pub fn vif<S: AsRef<str>>(ds: &Dataset, regressors: &[S], threshold: f64) -> Result<VifReport> {
    if regressors.len() < 2 {
        return Err(DiagnosticsError::TooFew {
            what: "regressors",
            needed: 2,
            got: regressors.len(),
        });
    }
    let names: Vec<String> = regressors.iter().map(|s| s.as_ref().to_string()).collect();
    let mut entries = Vec::with_capacity(names.len());
    for (j, target) in names.iter().enumerate() {
        let others: Vec<&String> = names.iter().enumerate().filter(|(i, _)| *i != j).map(|(_, n)| n).collect();
        let spec = RegressionSpec::new(target, &others, Method::Ols);
        let (vif, r_squared, collinear) = match fit_ols(&spec, ds) {
            Ok(fit) => {
                let r2 = auxiliary_r2(ds, target, &fit.coefficients(), &others)?;
                if 1.0 - r2 <= COLLINEAR_TOLERANCE {
                    (f64::INFINITY, 1.0, true)
                } else {
                    (1.0 / (1.0 - r2), r2, false)
                }
            }
            Err(RegressError::RankDeficient { .. }) => (f64::INFINITY, 1.0, true),
            Err(RegressError::Data(e)) => return Err(e.into()),
            Err(e) => return Err(DiagnosticsError::Auxiliary(e)),
        };
        entries.push(VifEntry {
            variable: target.clone(),
            vif,
            r_squared,
            flagged: vif >= threshold,
            collinear,
        });
    }
    Ok(VifReport { threshold, entries })
}

/// Centred R² of the auxiliary fit (always with intercept).
fn auxiliary_r2(ds: &Dataset, target: &str, coef: &[f64], others: &[&String]) -> Result<f64> {
    let y = ds.column(target)?;
    let cols: Vec<&[f64]> = others
        .iter()
        .map(|o| ds.column(o))
        .collect::<Result<_, _>>()?;
    let mean = super::mean(y);
    let mut rss = 0.0;
    let mut tss = 0.0;
    for (i, &yi) in y.iter().enumerate() {
        let fitted = coef[0] + cols.iter().zip(&coef[1..]).map(|(c, b)| c[i] * b).sum::<f64>();
        rss += (yi - fitted).powi(2);
        tss += (yi - mean).powi(2);
    }
    if !(tss > 0.0) {
        return Err(DiagnosticsError::ZeroVariance(target.to_string()));
    }
    Ok(1.0 - rss / tss)
}
