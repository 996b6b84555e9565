//! Second-stage estimators: OLS, Tobit (censored normal) and truncated
//! normal regression, with standard errors, p-values and fit metrics.

mod likelihood;
mod newton;
mod ols;
mod tobit;
mod truncated;

use std::fmt;

use nalgebra::{DMatrix, DVector};
use serde::{Deserialize, Serialize, Serializer};
use thiserror::Error;

use crate::dataframe::{DataError, Dataset};

pub use likelihood::{LogLikelihood, TobitLikelihood, TruncatedLikelihood};
pub use newton::{maximize, NewtonOptions, NewtonOutcome};
pub use ols::fit_ols;
pub use tobit::fit_tobit;
pub use truncated::fit_truncated;

/// Name of the constant term in result tables.
pub const INTERCEPT: &str = "INT";
pub const DEFAULT_SEED: u64 = 2016;

#[derive(Debug, Error)]
pub enum RegressError {
    #[error("invalid regression spec: {0}")]
    InvalidSpec(String),
    #[error("{n} observations for {k} parameters (need n > k)")]
    TooFewObservations { n: usize, k: usize },
    #[error("design matrix is rank deficient: `{column}` is collinear with {others:?}")]
    RankDeficient { column: String, others: Vec<String> },
    #[error("every observation lies at a censoring bound")]
    AllCensored,
    #[error("observation for dmu `{dmu}` (value {value}) is not strictly inside the truncation bounds")]
    OutsideTruncation { dmu: String, value: f64 },
    #[error("no convergence after {iterations} iterations (gradient norm {gradient_norm:e})")]
    NoConvergence {
        iterations: usize,
        gradient_norm: f64,
    },
    #[error("scale parameter collapsed below 1e-10")]
    SigmaCollapse,
    #[error("information matrix is singular at the optimum")]
    SingularInformation,
    #[error(transparent)]
    Data(#[from] DataError),
}

pub type Result<T, E = RegressError> = std::result::Result<T, E>;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Method {
    #[serde(rename = "OLS", alias = "ols")]
    Ols,
    #[serde(rename = "Tobit", alias = "tobit")]
    Tobit,
    #[serde(rename = "Truncated", alias = "truncated")]
    Truncated,
}

impl fmt::Display for Method {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Method::Ols => "OLS",
            Method::Tobit => "Tobit",
            Method::Truncated => "Truncated",
        })
    }
}

fn default_true() -> bool {
    true
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RegressionSpec {
    pub dependent: String,
    pub regressors: Vec<String>,
    #[serde(default = "default_true")]
    pub intercept: bool,
    pub method: Method,
    #[serde(default)]
    pub lower: Option<f64>,
    #[serde(default)]
    pub upper: Option<f64>,
}

impl RegressionSpec {
    pub fn new<S: AsRef<str>>(dependent: &str, regressors: &[S], method: Method) -> Self {
        Self {
            dependent: dependent.to_string(),
            regressors: regressors.iter().map(|s| s.as_ref().to_string()).collect(),
            intercept: true,
            method,
            lower: None,
            upper: None,
        }
    }

    pub fn bounds(mut self, lower: Option<f64>, upper: Option<f64>) -> Self {
        self.lower = lower;
        self.upper = upper;
        self
    }

    /// A Tobit spec without bounds gets the unit interval used for DEA scores.
    pub fn with_default_bounds(mut self) -> Self {
        if self.method == Method::Tobit && self.lower.is_none() && self.upper.is_none() {
            self.lower = Some(0.0);
            self.upper = Some(1.0);
        }
        self
    }

    pub fn with_regressors(&self, regressors: Vec<String>) -> Self {
        Self {
            regressors,
            ..self.clone()
        }
    }

    pub fn lower_bound(&self) -> f64 {
        self.lower.unwrap_or(f64::NEG_INFINITY)
    }

    pub fn upper_bound(&self) -> f64 {
        self.upper.unwrap_or(f64::INFINITY)
    }

    pub fn term_count(&self) -> usize {
        self.regressors.len() + usize::from(self.intercept)
    }

    pub fn validate(&self) -> Result<()> {
        let bad = |msg: String| Err(RegressError::InvalidSpec(msg));
        if self.term_count() == 0 {
            return bad("model has no terms".into());
        }
        for (i, r) in self.regressors.iter().enumerate() {
            if self.regressors[..i].contains(r) {
                return bad(format!("regressor `{r}` listed twice"));
            }
            if *r == self.dependent {
                return bad(format!("dependent `{r}` is also a regressor"));
            }
            if self.intercept && r == INTERCEPT {
                return bad(format!("`{INTERCEPT}` is reserved for the intercept"));
            }
        }
        for b in [self.lower, self.upper].into_iter().flatten() {
            if b.is_nan() {
                return bad("bound is NaN".into());
            }
        }
        let (lo, hi) = (self.lower_bound(), self.upper_bound());
        if lo >= hi {
            return bad(format!("lower bound {lo} is not below upper bound {hi}"));
        }
        if self.method == Method::Tobit && !lo.is_finite() && !hi.is_finite() {
            return bad("Tobit needs at least one finite censoring bound".into());
        }
        Ok(())
    }

    pub fn term_names(&self) -> Vec<String> {
        let mut names = Vec::with_capacity(self.term_count());
        if self.intercept {
            names.push(INTERCEPT.to_string());
        }
        names.extend(self.regressors.iter().cloned());
        names
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord)]
pub enum Stars {
    None,
    One,
    Two,
    Three,
}

impl Stars {
    /// `***` below 1%, `**` below 5%, `*` below 10%.
    pub fn from_p(p: f64) -> Self {
        if p < 0.01 {
            Stars::Three
        } else if p < 0.05 {
            Stars::Two
        } else if p < 0.1 {
            Stars::One
        } else {
            Stars::None
        }
    }

    pub fn as_str(self) -> &'static str {
        match self {
            Stars::None => "",
            Stars::One => "*",
            Stars::Two => "**",
            Stars::Three => "***",
        }
    }
}

impl Serialize for Stars {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        s.serialize_str(self.as_str())
    }
}

impl<'de> Deserialize<'de> for Stars {
    fn deserialize<D: serde::Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        let s = String::deserialize(d)?;
        match s.as_str() {
            "" => Ok(Stars::None),
            "*" => Ok(Stars::One),
            "**" => Ok(Stars::Two),
            "***" => Ok(Stars::Three),
            other => Err(serde::de::Error::custom(format!("invalid star level `{other}`"))),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TermEstimate {
    pub name: String,
    pub coefficient: f64,
    pub std_error: f64,
    /// t statistic for OLS, z statistic for the likelihood methods.
    pub statistic: f64,
    pub p_value: f64,
    pub stars: Stars,
}

impl TermEstimate {
    pub fn new(name: String, coefficient: f64, std_error: f64, p_of: impl Fn(f64) -> f64) -> Self {
        let (statistic, p_value) = if std_error > 0.0 {
            let s = coefficient / std_error;
            (s, p_of(s))
        } else if coefficient == 0.0 {
            (0.0, 1.0)
        } else {
            (f64::INFINITY.copysign(coefficient), 0.0)
        };
        Self {
            name,
            coefficient,
            std_error,
            statistic,
            p_value,
            stars: Stars::from_p(p_value),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RegressionResult {
    pub method: Method,
    pub dependent: String,
    pub terms: Vec<TermEstimate>,
    /// Residual scale; for OLS the degrees-of-freedom corrected estimate.
    pub sigma: f64,
    pub adj_r2: Option<f64>,
    pub aic: f64,
    pub log_lik: f64,
    /// Parameter count entering the Akaike criterion.
    pub param_count: usize,
    pub n: usize,
    pub n_censored_lower: usize,
    pub n_censored_upper: usize,
    pub lower: Option<f64>,
    pub upper: Option<f64>,
    pub converged: bool,
    pub iterations: usize,
    pub gradient_norm: f64,
    pub warnings: Vec<String>,
}

impl RegressionResult {
    pub fn term(&self, name: &str) -> Option<&TermEstimate> {
        self.terms.iter().find(|t| t.name == name)
    }

    pub fn coefficients(&self) -> Vec<f64> {
        self.terms.iter().map(|t| t.coefficient).collect()
    }

    /// Regressor names, without the intercept.
    pub fn regressors(&self) -> Vec<String> {
        self.terms
            .iter()
            .filter(|t| t.name != INTERCEPT)
            .map(|t| t.name.clone())
            .collect()
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct FitMetrics {
    pub adj_r2: Option<f64>,
    pub aic: f64,
    pub log_lik: f64,
}

/// Akaike criterion `2p - 2 ln L`.
pub fn aic(log_lik: f64, param_count: usize) -> f64 {
    2.0 * param_count as f64 - 2.0 * log_lik
}

pub fn fit_metrics(log_lik: f64, param_count: usize, adj_r2: Option<f64>) -> FitMetrics {
    FitMetrics {
        adj_r2,
        aic: aic(log_lik, param_count),
        log_lik,
    }
}

#[derive(Debug, Clone)]
pub struct FitOptions {
    /// Seed for the perturbed starts of the truncated estimator.
    pub seed: u64,
    pub newton: NewtonOptions,
    pub starts: usize,
    /// Coefficient disagreement between starts that triggers a warning.
    pub start_tolerance: f64,
}

impl Default for FitOptions {
    fn default() -> Self {
        Self {
            seed: DEFAULT_SEED,
            newton: NewtonOptions::default(),
            starts: 5,
            start_tolerance: 1e-4,
        }
    }
}

/// Fits `spec` with its configured method.
pub fn fit(spec: &RegressionSpec, ds: &Dataset, options: &FitOptions) -> Result<RegressionResult> {
    match spec.method {
        Method::Ols => fit_ols(spec, ds),
        Method::Tobit => fit_tobit(spec, ds, options),
        Method::Truncated => fit_truncated(spec, ds, options),
    }
}

/// Response vector and design matrix (intercept first) for `spec`.
pub(crate) struct Design {
    pub y: DVector<f64>,
    pub x: DMatrix<f64>,
    pub names: Vec<String>,
}

impl Design {
    pub fn build(spec: &RegressionSpec, ds: &Dataset) -> Result<Self> {
        spec.validate()?;
        let y = DVector::from_column_slice(ds.column(&spec.dependent)?);
        let n = ds.n();
        let names = spec.term_names();
        let mut cols: Vec<&[f64]> = Vec::with_capacity(names.len());
        for r in &spec.regressors {
            cols.push(ds.column(r)?);
        }
        let offset = usize::from(spec.intercept);
        let x = DMatrix::from_fn(n, names.len(), |i, j| {
            if j < offset {
                1.0
            } else {
                cols[j - offset][i]
            }
        });
        if n <= names.len() {
            return Err(RegressError::TooFewObservations { n, k: names.len() });
        }
        Ok(Self { y, x, names })
    }

    pub fn n(&self) -> usize {
        self.x.nrows()
    }

    pub fn k(&self) -> usize {
        self.x.ncols()
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn star_thresholds_at_boundaries() {
        assert_eq!(Stars::from_p(0.0099999), Stars::Three);
        assert_eq!(Stars::from_p(0.01), Stars::Two);
        assert_eq!(Stars::from_p(0.049999), Stars::Two);
        assert_eq!(Stars::from_p(0.05), Stars::One);
        assert_eq!(Stars::from_p(0.0999), Stars::One);
        assert_eq!(Stars::from_p(0.1), Stars::None);
        assert_eq!(Stars::from_p(0.5), Stars::None);
    }

    #[test]
    fn aic_values() {
        assert!((aic(39.02, 13) + 52.04).abs() < 1e-12);
        assert_eq!(aic(0.0, 0), 0.0);
        let m = fit_metrics(39.02, 14, None);
        assert!((m.aic + 50.04).abs() < 1e-12);
    }

    #[test]
    fn spec_validation() {
        let ok = RegressionSpec::new("y", &["a", "b"], Method::Ols);
        assert!(ok.validate().is_ok());
        let dup = RegressionSpec::new("y", &["a", "a"], Method::Ols);
        assert!(dup.validate().is_err());
        let dep = RegressionSpec::new("y", &["y"], Method::Ols);
        assert!(dep.validate().is_err());
        let tobit = RegressionSpec::new("y", &["a"], Method::Tobit);
        assert!(tobit.validate().is_err());
        assert_eq!(tobit.clone().with_default_bounds().upper, Some(1.0));
        let inverted = tobit.bounds(Some(1.0), Some(0.0));
        assert!(inverted.validate().is_err());
        let trunc = RegressionSpec::new("y", &["a"], Method::Truncated);
        assert!(trunc.validate().is_ok());
    }

    #[test]
    fn spec_json() {
        let spec: RegressionSpec = serde_json::from_str(
            r#"{"dependent":"dea_M1","regressors":["NONA","GINI"],"method":"Tobit","lower":0,"upper":1}"#,
        )
        .unwrap();
        assert!(spec.intercept);
        assert_eq!(spec.method, Method::Tobit);
        assert_eq!(spec.term_names(), ["INT", "NONA", "GINI"]);
    }
}
