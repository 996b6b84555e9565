//! Run configuration: a JSON document whose relative paths resolve against
//! the directory holding the config file.

use std::collections::HashSet;
use std::fs;
use std::path::{Path, PathBuf};

use frontier_core::dataframe::MissingPolicy;
use frontier_core::dea::DeaModelSpec;
use frontier_core::diagnostics::DEFAULT_VIF_THRESHOLD;
use frontier_core::regress::{Method, RegressionSpec};
use frontier_core::render::RenderSettings;
use frontier_core::selection::{StageMembership, DEFAULT_P_THRESHOLD};
use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

use crate::CliError;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RegressionConfig {
    pub label: String,
    pub dependent: String,
    pub regressors: Vec<String>,
    #[serde(default = "default_methods")]
    pub methods: Vec<Method>,
    #[serde(default = "yes")]
    pub intercept: bool,
    /// Censoring/truncation limits; Tobit defaults to [0, 1] when both are
    /// absent.
    #[serde(default)]
    pub lower: Option<f64>,
    #[serde(default)]
    pub upper: Option<f64>,
    /// Overrides `lower`/`upper` for the truncated fit only.
    #[serde(default)]
    pub truncated_lower: Option<f64>,
    #[serde(default)]
    pub truncated_upper: Option<f64>,
}

fn default_methods() -> Vec<Method> {
    vec![Method::Ols]
}

fn yes() -> bool {
    true
}

impl RegressionConfig {
    pub fn spec(&self, method: Method) -> RegressionSpec {
        let mut spec = RegressionSpec::new(&self.dependent, &self.regressors, method);
        spec.intercept = self.intercept;
        match method {
            Method::Ols => spec,
            Method::Tobit => spec.bounds(self.lower, self.upper).with_default_bounds(),
            Method::Truncated => {
                let explicit = self.truncated_lower.is_some() || self.truncated_upper.is_some();
                if explicit {
                    spec.bounds(self.truncated_lower, self.truncated_upper)
                } else {
                    spec.bounds(self.lower, self.upper)
                }
            }
        }
    }

    pub fn result_label(&self, method: Method) -> String {
        format!("{} {}", self.label, method)
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct StagedConfig {
    pub label: String,
    pub dependent: String,
    #[serde(default)]
    pub regressors: Vec<String>,
    #[serde(default = "ols")]
    pub method: Method,
    #[serde(default)]
    pub lower: Option<f64>,
    #[serde(default)]
    pub upper: Option<f64>,
    #[serde(default)]
    pub membership: StageMembership,
}

fn ols() -> Method {
    Method::Ols
}

impl StagedConfig {
    pub fn spec(&self) -> RegressionSpec {
        let spec = RegressionSpec::new(&self.dependent, &self.regressors, self.method).bounds(self.lower, self.upper);
        if self.method == Method::Tobit {
            spec.with_default_bounds()
        } else {
            spec
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SelectionConfig {
    #[serde(default = "default_threshold")]
    pub threshold: f64,
    #[serde(default = "default_vif")]
    pub vif_threshold: f64,
    /// Run backward elimination on every configured regression.
    #[serde(default)]
    pub backward: bool,
    #[serde(default)]
    pub staged: Vec<StagedConfig>,
}

fn default_threshold() -> f64 {
    DEFAULT_P_THRESHOLD
}

fn default_vif() -> f64 {
    DEFAULT_VIF_THRESHOLD
}

impl Default for SelectionConfig {
    fn default() -> Self {
        Self {
            threshold: DEFAULT_P_THRESHOLD,
            vif_threshold: DEFAULT_VIF_THRESHOLD,
            backward: false,
            staged: Vec::new(),
        }
    }
}

/// Labour productivity column derived before the regressions.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ProductivityConfig {
    pub name: String,
    pub output: String,
    pub labour_hours: String,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct PcaConfig {
    pub variables: Vec<String>,
    #[serde(default = "default_share")]
    pub retain_share: f64,
}

fn default_share() -> f64 {
    0.8
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RunConfig {
    pub data: PathBuf,
    /// Variable catalog JSON; the built-in 22-factor catalog when absent.
    #[serde(default)]
    pub catalog: Option<PathBuf>,
    /// Per-unit period counts (`dmu_id` + one column per period) used to
    /// populate the GINI variable.
    #[serde(default)]
    pub monthly_counts: Option<PathBuf>,
    #[serde(default)]
    pub year: Option<i32>,
    #[serde(default)]
    pub missing_policy: MissingPolicy,
    #[serde(default)]
    pub output_dir: Option<PathBuf>,
    #[serde(default)]
    pub seed: Option<u64>,
    /// Variables for descriptive statistics; every loaded column when empty.
    #[serde(default)]
    pub describe: Vec<String>,
    /// Variables for the correlation matrix; skipped when empty.
    #[serde(default)]
    pub correlation: Vec<String>,
    #[serde(default)]
    pub pca: Option<PcaConfig>,
    #[serde(default)]
    pub productivity: Option<ProductivityConfig>,
    #[serde(default)]
    pub dea: Vec<DeaModelSpec>,
    #[serde(default)]
    pub regressions: Vec<RegressionConfig>,
    #[serde(default)]
    pub selection: SelectionConfig,
    #[serde(default)]
    pub render: RenderSettings,
}

/// A parsed config together with where it came from.
#[derive(Debug, Clone)]
pub struct LoadedConfig {
    pub config: RunConfig,
    pub path: PathBuf,
    pub base_dir: PathBuf,
    /// Hex SHA-256 of the raw config bytes.
    pub digest: String,
}

impl LoadedConfig {
    pub fn resolve(&self, p: &Path) -> PathBuf {
        if p.is_absolute() {
            p.to_path_buf()
        } else {
            self.base_dir.join(p)
        }
    }

    pub fn data_path(&self) -> PathBuf {
        self.resolve(&self.config.data)
    }

    pub fn catalog_path(&self) -> Option<PathBuf> {
        self.config.catalog.as_deref().map(|p| self.resolve(p))
    }

    pub fn monthly_path(&self) -> Option<PathBuf> {
        self.config.monthly_counts.as_deref().map(|p| self.resolve(p))
    }

    pub fn output_dir(&self) -> PathBuf {
        self.resolve(self.config.output_dir.as_deref().unwrap_or(Path::new("out")))
    }
}

pub fn digest(bytes: &[u8]) -> String {
    Sha256::digest(bytes).iter().map(|b| format!("{b:02x}")).collect()
}

/// Reads, parses and statically validates a config. Referenced input files
/// must exist.
pub fn load_config(path: &Path) -> Result<LoadedConfig, CliError> {
    let bytes = fs::read(path).map_err(|source| CliError::Io {
        path: path.display().to_string(),
        source,
    })?;
    let config: RunConfig =
        serde_json::from_slice(&bytes).map_err(|e| CliError::Config(format!("{}: {e}", path.display())))?;
    let base_dir = path.parent().map(Path::to_path_buf).unwrap_or_default();
    let loaded = LoadedConfig {
        digest: digest(&bytes),
        config,
        path: path.to_path_buf(),
        base_dir,
    };
    validate(&loaded)?;
    Ok(loaded)
}

fn validate(loaded: &LoadedConfig) -> Result<(), CliError> {
    let c = &loaded.config;
    let bad = |msg: String| Err(CliError::Config(msg));
    if c.dea.is_empty() && c.regressions.is_empty() && c.selection.staged.is_empty() {
        return bad("config requests no analysis: add a DEA model or a regression".into());
    }
    let mut names = HashSet::new();
    for m in &c.dea {
        m.validate().map_err(|e| CliError::Config(format!("DEA model `{}`: {e}", m.name)))?;
        if !names.insert(m.name.clone()) {
            return bad(format!("duplicate DEA model name `{}`", m.name));
        }
    }
    let mut labels = HashSet::new();
    for r in &c.regressions {
        if !labels.insert(r.label.clone()) {
            return bad(format!("duplicate regression label `{}`", r.label));
        }
        if r.methods.is_empty() {
            return bad(format!("regression `{}` lists no methods", r.label));
        }
        for &m in &r.methods {
            r.spec(m)
                .validate()
                .map_err(|e| CliError::Config(format!("regression `{}` ({m}): {e}", r.label)))?;
        }
    }
    for s in &c.selection.staged {
        s.spec().validate().map_err(|e| CliError::Config(format!("staged run `{}`: {e}", s.label)))?;
    }
    let t = c.selection.threshold;
    if !(t > 0.0 && t < 1.0) {
        return bad(format!("selection threshold {t} is outside (0, 1)"));
    }
    if !(c.selection.vif_threshold > 1.0) {
        return bad(format!("VIF threshold {} must exceed 1", c.selection.vif_threshold));
    }
    if let Some(p) = &c.pca {
        if !(p.retain_share > 0.0 && p.retain_share <= 1.0) {
            return bad(format!("PCA retain_share {} is outside (0, 1]", p.retain_share));
        }
    }
    if c.render.decimals > 12 {
        return bad(format!("render decimals {} exceeds 12", c.render.decimals));
    }
    let mut inputs = vec![loaded.data_path()];
    inputs.extend(loaded.catalog_path());
    inputs.extend(loaded.monthly_path());
    for p in inputs {
        if !p.is_file() {
            return Err(CliError::Io {
                path: p.display().to_string(),
                source: std::io::Error::new(std::io::ErrorKind::NotFound, "referenced file does not exist"),
            });
        }
    }
    Ok(())
}
