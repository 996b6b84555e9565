//! Two-stage efficiency analysis: DEA scoring of decision-making units, then
//! OLS, Tobit and truncated regressions of the scores on explanatory factors,
//! with the usual diagnostics, selection protocols and table rendering.
//!
//! ```
//! use frontier_core::dea::{solve_envelopment, DeaModelSpec};
//! use frontier_core::dataframe::Dataset;
//! use indexmap::IndexMap;
//!
//! let mut cols = IndexMap::new();
//! cols.insert("x".to_string(), vec![1.0, 2.0]);
//! cols.insert("y".to_string(), vec![1.0, 1.0]);
//! let ds = Dataset::new(vec!["A".into(), "B".into()], None, cols, "inline").unwrap();
//! let scores = solve_envelopment(&DeaModelSpec::new("m", &["x"], &["y"]), &ds).unwrap();
//! assert_eq!(scores[0].score, 1.0);
//! assert!((scores[1].score - 0.5).abs() < 1e-12);
//! ```

pub mod dataframe;
pub mod dea;
pub mod diagnostics;
pub mod dist;
pub mod regress;
pub mod render;
pub mod selection;

pub use dataframe::{
    apply_transforms, descriptive_stats, load_csv, Category, DataError, Dataset, ExpectedSign,
    LoadOptions, VariableCatalog, VariableSpec,
};
pub use dea::{solve_envelopment, DeaError, DeaModelSpec, EfficiencyScore, Orientation, ReturnsToScale};
pub use diagnostics::DiagnosticsError;
pub use regress::{fit, FitOptions, Method, RegressError, RegressionResult, RegressionSpec};
pub use render::RenderSettings;
pub use selection::{ComparisonTable, ReductionTrace, SelectionError, StagedRun};
