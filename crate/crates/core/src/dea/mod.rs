//! First-stage efficiency scoring by data envelopment analysis.
//!
//! Each decision-making unit is scored by its own envelopment linear
//! program, solved with the in-crate simplex in [`simplex`].

pub mod simplex;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::dataframe::{DataError, Dataset};
pub use simplex::{lp_solve, Bounds, Direction, LpError, LpProblem, LpSolution, LpStatus, Sense};

/// Scores within this distance of 1 are reported as exactly 1.
pub const FRONTIER_TOLERANCE: f64 = 1e-9;
/// Intensity weights at or below this are left out of reference sets.
const PEER_WEIGHT_FLOOR: f64 = 1e-9;

#[derive(Debug, Error)]
pub enum DeaError {
    #[error("model `{0}` needs at least one input and one output")]
    EmptyFactors(String),
    #[error("variable `{0}` is listed as both input and output")]
    OverlappingFactor(String),
    #[error("column `{column}` is not strictly positive for dmu `{dmu}` (value {value})")]
    NonPositive {
        column: String,
        dmu: String,
        value: f64,
    },
    #[error("LP for dmu `{dmu}` is {status:?}")]
    Unsolvable { dmu: String, status: LpStatus },
    #[error("LP for dmu `{dmu}` failed: {source}")]
    Lp {
        dmu: String,
        #[source]
        source: LpError,
    },
    #[error(transparent)]
    Data(#[from] DataError),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "UPPERCASE")]
pub enum ReturnsToScale {
    #[default]
    Crs,
    Vrs,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Orientation {
    #[default]
    Input,
    Output,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DeaModelSpec {
    pub name: String,
    pub inputs: Vec<String>,
    pub outputs: Vec<String>,
    #[serde(default, rename = "rts")]
    pub returns_to_scale: ReturnsToScale,
    #[serde(default)]
    pub orientation: Orientation,
    #[serde(default, rename = "exclude")]
    pub excluded_dmus: Vec<String>,
}

impl DeaModelSpec {
    pub fn new(name: impl Into<String>, inputs: &[&str], outputs: &[&str]) -> Self {
        Self {
            name: name.into(),
            inputs: inputs.iter().map(|s| s.to_string()).collect(),
            outputs: outputs.iter().map(|s| s.to_string()).collect(),
            returns_to_scale: ReturnsToScale::Crs,
            orientation: Orientation::Input,
            excluded_dmus: Vec::new(),
        }
    }

    pub fn validate(&self) -> Result<(), DeaError> {
        if self.inputs.is_empty() || self.outputs.is_empty() {
            return Err(DeaError::EmptyFactors(self.name.clone()));
        }
        if let Some(dup) = self.inputs.iter().find(|i| self.outputs.contains(i)) {
            return Err(DeaError::OverlappingFactor(dup.clone()));
        }
        Ok(())
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Peer {
    pub dmu_id: String,
    pub lambda: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EfficiencyScore {
    pub dmu_id: String,
    pub score: f64,
    pub reference_set: Vec<Peer>,
}

/// Input and output matrices for the retained units, column-major by unit.
struct Technology {
    ids: Vec<String>,
    inputs: Vec<Vec<f64>>,
    outputs: Vec<Vec<f64>>,
}

impl Technology {
    fn from_dataset(spec: &DeaModelSpec, ds: &Dataset) -> Result<Self, DeaError> {
        let ds = ds.without_dmus(&spec.excluded_dmus)?;
        let pick = |names: &[String]| -> Result<Vec<Vec<f64>>, DeaError> {
            let mut cols = Vec::with_capacity(names.len());
            for name in names {
                let col = ds.column(name)?;
                if let Some((row, &value)) = col.iter().enumerate().find(|(_, v)| **v <= 0.0) {
                    return Err(DeaError::NonPositive {
                        column: name.clone(),
                        dmu: ds.dmu_ids()[row].clone(),
                        value,
                    });
                }
                cols.push(col.to_vec());
            }
            Ok(cols)
        };
        let inputs = pick(&spec.inputs)?;
        let outputs = pick(&spec.outputs)?;
        let n = ds.n();
        let by_unit = |cols: Vec<Vec<f64>>| -> Vec<Vec<f64>> {
            (0..n).map(|j| cols.iter().map(|c| c[j]).collect()).collect()
        };
        Ok(Self {
            ids: ds.dmu_ids().to_vec(),
            inputs: by_unit(inputs),
            outputs: by_unit(outputs),
        })
    }
}

/// Builds the envelopment LP for unit `o`. Variables are `(θ or φ, λ_1..λ_n)`.
pub fn envelopment_problem(
    inputs: &[Vec<f64>],
    outputs: &[Vec<f64>],
    o: usize,
    rts: ReturnsToScale,
    orientation: Orientation,
) -> LpProblem {
    let n = inputs.len();
    let m = inputs[o].len();
    let s = outputs[o].len();
    let mut objective = vec![0.0; n + 1];
    objective[0] = 1.0;
    let direction = match orientation {
        Orientation::Input => Direction::Minimize,
        Orientation::Output => Direction::Maximize,
    };
    let mut p = LpProblem::new(direction, objective).bound(0, Bounds::FREE);
    for i in 0..m {
        let mut row = vec![0.0; n + 1];
        row[1..].iter_mut().zip(inputs).for_each(|(r, x)| *r = x[i]);
        match orientation {
            Orientation::Input => {
                row[0] = -inputs[o][i];
                p = p.constrain(row, Sense::Le, 0.0);
            }
            Orientation::Output => p = p.constrain(row, Sense::Le, inputs[o][i]),
        }
    }
    for r in 0..s {
        let mut row = vec![0.0; n + 1];
        row[1..].iter_mut().zip(outputs).for_each(|(v, y)| *v = y[r]);
        match orientation {
            Orientation::Input => p = p.constrain(row, Sense::Ge, outputs[o][r]),
            Orientation::Output => {
                row[0] = -outputs[o][r];
                p = p.constrain(row, Sense::Ge, 0.0);
            }
        }
    }
    if rts == ReturnsToScale::Vrs {
        let mut row = vec![1.0; n + 1];
        row[0] = 0.0;
        p = p.constrain(row, Sense::Eq, 1.0);
    }
    p
}

/// Scores every retained unit of `ds` under `spec`.
pub fn solve_envelopment(spec: &DeaModelSpec, ds: &Dataset) -> Result<Vec<EfficiencyScore>, DeaError> {
    spec.validate()?;
    let tech = Technology::from_dataset(spec, ds)?;
    (0..tech.ids.len())
        .map(|o| score_unit(&tech, o, spec))
        .collect()
}

fn score_unit(tech: &Technology, o: usize, spec: &DeaModelSpec) -> Result<EfficiencyScore, DeaError> {
    let dmu = &tech.ids[o];
    let p = envelopment_problem(
        &tech.inputs,
        &tech.outputs,
        o,
        spec.returns_to_scale,
        spec.orientation,
    );
    let sol = lp_solve(&p).map_err(|source| DeaError::Lp {
        dmu: dmu.clone(),
        source,
    })?;
    if sol.status != LpStatus::Optimal {
        return Err(DeaError::Unsolvable {
            dmu: dmu.clone(),
            status: sol.status,
        });
    }
    let raw = match spec.orientation {
        Orientation::Input => sol.x[0],
        Orientation::Output => 1.0 / sol.x[0],
    };
    let score = if (raw - 1.0).abs() <= FRONTIER_TOLERANCE || raw > 1.0 {
        1.0
    } else {
        raw
    };
    let reference_set = sol.x[1..]
        .iter()
        .enumerate()
        .filter(|(_, &l)| l > PEER_WEIGHT_FLOOR)
        .map(|(j, &lambda)| Peer {
            dmu_id: tech.ids[j].clone(),
            lambda,
        })
        .collect();
    Ok(EfficiencyScore {
        dmu_id: dmu.clone(),
        score,
        reference_set,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use indexmap::IndexMap;

    fn dataset(ids: &[&str], cols: &[(&str, &[f64])]) -> Dataset {
        let columns: IndexMap<String, Vec<f64>> =
            cols.iter().map(|(k, v)| (k.to_string(), v.to_vec())).collect();
        Dataset::new(ids.iter().map(|s| s.to_string()).collect(), None, columns, "test").unwrap()
    }

    #[test]
    fn single_ratio_crs() {
        let ds = dataset(&["A", "B"], &[("x", &[1.0, 1.0]), ("y", &[2.0, 1.0])]);
        let spec = DeaModelSpec::new("M", &["x"], &["y"]);
        let scores = solve_envelopment(&spec, &ds).unwrap();
        assert_eq!(scores[0].score, 1.0);
        assert!((scores[1].score - 0.5).abs() < 1e-12);
        assert_eq!(scores[1].reference_set[0].dmu_id, "A");
        assert!((scores[1].reference_set[0].lambda - 0.5).abs() < 1e-12);
    }

    #[test]
    fn output_orientation_matches_input_under_crs() {
        let ds = dataset(
            &["A", "B", "C"],
            &[("x", &[2.0, 3.0, 4.0]), ("y", &[3.0, 2.0, 5.0])],
        );
        let mut spec = DeaModelSpec::new("M", &["x"], &["y"]);
        let input = solve_envelopment(&spec, &ds).unwrap();
        spec.orientation = Orientation::Output;
        let output = solve_envelopment(&spec, &ds).unwrap();
        for (a, b) in input.iter().zip(&output) {
            assert!((a.score - b.score).abs() < 1e-12);
        }
    }

    #[test]
    fn identical_units_are_all_efficient() {
        let ds = dataset(
            &["A", "B", "C"],
            &[("x1", &[2.0; 3]), ("x2", &[5.0; 3]), ("y", &[7.0; 3])],
        );
        let spec = DeaModelSpec::new("M", &["x1", "x2"], &["y"]);
        for s in solve_envelopment(&spec, &ds).unwrap() {
            assert_eq!(s.score, 1.0);
        }
    }

    #[test]
    fn vrs_frontier_is_wider() {
        let ds = dataset(
            &["A", "B", "C"],
            &[("x", &[1.0, 2.0, 4.0]), ("y", &[1.0, 3.0, 4.0])],
        );
        let mut spec = DeaModelSpec::new("M", &["x"], &["y"]);
        let crs = solve_envelopment(&spec, &ds).unwrap();
        spec.returns_to_scale = ReturnsToScale::Vrs;
        let vrs = solve_envelopment(&spec, &ds).unwrap();
        assert_eq!(vrs.iter().filter(|s| s.score == 1.0).count(), 3);
        assert!((crs[0].score - 2.0 / 3.0).abs() < 1e-12);
        assert!((crs[2].score - 2.0 / 3.0).abs() < 1e-12);
    }

    #[test]
    fn exclusion_and_errors() {
        let ds = dataset(&["A", "B"], &[("x", &[1.0, 1.0]), ("y", &[2.0, 0.0])]);
        let spec = DeaModelSpec::new("M", &["x"], &["y"]);
        assert!(matches!(
            solve_envelopment(&spec, &ds),
            Err(DeaError::NonPositive { dmu, .. }) if dmu == "B"
        ));
        let mut spec = spec;
        spec.excluded_dmus = vec!["B".into()];
        let scores = solve_envelopment(&spec, &ds).unwrap();
        assert_eq!(scores.len(), 1);
        spec.excluded_dmus = vec!["Z".into()];
        assert!(matches!(
            solve_envelopment(&spec, &ds),
            Err(DeaError::Data(DataError::UnknownDmu(_)))
        ));
        let bad = DeaModelSpec::new("M", &["x"], &["x"]);
        assert!(matches!(
            solve_envelopment(&bad, &ds),
            Err(DeaError::OverlappingFactor(_))
        ));
        let empty = DeaModelSpec::new("M", &[], &["y"]);
        assert!(matches!(
            solve_envelopment(&empty, &ds),
            Err(DeaError::EmptyFactors(_))
        ));
    }

    #[test]
    fn spec_json_keys() {
        let spec: DeaModelSpec = serde_json::from_str(
            r#"{"name":"M2A","inputs":["a"],"outputs":["b"],"rts":"VRS","orientation":"output","exclude":["MUAC"]}"#,
        )
        .unwrap();
        assert_eq!(spec.returns_to_scale, ReturnsToScale::Vrs);
        assert_eq!(spec.orientation, Orientation::Output);
        assert_eq!(spec.excluded_dmus, ["MUAC"]);
    }
}
