use serde::{Deserialize, Serialize};

use super::{mean, DiagnosticsError, Result};
use crate::dataframe::Dataset;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CorrelationMatrix {
    pub variables: Vec<String>,
    /// Row-major, `variables.len()` squared.
    pub values: Vec<Vec<f64>>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CorrelationPair {
    pub a: String,
    pub b: String,
    pub r: f64,
}

impl CorrelationMatrix {
    pub fn get(&self, a: &str, b: &str) -> Option<f64> {
        let i = self.variables.iter().position(|v| v == a)?;
        let j = self.variables.iter().position(|v| v == b)?;
        Some(self.values[i][j])
    }

    /// Off-diagonal pairs ordered by `|r|` descending, then by position.
    pub fn ranked_pairs(&self) -> Vec<CorrelationPair> {
        let k = self.variables.len();
        let mut pairs: Vec<CorrelationPair> = (0..k)
            .flat_map(|i| (i + 1..k).map(move |j| (i, j)))
            .map(|(i, j)| CorrelationPair {
                a: self.variables[i].clone(),
                b: self.variables[j].clone(),
                r: self.values[i][j],
            })
            .collect();
        pairs.sort_by(|x, y| y.r.abs().total_cmp(&x.r.abs()));
        pairs
    }

    pub fn to_csv(&self) -> String {
        let mut out = String::from("variable");
        for v in &self.variables {
            out.push(',');
            out.push_str(v);
        }
        out.push('\n');
        for (v, row) in self.variables.iter().zip(&self.values) {
            out.push_str(v);
            for r in row {
                out.push_str(&format!(",{r:?}"));
            }
            out.push('\n');
        }
        out
    }
}

/// Pearson correlations of the named columns.
pub fn correlation_matrix<S: AsRef<str>>(ds: &Dataset, vars: &[S]) -> Result<CorrelationMatrix> {
    if ds.n() < 2 {
        return Err(DiagnosticsError::TooFew {
            what: "observations",
            needed: 2,
            got: ds.n(),
        });
    }
    let mut centered = Vec::with_capacity(vars.len());
    for name in vars {
        let col = ds.column(name.as_ref())?;
        let m = mean(col);
        let c: Vec<f64> = col.iter().map(|v| v - m).collect();
        let ss: f64 = c.iter().map(|v| v * v).sum();
        if !(ss > 0.0) {
            return Err(DiagnosticsError::ZeroVariance(name.as_ref().to_string()));
        }
        let norm = ss.sqrt();
        centered.push(c.into_iter().map(|v| v / norm).collect::<Vec<f64>>());
    }
    let k = centered.len();
    let mut values = vec![vec![0.0; k]; k];
    for i in 0..k {
        values[i][i] = 1.0;
        for j in 0..i {
            let r: f64 = centered[i].iter().zip(&centered[j]).map(|(a, b)| a * b).sum();
            let r = r.clamp(-1.0, 1.0);
            values[i][j] = r;
            values[j][i] = r;
        }
    }
    Ok(CorrelationMatrix {
        variables: vars.iter().map(|s| s.as_ref().to_string()).collect(),
        values,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use indexmap::IndexMap;

    fn ds(cols: &[(&str, Vec<f64>)]) -> Dataset {
        let n = cols[0].1.len();
        let columns: IndexMap<String, Vec<f64>> =
            cols.iter().map(|(k, v)| (k.to_string(), v.clone())).collect();
        Dataset::new((0..n).map(|i| format!("D{i}")).collect(), None, columns, "t").unwrap()
    }

    #[test]
    fn perfect_dependence() {
        let x = vec![1.0, 2.5, 3.0, 7.0];
        let d = ds(&[
            ("x", x.clone()),
            ("twice", x.iter().map(|v| 2.0 * v).collect()),
            ("neg", x.iter().map(|v| -v).collect()),
        ]);
        let c = correlation_matrix(&d, &["x", "twice", "neg"]).unwrap();
        assert!((c.get("x", "twice").unwrap() - 1.0).abs() < 1e-15);
        assert!((c.get("x", "neg").unwrap() + 1.0).abs() < 1e-15);
        assert_eq!(c.values[1][1], 1.0);
        let ranked = c.ranked_pairs();
        assert_eq!(ranked.len(), 3);
        assert!(ranked.iter().all(|p| (p.r.abs() - 1.0).abs() < 1e-15));
    }

    #[test]
    fn zero_variance_is_named() {
        let d = ds(&[("x", vec![1.0, 2.0]), ("c", vec![3.0, 3.0])]);
        assert!(matches!(
            correlation_matrix(&d, &["x", "c"]),
            Err(DiagnosticsError::ZeroVariance(n)) if n == "c"
        ));
    }

    #[test]
    fn csv_export_has_header() {
        let d = ds(&[("x", vec![1.0, 2.0, 4.0]), ("y", vec![1.0, 3.0, 2.0])]);
        let csv = correlation_matrix(&d, &["x", "y"]).unwrap().to_csv();
        assert!(csv.starts_with("variable,x,y\nx,1.0,"));
    }
}
