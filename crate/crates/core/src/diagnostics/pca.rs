use nalgebra::DMatrix;
use serde::{Deserialize, Serialize};

use super::correlation::correlation_matrix;
use super::jacobi::jacobi_eigen;
use super::{mean, DiagnosticsError, Result};
use crate::dataframe::Dataset;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Retain {
    Count(usize),
    /// Smallest number of components whose cumulative share reaches this.
    Share(f64),
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PcaResult {
    pub variables: Vec<String>,
    pub eigenvalues: Vec<f64>,
    /// `loadings[c]` is component `c` over `variables`; unit length.
    pub loadings: Vec<Vec<f64>>,
    pub explained_share: Vec<f64>,
    pub retained: usize,
    /// Standardised-data scores, one row per unit, `retained` columns.
    pub scores: Vec<Vec<f64>>,
}

/// Principal components of the correlation matrix of `vars`.
///
/// Each component's sign is fixed so its largest-magnitude loading is
/// positive.
pub fn pca<S: AsRef<str>>(ds: &Dataset, vars: &[S], retain: Retain) -> Result<PcaResult> {
    if vars.is_empty() {
        return Err(DiagnosticsError::TooFew {
            what: "variables",
            needed: 1,
            got: 0,
        });
    }
    let corr = correlation_matrix(ds, vars)?;
    let k = vars.len();
    let m = DMatrix::from_fn(k, k, |i, j| corr.values[i][j]);
    let eig = jacobi_eigen(&m)?;

    let eigenvalues: Vec<f64> = eig.values.iter().map(|v| v.max(0.0)).collect();
    let total: f64 = eigenvalues.iter().sum();
    let explained_share: Vec<f64> = eigenvalues.iter().map(|v| v / total).collect();

    let mut loadings = Vec::with_capacity(k);
    for c in 0..k {
        let mut col: Vec<f64> = eig.vectors.column(c).iter().copied().collect();
        let lead = col
            .iter()
            .copied()
            .fold(0.0_f64, |best, v| if v.abs() > best.abs() { v } else { best });
        if lead < 0.0 {
            col.iter_mut().for_each(|v| *v = -*v);
        }
        loadings.push(col);
    }

    let retained = match retain {
        Retain::Count(c) if c >= 1 && c <= k => c,
        Retain::Count(c) => {
            return Err(DiagnosticsError::InvalidRetain(format!(
                "count {c} outside 1..={k}"
            )))
        }
        Retain::Share(s) if s > 0.0 && s <= 1.0 => {
            let mut acc = 0.0;
            let mut count = k;
            for (i, share) in explained_share.iter().enumerate() {
                acc += share;
                if acc >= s - 1e-12 {
                    count = i + 1;
                    break;
                }
            }
            count
        }
        Retain::Share(s) => {
            return Err(DiagnosticsError::InvalidRetain(format!("share {s} outside (0, 1]")))
        }
    };

    let standardized: Vec<Vec<f64>> = vars
        .iter()
        .map(|v| {
            let col = ds.column(v.as_ref()).expect("checked by correlation_matrix");
            let mu = mean(col);
            let sd = (col.iter().map(|x| (x - mu).powi(2)).sum::<f64>() / (col.len() - 1) as f64).sqrt();
            col.iter().map(|x| (x - mu) / sd).collect()
        })
        .collect();
    let scores = (0..ds.n())
        .map(|row| {
            loadings[..retained]
                .iter()
                .map(|load| load.iter().zip(&standardized).map(|(l, z)| l * z[row]).sum())
                .collect()
        })
        .collect();

    Ok(PcaResult {
        variables: corr.variables,
        eigenvalues,
        loadings,
        explained_share,
        retained,
        scores,
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
    fn rank_one_data() {
        let x = vec![1.0, 2.0, 4.0, 7.0];
        let d = ds(&[("x", x.clone()), ("y", x)]);
        let p = pca(&d, &["x", "y"], Retain::Share(0.9)).unwrap();
        assert!((p.explained_share[0] - 1.0).abs() < 1e-12);
        assert_eq!(p.retained, 1);
        let l = &p.loadings[0];
        assert!((l[0] - l[1]).abs() < 1e-12 && l[0] > 0.0);
    }

    #[test]
    fn isotropic_data() {
        // centred orthogonal columns -> identity correlation
        let d = ds(&[
            ("a", vec![1.0, -1.0, 1.0, -1.0]),
            ("b", vec![1.0, 1.0, -1.0, -1.0]),
            ("c", vec![1.0, -1.0, -1.0, 1.0]),
        ]);
        let p = pca(&d, &["a", "b", "c"], Retain::Count(3)).unwrap();
        for v in &p.eigenvalues {
            assert!((v - 1.0).abs() < 1e-12);
        }
        assert_eq!(p.scores.len(), 4);
        assert_eq!(p.scores[0].len(), 3);
    }

    #[test]
    fn invalid_retention() {
        let d = ds(&[("a", vec![1.0, 2.0, 3.0]), ("b", vec![3.0, 1.0, 2.0])]);
        assert!(matches!(
            pca(&d, &["a", "b"], Retain::Count(3)),
            Err(DiagnosticsError::InvalidRetain(_))
        ));
        assert!(matches!(
            pca(&d, &["a", "b"], Retain::Share(0.0)),
            Err(DiagnosticsError::InvalidRetain(_))
        ));
    }
}
