use nalgebra::DMatrix;

use super::{aic, Design, RegressError, RegressionResult, RegressionSpec, Result, TermEstimate};
use crate::dataframe::Dataset;
use crate::dist::student_two_sided_p;

/// Columns whose QR pivot falls below this fraction of their norm are
/// treated as linear combinations of the preceding columns.
const RANK_TOLERANCE: f64 = 1e-10;

/// Least-squares solution with the pieces the other estimators reuse.
pub(crate) struct LeastSquares {
    pub beta: Vec<f64>,
    /// `(XᵀX)⁻¹`
    pub xtx_inv: DMatrix<f64>,
    pub rss: f64,
}

pub(crate) fn least_squares(design: &Design) -> Result<LeastSquares> {
    let x = &design.x;
    let k = design.k();
    let qr = x.clone().qr();
    let r = qr.r();
    for j in 0..k {
        let norm = x.column(j).norm();
        if norm == 0.0 || r[(j, j)].abs() <= RANK_TOLERANCE * norm {
            return Err(RegressError::RankDeficient {
                column: design.names[j].clone(),
                others: design.names[..j].to_vec(),
            });
        }
    }
    let qty = qr.q().transpose() * &design.y;
    let beta = r
        .solve_upper_triangular(&qty)
        .ok_or_else(|| RegressError::RankDeficient {
            column: design.names[k - 1].clone(),
            others: design.names[..k - 1].to_vec(),
        })?;
    let r_inv = r
        .solve_upper_triangular(&DMatrix::identity(k, k))
        .expect("R checked non-singular");
    let xtx_inv = &r_inv * r_inv.transpose();
    let resid = &design.y - x * &beta;
    Ok(LeastSquares {
        beta: beta.iter().copied().collect(),
        xtx_inv,
        rss: resid.norm_squared(),
    })
}

/// Gaussian log-likelihood at the least-squares fit with `σ² = RSS/n`.
pub(crate) fn gaussian_log_lik(rss: f64, n: usize) -> f64 {
    let n = n as f64;
    -0.5 * n * ((2.0 * std::f64::consts::PI).ln() + (rss / n).ln() + 1.0)
}

pub fn fit_ols(spec: &RegressionSpec, ds: &Dataset) -> Result<RegressionResult> {
    let design = Design::build(spec, ds)?;
    let ls = least_squares(&design)?;
    let (n, k) = (design.n(), design.k());
    let df = (n - k) as f64;
    let s2 = ls.rss / df;
    let terms = design
        .names
        .iter()
        .enumerate()
        .map(|(j, name)| {
            let se = (s2 * ls.xtx_inv[(j, j)]).max(0.0).sqrt();
            TermEstimate::new(name.clone(), ls.beta[j], se, |t| student_two_sided_p(t, df))
        })
        .collect();

    let y = &design.y;
    let tss = if spec.intercept {
        let mean = y.mean();
        y.iter().map(|v| (v - mean).powi(2)).sum::<f64>()
    } else {
        y.norm_squared()
    };
    let r2 = 1.0 - ls.rss / tss;
    let denom_df = if spec.intercept { n - 1 } else { n } as f64;
    let adj_r2 = 1.0 - (1.0 - r2) * denom_df / df;

    let log_lik = gaussian_log_lik(ls.rss, n);
    Ok(RegressionResult {
        method: spec.method,
        dependent: spec.dependent.clone(),
        terms,
        sigma: s2.sqrt(),
        adj_r2: Some(adj_r2),
        aic: aic(log_lik, k),
        log_lik,
        param_count: k,
        n,
        n_censored_lower: 0,
        n_censored_upper: 0,
        lower: None,
        upper: None,
        converged: true,
        iterations: 0,
        gradient_norm: 0.0,
        warnings: Vec::new(),
    })
}
