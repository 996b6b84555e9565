use nalgebra::DMatrix;

use super::likelihood::{LogLikelihood, TobitLikelihood};
use super::newton::{maximize, NewtonOutcome};
use super::ols::least_squares;
use super::{
    aic, Design, FitOptions, RegressError, RegressionResult, RegressionSpec, Result, TermEstimate,
};
use crate::dataframe::Dataset;
use crate::dist::normal_two_sided_p;

/// Below this σ the fit is reported as degenerate.
const SIGMA_FLOOR: f64 = 1e-10;

/// Olsen starting point `(β/σ, 1/σ)` from a least-squares fit.
pub(crate) fn ols_start(design: &Design) -> Result<(Vec<f64>, Vec<f64>)> {
    let ls = least_squares(design)?;
    let n = design.n() as f64;
    let mut sigma = (ls.rss / n).sqrt();
    if !(sigma > SIGMA_FLOOR) {
        sigma = 1e-3 * (1.0 + design.y.amax());
    }
    let mut theta: Vec<f64> = ls.beta.iter().map(|b| b / sigma).collect();
    theta.push(1.0 / sigma);
    let se: Vec<f64> = (0..design.k())
        .map(|j| (ls.rss / (n - design.k() as f64) * ls.xtx_inv[(j, j)]).max(0.0).sqrt())
        .collect();
    Ok((theta, se))
}

/// Maps an Olsen optimum back to `(β, σ)` with delta-method standard errors.
pub(crate) fn natural_parameters(
    ll: &dyn LogLikelihood,
    theta: &[f64],
) -> Result<(Vec<f64>, Vec<f64>, f64)> {
    let k = theta.len() - 1;
    let gamma = theta[k];
    if !(gamma.is_finite() && 1.0 / gamma > SIGMA_FLOOR) {
        return Err(RegressError::SigmaCollapse);
    }
    let info = -ll.hessian(theta);
    let cov = info
        .clone()
        .cholesky()
        .map(|c| c.inverse())
        .or_else(|| info.try_inverse())
        .ok_or(RegressError::SingularInformation)?;
    let mut jac = DMatrix::zeros(k + 1, k + 1);
    for j in 0..k {
        jac[(j, j)] = 1.0 / gamma;
        jac[(j, k)] = -theta[j] / (gamma * gamma);
    }
    jac[(k, k)] = -1.0 / (gamma * gamma);
    let cov_nat = &jac * cov * jac.transpose();
    let beta = theta[..k].iter().map(|d| d / gamma).collect();
    let se = (0..k).map(|j| cov_nat[(j, j)].max(0.0).sqrt()).collect();
    Ok((beta, se, 1.0 / gamma))
}

pub(crate) fn mle_result(
    spec: &RegressionSpec,
    design: &Design,
    ll: &dyn LogLikelihood,
    outcome: &NewtonOutcome,
    censored: (usize, usize),
    warnings: Vec<String>,
) -> Result<RegressionResult> {
    let (beta, se, sigma) = natural_parameters(ll, &outcome.theta)?;
    let terms = design
        .names
        .iter()
        .zip(beta.iter().zip(&se))
        .map(|(name, (&b, &s))| TermEstimate::new(name.clone(), b, s, normal_two_sided_p))
        .collect();
    let param_count = design.k() + 1;
    Ok(RegressionResult {
        method: spec.method,
        dependent: spec.dependent.clone(),
        terms,
        sigma,
        adj_r2: None,
        aic: aic(outcome.value, param_count),
        log_lik: outcome.value,
        param_count,
        n: design.n(),
        n_censored_lower: censored.0,
        n_censored_upper: censored.1,
        lower: spec.lower,
        upper: spec.upper,
        converged: outcome.converged,
        iterations: outcome.iterations,
        gradient_norm: outcome.gradient_norm,
        warnings,
    })
}

/// Censored-normal (Tobit) regression by Newton's method in Olsen's
/// parameterisation, started from the least-squares estimate.
pub fn fit_tobit(spec: &RegressionSpec, ds: &Dataset, options: &FitOptions) -> Result<RegressionResult> {
    let design = Design::build(spec, ds)?;
    if !spec.lower_bound().is_finite() && !spec.upper_bound().is_finite() {
        return Err(RegressError::InvalidSpec(
            "Tobit needs at least one finite censoring bound".into(),
        ));
    }
    let ll = TobitLikelihood::new(
        design.y.as_slice(),
        design.x.clone(),
        spec.lower_bound(),
        spec.upper_bound(),
    );
    let (lo, hi) = ll.censored_counts();
    if lo + hi == design.n() {
        return Err(RegressError::AllCensored);
    }
    let (start, _) = ols_start(&design)?;
    let outcome = maximize(&ll, &start, &options.newton);
    let gamma = outcome.theta[design.k()];
    if !(gamma.is_finite() && 1.0 / gamma > SIGMA_FLOOR) {
        return Err(RegressError::SigmaCollapse);
    }
    if !outcome.converged {
        return Err(RegressError::NoConvergence {
            iterations: outcome.iterations,
            gradient_norm: outcome.gradient_norm,
        });
    }
    mle_result(spec, &design, &ll, &outcome, (lo, hi), Vec::new())
}
