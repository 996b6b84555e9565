use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, StandardNormal};

use super::likelihood::TruncatedLikelihood;
use super::newton::{maximize, NewtonOutcome};
use super::tobit::{mle_result, ols_start};
use super::{Design, FitOptions, RegressError, RegressionResult, RegressionSpec, Result};
use crate::dataframe::Dataset;

/// Truncated-normal regression.
///
/// The likelihood is not concave in general, so Newton's method is run from
/// the least-squares start plus `options.starts - 1` seeded perturbations of
/// it. The best optimum wins (ties go to the earlier start); a spread in
/// coefficients above `options.start_tolerance` among converged starts is
/// reported as a warning on the result.
pub fn fit_truncated(
    spec: &RegressionSpec,
    ds: &Dataset,
    options: &FitOptions,
) -> Result<RegressionResult> {
    let design = Design::build(spec, ds)?;
    let (lo, hi) = (spec.lower_bound(), spec.upper_bound());
    for (i, &v) in design.y.iter().enumerate() {
        if !(v > lo && v < hi) {
            return Err(RegressError::OutsideTruncation {
                dmu: ds.dmu_ids()[i].clone(),
                value: v,
            });
        }
    }
    let ll = TruncatedLikelihood::new(design.y.as_slice(), design.x.clone(), lo, hi);
    let (start, se) = ols_start(&design)?;
    let k = design.k();
    let sigma0 = 1.0 / start[k];

    let mut rng = ChaCha8Rng::seed_from_u64(options.seed);
    let mut starts = vec![start.clone()];
    for _ in 1..options.starts.max(1) {
        let mut s = Vec::with_capacity(k + 1);
        let z: f64 = StandardNormal.sample(&mut rng);
        let scale = (0.5 * z).exp();
        let sigma = sigma0 * scale;
        for j in 0..k {
            let e: f64 = StandardNormal.sample(&mut rng);
            let beta = start[j] * sigma0 + 2.0 * se[j] * e;
            s.push(beta / sigma);
        }
        s.push(1.0 / sigma);
        starts.push(s);
    }

    let outcomes: Vec<NewtonOutcome> = starts
        .iter()
        .map(|s| maximize(&ll, s, &options.newton))
        .collect();
    let converged: Vec<(usize, &NewtonOutcome)> = outcomes
        .iter()
        .enumerate()
        .filter(|(_, o)| o.converged && o.value.is_finite())
        .collect();
    let Some(&(best_idx, best)) = converged
        .iter()
        .max_by(|a, b| a.1.value.total_cmp(&b.1.value).then(b.0.cmp(&a.0)))
    else {
        let first = &outcomes[0];
        return Err(RegressError::NoConvergence {
            iterations: first.iterations,
            gradient_norm: first.gradient_norm,
        });
    };

    let natural = |t: &[f64]| -> Vec<f64> { t[..k].iter().map(|d| d / t[k]).collect() };
    let best_beta = natural(&best.theta);
    let spread = converged
        .iter()
        .map(|(_, o)| {
            natural(&o.theta)
                .iter()
                .zip(&best_beta)
                .map(|(a, b)| (a - b).abs() / (1.0 + b.abs()))
                .fold(0.0, f64::max)
        })
        .fold(0.0, f64::max);
    let mut warnings = Vec::new();
    if spread > options.start_tolerance {
        warnings.push(format!(
            "multi-start disagreement: coefficients differ by up to {spread:.3e} (relative) \
             across {} converged starts; best optimum from start {best_idx} kept",
            converged.len()
        ));
    }
    if converged.len() < outcomes.len() {
        warnings.push(format!(
            "{} of {} starts did not converge",
            outcomes.len() - converged.len(),
            outcomes.len()
        ));
    }
    mle_result(spec, &design, &ll, best, (0, 0), warnings)
}
