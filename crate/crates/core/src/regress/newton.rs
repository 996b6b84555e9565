use nalgebra::{DMatrix, DVector};

use super::likelihood::LogLikelihood;

#[derive(Debug, Clone, Copy)]
pub struct NewtonOptions {
    pub max_iterations: usize,
    pub gradient_tolerance: f64,
    pub max_halvings: usize,
}

impl Default for NewtonOptions {
    fn default() -> Self {
        Self {
            max_iterations: 500,
            gradient_tolerance: 1e-8,
            max_halvings: 60,
        }
    }
}

#[derive(Debug, Clone)]
pub struct NewtonOutcome {
    pub theta: Vec<f64>,
    pub value: f64,
    pub gradient_norm: f64,
    pub iterations: usize,
    pub converged: bool,
}

/// Solves `(-H + μI) d = g` with the smallest `μ >= 0` (on a ×10 ladder)
/// that makes the system positive definite.
fn ascent_direction(h: &DMatrix<f64>, g: &DVector<f64>) -> Option<DVector<f64>> {
    let neg = -h;
    if let Some(ch) = neg.clone().cholesky() {
        return Some(ch.solve(g));
    }
    let scale = neg.diagonal().amax().max(1e-12);
    let mut mu = 1e-8 * scale;
    while mu < 1e12 * scale {
        let mut shifted = neg.clone();
        for i in 0..shifted.nrows() {
            shifted[(i, i)] += mu;
        }
        if let Some(ch) = shifted.cholesky() {
            return Some(ch.solve(g));
        }
        mu *= 10.0;
    }
    None
}

/// Damped Newton ascent with step halving.
///
/// Stops when the gradient norm drops below the tolerance, or when the
/// predicted gain `gᵀd` is below what `f64` can resolve at the current value.
pub fn maximize(ll: &dyn LogLikelihood, start: &[f64], opts: &NewtonOptions) -> NewtonOutcome {
    let mut theta = DVector::from_column_slice(start);
    let mut value = ll.value(theta.as_slice());
    let mut iterations = 0;
    let mut g = ll.gradient(theta.as_slice());
    let finish = |theta: DVector<f64>, value, g: &DVector<f64>, iterations, converged| NewtonOutcome {
        theta: theta.iter().copied().collect(),
        value,
        gradient_norm: g.norm(),
        iterations,
        converged,
    };
    if !value.is_finite() {
        return finish(theta, value, &g, 0, false);
    }
    while iterations < opts.max_iterations {
        if g.norm() < opts.gradient_tolerance {
            return finish(theta, value, &g, iterations, true);
        }
        iterations += 1;
        let h = ll.hessian(theta.as_slice());
        let Some(d) = ascent_direction(&h, &g) else {
            return finish(theta, value, &g, iterations, false);
        };
        let predicted = g.dot(&d);
        if predicted.abs() <= 1e-15 * (1.0 + value.abs()) {
            return finish(theta, value, &g, iterations, true);
        }
        let mut step = 1.0;
        let mut accepted = false;
        for _ in 0..=opts.max_halvings {
            let trial = &theta + &d * step;
            let v = ll.value(trial.as_slice());
            if v.is_finite() && v >= value {
                theta = trial;
                value = v;
                accepted = true;
                break;
            }
            step *= 0.5;
        }
        g = ll.gradient(theta.as_slice());
        if !accepted {
            // No representable improvement along a valid ascent direction.
            let converged = predicted.abs() <= 1e-10 * (1.0 + value.abs());
            return finish(theta, value, &g, iterations, converged);
        }
    }
    let converged = g.norm() < opts.gradient_tolerance;
    finish(theta, value, &g, iterations, converged)
}
