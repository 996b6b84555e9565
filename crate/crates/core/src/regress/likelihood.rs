//! Censored and truncated normal log-likelihoods in Olsen's parameterisation
//! `θ = (δ, γ)` with `δ = β/σ` and `γ = 1/σ`.
//!
//! In these coordinates the Tobit log-likelihood is globally concave. Both
//! likelihoods expose analytic gradients and Hessians.

use nalgebra::{DMatrix, DVector};

use crate::dist::{inv_mills, norm_log_cdf, norm_log_interval, norm_log_pdf};

pub trait LogLikelihood {
    fn dim(&self) -> usize;
    /// Log-likelihood; `-inf` outside the parameter space.
    fn value(&self, theta: &[f64]) -> f64;
    fn gradient(&self, theta: &[f64]) -> DVector<f64>;
    fn hessian(&self, theta: &[f64]) -> DMatrix<f64>;
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
enum Censoring {
    Lower,
    Interior,
    Upper,
}

fn index(x: &DMatrix<f64>, i: usize, delta: &[f64]) -> f64 {
    x.row(i).iter().zip(delta).map(|(a, b)| a * b).sum()
}

/// Adds `w · v vᵀ` to `h`, where `v = (s·xᵢ, c)`.
fn add_outer(h: &mut DMatrix<f64>, x: &DMatrix<f64>, i: usize, s: f64, c: f64, w: f64) {
    let k = x.ncols();
    for a in 0..=k {
        let va = if a < k { s * x[(i, a)] } else { c };
        if va == 0.0 {
            continue;
        }
        for b in 0..=k {
            let vb = if b < k { s * x[(i, b)] } else { c };
            h[(a, b)] += w * va * vb;
        }
    }
}

fn add_scaled(g: &mut DVector<f64>, x: &DMatrix<f64>, i: usize, s: f64, c: f64, w: f64) {
    let k = x.ncols();
    for a in 0..k {
        g[a] += w * s * x[(i, a)];
    }
    g[k] += w * c;
}

/// Tobit likelihood with censoring at `lower` and/or `upper` (either may be
/// infinite). Values at or beyond a bound count as censored there.
#[derive(Debug, Clone)]
pub struct TobitLikelihood {
    y: Vec<f64>,
    x: DMatrix<f64>,
    lower: f64,
    upper: f64,
    kinds: Vec<Censoring>,
}

impl TobitLikelihood {
    pub fn new(y: &[f64], x: DMatrix<f64>, lower: f64, upper: f64) -> Self {
        assert_eq!(y.len(), x.nrows());
        let kinds = y
            .iter()
            .map(|&v| {
                if v <= lower {
                    Censoring::Lower
                } else if v >= upper {
                    Censoring::Upper
                } else {
                    Censoring::Interior
                }
            })
            .collect();
        Self {
            y: y.to_vec(),
            x,
            lower,
            upper,
            kinds,
        }
    }

    pub fn censored_counts(&self) -> (usize, usize) {
        let lo = self.kinds.iter().filter(|k| **k == Censoring::Lower).count();
        let hi = self.kinds.iter().filter(|k| **k == Censoring::Upper).count();
        (lo, hi)
    }
}

impl LogLikelihood for TobitLikelihood {
    fn dim(&self) -> usize {
        self.x.ncols() + 1
    }

    fn value(&self, theta: &[f64]) -> f64 {
        let k = self.x.ncols();
        let (delta, gamma) = (&theta[..k], theta[k]);
        if !(gamma > 0.0) {
            return f64::NEG_INFINITY;
        }
        let ln_gamma = gamma.ln();
        (0..self.y.len())
            .map(|i| {
                let xb = index(&self.x, i, delta);
                match self.kinds[i] {
                    Censoring::Interior => ln_gamma + norm_log_pdf(gamma * self.y[i] - xb),
                    Censoring::Lower => norm_log_cdf(gamma * self.lower - xb),
                    Censoring::Upper => norm_log_cdf(xb - gamma * self.upper),
                }
            })
            .sum()
    }

    fn gradient(&self, theta: &[f64]) -> DVector<f64> {
        let k = self.x.ncols();
        let (delta, gamma) = (&theta[..k], theta[k]);
        let mut g = DVector::zeros(k + 1);
        for i in 0..self.y.len() {
            let xb = index(&self.x, i, delta);
            match self.kinds[i] {
                Censoring::Interior => {
                    let z = gamma * self.y[i] - xb;
                    // ∂z = (-x, y)
                    add_scaled(&mut g, &self.x, i, -1.0, self.y[i], -z);
                    g[k] += 1.0 / gamma;
                }
                Censoring::Lower => {
                    let a = gamma * self.lower - xb;
                    add_scaled(&mut g, &self.x, i, -1.0, self.lower, inv_mills(a));
                }
                Censoring::Upper => {
                    let b = xb - gamma * self.upper;
                    add_scaled(&mut g, &self.x, i, 1.0, -self.upper, inv_mills(b));
                }
            }
        }
        g
    }

    fn hessian(&self, theta: &[f64]) -> DMatrix<f64> {
        let k = self.x.ncols();
        let (delta, gamma) = (&theta[..k], theta[k]);
        let mut h = DMatrix::zeros(k + 1, k + 1);
        for i in 0..self.y.len() {
            let xb = index(&self.x, i, delta);
            match self.kinds[i] {
                Censoring::Interior => {
                    add_outer(&mut h, &self.x, i, -1.0, self.y[i], -1.0);
                    h[(k, k)] -= 1.0 / (gamma * gamma);
                }
                Censoring::Lower => {
                    let a = gamma * self.lower - xb;
                    let lam = inv_mills(a);
                    add_outer(&mut h, &self.x, i, -1.0, self.lower, -lam * (a + lam));
                }
                Censoring::Upper => {
                    let b = xb - gamma * self.upper;
                    let lam = inv_mills(b);
                    add_outer(&mut h, &self.x, i, 1.0, -self.upper, -lam * (b + lam));
                }
            }
        }
        h
    }
}

/// Normal regression truncated to `(lower, upper)`; each density is
/// renormalised by the probability mass inside the bounds.
#[derive(Debug, Clone)]
pub struct TruncatedLikelihood {
    y: Vec<f64>,
    x: DMatrix<f64>,
    lower: f64,
    upper: f64,
}

/// Pieces of `ln D = ln(Φ(b) - Φ(a))` for one observation.
struct Mass {
    a: f64,
    b: f64,
    ln_mass: f64,
    /// `φ(a)/D`, zero for an infinite bound.
    pa: f64,
    pb: f64,
}

impl TruncatedLikelihood {
    pub fn new(y: &[f64], x: DMatrix<f64>, lower: f64, upper: f64) -> Self {
        assert_eq!(y.len(), x.nrows());
        Self {
            y: y.to_vec(),
            x,
            lower,
            upper,
        }
    }

    fn mass(&self, xb: f64, gamma: f64) -> Mass {
        let a = if self.lower.is_finite() {
            gamma * self.lower - xb
        } else {
            f64::NEG_INFINITY
        };
        let b = if self.upper.is_finite() {
            gamma * self.upper - xb
        } else {
            f64::INFINITY
        };
        let ln_mass = norm_log_interval(a, b);
        let ratio = |t: f64| {
            if t.is_finite() {
                (norm_log_pdf(t) - ln_mass).exp()
            } else {
                0.0
            }
        };
        Mass {
            a,
            b,
            ln_mass,
            pa: ratio(a),
            pb: ratio(b),
        }
    }
}

impl LogLikelihood for TruncatedLikelihood {
    fn dim(&self) -> usize {
        self.x.ncols() + 1
    }

    fn value(&self, theta: &[f64]) -> f64 {
        let k = self.x.ncols();
        let (delta, gamma) = (&theta[..k], theta[k]);
        if !(gamma > 0.0) {
            return f64::NEG_INFINITY;
        }
        let ln_gamma = gamma.ln();
        (0..self.y.len())
            .map(|i| {
                let xb = index(&self.x, i, delta);
                let m = self.mass(xb, gamma);
                ln_gamma + norm_log_pdf(gamma * self.y[i] - xb) - m.ln_mass
            })
            .sum()
    }

    fn gradient(&self, theta: &[f64]) -> DVector<f64> {
        let k = self.x.ncols();
        let (delta, gamma) = (&theta[..k], theta[k]);
        let lo = if self.lower.is_finite() { self.lower } else { 0.0 };
        let hi = if self.upper.is_finite() { self.upper } else { 0.0 };
        let mut g = DVector::zeros(k + 1);
        for i in 0..self.y.len() {
            let xb = index(&self.x, i, delta);
            let z = gamma * self.y[i] - xb;
            add_scaled(&mut g, &self.x, i, -1.0, self.y[i], -z);
            g[k] += 1.0 / gamma;
            // -∂lnD = -(pb ∂b - pa ∂a), ∂a = (-x, L), ∂b = (-x, U)
            let m = self.mass(xb, gamma);
            add_scaled(&mut g, &self.x, i, -1.0, hi, -m.pb);
            add_scaled(&mut g, &self.x, i, -1.0, lo, m.pa);
        }
        g
    }

    fn hessian(&self, theta: &[f64]) -> DMatrix<f64> {
        let k = self.x.ncols();
        let (delta, gamma) = (&theta[..k], theta[k]);
        let lo = if self.lower.is_finite() { self.lower } else { 0.0 };
        let hi = if self.upper.is_finite() { self.upper } else { 0.0 };
        let mut h = DMatrix::zeros(k + 1, k + 1);
        let mut d_ln = DVector::zeros(k + 1);
        for i in 0..self.y.len() {
            let xb = index(&self.x, i, delta);
            add_outer(&mut h, &self.x, i, -1.0, self.y[i], -1.0);
            h[(k, k)] -= 1.0 / (gamma * gamma);

            let m = self.mass(xb, gamma);
            // ∂²lnD = -b pb ∂b∂bᵀ + a pa ∂a∂aᵀ - ∂lnD ∂lnDᵀ ; subtract it.
            if m.pb != 0.0 {
                add_outer(&mut h, &self.x, i, -1.0, hi, m.b * m.pb);
            }
            if m.pa != 0.0 {
                add_outer(&mut h, &self.x, i, -1.0, lo, -m.a * m.pa);
            }
            d_ln.fill(0.0);
            add_scaled(&mut d_ln, &self.x, i, -1.0, hi, m.pb);
            add_scaled(&mut d_ln, &self.x, i, -1.0, lo, -m.pa);
            h += &d_ln * d_ln.transpose();
        }
        h
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn central_diff(ll: &dyn LogLikelihood, theta: &[f64]) -> Vec<f64> {
        let h = 1e-6;
        (0..theta.len())
            .map(|j| {
                let mut p = theta.to_vec();
                let mut m = theta.to_vec();
                p[j] += h;
                m[j] -= h;
                (ll.value(&p) - ll.value(&m)) / (2.0 * h)
            })
            .collect()
    }

    fn hess_diff(ll: &dyn LogLikelihood, theta: &[f64]) -> DMatrix<f64> {
        let h = 1e-5;
        let d = theta.len();
        let mut out = DMatrix::zeros(d, d);
        for j in 0..d {
            let mut p = theta.to_vec();
            let mut m = theta.to_vec();
            p[j] += h;
            m[j] -= h;
            let col = (ll.gradient(&p) - ll.gradient(&m)) / (2.0 * h);
            out.set_column(j, &col);
        }
        out
    }

    fn sample() -> (Vec<f64>, DMatrix<f64>) {
        let y = vec![0.0, 0.2, 0.35, 0.5, 0.7, 1.0, 0.9, 0.1];
        let x = DMatrix::from_fn(8, 2, |i, j| if j == 0 { 1.0 } else { (i as f64) * 0.3 - 1.0 });
        (y, x)
    }

    #[test]
    fn tobit_derivatives() {
        let (y, x) = sample();
        let ll = TobitLikelihood::new(&y, x, 0.0, 1.0);
        assert_eq!(ll.censored_counts(), (1, 1));
        let theta = [0.4, 0.8, 2.5];
        let g = ll.gradient(&theta);
        for (a, b) in g.iter().zip(central_diff(&ll, &theta)) {
            assert!((a - b).abs() < 1e-6 * (1.0 + a.abs()), "{a} vs {b}");
        }
        let h = ll.hessian(&theta);
        assert!((h.clone() - hess_diff(&ll, &theta)).amax() < 1e-5 * (1.0 + h.amax()));
    }

    #[test]
    fn truncated_derivatives() {
        let (y, x) = sample();
        let y: Vec<f64> = y.iter().map(|v| v * 0.9 + 0.05).collect();
        for (lo, hi) in [(0.0, 1.0), (0.0, f64::INFINITY), (f64::NEG_INFINITY, 1.0)] {
            let ll = TruncatedLikelihood::new(&y, x.clone(), lo, hi);
            let theta = [0.3, -0.6, 3.0];
            let g = ll.gradient(&theta);
            for (a, b) in g.iter().zip(central_diff(&ll, &theta)) {
                assert!((a - b).abs() < 1e-6 * (1.0 + a.abs()), "{lo},{hi}: {a} vs {b}");
            }
            let h = ll.hessian(&theta);
            assert!((h.clone() - hess_diff(&ll, &theta)).amax() < 1e-5 * (1.0 + h.amax()));
        }
    }

    #[test]
    fn invalid_scale_is_minus_infinity() {
        let (y, x) = sample();
        let ll = TobitLikelihood::new(&y, x, 0.0, 1.0);
        assert_eq!(ll.value(&[0.0, 0.0, -1.0]), f64::NEG_INFINITY);
    }
}
