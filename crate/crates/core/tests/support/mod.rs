//! Independent reference implementations used by the integration and
//! acceptance tests. Nothing here calls into the numerical code under test;
//! only `Dataset` is shared, as a container.

#![allow(dead_code)]

use frontier_core::dataframe::Dataset;
use indexmap::IndexMap;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, StandardNormal};
use statrs::distribution::{Continuous, ContinuousCDF, Normal};

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

pub fn normal(rng: &mut ChaCha8Rng) -> f64 {
    StandardNormal.sample(rng)
}

pub fn dataset(cols: &[(&str, Vec<f64>)]) -> Dataset {
    let n = cols[0].1.len();
    let columns: IndexMap<String, Vec<f64>> =
        cols.iter().map(|(k, v)| (k.to_string(), v.clone())).collect();
    Dataset::new((0..n).map(|i| format!("U{i:02}")).collect(), None, columns, "oracle").unwrap()
}

// ---------------------------------------------------------------- linear algebra

/// Solves `a x = b` by Gaussian elimination with partial pivoting.
pub fn gauss_solve(a: &[Vec<f64>], b: &[f64]) -> Option<Vec<f64>> {
    let n = a.len();
    let mut m: Vec<Vec<f64>> = a
        .iter()
        .zip(b)
        .map(|(row, &bi)| {
            let mut r = row.clone();
            r.push(bi);
            r
        })
        .collect();
    let scale = a.iter().flatten().fold(0.0_f64, |s, v| s.max(v.abs())).max(1.0);
    for col in 0..n {
        let piv = (col..n).max_by(|&i, &j| m[i][col].abs().total_cmp(&m[j][col].abs()))?;
        if m[piv][col].abs() <= 1e-11 * scale {
            return None;
        }
        m.swap(col, piv);
        for r in 0..n {
            if r != col {
                let f = m[r][col] / m[col][col];
                if f != 0.0 {
                    for c in col..=n {
                        m[r][c] -= f * m[col][c];
                    }
                }
            }
        }
    }
    Some((0..n).map(|i| m[i][n] / m[i][i]).collect())
}

/// Gauss-Jordan inverse.
pub fn invert(a: &[Vec<f64>]) -> Option<Vec<Vec<f64>>> {
    let n = a.len();
    let mut cols = Vec::with_capacity(n);
    for j in 0..n {
        let e: Vec<f64> = (0..n).map(|i| if i == j { 1.0 } else { 0.0 }).collect();
        cols.push(gauss_solve(a, &e)?);
    }
    Some((0..n).map(|i| (0..n).map(|j| cols[j][i]).collect()).collect())
}

// ---------------------------------------------------------------- LP by vertex enumeration

#[derive(Clone, Copy, Debug, PartialEq)]
pub enum Rel {
    Le,
    Ge,
    Eq,
}

pub struct VertexLp {
    /// Minimised.
    pub cost: Vec<f64>,
    pub rows: Vec<(Vec<f64>, Rel, f64)>,
    /// `true` where the variable is constrained to be non-negative.
    pub nonneg: Vec<bool>,
}

fn next_combination(idx: &mut [usize], n: usize) -> bool {
    let k = idx.len();
    for i in (0..k).rev() {
        if idx[i] < n - k + i {
            idx[i] += 1;
            for j in i + 1..k {
                idx[j] = idx[j - 1] + 1;
            }
            return true;
        }
    }
    false
}

impl VertexLp {
    fn feasible(&self, x: &[f64]) -> bool {
        let tol = 1e-9;
        for (j, &nn) in self.nonneg.iter().enumerate() {
            if nn && x[j] < -tol {
                return false;
            }
        }
        self.rows.iter().all(|(a, rel, b)| {
            let lhs: f64 = a.iter().zip(x).map(|(p, q)| p * q).sum();
            let slack = tol * (1.0 + b.abs() + a.iter().zip(x).map(|(p, q)| (p * q).abs()).sum::<f64>());
            match rel {
                Rel::Le => lhs <= b + slack,
                Rel::Ge => lhs >= b - slack,
                Rel::Eq => (lhs - b).abs() <= slack,
            }
        })
    }

    /// Minimum over all basic feasible solutions. Assumes a pointed,
    /// bounded feasible region.
    pub fn solve(&self) -> Option<(f64, Vec<f64>)> {
        let nv = self.cost.len();
        // Candidate hyperplanes: every row, then every non-negativity bound.
        let mut planes: Vec<(Vec<f64>, f64)> = Vec::new();
        let mut mandatory = Vec::new();
        for (i, (a, rel, b)) in self.rows.iter().enumerate() {
            planes.push((a.clone(), *b));
            if *rel == Rel::Eq {
                mandatory.push(i);
            }
        }
        for (j, &nn) in self.nonneg.iter().enumerate() {
            if nn {
                let mut e = vec![0.0; nv];
                e[j] = 1.0;
                planes.push((e, 0.0));
            }
        }
        let optional: Vec<usize> = (0..planes.len()).filter(|i| !mandatory.contains(i)).collect();
        let choose = nv.checked_sub(mandatory.len())?;
        if choose > optional.len() {
            return None;
        }
        let mut best: Option<(f64, Vec<f64>)> = None;
        let mut idx: Vec<usize> = (0..choose).collect();
        loop {
            let active: Vec<usize> = mandatory
                .iter()
                .copied()
                .chain(idx.iter().map(|&i| optional[i]))
                .collect();
            let a: Vec<Vec<f64>> = active.iter().map(|&i| planes[i].0.clone()).collect();
            let b: Vec<f64> = active.iter().map(|&i| planes[i].1).collect();
            if let Some(x) = gauss_solve(&a, &b) {
                if self.feasible(&x) {
                    let v: f64 = self.cost.iter().zip(&x).map(|(c, xi)| c * xi).sum();
                    if best.as_ref().is_none_or(|(bv, _)| v < *bv) {
                        best = Some((v, x));
                    }
                }
            }
            if choose == 0 || !next_combination(&mut idx, optional.len()) {
                break;
            }
        }
        best
    }
}

// ---------------------------------------------------------------- DEA

/// Radial DEA score of unit `o`; `x[j]` and `y[j]` are unit `j`'s input and
/// output vectors.
pub fn dea_oracle(x: &[Vec<f64>], y: &[Vec<f64>], o: usize, vrs: bool, output_oriented: bool) -> f64 {
    let n = x.len();
    let nv = n + 1;
    let mut rows = Vec::new();
    // variable 0 is θ (or φ), then λ_1..λ_n
    for i in 0..x[0].len() {
        let mut a = vec![0.0; nv];
        for j in 0..n {
            a[j + 1] = x[j][i];
        }
        if output_oriented {
            rows.push((a, Rel::Le, x[o][i]));
        } else {
            a[0] = -x[o][i];
            rows.push((a, Rel::Le, 0.0));
        }
    }
    for r in 0..y[0].len() {
        let mut a = vec![0.0; nv];
        for j in 0..n {
            a[j + 1] = y[j][r];
        }
        if output_oriented {
            a[0] = -y[o][r];
            rows.push((a, Rel::Ge, 0.0));
        } else {
            rows.push((a, Rel::Ge, y[o][r]));
        }
    }
    if vrs {
        let mut a = vec![1.0; nv];
        a[0] = 0.0;
        rows.push((a, Rel::Eq, 1.0));
    }
    let mut cost = vec![0.0; nv];
    cost[0] = if output_oriented { -1.0 } else { 1.0 };
    let mut nonneg = vec![true; nv];
    nonneg[0] = false;
    let (v, _) = VertexLp { cost, rows, nonneg }.solve().expect("DEA LP is always feasible");
    if output_oriented {
        1.0 / -v
    } else {
        v
    }
}

/// Random instance with values in [1, 10): `(inputs, outputs)` per unit.
pub fn dea_instance(rng: &mut ChaCha8Rng, n: usize, m: usize, s: usize) -> (Vec<Vec<f64>>, Vec<Vec<f64>>) {
    let draw = |rng: &mut ChaCha8Rng, k: usize| (0..k).map(|_| rng.random_range(1.0..10.0)).collect::<Vec<f64>>();
    let x = (0..n).map(|_| draw(rng, m)).collect();
    let y = (0..n).map(|_| draw(rng, s)).collect();
    (x, y)
}

/// Packs an instance as a dataset with columns `x0..`, `y0..`.
pub fn dea_dataset(x: &[Vec<f64>], y: &[Vec<f64>]) -> (Dataset, Vec<String>, Vec<String>) {
    let mut cols = Vec::new();
    let xin: Vec<String> = (0..x[0].len()).map(|i| format!("x{i}")).collect();
    let yout: Vec<String> = (0..y[0].len()).map(|r| format!("y{r}")).collect();
    for (i, name) in xin.iter().enumerate() {
        cols.push((name.as_str(), x.iter().map(|u| u[i]).collect()));
    }
    for (r, name) in yout.iter().enumerate() {
        cols.push((name.as_str(), y.iter().map(|u| u[r]).collect()));
    }
    (dataset(&cols), xin, yout)
}

// ---------------------------------------------------------------- OLS

pub struct OlsOracle {
    pub beta: Vec<f64>,
    pub se: Vec<f64>,
    pub rss: f64,
}

/// Normal equations `(X'X) b = X'y` with an intercept column prepended.
pub fn ols_oracle(y: &[f64], regressors: &[Vec<f64>]) -> OlsOracle {
    let n = y.len();
    let k = regressors.len() + 1;
    let col = |j: usize, i: usize| if j == 0 { 1.0 } else { regressors[j - 1][i] };
    let xtx: Vec<Vec<f64>> = (0..k)
        .map(|a| (0..k).map(|b| (0..n).map(|i| col(a, i) * col(b, i)).sum()).collect())
        .collect();
    let xty: Vec<f64> = (0..k).map(|a| (0..n).map(|i| col(a, i) * y[i]).sum()).collect();
    let beta = gauss_solve(&xtx, &xty).expect("full rank design");
    let rss: f64 = (0..n)
        .map(|i| {
            let fit: f64 = (0..k).map(|j| col(j, i) * beta[j]).sum();
            (y[i] - fit).powi(2)
        })
        .sum();
    let s2 = rss / (n - k) as f64;
    let inv = invert(&xtx).unwrap();
    let se = (0..k).map(|j| (s2 * inv[j][j]).sqrt()).collect();
    OlsOracle { beta, se, rss }
}

/// Gaussian log-likelihood at the ML variance `rss / n`, summed term by term.
pub fn gaussian_loglik_oracle(residuals: &[f64]) -> f64 {
    let n = residuals.len() as f64;
    let s2 = residuals.iter().map(|r| r * r).sum::<f64>() / n;
    let d = Normal::new(0.0, s2.sqrt()).unwrap();
    residuals.iter().map(|&r| d.ln_pdf(r)).sum()
}

/// DEA-like dependent strictly inside (0, 1) and `k` standard-normal
/// regressors named `x1..xk`.
pub fn interior_dataset(rng: &mut ChaCha8Rng, n: usize, k: usize) -> (Dataset, Vec<String>) {
    let xs: Vec<Vec<f64>> = (0..k).map(|_| (0..n).map(|_| normal(rng)).collect()).collect();
    let coef: Vec<f64> = (0..k).map(|j| 0.4 * (-1.0_f64).powi(j as i32) / (1.0 + j as f64)).collect();
    let y: Vec<f64> = (0..n)
        .map(|i| {
            let eta = 0.8 + (0..k).map(|j| coef[j] * xs[j][i]).sum::<f64>() + 0.3 * normal(rng);
            1.0 / (1.0 + (-eta).exp())
        })
        .collect();
    let names: Vec<String> = (1..=k).map(|j| format!("x{j}")).collect();
    let mut cols = vec![("y", y)];
    for (j, name) in names.iter().enumerate() {
        cols.push((name.as_str(), xs[j].clone()));
    }
    (dataset(&cols), names)
}

// ---------------------------------------------------------------- likelihoods in natural parameters

fn std_normal() -> Normal {
    Normal::new(0.0, 1.0).unwrap()
}

/// Censored-normal log-likelihood at (β, σ); `x` rows include the intercept.
pub fn tobit_loglik_oracle(y: &[f64], x: &[Vec<f64>], beta: &[f64], sigma: f64, lower: f64, upper: f64) -> f64 {
    let d = std_normal();
    y.iter()
        .zip(x)
        .map(|(&yi, xi)| {
            let mu: f64 = xi.iter().zip(beta).map(|(a, b)| a * b).sum();
            if yi <= lower {
                d.cdf((lower - mu) / sigma).ln()
            } else if yi >= upper {
                d.sf((upper - mu) / sigma).ln()
            } else {
                d.ln_pdf((yi - mu) / sigma) - sigma.ln()
            }
        })
        .sum()
}

/// Truncated-normal log-likelihood at (β, σ); `-inf` where the in-bounds
/// mass underflows.
pub fn truncated_loglik_oracle(y: &[f64], x: &[Vec<f64>], beta: &[f64], sigma: f64, lower: f64, upper: f64) -> f64 {
    let d = std_normal();
    y.iter()
        .zip(x)
        .map(|(&yi, xi)| {
            let mu: f64 = xi.iter().zip(beta).map(|(a, b)| a * b).sum();
            let (a, b) = ((lower - mu) / sigma, (upper - mu) / sigma);
            let mass = if a > 0.0 { d.sf(a) - d.sf(b) } else { d.cdf(b) - d.cdf(a) };
            if !(mass > 0.0) {
                return f64::NEG_INFINITY;
            }
            d.ln_pdf((yi - mu) / sigma) - sigma.ln() - mass.ln()
        })
        .sum()
}

/// Central-difference gradient.
pub fn numeric_gradient(f: &dyn Fn(&[f64]) -> f64, at: &[f64]) -> Vec<f64> {
    (0..at.len())
        .map(|j| {
            let h = 1e-6 * (1.0 + at[j].abs());
            let mut up = at.to_vec();
            let mut dn = at.to_vec();
            up[j] += h;
            dn[j] -= h;
            (f(&up) - f(&dn)) / (2.0 * h)
        })
        .collect()
}

// ---------------------------------------------------------------- diagnostics

/// Two-pass Pearson correlation.
pub fn pearson_oracle(a: &[f64], b: &[f64]) -> f64 {
    let n = a.len() as f64;
    let ma = a.iter().sum::<f64>() / n;
    let mb = b.iter().sum::<f64>() / n;
    let (mut sab, mut saa, mut sbb) = (0.0, 0.0, 0.0);
    for (x, y) in a.iter().zip(b) {
        sab += (x - ma) * (y - mb);
        saa += (x - ma).powi(2);
        sbb += (y - mb).powi(2);
    }
    sab / (saa * sbb).sqrt()
}

pub fn correlation_oracle(cols: &[Vec<f64>]) -> Vec<Vec<f64>> {
    cols.iter()
        .map(|a| cols.iter().map(|b| pearson_oracle(a, b)).collect())
        .collect()
}

/// VIFs as the diagonal of the inverse correlation matrix.
pub fn vif_oracle(cols: &[Vec<f64>]) -> Vec<f64> {
    let inv = invert(&correlation_oracle(cols)).expect("non-singular correlation");
    (0..cols.len()).map(|i| inv[i][i]).collect()
}

/// Characteristic polynomial coefficients `c` with
/// `det(λI - A) = λⁿ + c[1] λⁿ⁻¹ + ... + c[n]` (Faddeev-LeVerrier).
pub fn char_poly(a: &[Vec<f64>]) -> Vec<f64> {
    let n = a.len();
    let mut c = vec![1.0; n + 1];
    let mut m = vec![vec![0.0; n]; n];
    for k in 1..=n {
        // M_k = A M_{k-1} + c_{k-1} I
        let mut next = vec![vec![0.0; n]; n];
        for i in 0..n {
            for j in 0..n {
                next[i][j] = (0..n).map(|l| a[i][l] * m[l][j]).sum::<f64>();
            }
            next[i][i] += c[k - 1];
        }
        m = next;
        let am_trace: f64 = (0..n).map(|i| (0..n).map(|l| a[i][l] * m[l][i]).sum::<f64>()).sum();
        c[k] = -am_trace / k as f64;
    }
    c
}

/// Coefficients of `Π (λ - r_i)` in the same layout as [`char_poly`].
pub fn poly_from_roots(roots: &[f64]) -> Vec<f64> {
    let mut c = vec![1.0];
    for &r in roots {
        let mut next = vec![0.0; c.len() + 1];
        for (i, &ci) in c.iter().enumerate() {
            next[i] += ci;
            next[i + 1] -= r * ci;
        }
        c = next;
    }
    c
}

/// Gini by the O(n²) mean absolute difference.
pub fn gini_oracle(v: &[f64]) -> f64 {
    let n = v.len() as f64;
    let mean = v.iter().sum::<f64>() / n;
    let mut s = 0.0;
    for a in v {
        for b in v {
            s += (a - b).abs();
        }
    }
    s / (2.0 * n * n * mean)
}

pub fn rel_diff(a: f64, b: f64) -> f64 {
    (a - b).abs() / b.abs().max(1e-300)
}

/// Coarse-to-fine grid search for the maximum of `f`. Each round evaluates
/// a full `(2·half + 1)^d` grid around the incumbent, then shrinks the step
/// by `half`. Returns the argmax and the final grid step per coordinate.
pub fn grid_argmax(f: &dyn Fn(&[f64]) -> f64, center: &[f64], step: &[f64], half: usize, rounds: usize) -> (Vec<f64>, Vec<f64>) {
    let d = center.len();
    let side = 2 * half + 1;
    let mut best = center.to_vec();
    let mut best_v = f(&best);
    let mut step = step.to_vec();
    for _ in 0..rounds {
        let origin = best.clone();
        for flat in 0..side.pow(d as u32) {
            let mut p = origin.clone();
            let mut rest = flat;
            for j in 0..d {
                let offset = (rest % side) as f64 - half as f64;
                rest /= side;
                p[j] += offset * step[j];
            }
            let v = f(&p);
            if v > best_v {
                best_v = v;
                best = p;
            }
        }
        step.iter_mut().for_each(|s| *s /= half as f64);
    }
    let last: Vec<f64> = step.iter().map(|s| s * half as f64).collect();
    (best, last)
}
