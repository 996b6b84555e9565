//! Dense two-phase primal simplex with Bland's rule.
//!
//! Problems are converted to standard form (`A x = b`, `x >= 0`, `b >= 0`)
//! with slack, surplus and artificial columns. Phase one minimises the sum
//! of artificials; phase two optimises the user objective over the feasible
//! basis it leaves behind. The final basis is refactorised from the original
//! columns so the returned primal point does not carry tableau drift.

use nalgebra::{DMatrix, DVector};
use serde::{Deserialize, Serialize};
use thiserror::Error;

pub const TOLERANCE: f64 = 1e-9;
const MAX_PIVOTS: usize = 100_000;

#[derive(Debug, Error, PartialEq)]
pub enum LpError {
    #[error("dimension mismatch: {0}")]
    DimensionMismatch(String),
    #[error("problem data contains a non-finite value")]
    NonFinite,
    #[error("variable {0} has lower bound above upper bound")]
    InvertedBounds(usize),
    #[error("basis is numerically singular after refactorization")]
    SingularBasis,
    #[error("pivot limit of {MAX_PIVOTS} reached")]
    PivotLimit,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum Sense {
    Le,
    Ge,
    Eq,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum Direction {
    Minimize,
    Maximize,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Constraint {
    pub coeffs: Vec<f64>,
    pub sense: Sense,
    pub rhs: f64,
}

impl Constraint {
    pub fn new(coeffs: Vec<f64>, sense: Sense, rhs: f64) -> Self {
        Self { coeffs, sense, rhs }
    }
}

/// Bounds on a decision variable; `None` means unbounded on that side.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Bounds {
    pub lower: Option<f64>,
    pub upper: Option<f64>,
}

impl Bounds {
    pub const NON_NEGATIVE: Bounds = Bounds {
        lower: Some(0.0),
        upper: None,
    };
    pub const FREE: Bounds = Bounds {
        lower: None,
        upper: None,
    };
}

impl Default for Bounds {
    fn default() -> Self {
        Self::NON_NEGATIVE
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct LpProblem {
    pub direction: Direction,
    pub objective: Vec<f64>,
    pub constraints: Vec<Constraint>,
    pub bounds: Vec<Bounds>,
}

impl LpProblem {
    /// A problem over non-negative variables.
    pub fn new(direction: Direction, objective: Vec<f64>) -> Self {
        let n = objective.len();
        Self {
            direction,
            objective,
            constraints: Vec::new(),
            bounds: vec![Bounds::NON_NEGATIVE; n],
        }
    }

    pub fn constrain(mut self, coeffs: Vec<f64>, sense: Sense, rhs: f64) -> Self {
        self.constraints.push(Constraint::new(coeffs, sense, rhs));
        self
    }

    pub fn bound(mut self, var: usize, bounds: Bounds) -> Self {
        self.bounds[var] = bounds;
        self
    }

    pub fn num_vars(&self) -> usize {
        self.objective.len()
    }

    /// Largest constraint or bound violation of `x`.
    pub fn max_violation(&self, x: &[f64]) -> f64 {
        let mut worst = 0.0_f64;
        for c in &self.constraints {
            let lhs: f64 = c.coeffs.iter().zip(x).map(|(a, v)| a * v).sum();
            let v = match c.sense {
                Sense::Le => lhs - c.rhs,
                Sense::Ge => c.rhs - lhs,
                Sense::Eq => (lhs - c.rhs).abs(),
            };
            worst = worst.max(v);
        }
        for (b, &v) in self.bounds.iter().zip(x) {
            if let Some(l) = b.lower {
                worst = worst.max(l - v);
            }
            if let Some(u) = b.upper {
                worst = worst.max(v - u);
            }
        }
        worst
    }

    fn validate(&self) -> Result<(), LpError> {
        let n = self.num_vars();
        if self.bounds.len() != n {
            return Err(LpError::DimensionMismatch(format!(
                "{} bounds for {} variables",
                self.bounds.len(),
                n
            )));
        }
        for (i, c) in self.constraints.iter().enumerate() {
            if c.coeffs.len() != n {
                return Err(LpError::DimensionMismatch(format!(
                    "constraint {i} has {} coefficients for {n} variables",
                    c.coeffs.len()
                )));
            }
            if !c.rhs.is_finite() || c.coeffs.iter().any(|v| !v.is_finite()) {
                return Err(LpError::NonFinite);
            }
        }
        if self.objective.iter().any(|v| !v.is_finite()) {
            return Err(LpError::NonFinite);
        }
        for (j, b) in self.bounds.iter().enumerate() {
            if b.lower.is_some_and(|l| !l.is_finite()) || b.upper.is_some_and(|u| !u.is_finite()) {
                return Err(LpError::NonFinite);
            }
            if let (Some(l), Some(u)) = (b.lower, b.upper) {
                if l > u {
                    return Err(LpError::InvertedBounds(j));
                }
            }
        }
        Ok(())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum LpStatus {
    Optimal,
    Infeasible,
    Unbounded,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct LpSolution {
    pub status: LpStatus,
    /// Objective value in the problem's own direction; NaN unless optimal.
    pub value: f64,
    /// Primal point; empty unless optimal.
    pub x: Vec<f64>,
    pub pivots: usize,
}

impl LpSolution {
    fn without_point(status: LpStatus, pivots: usize) -> Self {
        Self {
            status,
            value: f64::NAN,
            x: Vec::new(),
            pivots,
        }
    }
}

/// How an original variable maps onto standard-form columns:
/// `x = offset + sign * x'` or, for free variables, `x = x⁺ - x⁻`.
#[derive(Debug, Clone, Copy)]
enum VarMap {
    Shifted { col: usize, offset: f64, sign: f64 },
    Split { pos: usize, neg: usize },
}

struct Tableau {
    /// m rows of width `cols + 1`; the last entry is the right-hand side.
    rows: Vec<Vec<f64>>,
    basis: Vec<usize>,
    cols: usize,
    pivots: usize,
}

enum PhaseOutcome {
    Optimal,
    Unbounded,
}

impl Tableau {
    fn rhs(&self, i: usize) -> f64 {
        self.rows[i][self.cols]
    }

    fn pivot(&mut self, r: usize, c: usize) {
        let p = self.rows[r][c];
        self.rows[r].iter_mut().for_each(|v| *v /= p);
        let pivot_row = self.rows[r].clone();
        for (i, row) in self.rows.iter_mut().enumerate() {
            if i == r {
                continue;
            }
            let f = row[c];
            if f != 0.0 {
                row.iter_mut().zip(&pivot_row).for_each(|(v, p)| *v -= f * p);
                row[c] = 0.0;
            }
        }
        self.basis[r] = c;
        self.pivots += 1;
    }

    /// Minimises `costs · x` over the current basis. Columns with
    /// `allowed[j] == false` never enter.
    fn optimize(&mut self, costs: &[f64], allowed: &[bool]) -> Result<PhaseOutcome, LpError> {
        loop {
            if self.pivots > MAX_PIVOTS {
                return Err(LpError::PivotLimit);
            }
            // Bland: lowest-index column with negative reduced cost.
            let entering = (0..self.cols).find(|&j| {
                if !allowed[j] || self.basis.contains(&j) {
                    return false;
                }
                let reduced = costs[j]
                    - self
                        .basis
                        .iter()
                        .zip(&self.rows)
                        .map(|(&b, row)| costs[b] * row[j])
                        .sum::<f64>();
                reduced < -TOLERANCE
            });
            let Some(c) = entering else {
                return Ok(PhaseOutcome::Optimal);
            };
            let mut leave: Option<(usize, f64)> = None;
            for i in 0..self.rows.len() {
                let a = self.rows[i][c];
                if a > TOLERANCE {
                    let ratio = self.rhs(i) / a;
                    leave = match leave {
                        None => Some((i, ratio)),
                        Some((r, best)) => {
                            if ratio < best - TOLERANCE
                                || (ratio <= best + TOLERANCE && self.basis[i] < self.basis[r])
                            {
                                Some((i, ratio))
                            } else {
                                Some((r, best))
                            }
                        }
                    };
                }
            }
            match leave {
                None => return Ok(PhaseOutcome::Unbounded),
                Some((r, _)) => self.pivot(r, c),
            }
        }
    }
}

/// Solves `p` to optimality or reports infeasibility/unboundedness.
pub fn lp_solve(p: &LpProblem) -> Result<LpSolution, LpError> {
    p.validate()?;
    let n = p.num_vars();

    // Standard-form variables for the structural columns.
    let mut maps = Vec::with_capacity(n);
    let mut ncols = 0;
    let mut extra_rows: Vec<(usize, f64)> = Vec::new(); // (std column, upper) for x' <= u - l
    for b in &p.bounds {
        let map = match (b.lower, b.upper) {
            (Some(l), upper) => {
                let col = ncols;
                ncols += 1;
                if let Some(u) = upper {
                    extra_rows.push((col, u - l));
                }
                VarMap::Shifted {
                    col,
                    offset: l,
                    sign: 1.0,
                }
            }
            (None, Some(u)) => {
                let col = ncols;
                ncols += 1;
                VarMap::Shifted {
                    col,
                    offset: u,
                    sign: -1.0,
                }
            }
            (None, None) => {
                ncols += 2;
                VarMap::Split {
                    pos: ncols - 2,
                    neg: ncols - 1,
                }
            }
        };
        maps.push(map);
    }
    let structural = ncols;

    // Rows in standard-form structural columns.
    let mut rows: Vec<(Vec<f64>, Sense, f64)> = Vec::new();
    for c in &p.constraints {
        let mut a = vec![0.0; structural];
        let mut rhs = c.rhs;
        for (j, &coef) in c.coeffs.iter().enumerate() {
            match maps[j] {
                VarMap::Shifted { col, offset, sign } => {
                    a[col] += coef * sign;
                    rhs -= coef * offset;
                }
                VarMap::Split { pos, neg } => {
                    a[pos] += coef;
                    a[neg] -= coef;
                }
            }
        }
        rows.push((a, c.sense, rhs));
    }
    for &(col, cap) in &extra_rows {
        let mut a = vec![0.0; structural];
        a[col] = 1.0;
        rows.push((a, Sense::Le, cap));
    }
    for (a, sense, rhs) in rows.iter_mut() {
        if *rhs < 0.0 {
            a.iter_mut().for_each(|v| *v = -*v);
            *rhs = -*rhs;
            *sense = match *sense {
                Sense::Le => Sense::Ge,
                Sense::Ge => Sense::Le,
                Sense::Eq => Sense::Eq,
            };
        }
    }

    let m = rows.len();
    let slack_count = rows.iter().filter(|r| r.1 != Sense::Eq).count();
    let art_count = rows.iter().filter(|r| r.1 != Sense::Le).count();
    let total = structural + slack_count + art_count;
    let first_art = structural + slack_count;

    let mut tab = Tableau {
        rows: Vec::with_capacity(m),
        basis: Vec::with_capacity(m),
        cols: total,
        pivots: 0,
    };
    let mut slack = structural;
    let mut art = first_art;
    for (a, sense, rhs) in &rows {
        let mut row = vec![0.0; total + 1];
        row[..structural].copy_from_slice(a);
        row[total] = *rhs;
        match sense {
            Sense::Le => {
                row[slack] = 1.0;
                tab.basis.push(slack);
                slack += 1;
            }
            Sense::Ge => {
                row[slack] = -1.0;
                slack += 1;
                row[art] = 1.0;
                tab.basis.push(art);
                art += 1;
            }
            Sense::Eq => {
                row[art] = 1.0;
                tab.basis.push(art);
                art += 1;
            }
        }
        tab.rows.push(row);
    }

    // Phase one.
    let all = vec![true; total];
    if art_count > 0 {
        let mut phase1 = vec![0.0; total];
        phase1[first_art..].iter_mut().for_each(|v| *v = 1.0);
        tab.optimize(&phase1, &all)?;
        let infeasibility: f64 = tab
            .basis
            .iter()
            .enumerate()
            .filter(|(_, &b)| b >= first_art)
            .map(|(i, _)| tab.rhs(i))
            .sum();
        let scale = 1.0 + rows.iter().map(|r| r.2.abs()).fold(0.0, f64::max);
        if infeasibility > TOLERANCE * scale {
            return Ok(LpSolution::without_point(LpStatus::Infeasible, tab.pivots));
        }
        // Drive zero-level artificials out of the basis; drop redundant rows.
        let mut i = 0;
        while i < tab.rows.len() {
            if tab.basis[i] >= first_art {
                let col = (0..first_art)
                    .filter(|j| !tab.basis.contains(j))
                    .max_by(|&a, &b| tab.rows[i][a].abs().total_cmp(&tab.rows[i][b].abs()))
                    .filter(|&j| tab.rows[i][j].abs() > TOLERANCE);
                match col {
                    Some(j) => tab.pivot(i, j),
                    None => {
                        tab.rows.remove(i);
                        tab.basis.remove(i);
                        continue;
                    }
                }
            }
            i += 1;
        }
    }

    // Phase two, always minimising.
    let sign = match p.direction {
        Direction::Minimize => 1.0,
        Direction::Maximize => -1.0,
    };
    let mut costs = vec![0.0; total];
    for (j, map) in maps.iter().enumerate() {
        let c = sign * p.objective[j];
        match *map {
            VarMap::Shifted { col, sign: s, .. } => costs[col] += c * s,
            VarMap::Split { pos, neg } => {
                costs[pos] += c;
                costs[neg] -= c;
            }
        }
    }
    let mut allowed = all;
    allowed[first_art..].iter_mut().for_each(|v| *v = false);
    if let PhaseOutcome::Unbounded = tab.optimize(&costs, &allowed)? {
        return Ok(LpSolution::without_point(LpStatus::Unbounded, tab.pivots));
    }

    // Refactorize: recover basic values from the original standard-form columns.
    let basis_values = refactorized_basic_values(&rows, &tab, structural, slack_count)
        .ok_or(LpError::SingularBasis)?;
    let mut std_x = vec![0.0; total];
    for (&b, &v) in tab.basis.iter().zip(&basis_values) {
        std_x[b] = v.max(0.0);
    }

    let x: Vec<f64> = maps
        .iter()
        .map(|map| match *map {
            VarMap::Shifted { col, offset, sign } => offset + sign * std_x[col],
            VarMap::Split { pos, neg } => std_x[pos] - std_x[neg],
        })
        .collect();
    let value = p.objective.iter().zip(&x).map(|(c, v)| c * v).sum();
    Ok(LpSolution {
        status: LpStatus::Optimal,
        value,
        x,
        pivots: tab.pivots,
    })
}

/// Solves `B x_B = b` using the original (sign-normalised) rows restricted to
/// the final basis. With redundant rows removed the system is over-determined
/// but consistent; it is solved through the normal equations of the basis
/// columns, which are square and non-singular exactly when B has full column
/// rank.
fn refactorized_basic_values(
    rows: &[(Vec<f64>, Sense, f64)],
    tab: &Tableau,
    structural: usize,
    slack_count: usize,
) -> Option<Vec<f64>> {
    let m = rows.len();
    let k = tab.basis.len();
    if k == 0 {
        return Some(Vec::new());
    }
    let first_art = structural + slack_count;
    // Column j of the full standard-form matrix.
    let mut slack_of_row = vec![None; m];
    let mut art_of_row = vec![None; m];
    let (mut s, mut a) = (structural, first_art);
    for (i, r) in rows.iter().enumerate() {
        if r.1 != Sense::Eq {
            slack_of_row[i] = Some((s, if r.1 == Sense::Le { 1.0 } else { -1.0 }));
            s += 1;
        }
        if r.1 != Sense::Le {
            art_of_row[i] = Some(a);
            a += 1;
        }
    }
    let entry = |i: usize, j: usize| -> f64 {
        if j < structural {
            rows[i].0[j]
        } else if let Some((col, v)) = slack_of_row[i] {
            if col == j {
                v
            } else if art_of_row[i] == Some(j) {
                1.0
            } else {
                0.0
            }
        } else if art_of_row[i] == Some(j) {
            1.0
        } else {
            0.0
        }
    };
    let b_mat = DMatrix::from_fn(m, k, |i, c| entry(i, tab.basis[c]));
    let rhs = DVector::from_iterator(m, rows.iter().map(|r| r.2));
    let solution = if m == k {
        b_mat.clone().lu().solve(&rhs)?
    } else {
        let gram = b_mat.transpose() * &b_mat;
        gram.lu().solve(&(b_mat.transpose() * &rhs))?
    };
    if solution.iter().any(|v| !v.is_finite()) {
        return None;
    }
    // Reject a refactorisation that disagrees badly with the tableau.
    let residual = (&b_mat * &solution - &rhs).amax();
    let scale = 1.0 + rhs.amax();
    if residual > 1e-6 * scale {
        return None;
    }
    Some(solution.iter().copied().collect())
}
