//! Normal and Student-t helpers used by the estimators.
//!
//! `erfc` comes from libm (accurate to about one ulp). Deep in the lower tail
//! the normal CDF is evaluated through the continued fraction for Mills'
//! ratio so that `ln Φ(z)` and `φ(z)/Φ(z)` stay finite where `Φ(z)` itself
//! underflows.

use statrs::distribution::{ContinuousCDF, StudentsT};

const LN_SQRT_2PI: f64 = 0.918_938_533_204_672_8;
const TAIL_SWITCH: f64 = -10.0;

pub fn norm_pdf(z: f64) -> f64 {
    (-0.5 * z * z - LN_SQRT_2PI).exp()
}

pub fn norm_log_pdf(z: f64) -> f64 {
    -0.5 * z * z - LN_SQRT_2PI
}

pub fn norm_cdf(z: f64) -> f64 {
    0.5 * libm::erfc(-z / std::f64::consts::SQRT_2)
}

/// Mills' ratio `Φ(-x) / φ(x)` for `x >= 5`, by backward evaluation of the
/// continued fraction `1/(x + 1/(x + 2/(x + 3/(x + ...))))`.
fn mills_ratio_tail(x: f64) -> f64 {
    debug_assert!(x >= 5.0);
    let mut acc = x;
    for k in (1..=120).rev() {
        acc = x + k as f64 / acc;
    }
    1.0 / acc
}

pub fn norm_log_cdf(z: f64) -> f64 {
    if z == f64::INFINITY {
        0.0
    } else if z == f64::NEG_INFINITY {
        f64::NEG_INFINITY
    } else if z < TAIL_SWITCH {
        norm_log_pdf(z) + mills_ratio_tail(-z).ln()
    } else if z > 5.0 {
        // ln(1 - Φ(-z)) without cancellation.
        (-norm_cdf(-z)).ln_1p()
    } else {
        norm_cdf(z).ln()
    }
}

/// Inverse Mills ratio `φ(z) / Φ(z)`.
pub fn inv_mills(z: f64) -> f64 {
    if z == f64::INFINITY {
        0.0
    } else if z < TAIL_SWITCH {
        1.0 / mills_ratio_tail(-z)
    } else {
        (norm_log_pdf(z) - norm_log_cdf(z)).exp()
    }
}

/// Two-sided p-value of a standard-normal statistic.
pub fn normal_two_sided_p(z: f64) -> f64 {
    if z.is_nan() {
        return f64::NAN;
    }
    libm::erfc(z.abs() / std::f64::consts::SQRT_2).clamp(0.0, 1.0)
}

/// Two-sided p-value of a Student-t statistic with `df` degrees of freedom.
pub fn student_two_sided_p(t: f64, df: f64) -> f64 {
    if t.is_nan() {
        return f64::NAN;
    }
    if t.is_infinite() {
        return 0.0;
    }
    let dist = StudentsT::new(0.0, 1.0, df).expect("df > 0");
    (2.0 * dist.sf(t.abs())).clamp(0.0, 1.0)
}

/// `ln(Φ(b) - Φ(a))` for `a < b`, computed on whichever tail keeps precision.
pub fn norm_log_interval(a: f64, b: f64) -> f64 {
    debug_assert!(a < b);
    if a > 0.0 {
        // Both in the upper tail: Φ(b) - Φ(a) = Φ(-a) - Φ(-b).
        return norm_log_interval(-b, -a);
    }
    let lb = norm_log_cdf(b);
    let la = norm_log_cdf(a);
    if la == f64::NEG_INFINITY {
        return lb;
    }
    lb + (-(la - lb).exp()).ln_1p()
}
