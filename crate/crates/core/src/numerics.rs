//! Special functions and small numeric helpers.

use statrs::function::gamma::ln_gamma;

use crate::error::{Error, Result};

/// Shift threshold for the asymptotic series; the first omitted term is
/// below 1e-13 from here on.
const ASYMPTOTIC_FROM: f64 = 10.0;

/// Digamma function `psi(x) = d/dx ln Gamma(x)` for `x > 0`.
pub fn digamma(x: f64) -> Result<f64> {
    if x.is_nan() || x <= 0.0 || x.is_infinite() {
        return Err(Error::Domain(format!("digamma is only defined here for finite x > 0, got {x}")));
    }
    Ok(digamma_positive(x))
}

/// `psi(n)` for a neighbor count `n >= 1`.
#[inline]
pub fn digamma_count(n: usize) -> f64 {
    debug_assert!(n >= 1, "digamma of a zero count");
    digamma_positive(n as f64)
}

fn digamma_positive(mut x: f64) -> f64 {
    // psi(x) = psi(x + 1) - 1/x
    let mut shift = 0.0;
    while x < ASYMPTOTIC_FROM {
        shift -= 1.0 / x;
        x += 1.0;
    }
    let inv = 1.0 / x;
    let inv2 = inv * inv;
    let series = inv2
        * (1.0 / 12.0
            - inv2 * (1.0 / 120.0 - inv2 * (1.0 / 252.0 - inv2 * (1.0 / 240.0 - inv2 * (1.0 / 132.0)))));
    shift + x.ln() - 0.5 * inv - series
}

/// `log c_{d,p}` where `c_{d,p} = 2^d Gamma(1 + 1/p)^d / Gamma(1 + d/p)` is the
/// volume of the unit `l_p` ball in `d` dimensions. `p = f64::INFINITY` is the
/// Chebyshev cube of side 2.
pub fn lp_ball_log_volume_constant(d: usize, p: f64) -> Result<f64> {
    if d == 0 {
        return Err(Error::Domain("ball volume needs dimension d >= 1".into()));
    }
    if p.is_nan() || p <= 0.0 {
        return Err(Error::Domain(format!("l_p norm needs p > 0, got {p}")));
    }
    let d_f = d as f64;
    if p.is_infinite() {
        return Ok(d_f * std::f64::consts::LN_2);
    }
    Ok(d_f * std::f64::consts::LN_2 + d_f * ln_gamma(1.0 + 1.0 / p) - ln_gamma(1.0 + d_f / p))
}

/// Arithmetic mean with compensated (Neumaier) summation in index order.
pub fn mean(values: &[f64]) -> Result<f64> {
    if values.is_empty() {
        return Err(Error::Domain("mean of an empty list".into()));
    }
    Ok(neumaier_sum(values) / values.len() as f64)
}

pub(crate) fn neumaier_sum(values: &[f64]) -> f64 {
    let mut sum = 0.0_f64;
    let mut comp = 0.0_f64;
    for &v in values {
        let t = sum + v;
        if sum.abs() >= v.abs() {
            comp += (sum - t) + v;
        } else {
            comp += (v - t) + sum;
        }
        sum = t;
    }
    sum + comp
}
