//! Equilibrium error bound calculator.
//!
//! The sample-error bound is characterized by the positive root of
//! `g(t) = c0 t + c1 - c2 t^(-d)` with `c0 = m/32`, `c1 = ln(1/delta)`,
//! `c2 = (8 C_E / |J_E|)^(1/l_E)` and `d = 1/l_E`. `g` is strictly increasing
//! on `t > 0`, running from -inf to +inf, so the root is unique.

use crate::error::{Error, Result};

#[derive(Debug, Clone, PartialEq)]
pub struct BoundInputs {
    pub m: f64,
    pub delta: f64,
    /// Almost-sure bound on |f - y|.
    pub big_m: f64,
    /// Almost-sure bound on |f - P - mean error|.
    pub m_p: f64,
    pub tau: f64,
    /// Operator norm D.
    pub d_norm: f64,
    pub sigma_rho_sq: f64,
    pub c_e: f64,
    pub ell_e: f64,
    /// |J_E|, folded into c2; 1 unless supplied.
    pub j_norm: f64,
}

impl Default for BoundInputs {
    fn default() -> Self {
        BoundInputs {
            m: 100.0,
            delta: 0.05,
            big_m: 1.0,
            m_p: 0.5,
            tau: 1.0,
            d_norm: 1.0,
            sigma_rho_sq: 0.0,
            c_e: 1.0,
            ell_e: 1.0,
            j_norm: 1.0,
        }
    }
}

impl BoundInputs {
    pub fn validate(&self) -> Result<()> {
        let fail = |m: &str| Err(Error::invalid(m.to_string()));
        if !(self.m >= 1.0) {
            return fail("m must be >= 1");
        }
        if !(self.delta > 0.0 && self.delta < 1.0) {
            return fail("delta must lie in (0, 1)");
        }
        if !(self.big_m > 0.0) {
            return fail("M must be > 0");
        }
        if !(self.m_p >= 0.0) {
            return fail("M_P must be >= 0");
        }
        if !(self.ell_e > 0.5) {
            return fail("ell_E must be > 1/2");
        }
        if !(self.c_e > 0.0) {
            return fail("C_E must be > 0");
        }
        if !(self.j_norm > 0.0) {
            return fail("|J_E| must be > 0");
        }
        if !(self.tau >= 0.0 && self.d_norm >= 0.0 && self.sigma_rho_sq >= 0.0) {
            return fail("tau, D and sigma_rho^2 must be >= 0");
        }
        Ok(())
    }

    /// `(c0, c1, c2, d)` of the root equation.
    pub fn coefficients(&self) -> (f64, f64, f64, f64) {
        let d = 1.0 / self.ell_e;
        (self.m / 32.0, (1.0 / self.delta).ln(), (8.0 * self.c_e / self.j_norm).powf(d), d)
    }

    fn interaction(&self) -> f64 {
        let (m, mp) = (self.big_m, self.m_p);
        (3.0 * m + 2.0 * mp).powi(2) * (1.0 + mp * mp / (m * m))
    }
}

pub fn theta_residual(c0: f64, c1: f64, c2: f64, d: f64, t: f64) -> f64 {
    c0 * t + c1 - c2 * t.powf(-d)
}

/// Unique positive root of `c0 t + c1 - c2 t^(-d)` by bracketing bisection
/// in log space, polished with Newton steps.
pub fn solve_theta_star(c0: f64, c1: f64, c2: f64, d: f64) -> Result<f64> {
    if !(c0 > 0.0 && c2 > 0.0) {
        return Err(Error::invalid("c0 and c2 must be positive"));
    }
    if !(c1 >= 0.0 && d > 0.0) || !c1.is_finite() || !c0.is_finite() || !c2.is_finite() {
        return Err(Error::invalid("c1 must be >= 0 and d > 0"));
    }
    let g = |t: f64| theta_residual(c0, c1, c2, d, t);

    let mut lo = 1.0f64;
    let mut hi = 1.0f64;
    while g(lo) > 0.0 {
        lo *= 0.5;
        if lo < f64::MIN_POSITIVE {
            return Err(Error::invalid("root below representable range"));
        }
    }
    while g(hi) < 0.0 {
        hi *= 2.0;
        if !hi.is_finite() {
            return Err(Error::invalid("root above representable range"));
        }
    }
    if g(lo) == 0.0 {
        return Ok(lo);
    }
    if g(hi) == 0.0 {
        return Ok(hi);
    }
    while hi - lo > 1e-12 * lo {
        let mid = (lo * hi).sqrt();
        let mid = if mid <= lo || mid >= hi { 0.5 * (lo + hi) } else { mid };
        if mid <= lo || mid >= hi {
            break;
        }
        if g(mid) < 0.0 {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    let mut t = 0.5 * (lo + hi);
    for _ in 0..3 {
        let dg = c0 + d * c2 * t.powf(-d - 1.0);
        let next = t - g(t) / dg;
        if next > 0.0 && next.is_finite() && g(next).abs() <= g(t).abs() {
            t = next;
        } else {
            break;
        }
    }
    Ok(t)
}

pub fn theta_star(inputs: &BoundInputs) -> Result<f64> {
    inputs.validate()?;
    let (c0, c1, c2, d) = inputs.coefficients();
    solve_theta_star(c0, c1, c2, d)
}

pub fn sample_error_bound(inputs: &BoundInputs) -> Result<f64> {
    Ok(inputs.interaction() * theta_star(inputs)?)
}

pub fn total_equilibrium_bound(inputs: &BoundInputs) -> Result<f64> {
    let eps = sample_error_bound(inputs)?;
    let d2 = inputs.d_norm * inputs.d_norm;
    Ok(d2 * inputs.big_m.powi(2) + inputs.tau * d2 * inputs.m_p.powi(2) + eps + inputs.sigma_rho_sq)
}

/// One row of a bound report.
#[derive(Debug, Clone, PartialEq)]
pub struct BoundRow {
    pub m: f64,
    pub delta: f64,
    pub theta: f64,
    pub sample_error: f64,
    pub total: f64,
}

pub fn evaluate(inputs: &BoundInputs) -> Result<BoundRow> {
    let theta = theta_star(inputs)?;
    let sample_error = inputs.interaction() * theta;
    Ok(BoundRow { m: inputs.m, delta: inputs.delta, theta, sample_error, total: total_equilibrium_bound(inputs)? })
}
