//! Dense solves for the symmetric KKT systems.
//!
//! LU with partial pivoting, a Hager-style 1-norm condition estimate, and
//! one step of iterative refinement when the relative residual is large.

use nalgebra::{DMatrix, DVector};

use crate::error::{Error, Result};

/// Systems whose estimated 1-norm condition exceeds this are rejected.
pub const MAX_CONDITION: f64 = 1e12;

const REFINE_THRESHOLD: f64 = 1e-10;

#[derive(Debug, Clone)]
pub struct Solution {
    pub x: DVector<f64>,
    pub condition: f64,
    /// ||A x - b||_inf / ||b||_inf after refinement (0 when b = 0).
    pub residual: f64,
}

pub fn relative_residual(a: &DMatrix<f64>, x: &DVector<f64>, b: &DVector<f64>) -> f64 {
    let r = a * x - b;
    let scale = b.amax();
    if scale == 0.0 {
        r.amax()
    } else {
        r.amax() / scale
    }
}

/// Solves `a x = b` for symmetric `a`.
pub fn solve_symmetric(a: &DMatrix<f64>, b: &DVector<f64>) -> Result<Solution> {
    let n = a.nrows();
    let lu = a.clone().lu();
    let ill = |condition| Error::IllConditioned { condition };

    let norm1 = one_norm(a);
    let inv_norm = estimate_inverse_one_norm(&lu, n).ok_or(ill(f64::INFINITY))?;
    let condition = norm1 * inv_norm;
    if !condition.is_finite() || condition > MAX_CONDITION {
        return Err(ill(condition));
    }

    let mut x = lu.solve(b).ok_or(ill(f64::INFINITY))?;
    let mut residual = relative_residual(a, &x, b);
    if residual > REFINE_THRESHOLD {
        let r = b - a * &x;
        if let Some(dx) = lu.solve(&r) {
            x += dx;
            residual = relative_residual(a, &x, b);
        }
    }
    Ok(Solution { x, condition, residual })
}

fn one_norm(a: &DMatrix<f64>) -> f64 {
    a.column_iter().map(|c| c.iter().map(|v| v.abs()).sum::<f64>()).fold(0.0, f64::max)
}

/// Hager's estimate of ||A^-1||_1; valid here because A is symmetric, so
/// the transposed solve reuses the same factorization.
fn estimate_inverse_one_norm(lu: &nalgebra::LU<f64, nalgebra::Dyn, nalgebra::Dyn>, n: usize) -> Option<f64> {
    let mut x = DVector::from_element(n, 1.0 / n as f64);
    let mut est = 0.0;
    let mut last_j = usize::MAX;
    for _ in 0..5 {
        let y = lu.solve(&x)?;
        est = y.iter().map(|v| v.abs()).sum::<f64>();
        let xi = y.map(|v| if v >= 0.0 { 1.0 } else { -1.0 });
        let z = lu.solve(&xi)?;
        let (j, zmax) =
            z.iter().enumerate().fold((0, 0.0), |acc, (i, v)| if v.abs() > acc.1 { (i, v.abs()) } else { acc });
        if zmax <= z.dot(&x) || j == last_j {
            break;
        }
        last_j = j;
        x = DVector::zeros(n);
        x[j] = 1.0;
    }
    if !est.is_finite() {
        return None;
    }
    // Alternative lower bound from the classical Higham safeguard.
    let alt = DVector::from_fn(n, |i, _| {
        let s = if i % 2 == 0 { 1.0 } else { -1.0 };
        s * (1.0 + i as f64 / (n.max(2) - 1) as f64)
    });
    let w = lu.solve(&alt)?;
    let alt_est = 2.0 * w.iter().map(|v| v.abs()).sum::<f64>() / (3.0 * n as f64);
    Some(est.max(alt_est))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn condition_estimate_is_close_on_small_matrices() {
        let a = DMatrix::from_row_slice(3, 3, &[4.0, 1.0, 0.5, 1.0, 3.0, 0.2, 0.5, 0.2, 2.0]);
        let b = DVector::from_vec(vec![1.0, 2.0, 3.0]);
        let s = solve_symmetric(&a, &b).unwrap();
        let inv = a.clone().try_inverse().unwrap();
        let exact = one_norm(&a) * one_norm(&inv);
        assert!(s.condition <= exact * (1.0 + 1e-12));
        assert!(s.condition >= exact / 3.0);
        assert!(s.residual < 1e-14);
    }

    #[test]
    fn singular_system_is_rejected() {
        let a = DMatrix::from_row_slice(2, 2, &[1.0, 1.0, 1.0, 1.0]);
        let b = DVector::from_vec(vec![1.0, 1.0]);
        assert!(matches!(solve_symmetric(&a, &b), Err(Error::IllConditioned { .. })));
        let nearly = DMatrix::from_row_slice(2, 2, &[1.0, 1.0, 1.0, 1.0 + 1e-14]);
        assert!(matches!(solve_symmetric(&nearly, &b), Err(Error::IllConditioned { .. })));
    }
}
