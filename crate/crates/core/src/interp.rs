//! Interpretation models P(x) = mu . C(x) and the interpretation distance.
//!
//! The interpretation distance between two value vectors is the population
//! variance of their difference, so it ignores any constant offset between
//! a model and its interpretation.

use std::fmt::Write as _;

use nalgebra::DMatrix;

use crate::error::{Error, Result};
use crate::expr::{parse_expr, Expr};
use crate::pso::{self, PsoParams};

/// How the residual f - p is centered before squaring.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum Centering {
    /// Subtract the signed mean of the residual; the distance is a variance.
    #[default]
    Signed,
    /// Subtract the mean absolute residual.
    Absolute,
}

impl std::str::FromStr for Centering {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        match s {
            "signed" => Ok(Centering::Signed),
            "absolute" => Ok(Centering::Absolute),
            _ => Err(Error::invalid(format!("unknown centering `{s}`; expected signed or absolute"))),
        }
    }
}

impl std::fmt::Display for Centering {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(match self {
            Centering::Signed => "signed",
            Centering::Absolute => "absolute",
        })
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct InterpModel {
    pub basis: Vec<Expr>,
    pub mu: Vec<f64>,
}

impl InterpModel {
    pub fn new(basis: Vec<Expr>, mu: Vec<f64>) -> Result<InterpModel> {
        if basis.is_empty() {
            return Err(Error::invalid("interpretation basis is empty"));
        }
        if basis.len() != mu.len() {
            return Err(Error::LengthMismatch { left: basis.len(), right: mu.len() });
        }
        Ok(InterpModel { basis, mu })
    }

    pub fn parse(terms: &[&str], mu: Vec<f64>) -> Result<InterpModel> {
        let basis = terms.iter().map(|t| parse_expr(t)).collect::<Result<Vec<_>>>()?;
        InterpModel::new(basis, mu)
    }

    /// Highest input index any basis term needs.
    pub fn required_dim(&self) -> usize {
        self.basis.iter().map(Expr::max_var_index).max().unwrap_or(0)
    }

    pub fn predict(&self, x: &DMatrix<f64>) -> Result<Vec<f64>> {
        let c = basis_matrix(&self.basis, x)?;
        Ok((0..c.nrows()).map(|i| self.mu.iter().enumerate().map(|(j, m)| m * c[(i, j)]).sum()).collect())
    }

    /// One `coefficient<TAB>expression` line per term.
    pub fn to_text(&self) -> String {
        let mut out = String::from("# interpretation model: coefficient, basis term\n");
        for (e, m) in self.basis.iter().zip(&self.mu) {
            let _ = writeln!(out, "{m:.17e}\t{e}");
        }
        out
    }

    pub fn from_text(text: &str) -> Result<InterpModel> {
        let mut basis = Vec::new();
        let mut mu = Vec::new();
        for (i, line) in text.lines().enumerate() {
            let line = line.trim();
            if line.is_empty() || line.starts_with('#') {
                continue;
            }
            let bad = |message: String| Error::ModelFormat { line: i + 1, message };
            let (coef, expr) =
                line.split_once(char::is_whitespace).ok_or_else(|| bad("expected `coefficient expression`".into()))?;
            mu.push(coef.parse().map_err(|_| bad(format!("bad coefficient `{coef}`")))?);
            basis.push(parse_expr(expr.trim()).map_err(|e| bad(e.to_string()))?);
        }
        InterpModel::new(basis, mu)
    }
}

/// `C[k][j]` = basis term j evaluated at row k.
pub fn basis_matrix(basis: &[Expr], x: &DMatrix<f64>) -> Result<DMatrix<f64>> {
    let need = basis.iter().map(Expr::max_var_index).max().unwrap_or(0);
    if need > x.ncols() {
        return Err(Error::DimensionMismatch { expected: need, got: x.ncols() });
    }
    let mut c = DMatrix::zeros(x.nrows(), basis.len());
    let mut row = vec![0.0; x.ncols()];
    for i in 0..x.nrows() {
        for (j, v) in row.iter_mut().enumerate() {
            *v = x[(i, j)];
        }
        for (j, term) in basis.iter().enumerate() {
            c[(i, j)] = term.eval(&row).map_err(|e| e.at_row(i))?;
        }
    }
    Ok(c)
}

pub fn interp_predict(model: &InterpModel, x: &DMatrix<f64>) -> Result<Vec<f64>> {
    model.predict(x)
}

fn residuals(f: &[f64], p: &[f64]) -> Result<Vec<f64>> {
    if f.len() != p.len() {
        return Err(Error::LengthMismatch { left: f.len(), right: p.len() });
    }
    if f.is_empty() {
        return Err(Error::invalid("empty value vectors"));
    }
    Ok(f.iter().zip(p).map(|(a, b)| a - b).collect())
}

/// Signed mean of f - p.
pub fn mean_error(f: &[f64], p: &[f64]) -> Result<f64> {
    let r = residuals(f, p)?;
    Ok(r.iter().sum::<f64>() / r.len() as f64)
}

pub fn interpretation_distance(f: &[f64], p: &[f64]) -> Result<f64> {
    interpretation_distance_with(f, p, Centering::Signed)
}

pub fn interpretation_distance_with(f: &[f64], p: &[f64], centering: Centering) -> Result<f64> {
    let r = residuals(f, p)?;
    let n = r.len() as f64;
    let center = match centering {
        Centering::Signed => r.iter().sum::<f64>() / n,
        Centering::Absolute => r.iter().map(|v| v.abs()).sum::<f64>() / n,
    };
    Ok(r.iter().map(|v| (v - center) * (v - center)).sum::<f64>() / n)
}

/// Searches mu by particle swarm to minimize the interpretation distance
/// between the model's values on `x` and `target`.
pub fn pso_fit_interp(
    basis: &[Expr],
    x: &DMatrix<f64>,
    target: &[f64],
    params: &PsoParams,
) -> Result<(InterpModel, f64)> {
    let (model, outcome) = pso_fit_interp_traced(basis, x, target, params, Centering::Signed)?;
    Ok((model, outcome.fitness))
}

pub fn pso_fit_interp_traced(
    basis: &[Expr],
    x: &DMatrix<f64>,
    target: &[f64],
    params: &PsoParams,
    centering: Centering,
) -> Result<(InterpModel, pso::PsoOutcome)> {
    if basis.is_empty() {
        return Err(Error::invalid("interpretation basis is empty"));
    }
    if x.nrows() < 2 {
        return Err(Error::invalid("fitting needs at least two samples"));
    }
    if target.len() != x.nrows() {
        return Err(Error::LengthMismatch { left: x.nrows(), right: target.len() });
    }
    let c = basis_matrix(basis, x)?;
    let n = c.nrows();
    let mut p = vec![0.0; n];
    let outcome = pso::minimize(basis.len(), params, |mu| {
        for (i, pi) in p.iter_mut().enumerate() {
            *pi = mu.iter().enumerate().map(|(j, m)| m * c[(i, j)]).sum();
        }
        interpretation_distance_with(&p, target, centering).unwrap_or(f64::INFINITY)
    })?;
    let model = InterpModel::new(basis.to_vec(), outcome.best.clone())?;
    Ok((model, outcome))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rng::Rng;
    use nalgebra::DVector;
    use proptest::prelude::*;

    #[test]
    fn predict_examples() {
        let m = InterpModel::parse(&["x1"], vec![2.0]).unwrap();
        let x = DMatrix::from_row_slice(2, 1, &[3.0, 4.0]);
        assert_eq!(m.predict(&x).unwrap(), vec![6.0, 8.0]);

        let mut r = Rng::new(1);
        let x = DMatrix::from_fn(20, 2, |_, _| r.uniform_in(-1.0, 1.0));
        let plane = InterpModel::parse(&["x1", "x2"], vec![0.6, 0.3]).unwrap();
        let gen = parse_expr(crate::data::PLANE).unwrap();
        for (i, p) in plane.predict(&x).unwrap().iter().enumerate() {
            assert_eq!(*p, gen.eval(&[x[(i, 0)], x[(i, 1)]]).unwrap());
        }
        let zero = InterpModel::parse(&["x1", "x2"], vec![0.0, 0.0]).unwrap();
        assert!(zero.predict(&x).unwrap().iter().all(|&v| v == 0.0));
    }

    #[test]
    fn predict_reports_failing_row() {
        let m = InterpModel::parse(&["1/x1"], vec![1.0]).unwrap();
        let x = DMatrix::from_row_slice(3, 1, &[1.0, 0.0, 2.0]);
        assert!(matches!(m.predict(&x), Err(Error::Row { row: 1, .. })));
        let wide = InterpModel::parse(&["x3"], vec![1.0]).unwrap();
        assert!(wide.predict(&x).is_err());
        assert!(InterpModel::parse(&[], vec![]).is_err());
        assert!(InterpModel::parse(&["x1"], vec![1.0, 2.0]).is_err());
    }

    #[test]
    fn mean_error_examples() {
        assert_eq!(mean_error(&[1.0, 2.0], &[1.0, 2.0]).unwrap(), 0.0);
        assert_eq!(mean_error(&[1.0, 2.0, 3.0], &[0.0; 3]).unwrap(), 2.0);
        assert_eq!(mean_error(&[1.0, -1.0], &[0.0; 2]).unwrap(), 0.0);
        assert!(mean_error(&[1.0], &[]).is_err());
    }

    #[test]
    fn distance_examples() {
        assert_eq!(interpretation_distance(&[1.0, 5.0], &[1.0, 5.0]).unwrap(), 0.0);
        let f = [0.3, -1.2, 4.0];
        let shifted: Vec<f64> = f.iter().map(|v| v + 7.25).collect();
        assert!(interpretation_distance(&shifted, &f).unwrap() < 1e-14);
        let d = interpretation_distance(&[1.0, 2.0, 3.0], &[0.0; 3]).unwrap();
        assert!((d - 2.0 / 3.0).abs() < 1e-15);
        assert!(interpretation_distance(&[1.0], &[1.0, 2.0]).is_err());
    }

    #[test]
    fn absolute_centering_differs_for_mixed_signs() {
        let f = [1.0, -1.0];
        let p = [0.0, 0.0];
        assert_eq!(interpretation_distance_with(&f, &p, Centering::Signed).unwrap(), 1.0);
        // |r| mean is 1: residuals (0, -2) give (0 + 4) / 2.
        assert_eq!(interpretation_distance_with(&f, &p, Centering::Absolute).unwrap(), 2.0);
    }

    /// Direct least squares on the centered basis: the smallest distance any
    /// mu can reach.
    fn least_squares_distance(c: &DMatrix<f64>, t: &[f64]) -> f64 {
        let n = c.nrows();
        let h = crate::kernel::centering_matrix(n);
        let hc = &h * c;
        let ht = &h * DVector::from_column_slice(t);
        let mu = hc.clone().svd(true, true).solve(&ht, 1e-14).unwrap();
        let p: Vec<f64> = (c * mu).iter().copied().collect();
        interpretation_distance(&p, t).unwrap()
    }

    #[test]
    fn pso_recovers_spanning_basis() {
        let ds = crate::data::generate_builtin("plane1", 0).unwrap();
        let target = ds.y_clean.clone().unwrap();
        let basis = crate::data::builtin_basis("plane1").unwrap();
        let params = PsoParams { seed: 11, ..Default::default() };
        let (model, fit) = pso_fit_interp(&basis, &ds.x, &target, &params).unwrap();
        assert!(fit < 1e-3, "{fit}");
        assert!((model.mu[0] - 0.6).abs() < 0.05 && (model.mu[1] - 0.3).abs() < 0.05);
        let c = basis_matrix(&basis, &ds.x).unwrap();
        assert!((fit - least_squares_distance(&c, &target)).abs() < 1e-2);
    }

    #[test]
    fn pso_matches_least_squares_on_noisy_targets() {
        let ds = crate::data::generate_builtin("multi1", 3).unwrap();
        let (n, _) = crate::data::normalize_minmax(&ds).unwrap();
        let basis = crate::data::builtin_basis("multi1").unwrap();
        let params = PsoParams { seed: 5, ..Default::default() };
        let (_, out) = pso_fit_interp_traced(&basis, &ds.x, &n.y, &params, Centering::Signed).unwrap();
        let c = basis_matrix(&basis, &ds.x).unwrap();
        let oracle = least_squares_distance(&c, &n.y);
        assert!(out.fitness >= oracle - 1e-12);
        assert!(out.fitness - oracle < 1e-2, "{} vs {oracle}", out.fitness);
        assert!(out.history.windows(2).all(|w| w[1] <= w[0]));
    }

    #[test]
    fn constant_target_fits_to_zero() {
        let x = DMatrix::from_fn(10, 1, |i, _| i as f64 / 10.0);
        let basis = vec![parse_expr("x1").unwrap()];
        let (_, fit) = pso_fit_interp(&basis, &x, &[3.0; 10], &PsoParams::default()).unwrap();
        assert!(fit < 1e-6);
    }

    #[test]
    fn tiny_swarm_is_deterministic() {
        let ds = crate::data::generate_builtin("gabor1", 0).unwrap();
        let basis = crate::data::builtin_basis("gabor1").unwrap();
        let params = PsoParams { swarm_size: 2, iterations: 1, seed: 9, ..Default::default() };
        let a = pso_fit_interp(&basis, &ds.x, &ds.y, &params).unwrap();
        let b = pso_fit_interp(&basis, &ds.x, &ds.y, &params).unwrap();
        assert_eq!(a, b);
    }

    #[test]
    fn text_round_trip() {
        let m = InterpModel::parse(&["sin(pi*x1*x2)", "(x3-0.5)^2"], vec![0.1, -2.5e-3]).unwrap();
        assert_eq!(InterpModel::from_text(&m.to_text()).unwrap(), m);
        assert!(matches!(InterpModel::from_text("abc x1\n"), Err(Error::ModelFormat { line: 1, .. })));
    }

    fn pair() -> impl Strategy<Value = (Vec<f64>, Vec<f64>)> {
        (1usize..40)
            .prop_flat_map(|n| (prop::collection::vec(-100.0f64..100.0, n), prop::collection::vec(-100.0f64..100.0, n)))
    }

    proptest! {
        #[test]
        fn distance_is_a_residual_variance((f, p) in pair(), c in -50.0f64..50.0, a in -5.0f64..5.0) {
            let d = interpretation_distance(&f, &p).unwrap();
            let tol = 1e-10 * d.max(1.0);
            prop_assert!(d >= 0.0);
            prop_assert!((d - interpretation_distance(&p, &f).unwrap()).abs() <= tol);
            let fc: Vec<f64> = f.iter().map(|v| v + c).collect();
            prop_assert!((interpretation_distance(&fc, &p).unwrap() - d).abs() <= tol);
            let fa: Vec<f64> = f.iter().map(|v| a * v).collect();
            let pa: Vec<f64> = p.iter().map(|v| a * v).collect();
            let scaled = interpretation_distance(&fa, &pa).unwrap();
            prop_assert!((scaled - a * a * d).abs() <= 1e-10 * scaled.max(1.0));
            let me = mean_error(&f, &p).unwrap();
            let m = crate::metrics::mse(&f, &p).unwrap();
            prop_assert!((d - (m - me * me)).abs() <= 1e-10 * m.max(1.0));
        }
    }
}
