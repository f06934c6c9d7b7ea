//! LSSVM and interpretability-constrained LSSVM (ILSSVM) regression.
//!
//! The ILSSVM primal is
//!
//! ```text
//! min  1/2 |w|^2 + phi/2 sum e_k^2 + sigma/2 sum tau_k^2
//! s.t. e_k   = y_k - (w . phi(x_k) + b)
//!      tau_k = -[ (f - p)_k - mean(f - p) ]        with f_k = w . phi(x_k) + b
//! ```
//!
//! With multipliers alpha (data constraints) and beta (interpretation
//! constraints), stationarity gives w = sum alpha_k phi(x_k) + sum (H beta)_k phi(x_k),
//! sum alpha = 0, e = alpha / phi, tau = beta / sigma, which leads to the
//! symmetric block system
//!
//! ```text
//! [ G + I/phi   G H            1 ] [alpha]   [ y   ]
//! [ H G         H G H + I/sigma 0 ] [beta ] = [ H p ]
//! [ 1^T         0              0 ] [b    ]   [ 0   ]
//! ```
//!
//! where G is the Gram matrix and H the centering matrix. For sigma = 0 the
//! beta block drops out and the standard LSSVM system remains.

use std::fmt::Write as _;

use nalgebra::{DMatrix, DVector};

use crate::data::{ColumnRange, NormParams};
use crate::error::{Error, Result};
use crate::interp::InterpModel;
use crate::kernel::KernelSpec;
use crate::linalg;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct HyperParams {
    /// Weight on squared prediction slacks.
    pub phi: f64,
    /// Weight on squared interpretation slacks; 0 gives plain LSSVM.
    pub sigma: f64,
}

impl HyperParams {
    pub fn new(phi: f64, sigma: f64) -> Result<HyperParams> {
        let h = HyperParams { phi, sigma };
        h.validate()?;
        Ok(h)
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.phi > 0.0 && self.phi.is_finite()) {
            return Err(Error::invalid(format!("phi must be positive, got {}", self.phi)));
        }
        if !(self.sigma >= 0.0 && self.sigma.is_finite()) {
            return Err(Error::invalid(format!("sigma must be >= 0, got {}", self.sigma)));
        }
        Ok(())
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct TrainedModel {
    pub kernel: KernelSpec,
    pub x_train: DMatrix<f64>,
    pub alpha: Vec<f64>,
    pub beta: Vec<f64>,
    pub b: f64,
    pub hyper: HyperParams,
    /// Set when the model was trained on normalized data; `predict_raw`
    /// uses it to map inputs in and outputs back.
    pub norm: Option<NormParams>,
    pub condition: f64,
    pub kkt_residual: f64,
}

/// Builds the KKT matrix and right-hand side. With `sigma == 0` the reduced
/// (N+1) LSSVM system is returned.
pub fn assemble_kkt(
    g: &DMatrix<f64>,
    p: &[f64],
    y: &[f64],
    hyper: &HyperParams,
) -> Result<(DMatrix<f64>, DVector<f64>)> {
    let n = g.nrows();
    if g.ncols() != n {
        return Err(Error::DimensionMismatch { expected: n, got: g.ncols() });
    }
    if y.len() != n {
        return Err(Error::LengthMismatch { left: n, right: y.len() });
    }
    if hyper.sigma == 0.0 {
        return Ok(assemble_lssvm(g, y, hyper.phi));
    }
    if p.len() != n {
        return Err(Error::LengthMismatch { left: n, right: p.len() });
    }
    let nf = n as f64;
    let row_mean: Vec<f64> = (0..n).map(|i| (0..n).map(|k| g[(i, k)]).sum::<f64>() / nf).collect();
    let grand_mean = row_mean.iter().sum::<f64>() / nf;
    let p_mean = p.iter().sum::<f64>() / nf;

    let dim = 2 * n + 1;
    let mut a = DMatrix::zeros(dim, dim);
    for i in 0..n {
        for j in i..n {
            a[(i, j)] = g[(i, j)];
            a[(n + i, n + j)] = g[(i, j)] - (row_mean[i] + row_mean[j]) + grand_mean;
        }
        a[(i, i)] += 1.0 / hyper.phi;
        a[(n + i, n + i)] += 1.0 / hyper.sigma;
        // G H occupies the whole upper-right block.
        for j in 0..n {
            a[(i, n + j)] = g[(i, j)] - row_mean[i];
        }
        a[(i, 2 * n)] = 1.0;
    }
    for i in 0..dim {
        for j in 0..i {
            a[(i, j)] = a[(j, i)];
        }
    }

    let mut rhs = DVector::zeros(dim);
    for i in 0..n {
        rhs[i] = y[i];
        rhs[n + i] = p[i] - p_mean;
    }
    Ok((a, rhs))
}

fn assemble_lssvm(g: &DMatrix<f64>, y: &[f64], phi: f64) -> (DMatrix<f64>, DVector<f64>) {
    let n = g.nrows();
    let mut a = DMatrix::zeros(n + 1, n + 1);
    a.view_mut((0, 0), (n, n)).copy_from(g);
    for i in 0..n {
        a[(i, i)] += 1.0 / phi;
        a[(i, n)] = 1.0;
        a[(n, i)] = 1.0;
    }
    let mut rhs = DVector::zeros(n + 1);
    rhs.rows_mut(0, n).copy_from_slice(y);
    (a, rhs)
}

fn check_training_inputs(x: &DMatrix<f64>, y: &[f64], hyper: &HyperParams, kernel: &KernelSpec) -> Result<()> {
    hyper.validate()?;
    kernel.validate()?;
    if x.nrows() < 2 {
        return Err(Error::invalid("training needs at least two samples"));
    }
    if y.len() != x.nrows() {
        return Err(Error::LengthMismatch { left: x.nrows(), right: y.len() });
    }
    Ok(())
}

/// Trains against interpretation values `p` already evaluated on `x`.
pub fn train_ilssvm_on_values(
    x: &DMatrix<f64>,
    y: &[f64],
    p: &[f64],
    kernel: &KernelSpec,
    hyper: &HyperParams,
) -> Result<TrainedModel> {
    check_training_inputs(x, y, hyper, kernel)?;
    let n = x.nrows();
    if hyper.sigma > 0.0 && p.len() != n {
        return Err(Error::LengthMismatch { left: n, right: p.len() });
    }
    let g = kernel.gram(x);
    let (a, rhs) = assemble_kkt(&g, p, y, hyper)?;
    let sol = linalg::solve_symmetric(&a, &rhs)?;
    let s = sol.x.as_slice();
    let (alpha, beta, b) = if hyper.sigma == 0.0 {
        (s[..n].to_vec(), vec![0.0; n], s[n])
    } else {
        (s[..n].to_vec(), s[n..2 * n].to_vec(), s[2 * n])
    };
    Ok(TrainedModel {
        kernel: *kernel,
        x_train: x.clone(),
        alpha,
        beta,
        b,
        hyper: *hyper,
        norm: None,
        condition: sol.condition,
        kkt_residual: sol.residual,
    })
}

pub fn train_ilssvm(
    x: &DMatrix<f64>,
    y: &[f64],
    interp: &InterpModel,
    kernel: &KernelSpec,
    hyper: &HyperParams,
) -> Result<TrainedModel> {
    let p = interp.predict(x)?;
    train_ilssvm_on_values(x, y, &p, kernel, hyper)
}

pub fn train_lssvm(x: &DMatrix<f64>, y: &[f64], kernel: &KernelSpec, phi: f64) -> Result<TrainedModel> {
    train_ilssvm_on_values(x, y, &[], kernel, &HyperParams { phi, sigma: 0.0 })
}

impl TrainedModel {
    pub fn n_train(&self) -> usize {
        self.x_train.nrows()
    }

    /// Expansion coefficients alpha + H beta.
    pub fn expansion(&self) -> DVector<f64> {
        let n = self.n_train() as f64;
        let beta_mean = self.beta.iter().sum::<f64>() / n;
        DVector::from_iterator(self.alpha.len(), self.alpha.iter().zip(&self.beta).map(|(a, b)| a + (b - beta_mean)))
    }

    pub fn predict(&self, x_new: &DMatrix<f64>) -> Result<Vec<f64>> {
        if x_new.ncols() != self.x_train.ncols() {
            return Err(Error::DimensionMismatch { expected: self.x_train.ncols(), got: x_new.ncols() });
        }
        let k = self.kernel.cross(x_new, &self.x_train)?;
        let f = k * self.expansion();
        Ok(f.iter().map(|v| v + self.b).collect())
    }

    /// Predicts from raw inputs and returns raw-scale outputs, using the
    /// stored normalization when present.
    pub fn predict_raw(&self, x_new: &DMatrix<f64>) -> Result<Vec<f64>> {
        match &self.norm {
            None => self.predict(x_new),
            Some(norm) => {
                let f = self.predict(&norm.apply_inputs(x_new)?)?;
                Ok(norm.invert_target(&f))
            }
        }
    }

    /// Value of the primal objective at this solution for training targets
    /// `y` and interpretation values `p` on the training inputs.
    pub fn primal_objective(&self, y: &[f64], p: &[f64]) -> Result<f64> {
        let n = self.n_train();
        if y.len() != n {
            return Err(Error::LengthMismatch { left: n, right: y.len() });
        }
        let c = self.expansion();
        let g = self.kernel.gram(&self.x_train);
        let w_sq = c.dot(&(&g * &c));
        let f: Vec<f64> = (&g * &c).iter().map(|v| v + self.b).collect();
        let fit: f64 = y.iter().zip(&f).map(|(yk, fk)| (yk - fk).powi(2)).sum();
        let interp_term = if self.hyper.sigma > 0.0 {
            if p.len() != n {
                return Err(Error::LengthMismatch { left: n, right: p.len() });
            }
            let r: Vec<f64> = f.iter().zip(p).map(|(a, b)| a - b).collect();
            let m = r.iter().sum::<f64>() / n as f64;
            r.iter().map(|v| (v - m).powi(2)).sum::<f64>()
        } else {
            0.0
        };
        Ok(0.5 * w_sq + 0.5 * self.hyper.phi * fit + 0.5 * self.hyper.sigma * interp_term)
    }

    pub fn to_text(&self) -> String {
        let mut out = String::from("ilssvm-model 1\n");
        let _ = writeln!(out, "kernel {}", kernel_record(&self.kernel));
        let _ = writeln!(out, "phi {:.17e}", self.hyper.phi);
        let _ = writeln!(out, "sigma {:.17e}", self.hyper.sigma);
        let _ = writeln!(out, "bias {:.17e}", self.b);
        let _ = writeln!(out, "dim {}", self.x_train.ncols());
        let _ = writeln!(out, "rows {}", self.n_train());
        if let Some(norm) = &self.norm {
            for r in &norm.inputs {
                let _ = writeln!(out, "norm_input {:.17e} {:.17e}", r.min, r.max);
            }
            let _ = writeln!(out, "norm_target {:.17e} {:.17e}", norm.target.min, norm.target.max);
        }
        out.push_str("data x... alpha beta\n");
        for i in 0..self.n_train() {
            let mut cells: Vec<String> = self.x_train.row(i).iter().map(|v| format!("{v:.17e}")).collect();
            cells.push(format!("{:.17e}", self.alpha[i]));
            cells.push(format!("{:.17e}", self.beta[i]));
            out.push_str(&cells.join(" "));
            out.push('\n');
        }
        out
    }

    pub fn from_text(text: &str) -> Result<TrainedModel> {
        let mut lines = text.lines().enumerate().filter(|(_, l)| !l.trim().is_empty());
        let bad = |line: usize, message: &str| Error::ModelFormat { line: line + 1, message: message.into() };
        let num = |line: usize, s: &str| s.parse::<f64>().map_err(|_| bad(line, &format!("bad number `{s}`")));

        match lines.next() {
            Some((_, l)) if l.trim() == "ilssvm-model 1" => {}
            Some((i, _)) => return Err(bad(i, "missing `ilssvm-model 1` header")),
            None => return Err(bad(0, "empty model file")),
        }
        let (mut kernel, mut phi, mut sigma, mut bias, mut dim, mut rows) = (None, None, None, None, None, None);
        let mut norm_inputs = Vec::new();
        let mut norm_target = None;
        let mut data_start = None;
        for (i, line) in lines.by_ref() {
            let mut parts = line.split_whitespace();
            let key = parts.next().unwrap_or("");
            let rest: Vec<&str> = parts.collect();
            let one = || rest.first().copied().ok_or(bad(i, "missing value"));
            match key {
                "kernel" => kernel = Some(parse_kernel_record(&rest).map_err(|e| bad(i, &e.to_string()))?),
                "phi" => phi = Some(num(i, one()?)?),
                "sigma" => sigma = Some(num(i, one()?)?),
                "bias" => bias = Some(num(i, one()?)?),
                "dim" => dim = Some(one()?.parse::<usize>().map_err(|_| bad(i, "bad dim"))?),
                "rows" => rows = Some(one()?.parse::<usize>().map_err(|_| bad(i, "bad rows"))?),
                "norm_input" | "norm_target" => {
                    if rest.len() != 2 {
                        return Err(bad(i, "expected `min max`"));
                    }
                    let r = ColumnRange { min: num(i, rest[0])?, max: num(i, rest[1])? };
                    if key == "norm_input" {
                        norm_inputs.push(r);
                    } else {
                        norm_target = Some(r);
                    }
                }
                "data" => {
                    data_start = Some(i);
                    break;
                }
                _ => return Err(bad(i, &format!("unknown key `{key}`"))),
            }
        }
        let start = data_start.ok_or(bad(0, "missing data section"))?;
        let missing = |k: &str| bad(start, &format!("missing `{k}` before data"));
        let kernel = kernel.ok_or_else(|| missing("kernel"))?;
        let hyper = HyperParams::new(phi.ok_or_else(|| missing("phi"))?, sigma.ok_or_else(|| missing("sigma"))?)
            .map_err(|e| bad(start, &e.to_string()))?;
        let b = bias.ok_or_else(|| missing("bias"))?;
        let d = dim.ok_or_else(|| missing("dim"))?;
        let n = rows.ok_or_else(|| missing("rows"))?;

        let mut x = DMatrix::zeros(n, d);
        let mut alpha = Vec::with_capacity(n);
        let mut beta = Vec::with_capacity(n);
        for r in 0..n {
            let (i, line) = lines.next().ok_or(bad(start, &format!("expected {n} data rows, found {r}")))?;
            let cells: Vec<&str> = line.split_whitespace().collect();
            if cells.len() != d + 2 {
                return Err(bad(i, &format!("expected {} values, found {}", d + 2, cells.len())));
            }
            for j in 0..d {
                x[(r, j)] = num(i, cells[j])?;
            }
            alpha.push(num(i, cells[d])?);
            beta.push(num(i, cells[d + 1])?);
        }
        if let Some((i, _)) = lines.next() {
            return Err(bad(i, "trailing content after data rows"));
        }
        let norm = match norm_target {
            Some(target) if norm_inputs.len() == d => Some(NormParams { inputs: norm_inputs, target }),
            None if norm_inputs.is_empty() => None,
            _ => return Err(bad(start, "incomplete normalization record")),
        };
        Ok(TrainedModel {
            kernel,
            x_train: x,
            alpha,
            beta,
            b,
            hyper,
            norm,
            condition: f64::NAN,
            kkt_residual: f64::NAN,
        })
    }
}

fn kernel_record(k: &KernelSpec) -> String {
    match k {
        KernelSpec::Rbf { width } => format!("rbf {width:.17e}"),
        KernelSpec::Linear => "linear".into(),
        KernelSpec::Polynomial { degree, offset } => format!("polynomial {degree} {offset:.17e}"),
    }
}

fn parse_kernel_record(parts: &[&str]) -> Result<KernelSpec> {
    let num = |s: &str| s.parse::<f64>().map_err(|_| Error::invalid(format!("bad number `{s}`")));
    let k = match parts {
        ["rbf", w] => KernelSpec::Rbf { width: num(w)? },
        ["linear"] => KernelSpec::Linear,
        ["polynomial", d, o] => KernelSpec::Polynomial {
            degree: d.parse().map_err(|_| Error::invalid("bad polynomial degree"))?,
            offset: num(o)?,
        },
        _ => return Err(Error::invalid("unrecognized kernel record")),
    };
    k.validate()?;
    Ok(k)
}

pub fn predict(model: &TrainedModel, x_new: &DMatrix<f64>) -> Result<Vec<f64>> {
    model.predict(x_new)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::interp::interpretation_distance;
    use crate::rng::Rng;

    fn random_problem(n: usize, d: usize, seed: u64) -> (DMatrix<f64>, Vec<f64>, Vec<f64>) {
        let mut r = Rng::new(seed);
        let x = DMatrix::from_fn(n, d, |_, _| r.uniform_in(-1.0, 1.0));
        let y = (0..n).map(|i| x[(i, 0)].sin() + 0.3 * r.gaussian(0.0, 1.0)).collect();
        let p = (0..n).map(|i| x[(i, 0)] - 0.2 * x[(i, d - 1)]).collect();
        (x, y, p)
    }

    #[test]
    fn kkt_matrix_is_bitwise_symmetric() {
        let (x, y, p) = random_problem(6, 2, 1);
        let g = KernelSpec::rbf(0.8).unwrap().gram(&x);
        let (a, rhs) = assemble_kkt(&g, &p, &y, &HyperParams::new(3.0, 2.0).unwrap()).unwrap();
        assert_eq!(a.nrows(), 13);
        assert_eq!(rhs.len(), 13);
        for i in 0..13 {
            for j in 0..13 {
                assert_eq!(a[(i, j)].to_bits(), a[(j, i)].to_bits());
            }
        }
        let (a0, _) = assemble_kkt(&g, &p, &y, &HyperParams::new(3.0, 0.0).unwrap()).unwrap();
        assert_eq!(a0.nrows(), 7);
    }

    #[test]
    fn single_point_system_forces_zero_beta() {
        let g = DMatrix::from_element(1, 1, 1.0);
        let (a, rhs) = assemble_kkt(&g, &[0.7], &[2.0], &HyperParams::new(1.0, 4.0).unwrap()).unwrap();
        // Centering a single value gives zero; the beta row is (1/sigma) beta = 0.
        assert_eq!(a[(1, 0)], 0.0);
        assert_eq!(a[(1, 1)], 0.25);
        assert_eq!(a[(1, 2)], 0.0);
        assert_eq!(rhs[1], 0.0);
    }

    #[test]
    fn constant_targets_give_constant_predictions() {
        let (x, _, p) = random_problem(8, 2, 3);
        let y = vec![1.7; 8];
        let k = KernelSpec::rbf(0.5).unwrap();
        for sigma in [0.0, 5.0] {
            let m = train_ilssvm_on_values(&x, &y, &p, &k, &HyperParams::new(10.0, sigma).unwrap()).unwrap();
            if sigma == 0.0 {
                assert!(m.alpha.iter().all(|a| a.abs() < 1e-12));
                assert!((m.b - 1.7).abs() < 1e-12);
                for f in m.predict(&x).unwrap() {
                    assert!((f - 1.7).abs() < 1e-10);
                }
            }
            assert!(m.alpha.iter().sum::<f64>().abs() < 1e-8);
        }
    }

    #[test]
    fn zero_sigma_matches_lssvm_and_beta_is_zero() {
        let (x, y, p) = random_problem(20, 3, 4);
        let k = KernelSpec::rbf(1.0).unwrap();
        let a = train_ilssvm_on_values(&x, &y, &p, &k, &HyperParams::new(5.0, 0.0).unwrap()).unwrap();
        let b = train_lssvm(&x, &y, &k, 5.0).unwrap();
        assert!(a.beta.iter().all(|&v| v == 0.0));
        let (pa, pb) = (a.predict(&x).unwrap(), b.predict(&x).unwrap());
        assert!(pa.iter().zip(&pb).all(|(u, v)| (u - v).abs() < 1e-8));
    }

    #[test]
    fn interpolation_regime() {
        let mut r = Rng::new(8);
        let x = DMatrix::from_fn(12, 2, |_, _| r.uniform_in(-1.0, 1.0));
        let y: Vec<f64> = (0..12).map(|i| 0.6 * x[(i, 0)] + 0.3 * x[(i, 1)]).collect();
        let m = train_lssvm(&x, &y, &KernelSpec::Linear, 1e8).unwrap();
        let f = m.predict(&x).unwrap();
        assert!(crate::metrics::mse(&f, &y).unwrap() < 1e-6);

        let m = train_lssvm(&x, &y, &KernelSpec::rbf(0.7).unwrap(), 1e6).unwrap();
        let f = m.predict(&x).unwrap();
        assert!(f.iter().zip(&y).all(|(a, b)| (a - b).abs() < 1e-4));
    }

    #[test]
    fn zero_coefficients_predict_bias() {
        let (x, _, _) = random_problem(4, 2, 5);
        let m = TrainedModel {
            kernel: KernelSpec::Linear,
            x_train: x.clone(),
            alpha: vec![0.0; 4],
            beta: vec![0.0; 4],
            b: -0.4,
            hyper: HyperParams::new(1.0, 1.0).unwrap(),
            norm: None,
            condition: 1.0,
            kkt_residual: 0.0,
        };
        assert_eq!(m.predict(&x).unwrap(), vec![-0.4; 4]);
        assert!(m.predict(&DMatrix::zeros(2, 3)).is_err());
    }

    #[test]
    fn shifts_of_targets_and_interpretation() {
        let (x, y, p) = random_problem(15, 2, 6);
        let k = KernelSpec::rbf(0.9).unwrap();
        let h = HyperParams::new(20.0, 3.0).unwrap();
        let base = train_ilssvm_on_values(&x, &y, &p, &k, &h).unwrap();

        let y_shift: Vec<f64> = y.iter().map(|v| v + 2.5).collect();
        let m = train_ilssvm_on_values(&x, &y_shift, &p, &k, &h).unwrap();
        assert!((m.b - base.b - 2.5).abs() < 1e-10);
        for (a, b) in m.alpha.iter().zip(&base.alpha).chain(m.beta.iter().zip(&base.beta)) {
            assert!((a - b).abs() < 1e-10);
        }
        let fa = m.predict(&x).unwrap();
        let fb = base.predict(&x).unwrap();
        assert!(fa.iter().zip(&fb).all(|(u, v)| (u - v - 2.5).abs() < 1e-10));

        let p_shift: Vec<f64> = p.iter().map(|v| v - 4.0).collect();
        let m = train_ilssvm_on_values(&x, &y, &p_shift, &k, &h).unwrap();
        assert!((m.b - base.b).abs() < 1e-10);
        for (a, b) in m.alpha.iter().zip(&base.alpha).chain(m.beta.iter().zip(&base.beta)) {
            assert!((a - b).abs() < 1e-10);
        }
    }

    #[test]
    fn sigma_trades_data_fit_for_interpretability_on_training_points() {
        let (x, y, p) = random_problem(25, 2, 7);
        let k = KernelSpec::rbf(0.6).unwrap();
        let mut last = f64::INFINITY;
        for sigma in [0.0, 0.1, 1.0, 10.0, 100.0] {
            let m = train_ilssvm_on_values(&x, &y, &p, &k, &HyperParams::new(10.0, sigma).unwrap()).unwrap();
            let id = interpretation_distance(&m.predict(&x).unwrap(), &p).unwrap();
            assert!(id <= last + 1e-10, "sigma {sigma}: {id} > {last}");
            last = id;
        }
    }

    #[test]
    fn solution_is_a_local_minimum_of_the_primal() {
        let (x, y, p) = random_problem(10, 2, 9);
        let k = KernelSpec::rbf(0.8).unwrap();
        let m = train_ilssvm_on_values(&x, &y, &p, &k, &HyperParams::new(4.0, 2.0).unwrap()).unwrap();
        let j0 = m.primal_objective(&y, &p).unwrap();
        let mut r = Rng::new(10);
        for _ in 0..20 {
            let mut q = m.clone();
            let mut dirs: Vec<f64> = (0..21).map(|_| r.gaussian(0.0, 1.0)).collect();
            let norm = dirs.iter().map(|v| v * v).sum::<f64>().sqrt();
            dirs.iter_mut().for_each(|v| *v *= 1e-3 / norm);
            for i in 0..10 {
                q.alpha[i] += dirs[i];
                q.beta[i] += dirs[10 + i];
            }
            q.b += dirs[20];
            assert!(q.primal_objective(&y, &p).unwrap() >= j0 - 1e-12);
        }
    }

    #[test]
    fn zero_model_has_zero_objective() {
        let x = DMatrix::from_row_slice(2, 1, &[0.0, 1.0]);
        let m = train_ilssvm_on_values(
            &x,
            &[0.0, 0.0],
            &[0.0, 0.0],
            &KernelSpec::Linear,
            &HyperParams::new(1.0, 1.0).unwrap(),
        )
        .unwrap();
        assert_eq!(m.primal_objective(&[0.0, 0.0], &[0.0, 0.0]).unwrap(), 0.0);
    }

    #[test]
    fn invalid_hyperparameters() {
        assert!(HyperParams::new(0.0, 1.0).is_err());
        assert!(HyperParams::new(1.0, -1.0).is_err());
        let x = DMatrix::from_row_slice(1, 1, &[0.0]);
        assert!(train_lssvm(&x, &[1.0], &KernelSpec::Linear, 1.0).is_err());
    }

    #[test]
    fn duplicate_rows_make_lssvm_singular_only_without_ridge() {
        let x = DMatrix::from_row_slice(3, 1, &[0.5, 0.5, 0.5]);
        // Duplicate rows are fine with a finite phi.
        assert!(train_lssvm(&x, &[1.0, 2.0, 3.0], &KernelSpec::rbf(1.0).unwrap(), 1.0).is_ok());
        // An enormous phi leaves a numerically singular system.
        let err = train_lssvm(&x, &[1.0, 2.0, 3.0], &KernelSpec::rbf(1.0).unwrap(), 1e15).unwrap_err();
        assert!(matches!(err, Error::IllConditioned { .. }), "{err:?}");
    }

    #[test]
    fn model_text_round_trip() {
        let (x, y, p) = random_problem(7, 2, 11);
        let mut m =
            train_ilssvm_on_values(&x, &y, &p, &KernelSpec::rbf(0.9).unwrap(), &HyperParams::new(2.0, 1.5).unwrap())
                .unwrap();
        m.norm = Some(NormParams::identity(2));
        let back = TrainedModel::from_text(&m.to_text()).unwrap();
        assert_eq!(back.predict(&x).unwrap(), m.predict(&x).unwrap());
        assert_eq!(back.norm, m.norm);
        assert_eq!(back.hyper, m.hyper);
        assert!(TrainedModel::from_text("nope").is_err());
        let truncated: String = m.to_text().lines().take(10).collect::<Vec<_>>().join("\n");
        assert!(TrainedModel::from_text(&truncated).is_err());
    }
}
