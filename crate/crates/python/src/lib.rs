//! Python bindings. Matrices cross the boundary as lists of rows.

use ilssvm::bounds::{self, BoundInputs};
use ilssvm::data::{self, NormParams};
use ilssvm::experiment;
use ilssvm::expr::{parse_expr, Expr};
use ilssvm::interp::{self, Centering};
use ilssvm::kernel::KernelSpec;
use ilssvm::metrics;
use ilssvm::pso::PsoParams;
use ilssvm::svm::{self, HyperParams, TrainedModel};
use ilssvm::tuning::{self, CvOptions};
use nalgebra::DMatrix;
use pyo3::create_exception;
use pyo3::exceptions::PyException;
use pyo3::prelude::*;

create_exception!(ilssvm_py, IlssvmError, PyException);

fn err(e: ilssvm::Error) -> PyErr {
    IlssvmError::new_err(format!("{}: {e}", e.kind()))
}

fn to_matrix(rows: &[Vec<f64>]) -> PyResult<DMatrix<f64>> {
    let ncols = rows.first().map_or(0, Vec::len);
    if let Some(bad) = rows.iter().position(|r| r.len() != ncols) {
        return Err(IlssvmError::new_err(format!("row {bad} has {} columns, expected {ncols}", rows[bad].len())));
    }
    Ok(DMatrix::from_fn(rows.len(), ncols, |i, j| rows[i][j]))
}

fn from_matrix(m: &DMatrix<f64>) -> Vec<Vec<f64>> {
    (0..m.nrows()).map(|i| m.row(i).iter().copied().collect()).collect()
}

#[pyclass(name = "Expr", frozen)]
struct PyExpr(Expr);

#[pymethods]
impl PyExpr {
    #[new]
    fn new(text: &str) -> PyResult<Self> {
        parse_expr(text).map(PyExpr).map_err(err)
    }

    /// Evaluates with `vars[i]` bound to `x{i+1}`.
    fn eval(&self, vars: Vec<f64>) -> PyResult<f64> {
        self.0.eval(&vars).map_err(err)
    }

    fn free_vars(&self) -> Vec<String> {
        self.0.free_vars()
    }

    fn __str__(&self) -> String {
        self.0.to_string()
    }

    fn __repr__(&self) -> String {
        format!("Expr('{}')", self.0)
    }
}

#[pyclass(name = "Dataset", frozen)]
struct PyDataset(data::Dataset);

#[pymethods]
impl PyDataset {
    #[new]
    #[pyo3(signature = (x, y, name = "data".to_string()))]
    fn new(x: Vec<Vec<f64>>, y: Vec<f64>, name: String) -> PyResult<Self> {
        let x = to_matrix(&x)?;
        let names = data::default_attr_names(x.ncols());
        data::Dataset::new(x, y, None, names, name, 0).map(PyDataset).map_err(err)
    }

    #[staticmethod]
    #[pyo3(signature = (name, seed = 0))]
    fn builtin(name: &str, seed: u64) -> PyResult<Self> {
        data::generate_builtin(name, seed).map(PyDataset).map_err(err)
    }

    #[staticmethod]
    #[pyo3(signature = (text, name = "data"))]
    fn from_csv(text: &str, name: &str) -> PyResult<Self> {
        data::dataset_from_csv(text, name).map(PyDataset).map_err(err)
    }

    fn to_csv(&self) -> String {
        data::dataset_to_csv(&self.0)
    }

    #[getter]
    fn x(&self) -> Vec<Vec<f64>> {
        from_matrix(&self.0.x)
    }

    #[getter]
    fn y(&self) -> Vec<f64> {
        self.0.y.clone()
    }

    #[getter]
    fn y_clean(&self) -> Option<Vec<f64>> {
        self.0.y_clean.clone()
    }

    #[getter]
    fn name(&self) -> String {
        self.0.name.clone()
    }

    #[getter]
    fn attr_names(&self) -> Vec<String> {
        self.0.attr_names.clone()
    }

    fn __len__(&self) -> usize {
        self.0.len()
    }
}

#[pyclass(name = "InterpModel", frozen)]
struct PyInterpModel(interp::InterpModel);

#[pymethods]
impl PyInterpModel {
    #[new]
    fn new(terms: Vec<String>, mu: Vec<f64>) -> PyResult<Self> {
        let terms: Vec<&str> = terms.iter().map(String::as_str).collect();
        interp::InterpModel::parse(&terms, mu).map(PyInterpModel).map_err(err)
    }

    /// Fits mu by particle swarm on the dataset's clean targets when present.
    #[staticmethod]
    #[pyo3(signature = (dataset, terms = None, seed = 0, iterations = 200, swarm_size = 30))]
    fn fit(
        dataset: &PyDataset,
        terms: Option<Vec<String>>,
        seed: u64,
        iterations: usize,
        swarm_size: usize,
    ) -> PyResult<(Self, f64)> {
        let basis = match terms {
            Some(t) => t.iter().map(|s| parse_expr(s)).collect::<ilssvm::Result<Vec<_>>>(),
            None => data::builtin_basis(&dataset.0.name),
        }
        .map_err(err)?;
        let pso = PsoParams { seed, iterations, swarm_size, ..Default::default() };
        let fit = experiment::fit_interp(&dataset.0, &basis, &pso, Centering::Signed).map_err(err)?;
        Ok((PyInterpModel(fit.model), fit.id))
    }

    fn predict(&self, x: Vec<Vec<f64>>) -> PyResult<Vec<f64>> {
        self.0.predict(&to_matrix(&x)?).map_err(err)
    }

    #[getter]
    fn mu(&self) -> Vec<f64> {
        self.0.mu.clone()
    }

    #[getter]
    fn terms(&self) -> Vec<String> {
        self.0.basis.iter().map(Expr::to_string).collect()
    }

    fn to_text(&self) -> String {
        self.0.to_text()
    }

    #[staticmethod]
    fn from_text(text: &str) -> PyResult<Self> {
        interp::InterpModel::from_text(text).map(PyInterpModel).map_err(err)
    }
}

#[pyclass(name = "Kernel", frozen)]
struct PyKernel(KernelSpec);

#[pymethods]
impl PyKernel {
    #[staticmethod]
    fn rbf(width: f64) -> PyResult<Self> {
        KernelSpec::rbf(width).map(PyKernel).map_err(err)
    }

    #[staticmethod]
    fn linear() -> Self {
        PyKernel(KernelSpec::Linear)
    }

    #[staticmethod]
    #[pyo3(signature = (degree, offset = 1.0))]
    fn polynomial(degree: u32, offset: f64) -> PyResult<Self> {
        let k = KernelSpec::Polynomial { degree, offset };
        k.validate().map_err(err)?;
        Ok(PyKernel(k))
    }

    fn eval(&self, u: Vec<f64>, v: Vec<f64>) -> PyResult<f64> {
        self.0.eval(&u, &v).map_err(err)
    }

    fn gram(&self, x: Vec<Vec<f64>>) -> PyResult<Vec<Vec<f64>>> {
        Ok(from_matrix(&self.0.gram(&to_matrix(&x)?)))
    }

    fn __repr__(&self) -> String {
        format!("Kernel({})", self.0)
    }
}

#[pyclass(name = "Model", frozen)]
struct PyModel(TrainedModel);

#[pymethods]
impl PyModel {
    /// Trains on raw arrays. `p` is the interpretation output on `x` and may
    /// be omitted when `sigma == 0`.
    #[staticmethod]
    #[pyo3(signature = (x, y, kernel, phi, sigma = 0.0, p = None))]
    fn train(
        x: Vec<Vec<f64>>,
        y: Vec<f64>,
        kernel: &PyKernel,
        phi: f64,
        sigma: f64,
        p: Option<Vec<f64>>,
    ) -> PyResult<Self> {
        let hyper = HyperParams::new(phi, sigma).map_err(err)?;
        let p = p.unwrap_or_default();
        svm::train_ilssvm_on_values(&to_matrix(&x)?, &y, &p, &kernel.0, &hyper).map(PyModel).map_err(err)
    }

    /// Trains on a whole dataset with min-max normalization stored in the model.
    #[staticmethod]
    #[pyo3(signature = (dataset, kernel, phi, sigma = 0.0, interp = None))]
    fn fit_dataset(
        dataset: &PyDataset,
        kernel: &PyKernel,
        phi: f64,
        sigma: f64,
        interp: Option<&PyInterpModel>,
    ) -> PyResult<Self> {
        let hyper = HyperParams::new(phi, sigma).map_err(err)?;
        experiment::train_full(&dataset.0, interp.map(|m| &m.0), &kernel.0, &hyper, true).map(PyModel).map_err(err)
    }

    /// Predicts in the model's own space, or raw space when it carries normalization.
    fn predict(&self, x: Vec<Vec<f64>>) -> PyResult<Vec<f64>> {
        let x = to_matrix(&x)?;
        if self.0.norm.is_some() { self.0.predict_raw(&x) } else { self.0.predict(&x) }.map_err(err)
    }

    #[getter]
    fn alpha(&self) -> Vec<f64> {
        self.0.alpha.clone()
    }

    #[getter]
    fn beta(&self) -> Vec<f64> {
        self.0.beta.clone()
    }

    #[getter]
    fn b(&self) -> f64 {
        self.0.b
    }

    #[getter]
    fn kkt_residual(&self) -> f64 {
        self.0.kkt_residual
    }

    fn to_text(&self) -> String {
        self.0.to_text()
    }

    #[staticmethod]
    fn from_text(text: &str) -> PyResult<Self> {
        TrainedModel::from_text(text).map(PyModel).map_err(err)
    }
}

#[pyfunction]
fn mse(a: Vec<f64>, b: Vec<f64>) -> PyResult<f64> {
    metrics::mse(&a, &b).map_err(err)
}

#[pyfunction]
fn ppcc(a: Vec<f64>, b: Vec<f64>) -> PyResult<f64> {
    metrics::ppcc(&a, &b).map_err(err)
}

#[pyfunction]
fn interpretation_distance(f: Vec<f64>, p: Vec<f64>) -> PyResult<f64> {
    interp::interpretation_distance(&f, &p).map_err(err)
}

#[pyfunction]
fn normalize(dataset: &PyDataset) -> PyResult<PyDataset> {
    let norm = NormParams::fit(&dataset.0).map_err(err)?;
    data::apply_norm(&norm, &dataset.0).map(PyDataset).map_err(err)
}

/// Returns the test indices of each fold.
#[pyfunction]
fn kfold(n: usize, k: usize, seed: u64) -> PyResult<Vec<Vec<usize>>> {
    let plan = tuning::kfold_split(n, k, seed).map_err(err)?;
    Ok((0..k).map(|f| plan.test_indices(f)).collect())
}

/// Cross-validated means of MSE, PPCC, R_ID, R_MSE and R_SCC.
#[pyfunction]
#[pyo3(signature = (dataset, interp, kernel, phi, sigma, folds = 10, seed = 0))]
fn cross_validate(
    dataset: &PyDataset,
    interp: &PyInterpModel,
    kernel: &PyKernel,
    phi: f64,
    sigma: f64,
    folds: usize,
    seed: u64,
) -> PyResult<Vec<(String, f64)>> {
    let hyper = HyperParams::new(phi, sigma).map_err(err)?;
    let plan = tuning::kfold_split(dataset.0.len(), folds, seed).map_err(err)?;
    let rep =
        tuning::cross_validate(&dataset.0, &interp.0, &kernel.0, &hyper, &plan, &CvOptions::default()).map_err(err)?;
    Ok([("MSE", &rep.mse), ("PPCC", &rep.ppcc), ("R_ID", &rep.r_id), ("R_MSE", &rep.r_mse), ("R_SCC", &rep.r_scc)]
        .into_iter()
        .map(|(k, s)| (k.to_string(), s.mean))
        .collect())
}

/// Returns `(theta_star, epsilon, total)`.
#[pyfunction]
#[pyo3(signature = (m, delta, big_m = 1.0, m_p = 0.5, tau = 1.0, d_norm = 1.0, sigma_rho_sq = 0.0, c_e = 1.0, ell_e = 1.0))]
#[allow(clippy::too_many_arguments)]
fn equilibrium_bound(
    m: f64,
    delta: f64,
    big_m: f64,
    m_p: f64,
    tau: f64,
    d_norm: f64,
    sigma_rho_sq: f64,
    c_e: f64,
    ell_e: f64,
) -> PyResult<(f64, f64, f64)> {
    let inputs = BoundInputs { m, delta, big_m, m_p, tau, d_norm, sigma_rho_sq, c_e, ell_e, ..Default::default() };
    let row = bounds::evaluate(&inputs).map_err(err)?;
    Ok((row.theta, row.sample_error, row.total))
}

#[pymodule]
fn ilssvm_py(m: &Bound<'_, PyModule>) -> PyResult<()> {
    m.add("IlssvmError", m.py().get_type::<IlssvmError>())?;
    m.add("BUILTIN_NAMES", data::BUILTIN_NAMES.to_vec())?;
    m.add_class::<PyExpr>()?;
    m.add_class::<PyDataset>()?;
    m.add_class::<PyInterpModel>()?;
    m.add_class::<PyKernel>()?;
    m.add_class::<PyModel>()?;
    m.add_function(wrap_pyfunction!(mse, m)?)?;
    m.add_function(wrap_pyfunction!(ppcc, m)?)?;
    m.add_function(wrap_pyfunction!(interpretation_distance, m)?)?;
    m.add_function(wrap_pyfunction!(normalize, m)?)?;
    m.add_function(wrap_pyfunction!(kfold, m)?)?;
    m.add_function(wrap_pyfunction!(cross_validate, m)?)?;
    m.add_function(wrap_pyfunction!(equilibrium_bound, m)?)?;
    Ok(())
}
