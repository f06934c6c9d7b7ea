//! k-fold cross-validation and derivative-free hyperparameter search.

use std::time::Instant;

use crate::data::{apply_norm, Dataset, NormParams};
use crate::error::{Error, Result};
use crate::interp::{interpretation_distance_with, Centering, InterpModel};
use crate::kernel::{KernelFamily, KernelSpec};
use crate::metrics::{mse, ppcc, summarize, MetricSummary};
use crate::rng::Rng;
use crate::svm::{train_ilssvm_on_values, HyperParams};

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct FoldPlan {
    pub n: usize,
    pub k: usize,
    /// Fold index of each sample.
    pub assignments: Vec<usize>,
    pub seed: u64,
}

impl FoldPlan {
    pub fn test_indices(&self, fold: usize) -> Vec<usize> {
        (0..self.n).filter(|&i| self.assignments[i] == fold).collect()
    }

    pub fn train_indices(&self, fold: usize) -> Vec<usize> {
        (0..self.n).filter(|&i| self.assignments[i] != fold).collect()
    }
}

/// Seeded shuffle, then round-robin assignment.
pub fn kfold_split(n: usize, k: usize, seed: u64) -> Result<FoldPlan> {
    if k < 2 {
        return Err(Error::invalid("need at least 2 folds"));
    }
    if k > n {
        return Err(Error::invalid(format!("{k} folds requested for {n} samples")));
    }
    let perm = Rng::new(seed).permutation(n);
    let mut assignments = vec![0; n];
    for (pos, &i) in perm.iter().enumerate() {
        assignments[i] = pos % k;
    }
    Ok(FoldPlan { n, k, assignments, seed })
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CvOptions {
    /// Min-max normalize each fold using training-split statistics.
    pub normalize: bool,
    /// Compute R_MSE and R_SCC against the noise-free targets.
    pub reference_metrics: bool,
    pub centering: Centering,
}

impl Default for CvOptions {
    fn default() -> Self {
        CvOptions { normalize: true, reference_metrics: true, centering: Centering::Signed }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct FoldResult {
    pub test_indices: Vec<usize>,
    /// Test-split predictions in the (normalized) training scale.
    pub predictions: Vec<f64>,
    pub norm: NormParams,
    pub mse: f64,
    /// NaN where the correlation is undefined.
    pub ppcc: f64,
    pub r_id: f64,
    pub r_mse: f64,
    pub r_scc: f64,
    pub seconds: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct EvalReport {
    pub folds: Vec<FoldResult>,
    pub mse: MetricSummary,
    pub ppcc: MetricSummary,
    pub r_id: MetricSummary,
    pub r_mse: MetricSummary,
    pub r_scc: MetricSummary,
    pub d_time: MetricSummary,
}

/// The six reported columns in table order.
pub const METRIC_NAMES: [&str; 6] = ["MSE", "PPCC", "R_ID", "R_MSE", "R_SCC", "D_time"];

impl EvalReport {
    pub fn from_folds(folds: Vec<FoldResult>) -> Result<EvalReport> {
        let col = |f: fn(&FoldResult) -> f64| summarize(&folds.iter().map(f).collect::<Vec<_>>());
        Ok(EvalReport {
            mse: col(|f| f.mse)?,
            ppcc: col(|f| f.ppcc)?,
            r_id: col(|f| f.r_id)?,
            r_mse: col(|f| f.r_mse)?,
            r_scc: col(|f| f.r_scc)?,
            d_time: col(|f| f.seconds)?,
            folds,
        })
    }

    pub fn summaries(&self) -> [&MetricSummary; 6] {
        [&self.mse, &self.ppcc, &self.r_id, &self.r_mse, &self.r_scc, &self.d_time]
    }

    /// Pools the folds of several reports, e.g. repeated CV runs.
    pub fn merge(reports: &[EvalReport]) -> Result<EvalReport> {
        EvalReport::from_folds(reports.iter().flat_map(|r| r.folds.iter().cloned()).collect())
    }
}

fn correlation_or_nan(a: &[f64], b: &[f64]) -> Result<f64> {
    match ppcc(a, b) {
        Ok(r) => Ok(r),
        Err(Error::UndefinedCorrelation(_)) => Ok(f64::NAN),
        Err(e) => Err(e),
    }
}

/// Trains on each training split (LSSVM when `hyper.sigma == 0`, ILSSVM
/// otherwise) and scores the held-out split.
pub fn cross_validate(
    ds: &Dataset,
    interp: &InterpModel,
    kernel: &KernelSpec,
    hyper: &HyperParams,
    plan: &FoldPlan,
    opts: &CvOptions,
) -> Result<EvalReport> {
    if plan.n != ds.len() {
        return Err(Error::LengthMismatch { left: plan.n, right: ds.len() });
    }
    if opts.reference_metrics && ds.y_clean.is_none() {
        return Err(Error::invalid("R_MSE/R_SCC need noise-free targets (y_clean) but the dataset has none"));
    }
    let p_all = interp.predict(&ds.x)?;

    let mut folds = Vec::with_capacity(plan.k);
    for fold in 0..plan.k {
        let train_idx = plan.train_indices(fold);
        let test_idx = plan.test_indices(fold);
        let train = ds.subset(&train_idx);
        let test = ds.subset(&test_idx);
        let norm = if opts.normalize { NormParams::fit(&train)? } else { NormParams::identity(ds.dim()) };
        let (train, test) =
            if opts.normalize { (apply_norm(&norm, &train)?, apply_norm(&norm, &test)?) } else { (train, test) };
        let pick = |idx: &[usize]| -> Vec<f64> {
            let raw: Vec<f64> = idx.iter().map(|&i| p_all[i]).collect();
            if opts.normalize {
                norm.apply_target(&raw)
            } else {
                raw
            }
        };
        let (p_train, p_test) = (pick(&train_idx), pick(&test_idx));

        let start = Instant::now();
        let model = train_ilssvm_on_values(&train.x, &train.y, &p_train, kernel, hyper)?;
        let pred = model.predict(&test.x)?;
        let seconds = start.elapsed().as_secs_f64();

        let (r_mse, r_scc) = match (&test.y_clean, opts.reference_metrics) {
            (Some(clean), true) => (mse(&pred, clean)?, correlation_or_nan(&pred, clean)?),
            _ => (f64::NAN, f64::NAN),
        };
        folds.push(FoldResult {
            mse: mse(&pred, &test.y)?,
            ppcc: correlation_or_nan(&pred, &test.y)?,
            r_id: interpretation_distance_with(&pred, &p_test, opts.centering)?,
            r_mse,
            r_scc,
            seconds,
            test_indices: test_idx,
            predictions: pred,
            norm,
        });
    }
    EvalReport::from_folds(folds)
}

#[derive(Debug, Clone, PartialEq)]
pub struct SimplexParams {
    pub reflection: f64,
    pub expansion: f64,
    pub contraction: f64,
    pub shrink: f64,
    pub max_iters: usize,
    /// Stop once every vertex lies within `tol` (infinity norm) of the best.
    pub tol: f64,
    /// Offset of the initial vertices from the start point along each axis.
    pub initial_step: f64,
}

impl Default for SimplexParams {
    fn default() -> Self {
        SimplexParams {
            reflection: 1.0,
            expansion: 2.0,
            contraction: 0.5,
            shrink: 0.5,
            max_iters: 1000,
            tol: 1e-8,
            initial_step: 0.5,
        }
    }
}

impl SimplexParams {
    pub fn validate(&self) -> Result<()> {
        let ok = self.reflection > 0.0
            && self.expansion > 1.0
            && self.contraction > 0.0
            && self.contraction < 1.0
            && self.shrink > 0.0
            && self.shrink < 1.0
            && self.max_iters > 0
            && self.tol > 0.0
            && self.initial_step != 0.0;
        if ok {
            Ok(())
        } else {
            Err(Error::invalid("invalid Nelder-Mead coefficients"))
        }
    }
}

#[derive(Debug, Clone)]
pub struct SimplexOutcome {
    pub x_best: Vec<f64>,
    pub f_best: f64,
    pub iterations: usize,
    pub evaluations: usize,
    /// Best vertex value at the start and after every iteration.
    pub history: Vec<f64>,
}

/// Nelder–Mead simplex minimization. Non-finite objective values are
/// treated as +inf.
pub fn nelder_mead<F>(mut objective: F, x0: &[f64], params: &SimplexParams) -> Result<SimplexOutcome>
where
    F: FnMut(&[f64]) -> f64,
{
    params.validate()?;
    let n = x0.len();
    if n == 0 {
        return Err(Error::invalid("empty start point"));
    }
    let mut evaluations = 0;
    let mut eval = |x: &[f64]| {
        evaluations += 1;
        let f = objective(x);
        if f.is_finite() {
            f
        } else {
            f64::INFINITY
        }
    };

    let mut simplex: Vec<(Vec<f64>, f64)> = Vec::with_capacity(n + 1);
    simplex.push((x0.to_vec(), eval(x0)));
    for i in 0..n {
        let mut v = x0.to_vec();
        v[i] += params.initial_step;
        let f = eval(&v);
        simplex.push((v, f));
    }
    let order = |s: &mut Vec<(Vec<f64>, f64)>| s.sort_by(|a, b| a.1.total_cmp(&b.1));
    order(&mut simplex);

    let affine =
        |a: &[f64], b: &[f64], t: f64| -> Vec<f64> { a.iter().zip(b).map(|(ai, bi)| ai + t * (bi - ai)).collect() };

    let mut history = vec![simplex[0].1];
    let mut iterations = 0;
    while iterations < params.max_iters {
        let best = &simplex[0].0;
        let diameter =
            simplex[1..].iter().flat_map(|(v, _)| v.iter().zip(best).map(|(a, b)| (a - b).abs())).fold(0.0, f64::max);
        if diameter < params.tol {
            break;
        }
        iterations += 1;

        let mut centroid = vec![0.0; n];
        for (v, _) in &simplex[..n] {
            for (c, x) in centroid.iter_mut().zip(v) {
                *c += x / n as f64;
            }
        }
        let (worst, f_worst) = simplex[n].clone();
        let f_best = simplex[0].1;
        let f_second = simplex[n - 1].1;

        // x_r = c + rho (c - x_w)
        let xr = affine(&centroid, &worst, -params.reflection);
        let fr = eval(&xr);
        let mut shrink = false;
        if fr < f_best {
            let xe = affine(&centroid, &xr, params.expansion);
            let fe = eval(&xe);
            simplex[n] = if fe < fr { (xe, fe) } else { (xr, fr) };
        } else if fr < f_second {
            simplex[n] = (xr, fr);
        } else if fr < f_worst {
            let xc = affine(&centroid, &xr, params.contraction);
            let fc = eval(&xc);
            if fc <= fr {
                simplex[n] = (xc, fc);
            } else {
                shrink = true;
            }
        } else {
            let xc = affine(&centroid, &worst, params.contraction);
            let fc = eval(&xc);
            if fc < f_worst {
                simplex[n] = (xc, fc);
            } else {
                shrink = true;
            }
        }
        if shrink {
            let best = simplex[0].0.clone();
            for vertex in simplex.iter_mut().skip(1) {
                let v = affine(&best, &vertex.0, params.shrink);
                let f = eval(&v);
                *vertex = (v, f);
            }
        }
        order(&mut simplex);
        history.push(simplex[0].1);
    }

    let (x_best, f_best) = simplex.swap_remove(0);
    Ok(SimplexOutcome { x_best, f_best, iterations, evaluations, history })
}

/// Scalarization weights of the tuning objective.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TuneWeights {
    pub mse: f64,
    pub id: f64,
}

impl Default for TuneWeights {
    fn default() -> Self {
        TuneWeights { mse: 1.0, id: 1.0 }
    }
}

/// Offset keeping log10(sigma + eps) finite at sigma = 0.
pub const SIGMA_EPS: f64 = 1e-8;

/// Boxes (in natural units, searched in log10) for the tuned parameters.
#[derive(Debug, Clone, PartialEq)]
pub struct SearchSpace {
    pub width: (f64, f64),
    pub phi: (f64, f64),
    /// `None` pins sigma to 0 (plain LSSVM).
    pub sigma: Option<(f64, f64)>,
    /// Points per axis of the coarse starting grid; 0 starts at the box centre.
    pub grid_points: usize,
    pub grid_only: bool,
    pub simplex: SimplexParams,
    /// Degree and offset used when the family is polynomial.
    pub polynomial: (u32, f64),
}

impl Default for SearchSpace {
    fn default() -> Self {
        SearchSpace {
            width: (1e-2, 1e2),
            phi: (1e-2, 1e4),
            sigma: Some((0.0, 1e3)),
            grid_points: 4,
            grid_only: false,
            simplex: SimplexParams { max_iters: 60, tol: 1e-3, initial_step: 0.15, ..SimplexParams::default() },
            polynomial: (2, 1.0),
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct TuneResult {
    pub kernel: KernelSpec,
    pub hyper: HyperParams,
    pub score: f64,
    pub evaluations: usize,
}

/// One searched coordinate: log10 bounds plus the map back to natural units.
#[derive(Debug, Clone, Copy)]
struct Axis {
    lo: f64,
    hi: f64,
    offset: f64,
    range: (f64, f64),
}

impl Axis {
    fn new(range: (f64, f64), offset: f64, name: &str) -> Result<Axis> {
        let (a, b) = (range.0 + offset, range.1 + offset);
        if !(a > 0.0 && b >= a && b.is_finite()) {
            return Err(Error::invalid(format!("empty or invalid search range for {name}")));
        }
        Ok(Axis { lo: a.log10(), hi: b.log10(), offset, range })
    }

    /// `t` in [0, 1] to natural units.
    fn value(&self, t: f64) -> f64 {
        let t = t.clamp(0.0, 1.0);
        (10f64.powf(self.lo + t * (self.hi - self.lo)) - self.offset).clamp(self.range.0, self.range.1)
    }
}

/// Minimizes `weights.mse * mean CV MSE + weights.id * mean CV R_ID` over
/// the search box: coarse grid first, then Nelder–Mead on the unit cube
/// mapped to log10 ranges.
pub fn tune_hyperparams(
    ds: &Dataset,
    interp: &InterpModel,
    family: KernelFamily,
    space: &SearchSpace,
    plan: &FoldPlan,
    weights: &TuneWeights,
    opts: &CvOptions,
) -> Result<TuneResult> {
    let mut axes = Vec::new();
    if family == KernelFamily::Rbf {
        axes.push(Axis::new(space.width, 0.0, "width")?);
    }
    let phi_axis = axes.len();
    axes.push(Axis::new(space.phi, 0.0, "phi")?);
    let sigma_axis = match space.sigma {
        Some(r) => {
            axes.push(Axis::new(r, SIGMA_EPS, "sigma")?);
            Some(axes.len() - 1)
        }
        None => None,
    };

    let decode = |t: &[f64]| -> (KernelSpec, HyperParams) {
        let kernel = match family {
            KernelFamily::Rbf => KernelSpec::Rbf { width: axes[0].value(t[0]) },
            KernelFamily::Linear => KernelSpec::Linear,
            KernelFamily::Polynomial => {
                KernelSpec::Polynomial { degree: space.polynomial.0, offset: space.polynomial.1 }
            }
        };
        let phi = axes[phi_axis].value(t[phi_axis]);
        let sigma = sigma_axis.map_or(0.0, |i| axes[i].value(t[i]));
        (kernel, HyperParams { phi, sigma })
    };
    let mut evaluations = 0;
    let mut score = |t: &[f64]| -> f64 {
        evaluations += 1;
        let (k, h) = decode(t);
        match cross_validate(ds, interp, &k, &h, plan, opts) {
            Ok(r) => weights.mse * r.mse.mean + weights.id * r.r_id.mean,
            Err(_) => f64::INFINITY,
        }
    };

    let dims = axes.len();
    let mut start = vec![0.5; dims];
    let mut start_score = f64::INFINITY;
    if space.grid_points > 0 {
        let g = space.grid_points;
        let coord = |i: usize, axis: &Axis| {
            if g == 1 || axis.hi == axis.lo {
                0.5
            } else {
                i as f64 / (g - 1) as f64
            }
        };
        let total = g.pow(dims as u32);
        for code in 0..total {
            let mut rem = code;
            let t: Vec<f64> = axes
                .iter()
                .map(|a| {
                    let i = rem % g;
                    rem /= g;
                    coord(i, a)
                })
                .collect();
            let s = score(&t);
            if s < start_score {
                start_score = s;
                start = t;
            }
        }
    } else {
        start_score = score(&start);
    }

    let (best_t, best_score) = if space.grid_only {
        (start, start_score)
    } else {
        let clamp = |t: &[f64]| t.iter().map(|v| v.clamp(0.0, 1.0)).collect::<Vec<_>>();
        let out = nelder_mead(|t| score(&clamp(t)), &start, &space.simplex)?;
        if out.f_best < start_score {
            (clamp(&out.x_best), out.f_best)
        } else {
            (start, start_score)
        }
    };
    let (kernel, hyper) = decode(&best_t);
    Ok(TuneResult { kernel, hyper, score: best_score, evaluations })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::data::{builtin_basis, builtin_spec, generate_builtin, generate_dataset, NoiseLayer};
    use nalgebra::DMatrix;

    #[test]
    fn fold_shapes() {
        let p = kfold_split(10, 10, 3).unwrap();
        for f in 0..10 {
            assert_eq!(p.test_indices(f).len(), 1);
        }
        let p = kfold_split(60, 10, 0).unwrap();
        for f in 0..10 {
            assert_eq!(p.test_indices(f).len(), 6);
            assert_eq!(p.train_indices(f).len(), 54);
        }
        assert!(kfold_split(5, 6, 0).is_err());
        assert!(kfold_split(5, 1, 0).is_err());
        assert_eq!(kfold_split(60, 10, 4).unwrap(), kfold_split(60, 10, 4).unwrap());
    }

    #[test]
    fn partition_laws_for_all_small_sizes() {
        for n in 2..=200 {
            for k in [2, 3, 5, 7, 10, n].into_iter().filter(|&k| k >= 2 && k <= n) {
                let p = kfold_split(n, k, (n * 31 + k) as u64).unwrap();
                let mut sizes = vec![0; k];
                for &a in &p.assignments {
                    sizes[a] += 1;
                }
                let (lo, hi) = (*sizes.iter().min().unwrap(), *sizes.iter().max().unwrap());
                assert!(lo >= 1 && hi - lo <= 1, "n={n} k={k}");
                let mut all: Vec<usize> = (0..k).flat_map(|f| p.test_indices(f)).collect();
                all.sort_unstable();
                assert_eq!(all, (0..n).collect::<Vec<_>>());
            }
        }
    }

    fn plane_interp() -> InterpModel {
        InterpModel::new(builtin_basis("plane1").unwrap(), vec![0.6, 0.3]).unwrap()
    }

    #[test]
    fn noiseless_plane_is_recovered() {
        let mut spec = builtin_spec("plane1").unwrap();
        spec.noise_plan = vec![NoiseLayer::uniform(60, 0.0, 0.0)];
        let ds = generate_dataset(&spec, 0).unwrap();
        let plan = kfold_split(60, 10, 0).unwrap();
        let rep = cross_validate(
            &ds,
            &plane_interp(),
            &KernelSpec::rbf(1.0).unwrap(),
            &HyperParams::new(100.0, 10.0).unwrap(),
            &plan,
            &CvOptions::default(),
        )
        .unwrap();
        assert!(rep.r_mse.mean < 1e-2, "{}", rep.r_mse.mean);
        assert_eq!(rep.folds.len(), 10);
        assert_eq!(rep.summaries().len(), METRIC_NAMES.len());
    }

    #[test]
    fn constant_target_without_normalization() {
        let x = DMatrix::from_fn(20, 1, |i, _| i as f64 / 20.0);
        let ds = Dataset::new(x, vec![2.0; 20], None, vec!["x1".into()], "flat", 0).unwrap();
        let plan = kfold_split(20, 5, 1).unwrap();
        let interp = InterpModel::parse(&["x1"], vec![1.0]).unwrap();
        let opts = CvOptions { normalize: false, reference_metrics: false, ..Default::default() };
        let rep = cross_validate(
            &ds,
            &interp,
            &KernelSpec::rbf(0.3).unwrap(),
            &HyperParams::new(10.0, 0.0).unwrap(),
            &plan,
            &opts,
        )
        .unwrap();
        assert!(rep.mse.variance < 1e-20);
        assert!(rep.ppcc.mean.is_nan());
        // Normalization of a constant target is refused.
        let strict = CvOptions { reference_metrics: false, ..Default::default() };
        assert!(cross_validate(
            &ds,
            &interp,
            &KernelSpec::Linear,
            &HyperParams::new(1.0, 0.0).unwrap(),
            &plan,
            &strict
        )
        .is_err());
        // Reference metrics need y_clean.
        let needs_clean = CvOptions { normalize: false, ..Default::default() };
        assert!(cross_validate(
            &ds,
            &interp,
            &KernelSpec::Linear,
            &HyperParams::new(1.0, 0.0).unwrap(),
            &plan,
            &needs_clean
        )
        .is_err());
    }

    #[test]
    fn folds_normalize_on_training_rows_only() {
        let ds = generate_builtin("gabor1", 0).unwrap();
        let plan = kfold_split(60, 10, 2).unwrap();
        let interp = InterpModel::new(builtin_basis("gabor1").unwrap(), vec![1.0]).unwrap();
        let k = KernelSpec::rbf(0.5).unwrap();
        let h = HyperParams::new(10.0, 1.0).unwrap();
        let rep = cross_validate(&ds, &interp, &k, &h, &plan, &CvOptions::default()).unwrap();
        for (f, fold) in rep.folds.iter().enumerate() {
            let train = ds.subset(&plan.train_indices(f));
            assert_eq!(fold.norm, NormParams::fit(&train).unwrap());
        }
        // Perturbing one fold's held-out rows leaves that fold's statistics
        // and predictions alone.
        let mut poisoned = ds.clone();
        for i in plan.test_indices(3) {
            poisoned.y[i] *= 100.0;
            poisoned.x[(i, 0)] += 50.0;
        }
        let rep2 = cross_validate(&poisoned, &interp, &k, &h, &plan, &CvOptions::default()).unwrap();
        assert_eq!(rep2.folds[3].norm, rep.folds[3].norm);
        assert_ne!(rep2.folds[4].norm, rep.folds[4].norm);
    }

    #[test]
    fn nelder_mead_quadratic_and_rosenbrock() {
        let out = nelder_mead(|x| (x[0] - 2.0).powi(2), &[0.0], &SimplexParams::default()).unwrap();
        assert!((out.x_best[0] - 2.0).abs() < 1e-4);

        let rosen = |x: &[f64]| 100.0 * (x[1] - x[0] * x[0]).powi(2) + (1.0 - x[0]).powi(2);
        let params = SimplexParams { max_iters: 2000, tol: 1e-10, ..Default::default() };
        let out = nelder_mead(rosen, &[-1.2, 1.0], &params).unwrap();
        assert!(out.f_best < 1e-3, "{}", out.f_best);
        assert!(out.history.windows(2).all(|w| w[1] <= w[0]));
    }

    #[test]
    fn nelder_mead_constant_objective_runs_to_max_iters() {
        let params = SimplexParams { max_iters: 40, tol: 1e-300, ..Default::default() };
        let out = nelder_mead(|_| 3.5, &[1.0, 2.0], &params).unwrap();
        assert_eq!(out.iterations, 40);
        assert_eq!(out.f_best, 3.5);
    }

    #[test]
    fn nelder_mead_treats_nan_as_infinite() {
        let out = nelder_mead(
            |x| if x[0] < 0.0 { f64::NAN } else { (x[0] - 1.0).powi(2) },
            &[0.2],
            &SimplexParams::default(),
        )
        .unwrap();
        assert!((out.x_best[0] - 1.0).abs() < 1e-4);
    }

    #[test]
    fn one_point_grid_returns_that_point() {
        let ds = generate_builtin("plane1", 1).unwrap();
        let plan = kfold_split(60, 5, 0).unwrap();
        let space = SearchSpace {
            width: (0.8, 0.8),
            phi: (5.0, 5.0),
            sigma: Some((2.0, 2.0)),
            grid_points: 1,
            grid_only: true,
            ..Default::default()
        };
        let r = tune_hyperparams(
            &ds,
            &plane_interp(),
            KernelFamily::Rbf,
            &space,
            &plan,
            &TuneWeights::default(),
            &CvOptions::default(),
        )
        .unwrap();
        assert!((r.hyper.phi - 5.0).abs() < 1e-12);
        assert!((r.hyper.sigma - 2.0).abs() < 1e-9);
        assert!(matches!(r.kernel, KernelSpec::Rbf { width } if (width - 0.8).abs() < 1e-12));
        assert_eq!(r.evaluations, 1);

        let empty = SearchSpace { phi: (5.0, 1.0), ..space };
        assert!(tune_hyperparams(
            &ds,
            &plane_interp(),
            KernelFamily::Rbf,
            &empty,
            &plan,
            &TuneWeights::default(),
            &CvOptions::default()
        )
        .is_err());
    }

    #[test]
    fn tuning_without_interpretation_weight_keeps_sigma_pinned() {
        let ds = generate_builtin("plane1", 2).unwrap();
        let plan = kfold_split(60, 5, 0).unwrap();
        let space = SearchSpace { sigma: None, grid_points: 3, ..Default::default() };
        let w = TuneWeights { mse: 1.0, id: 0.0 };
        let r = tune_hyperparams(&ds, &plane_interp(), KernelFamily::Rbf, &space, &plan, &w, &CvOptions::default())
            .unwrap();
        assert_eq!(r.hyper.sigma, 0.0);
        let check = cross_validate(&ds, &plane_interp(), &r.kernel, &r.hyper, &plan, &CvOptions::default()).unwrap();
        assert!((check.mse.mean - r.score).abs() < 1e-12);
    }
}
