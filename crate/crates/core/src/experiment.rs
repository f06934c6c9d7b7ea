//! End-to-end protocol: interpretation fitting, benchmark runs and full-data
//! training, driven by an [`ExperimentConfig`].

use crate::config::{DatasetConfig, DatasetSource, InterpConfig, ModelConfig, ProtocolConfig};
use crate::data::{
    builtin_basis, generate_builtin, generate_dataset, normalize_minmax, read_csv, ColumnRange, Dataset, BUILTIN_NAMES,
};
use crate::error::{Error, Result};
use crate::expr::Expr;
use crate::interp::{pso_fit_interp_traced, Centering, InterpModel};
use crate::kernel::KernelSpec;
use crate::pso::PsoParams;
use crate::report::{DatasetReport, MethodReport};
use crate::svm::{train_ilssvm_on_values, HyperParams, TrainedModel};
use crate::tuning::{cross_validate, kfold_split, tune_hyperparams, EvalReport, SearchSpace, TuneWeights};

pub fn load_dataset(cfg: &DatasetConfig) -> Result<Dataset> {
    match &cfg.source {
        DatasetSource::Builtin(name) => generate_builtin(name, cfg.seed),
        DatasetSource::Suite => Err(Error::Config {
            section: "dataset".into(),
            key: "builtin".into(),
            message: "`all` selects the whole suite; load each builtin separately".into(),
        }),
        DatasetSource::Spec(spec) => generate_dataset(spec, cfg.seed),
        DatasetSource::Csv(path) => read_csv(path),
    }
}

/// One config per dataset: the builtins in name order for the suite,
/// otherwise the config itself.
pub fn expand_suite(cfg: &DatasetConfig) -> Vec<DatasetConfig> {
    match cfg.source {
        DatasetSource::Suite => BUILTIN_NAMES
            .iter()
            .map(|n| DatasetConfig { source: DatasetSource::Builtin(n.to_string()), seed: cfg.seed })
            .collect(),
        _ => vec![cfg.clone()],
    }
}

/// `cfg` with an empty basis replaced by the builtin generator terms.
pub fn interp_for(cfg: &InterpConfig, dataset: &DatasetConfig) -> Result<InterpConfig> {
    let mut out = cfg.clone();
    if let (true, DatasetSource::Builtin(name)) = (out.basis.is_empty(), &dataset.source) {
        out.basis = builtin_basis(name)?;
    }
    Ok(out)
}

fn value_range(values: &[f64], what: &str) -> Result<ColumnRange> {
    let min = values.iter().copied().fold(f64::INFINITY, f64::min);
    let max = values.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    if !(max > min) {
        return Err(Error::ConstantColumn(what.into()));
    }
    Ok(ColumnRange { min, max })
}

#[derive(Debug, Clone, PartialEq)]
pub struct InterpFit {
    /// Coefficients act on raw inputs and produce raw-scale targets.
    pub model: InterpModel,
    /// Interpretation distance on the min-max normalized target scale.
    pub id: f64,
    pub history: Vec<f64>,
}

/// PSO fit of `basis` against the noise-free targets (noisy ones when the
/// dataset has none), scored on the dataset's normalized target scale.
pub fn fit_interp(ds: &Dataset, basis: &[Expr], pso: &PsoParams, centering: Centering) -> Result<InterpFit> {
    let range = value_range(&ds.y, "y")?;
    let target: Vec<f64> = ds.y_clean.as_ref().unwrap_or(&ds.y).iter().map(|v| range.forward(*v)).collect();
    let (scaled, outcome) = pso_fit_interp_traced(basis, &ds.x, &target, pso, centering)?;
    let mu = scaled.mu.iter().map(|m| m / range.scale()).collect();
    Ok(InterpFit { model: InterpModel::new(basis.to_vec(), mu)?, id: outcome.fitness, history: outcome.history })
}

/// `repeat` independent fits with PSO seeds `seed, seed + 1, ...`.
pub fn fit_interp_runs(
    ds: &Dataset,
    basis: &[Expr],
    pso: &PsoParams,
    repeat: usize,
    centering: Centering,
) -> Result<Vec<InterpFit>> {
    (0..repeat as u64)
        .map(|r| fit_interp(ds, basis, &PsoParams { seed: pso.seed + r, ..pso.clone() }, centering))
        .collect()
}

/// Lowest-distance fit; earlier runs win ties.
pub fn best_fit(fits: &[InterpFit]) -> Option<&InterpFit> {
    fits.iter().reduce(|a, b| if b.id < a.id { b } else { a })
}

/// The interpretation model a config asks for: a model file, fixed
/// coefficients, or a single PSO fit.
pub fn resolve_interp(cfg: &InterpConfig, ds: &Dataset) -> Result<InterpModel> {
    if let Some(path) = &cfg.model_file {
        return InterpModel::from_text(&std::fs::read_to_string(path)?);
    }
    if cfg.basis.is_empty() {
        return Err(Error::Config {
            section: "interp".into(),
            key: "basis".into(),
            message: "no interpretation basis (set basis, or use a builtin dataset)".into(),
        });
    }
    match &cfg.mu {
        Some(mu) => InterpModel::new(cfg.basis.clone(), mu.clone()),
        None => Ok(fit_interp(ds, &cfg.basis, &cfg.pso, cfg.centering)?.model),
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct MethodRun {
    pub kernel: KernelSpec,
    pub hyper: HyperParams,
    pub report: EvalReport,
}

#[derive(Debug, Clone, PartialEq)]
pub struct Benchmark {
    pub lssvm: MethodRun,
    pub ilssvm: MethodRun,
}

impl Benchmark {
    pub fn dataset_report(&self, dataset: &str) -> DatasetReport {
        DatasetReport {
            dataset: dataset.to_string(),
            methods: vec![
                MethodReport { method: "LSSVM".into(), report: self.lssvm.report.clone() },
                MethodReport { method: "ILSSVM".into(), report: self.ilssvm.report.clone() },
            ],
        }
    }
}

/// LSSVM and ILSSVM on identical folds (`repeat` fold plans seeded
/// `seed, seed + 1, ...`, pooled). With tuning enabled, LSSVM is tuned for
/// MSE alone and ILSSVM for the configured weighted objective, both on the
/// first fold plan.
pub fn run_benchmark(
    ds: &Dataset,
    interp: &InterpModel,
    model: &ModelConfig,
    protocol: &ProtocolConfig,
    centering: Centering,
) -> Result<Benchmark> {
    let opts = protocol.cv_options(centering);
    let plans = (0..protocol.repeat as u64)
        .map(|r| kfold_split(ds.len(), protocol.folds, protocol.seed + r))
        .collect::<Result<Vec<_>>>()?;
    let family = model.kernel.family();

    let (l_kernel, l_hyper, i_kernel, i_hyper) = if model.tune {
        let l_space = SearchSpace { sigma: None, ..model.space.clone() };
        let l_weights = TuneWeights { mse: 1.0, id: 0.0 };
        let l = tune_hyperparams(ds, interp, family, &l_space, &plans[0], &l_weights, &opts)?;
        let i = tune_hyperparams(ds, interp, family, &model.space, &plans[0], &model.weights, &opts)?;
        (l.kernel, l.hyper, i.kernel, i.hyper)
    } else {
        let l_hyper = HyperParams { sigma: 0.0, ..model.hyper };
        (model.kernel, l_hyper, model.kernel, model.hyper)
    };

    let run = |kernel: KernelSpec, hyper: HyperParams| -> Result<MethodRun> {
        let reports =
            plans.iter().map(|p| cross_validate(ds, interp, &kernel, &hyper, p, &opts)).collect::<Result<Vec<_>>>()?;
        Ok(MethodRun { kernel, hyper, report: EvalReport::merge(&reports)? })
    };
    Ok(Benchmark { lssvm: run(l_kernel, l_hyper)?, ilssvm: run(i_kernel, i_hyper)? })
}

/// Trains on the whole dataset. With `normalize`, the model stores the
/// min-max parameters so `predict_raw` accepts and returns raw values.
pub fn train_full(
    ds: &Dataset,
    interp: Option<&InterpModel>,
    kernel: &KernelSpec,
    hyper: &HyperParams,
    normalize: bool,
) -> Result<TrainedModel> {
    let p_raw = match interp {
        Some(m) => m.predict(&ds.x)?,
        None if hyper.sigma > 0.0 => {
            return Err(Error::invalid("sigma > 0 needs an interpretation model"));
        }
        None => Vec::new(),
    };
    if !normalize {
        return train_ilssvm_on_values(&ds.x, &ds.y, &p_raw, kernel, hyper);
    }
    let (norm_ds, norm) = normalize_minmax(ds)?;
    let p = if p_raw.is_empty() { p_raw } else { norm.apply_target(&p_raw) };
    let mut model = train_ilssvm_on_values(&norm_ds.x, &norm_ds.y, &p, kernel, hyper)?;
    model.norm = Some(norm);
    Ok(model)
}
