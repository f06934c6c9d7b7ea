//! Experiment configuration.
//!
//! A config file is a list of `[section]` headers, each followed by
//! `key = value` lines (TOML syntax). Strings are double-quoted, lists use
//! brackets, `#` starts a comment:
//!
//! ```text
//! [dataset]
//! builtin = "multi1"
//! seed = 0
//!
//! [interp]
//! basis = ["x1*x2", "x1*x4", "x2*x5", "x3*x4*x5"]
//! repeat = 10
//!
//! [model]
//! kernel = "rbf"
//! width = 1.0
//! phi = 10.0
//! sigma = 1.0
//! ```
//!
//! Unknown sections and keys are rejected. The canonical rendering (sorted
//! sections and keys, output directory left out) is hashed with SHA-256 and
//! written into every report.

use std::path::PathBuf;

use sha2::{Digest, Sha256};
use toml::{Table, Value};

use crate::bounds::BoundInputs;
use crate::data::{builtin_basis, builtin_spec, DatasetSpec, NoiseLayer, NoiseSegment};
use crate::error::{Error, Result};
use crate::expr::{parse_expr, Expr};
use crate::interp::Centering;
use crate::kernel::{KernelFamily, KernelSpec};
use crate::pso::PsoParams;
use crate::svm::HyperParams;
use crate::tuning::{CvOptions, SearchSpace, SimplexParams, TuneWeights};

pub type ConfigTable = Table;

const SECTIONS: [&str; 6] = ["dataset", "interp", "model", "protocol", "output", "bounds"];

#[derive(Debug, Clone, PartialEq)]
pub enum DatasetSource {
    Builtin(String),
    /// Every builtin dataset in name order.
    Suite,
    Spec(DatasetSpec),
    Csv(PathBuf),
}

#[derive(Debug, Clone, PartialEq)]
pub struct DatasetConfig {
    pub source: DatasetSource,
    pub seed: u64,
}

impl DatasetConfig {
    pub fn name(&self) -> String {
        match &self.source {
            DatasetSource::Builtin(n) => n.clone(),
            DatasetSource::Suite => "all".into(),
            DatasetSource::Spec(s) => s.name.clone(),
            DatasetSource::Csv(p) => p.file_stem().map_or_else(|| "data".into(), |s| s.to_string_lossy().into_owned()),
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct InterpConfig {
    /// Empty means the builtin dataset's generator terms.
    pub basis: Vec<Expr>,
    /// Fixed coefficients; PSO fitting is skipped when present.
    pub mu: Option<Vec<f64>>,
    pub model_file: Option<PathBuf>,
    pub pso: PsoParams,
    pub repeat: usize,
    pub centering: Centering,
}

#[derive(Debug, Clone, PartialEq)]
pub struct ModelConfig {
    pub kernel: KernelSpec,
    pub hyper: HyperParams,
    /// Search hyperparameters instead of using the fixed values.
    pub tune: bool,
    pub space: SearchSpace,
    pub weights: TuneWeights,
}

#[derive(Debug, Clone, PartialEq)]
pub struct ProtocolConfig {
    pub folds: usize,
    pub seed: u64,
    pub repeat: usize,
    pub normalize: bool,
    pub reference_metrics: bool,
}

impl ProtocolConfig {
    pub fn cv_options(&self, centering: Centering) -> CvOptions {
        CvOptions { normalize: self.normalize, reference_metrics: self.reference_metrics, centering }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct OutputConfig {
    pub dir: PathBuf,
    /// Write fold wall times into reports (makes them run-dependent).
    pub timing: bool,
}

#[derive(Debug, Clone, PartialEq)]
pub enum SweepAxis {
    M,
    Delta,
}

#[derive(Debug, Clone, PartialEq)]
pub struct BoundsConfig {
    pub inputs: BoundInputs,
    pub sweep: Option<(SweepAxis, Vec<f64>)>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct ExperimentConfig {
    pub dataset: Option<DatasetConfig>,
    pub interp: InterpConfig,
    pub model: ModelConfig,
    pub protocol: ProtocolConfig,
    pub output: OutputConfig,
    pub bounds: BoundsConfig,
    /// Sorted rendering of the effective settings.
    pub canonical: String,
}

impl ExperimentConfig {
    pub fn parse(text: &str) -> Result<ExperimentConfig> {
        ExperimentConfig::from_table(parse_table(text)?)
    }

    pub fn from_table(table: Table) -> Result<ExperimentConfig> {
        for (name, value) in &table {
            if !SECTIONS.contains(&name.as_str()) {
                return Err(cfg_err(name, "", "unknown section"));
            }
            if !value.is_table() {
                return Err(cfg_err(name, "", "expected a [section] header"));
            }
        }
        let empty = Table::new();
        let section =
            |name: &'static str| Section::new(name, table.get(name).and_then(Value::as_table).unwrap_or(&empty));

        let dataset = parse_dataset(section("dataset"))?;
        let builtin = match dataset.as_ref().map(|d| &d.source) {
            Some(DatasetSource::Builtin(n)) => Some(n.clone()),
            _ => None,
        };
        let config = ExperimentConfig {
            interp: parse_interp(section("interp"), builtin.as_deref())?,
            model: parse_model(section("model"))?,
            protocol: parse_protocol(section("protocol"))?,
            output: parse_output(section("output"))?,
            bounds: parse_bounds(section("bounds"))?,
            dataset,
            canonical: canonical(&table)?,
        };
        Ok(config)
    }

    pub fn hash(&self) -> String {
        let digest = Sha256::digest(self.canonical.as_bytes());
        digest.iter().map(|b| format!("{b:02x}")).collect()
    }

    pub fn require_dataset(&self) -> Result<&DatasetConfig> {
        self.dataset
            .as_ref()
            .ok_or_else(|| cfg_err("dataset", "builtin", "no dataset configured (set builtin, generator or csv)"))
    }
}

/// Sorted rendering without the output location, which does not affect
/// results.
fn canonical(table: &Table) -> Result<String> {
    let mut t = table.clone();
    remove_value(&mut t, "output", "dir");
    if t.get("output").and_then(Value::as_table).is_some_and(Table::is_empty) {
        t.remove("output");
    }
    toml::to_string(&t).map_err(|e| cfg_err("", "", &e.to_string()))
}

pub fn parse_table(text: &str) -> Result<Table> {
    text.parse::<Table>().map_err(|e| {
        let line = e.span().map_or(0, |s| text[..s.start.min(text.len())].matches('\n').count() + 1);
        Error::Config { section: String::new(), key: format!("line {line}"), message: e.message().to_string() }
    })
}

/// Sets `section.key`, creating the section if needed. Used for command
/// line overrides so they take part in the config hash.
pub fn set_value(table: &mut Table, section: &str, key: &str, value: impl Into<Value>) {
    let entry = table.entry(section.to_string()).or_insert_with(|| Value::Table(Table::new()));
    if let Value::Table(t) = entry {
        t.insert(key.to_string(), value.into());
    }
}

pub fn remove_value(table: &mut Table, section: &str, key: &str) {
    if let Some(Value::Table(t)) = table.get_mut(section) {
        t.remove(key);
    }
}

fn cfg_err(section: &str, key: &str, message: &str) -> Error {
    Error::Config { section: section.to_string(), key: key.to_string(), message: message.to_string() }
}

struct Section<'a> {
    name: &'static str,
    table: &'a Table,
}

impl<'a> Section<'a> {
    fn new(name: &'static str, table: &'a Table) -> Self {
        Section { name, table }
    }

    fn err(&self, key: &str, message: impl AsRef<str>) -> Error {
        cfg_err(self.name, key, message.as_ref())
    }

    fn allow(&self, keys: &[&str]) -> Result<()> {
        match self.table.keys().find(|k| !keys.contains(&k.as_str())) {
            Some(k) => Err(self.err(k, format!("unknown key; expected one of: {}", keys.join(", ")))),
            None => Ok(()),
        }
    }

    fn has(&self, key: &str) -> bool {
        self.table.contains_key(key)
    }

    fn f64(&self, key: &str) -> Result<Option<f64>> {
        match self.table.get(key) {
            None => Ok(None),
            Some(Value::Float(v)) => Ok(Some(*v)),
            Some(Value::Integer(v)) => Ok(Some(*v as f64)),
            Some(_) => Err(self.err(key, "expected a number")),
        }
    }

    fn f64_or(&self, key: &str, default: f64) -> Result<f64> {
        Ok(self.f64(key)?.unwrap_or(default))
    }

    fn uint(&self, key: &str) -> Result<Option<u64>> {
        match self.table.get(key) {
            None => Ok(None),
            Some(Value::Integer(v)) if *v >= 0 => Ok(Some(*v as u64)),
            Some(_) => Err(self.err(key, "expected a non-negative integer")),
        }
    }

    fn usize_or(&self, key: &str, default: usize) -> Result<usize> {
        Ok(self.uint(key)?.map_or(default, |v| v as usize))
    }

    fn bool_or(&self, key: &str, default: bool) -> Result<bool> {
        match self.table.get(key) {
            None => Ok(default),
            Some(Value::Boolean(b)) => Ok(*b),
            Some(_) => Err(self.err(key, "expected true or false")),
        }
    }

    fn str(&self, key: &str) -> Result<Option<&'a str>> {
        match self.table.get(key) {
            None => Ok(None),
            Some(Value::String(s)) => Ok(Some(s.as_str())),
            Some(_) => Err(self.err(key, "expected a quoted string")),
        }
    }

    fn list(&self, key: &str) -> Result<Option<&'a Vec<Value>>> {
        match self.table.get(key) {
            None => Ok(None),
            Some(Value::Array(a)) => Ok(Some(a)),
            Some(_) => Err(self.err(key, "expected a [list]")),
        }
    }

    fn f64_list(&self, key: &str) -> Result<Option<Vec<f64>>> {
        let Some(items) = self.list(key)? else { return Ok(None) };
        items
            .iter()
            .map(|v| match v {
                Value::Float(f) => Ok(*f),
                Value::Integer(i) => Ok(*i as f64),
                _ => Err(self.err(key, "expected a list of numbers")),
            })
            .collect::<Result<Vec<_>>>()
            .map(Some)
    }

    fn pair(&self, key: &str, default: (f64, f64)) -> Result<(f64, f64)> {
        match self.f64_list(key)? {
            None => Ok(default),
            Some(v) if v.len() == 2 => Ok((v[0], v[1])),
            Some(_) => Err(self.err(key, "expected [low, high]")),
        }
    }

    fn exprs(&self, key: &str) -> Result<Vec<Expr>> {
        let Some(items) = self.list(key)? else { return Ok(Vec::new()) };
        items
            .iter()
            .map(|v| {
                let s = v.as_str().ok_or_else(|| self.err(key, "expected a list of quoted expressions"))?;
                parse_expr(s).map_err(|e| self.err(key, format!("`{s}`: {e}")))
            })
            .collect()
    }
}

fn parse_dataset(s: Section) -> Result<Option<DatasetConfig>> {
    s.allow(&[
        "builtin",
        "generator",
        "csv",
        "name",
        "samples",
        "inputs",
        "range",
        "noise_std",
        "noise",
        "nuisance",
        "seed",
    ])?;
    let seed = s.uint("seed")?.unwrap_or(0);
    let chosen = ["builtin", "generator", "csv"].into_iter().filter(|k| s.has(k)).collect::<Vec<_>>();
    if chosen.len() > 1 {
        return Err(s.err(chosen[1], format!("conflicts with `{}`; give exactly one data source", chosen[0])));
    }
    let source = if s.str("builtin")? == Some("all") {
        DatasetSource::Suite
    } else if let Some(name) = s.str("builtin")? {
        builtin_spec(name).map_err(|e| s.err("builtin", e.to_string()))?;
        DatasetSource::Builtin(name.to_string())
    } else if let Some(path) = s.str("csv")? {
        DatasetSource::Csv(PathBuf::from(path))
    } else if let Some(gen) = s.str("generator")? {
        let generator = parse_expr(gen).map_err(|e| s.err("generator", e.to_string()))?;
        let samples = s.usize_or("samples", 60)?;
        let inputs = s.usize_or("inputs", generator.max_var_index())?;
        let range = s.pair("range", (-1.0, 1.0))?;
        let mut noise_plan = Vec::new();
        if let Some(items) = s.list("noise")? {
            let mut segments = Vec::new();
            for item in items {
                let seg: Vec<f64> = item
                    .as_array()
                    .map(|a| a.iter().filter_map(|v| v.as_float().or(v.as_integer().map(|i| i as f64))).collect())
                    .unwrap_or_default();
                if seg.len() != 3 || seg[0] < 0.0 || seg[1] < 0.0 {
                    return Err(s.err("noise", "expected a list of [start, end, std] triples"));
                }
                segments.push(NoiseSegment { start: seg[0] as usize, end: seg[1] as usize, mean: 0.0, std: seg[2] });
            }
            noise_plan.push(NoiseLayer { shuffled: false, segments });
        } else {
            noise_plan.push(NoiseLayer::uniform(samples, 0.0, s.f64_or("noise_std", 0.0)?));
        }
        let spec = DatasetSpec {
            name: s.str("name")?.unwrap_or("custom").to_string(),
            generator,
            n_samples: samples,
            input_ranges: vec![range; inputs],
            noise_plan,
            nuisance_count: s.usize_or("nuisance", 0)?,
            nuisance_noise: (0.0, 1.0),
        };
        spec.validate().map_err(|e| s.err("generator", e.to_string()))?;
        DatasetSource::Spec(spec)
    } else {
        if let Some(k) = s.table.keys().next() {
            return Err(s.err(k, "dataset section needs one of builtin, generator or csv"));
        }
        return Ok(None);
    };
    Ok(Some(DatasetConfig { source, seed }))
}

fn parse_interp(s: Section, builtin: Option<&str>) -> Result<InterpConfig> {
    s.allow(&[
        "basis",
        "mu",
        "model",
        "swarm",
        "iterations",
        "inertia",
        "cognitive",
        "social",
        "bounds",
        "seed",
        "repeat",
        "centering",
    ])?;
    let mut basis = s.exprs("basis")?;
    if basis.is_empty() {
        if let Some(name) = builtin {
            basis = builtin_basis(name)?;
        }
    }
    let mu = s.f64_list("mu")?;
    if let Some(m) = &mu {
        if m.len() != basis.len() {
            return Err(s.err("mu", format!("{} coefficients for {} basis terms", m.len(), basis.len())));
        }
    }
    let d = PsoParams::default();
    let pso = PsoParams {
        swarm_size: s.usize_or("swarm", d.swarm_size)?,
        iterations: s.usize_or("iterations", d.iterations)?,
        inertia: s.f64_or("inertia", d.inertia)?,
        cognitive: s.f64_or("cognitive", d.cognitive)?,
        social: s.f64_or("social", d.social)?,
        position_bounds: s.pair("bounds", d.position_bounds)?,
        seed: s.uint("seed")?.unwrap_or(0),
    };
    pso.validate().map_err(|e| s.err("swarm", e.to_string()))?;
    let repeat = s.usize_or("repeat", 10)?;
    if repeat == 0 {
        return Err(s.err("repeat", "must be at least 1"));
    }
    let centering = match s.str("centering")? {
        None => Centering::Signed,
        Some(c) => c.parse().map_err(|e: Error| s.err("centering", e.to_string()))?,
    };
    Ok(InterpConfig { basis, mu, model_file: s.str("model")?.map(PathBuf::from), pso, repeat, centering })
}

fn parse_model(s: Section) -> Result<ModelConfig> {
    s.allow(&[
        "kernel",
        "width",
        "degree",
        "offset",
        "phi",
        "sigma",
        "tune",
        "width_range",
        "phi_range",
        "sigma_range",
        "grid",
        "grid_only",
        "max_iters",
        "tol",
        "weight_mse",
        "weight_id",
    ])?;
    let family: KernelFamily = match s.str("kernel")? {
        None => KernelFamily::Rbf,
        Some(k) => k.parse().map_err(|e: Error| s.err("kernel", e.to_string()))?,
    };
    let degree = s.uint("degree")?.unwrap_or(2);
    let offset = s.f64_or("offset", 1.0)?;
    let kernel = match family {
        KernelFamily::Rbf => KernelSpec::Rbf { width: s.f64_or("width", 1.0)? },
        KernelFamily::Linear => KernelSpec::Linear,
        KernelFamily::Polynomial => KernelSpec::Polynomial { degree: degree as u32, offset },
    };
    kernel.validate().map_err(|e| s.err("width", e.to_string()))?;
    let hyper = HyperParams { phi: s.f64_or("phi", 10.0)?, sigma: s.f64_or("sigma", 1.0)? };
    hyper.validate().map_err(|e| s.err(if hyper.phi > 0.0 { "sigma" } else { "phi" }, e.to_string()))?;
    let d = SearchSpace::default();
    let space = SearchSpace {
        width: s.pair("width_range", d.width)?,
        phi: s.pair("phi_range", d.phi)?,
        sigma: Some(s.pair("sigma_range", d.sigma.unwrap_or((0.0, 1e3)))?),
        grid_points: s.usize_or("grid", d.grid_points)?,
        grid_only: s.bool_or("grid_only", d.grid_only)?,
        simplex: SimplexParams {
            max_iters: s.usize_or("max_iters", d.simplex.max_iters)?,
            tol: s.f64_or("tol", d.simplex.tol)?,
            ..d.simplex
        },
        polynomial: (degree as u32, offset),
    };
    space.simplex.validate().map_err(|e| s.err("max_iters", e.to_string()))?;
    let weights = TuneWeights { mse: s.f64_or("weight_mse", 1.0)?, id: s.f64_or("weight_id", 1.0)? };
    if !(weights.mse >= 0.0 && weights.id >= 0.0 && weights.mse + weights.id > 0.0) {
        return Err(s.err("weight_mse", "weights must be >= 0 and not both zero"));
    }
    Ok(ModelConfig { kernel, hyper, tune: s.bool_or("tune", false)?, space, weights })
}

fn parse_protocol(s: Section) -> Result<ProtocolConfig> {
    s.allow(&["folds", "seed", "repeat", "normalize", "reference_metrics"])?;
    let p = ProtocolConfig {
        folds: s.usize_or("folds", 10)?,
        seed: s.uint("seed")?.unwrap_or(0),
        repeat: s.usize_or("repeat", 1)?,
        normalize: s.bool_or("normalize", true)?,
        reference_metrics: s.bool_or("reference_metrics", true)?,
    };
    if p.folds < 2 {
        return Err(s.err("folds", "need at least 2 folds"));
    }
    if p.repeat == 0 {
        return Err(s.err("repeat", "must be at least 1"));
    }
    Ok(p)
}

fn parse_output(s: Section) -> Result<OutputConfig> {
    s.allow(&["dir", "timing"])?;
    Ok(OutputConfig { dir: PathBuf::from(s.str("dir")?.unwrap_or("out")), timing: s.bool_or("timing", false)? })
}

fn parse_bounds(s: Section) -> Result<BoundsConfig> {
    s.allow(&["m", "delta", "M", "M_P", "tau", "D", "sigma_rho_sq", "C_E", "ell_E", "J_norm", "sweep", "values"])?;
    let d = BoundInputs::default();
    let inputs = BoundInputs {
        m: s.f64_or("m", d.m)?,
        delta: s.f64_or("delta", d.delta)?,
        big_m: s.f64_or("M", d.big_m)?,
        m_p: s.f64_or("M_P", d.m_p)?,
        tau: s.f64_or("tau", d.tau)?,
        d_norm: s.f64_or("D", d.d_norm)?,
        sigma_rho_sq: s.f64_or("sigma_rho_sq", d.sigma_rho_sq)?,
        c_e: s.f64_or("C_E", d.c_e)?,
        ell_e: s.f64_or("ell_E", d.ell_e)?,
        j_norm: s.f64_or("J_norm", d.j_norm)?,
    };
    let sweep = match s.str("sweep")? {
        None => None,
        Some(axis) => {
            let axis = match axis {
                "m" => SweepAxis::M,
                "delta" => SweepAxis::Delta,
                other => return Err(s.err("sweep", format!("unknown sweep axis `{other}`; expected m or delta"))),
            };
            let values = s
                .f64_list("values")?
                .filter(|v| !v.is_empty())
                .ok_or_else(|| s.err("values", "sweep needs a non-empty values list"))?;
            Some((axis, values))
        }
    };
    Ok(BoundsConfig { inputs, sweep })
}
