//! Benchmark dataset generation, min-max normalization and CSV I/O.

use std::fmt::Write as _;
use std::path::Path;

use nalgebra::DMatrix;

use crate::error::{Error, Result};
use crate::expr::{parse_expr, Expr};
use crate::rng::Rng;

/// Samples with noisy targets and, for generated data, the noise-free ones.
#[derive(Debug, Clone, PartialEq)]
pub struct Dataset {
    pub x: DMatrix<f64>,
    pub y: Vec<f64>,
    pub y_clean: Option<Vec<f64>>,
    pub attr_names: Vec<String>,
    pub name: String,
    pub seed: u64,
}

impl Dataset {
    pub fn new(
        x: DMatrix<f64>,
        y: Vec<f64>,
        y_clean: Option<Vec<f64>>,
        attr_names: Vec<String>,
        name: impl Into<String>,
        seed: u64,
    ) -> Result<Dataset> {
        let n = x.nrows();
        if y.len() != n {
            return Err(Error::LengthMismatch { left: n, right: y.len() });
        }
        if let Some(c) = &y_clean {
            if c.len() != n {
                return Err(Error::LengthMismatch { left: n, right: c.len() });
            }
        }
        if attr_names.len() != x.ncols() {
            return Err(Error::DimensionMismatch { expected: x.ncols(), got: attr_names.len() });
        }
        for (i, a) in attr_names.iter().enumerate() {
            if attr_names[..i].contains(a) {
                return Err(Error::invalid(format!("duplicate attribute name `{a}`")));
            }
        }
        Ok(Dataset { x, y, y_clean, attr_names, name: name.into(), seed })
    }

    pub fn len(&self) -> usize {
        self.x.nrows()
    }

    pub fn is_empty(&self) -> bool {
        self.x.nrows() == 0
    }

    pub fn dim(&self) -> usize {
        self.x.ncols()
    }

    /// Rows selected by `idx`, in that order.
    pub fn subset(&self, idx: &[usize]) -> Dataset {
        let x = self.x.select_rows(idx);
        let pick = |v: &[f64]| idx.iter().map(|&i| v[i]).collect::<Vec<_>>();
        Dataset {
            x,
            y: pick(&self.y),
            y_clean: self.y_clean.as_deref().map(pick),
            attr_names: self.attr_names.clone(),
            name: self.name.clone(),
            seed: self.seed,
        }
    }
}

pub fn default_attr_names(d: usize) -> Vec<String> {
    (1..=d).map(|i| format!("x{i}")).collect()
}

/// One Gaussian noise block applied to rows `start..end`.
#[derive(Debug, Clone, PartialEq)]
pub struct NoiseSegment {
    pub start: usize,
    pub end: usize,
    pub mean: f64,
    pub std: f64,
}

/// A set of disjoint noise segments. When `shuffled`, segment ranges index
/// into a seeded permutation of the rows rather than the rows themselves.
/// Layers are additive.
#[derive(Debug, Clone, PartialEq)]
pub struct NoiseLayer {
    pub shuffled: bool,
    pub segments: Vec<NoiseSegment>,
}

impl NoiseLayer {
    pub fn uniform(n: usize, mean: f64, std: f64) -> NoiseLayer {
        NoiseLayer { shuffled: false, segments: vec![NoiseSegment { start: 0, end: n, mean, std }] }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct DatasetSpec {
    pub name: String,
    pub generator: Expr,
    pub n_samples: usize,
    pub input_ranges: Vec<(f64, f64)>,
    pub noise_plan: Vec<NoiseLayer>,
    pub nuisance_count: usize,
    pub nuisance_noise: (f64, f64),
}

impl DatasetSpec {
    pub fn validate(&self) -> Result<()> {
        if self.n_samples == 0 {
            return Err(Error::invalid("n_samples must be positive"));
        }
        for (i, &(lo, hi)) in self.input_ranges.iter().enumerate() {
            if !(lo < hi) {
                return Err(Error::invalid(format!("input range {} has low >= high", i + 1)));
            }
        }
        let d = self.input_ranges.len();
        let needed = self.generator.max_var_index();
        if needed > d {
            return Err(Error::invalid(format!("generator references x{needed} but only {d} inputs are declared")));
        }
        for layer in &self.noise_plan {
            let mut segs: Vec<&NoiseSegment> = layer.segments.iter().collect();
            segs.sort_by_key(|s| s.start);
            for (k, s) in segs.iter().enumerate() {
                if s.start >= s.end || s.end > self.n_samples {
                    return Err(Error::invalid(format!(
                        "noise range {}..{} is empty or outside 0..{}",
                        s.start, s.end, self.n_samples
                    )));
                }
                if !(s.std >= 0.0) {
                    return Err(Error::invalid("noise standard deviation must be >= 0"));
                }
                if k > 0 && segs[k - 1].end > s.start {
                    return Err(Error::invalid(format!(
                        "noise ranges {}..{} and {}..{} overlap",
                        segs[k - 1].start,
                        segs[k - 1].end,
                        s.start,
                        s.end
                    )));
                }
            }
        }
        if !(self.nuisance_noise.1 >= 0.0) {
            return Err(Error::invalid("nuisance standard deviation must be >= 0"));
        }
        Ok(())
    }

    pub fn input_dim(&self) -> usize {
        self.input_ranges.len()
    }
}

/// Draws inputs, then noise layers in order, then nuisance columns, all from
/// one stream seeded with `seed`.
pub fn generate_dataset(spec: &DatasetSpec, seed: u64) -> Result<Dataset> {
    spec.validate()?;
    let n = spec.n_samples;
    let d = spec.input_dim();
    let total_d = d + spec.nuisance_count;
    let mut rng = Rng::new(seed);

    let mut x = DMatrix::zeros(n, total_d);
    for i in 0..n {
        for (j, &(lo, hi)) in spec.input_ranges.iter().enumerate() {
            x[(i, j)] = rng.uniform_in(lo, hi);
        }
    }

    let mut y_clean = Vec::with_capacity(n);
    let mut row = vec![0.0; d];
    for i in 0..n {
        for j in 0..d {
            row[j] = x[(i, j)];
        }
        y_clean.push(spec.generator.eval(&row).map_err(|e| e.at_row(i))?);
    }

    let mut y = y_clean.clone();
    for layer in &spec.noise_plan {
        let order: Vec<usize> = if layer.shuffled { rng.permutation(n) } else { (0..n).collect() };
        for seg in &layer.segments {
            for &row in &order[seg.start..seg.end] {
                y[row] += rng.gaussian(seg.mean, seg.std);
            }
        }
    }

    let (nm, ns) = spec.nuisance_noise;
    for i in 0..n {
        for j in d..total_d {
            x[(i, j)] = rng.gaussian(nm, ns);
        }
    }

    Dataset::new(x, y, Some(y_clean), default_attr_names(total_d), spec.name.clone(), seed)
}

pub const BUILTIN_NAMES: [&str; 8] =
    ["friedman1", "friedman2", "gabor1", "gabor2", "multi1", "multi2", "plane1", "plane2"];

pub const FRIEDMAN: &str = "10*sin(pi*x1*x2) + 20*(x3-0.5)^2 + 10*x4 + 5*x5";
pub const PLANE: &str = "0.6*x1 + 0.3*x2";
pub const MULTI: &str = "0.79 + 1.27*x1*x2 + 1.56*x1*x4 + 3.42*x2*x5 + 2.06*x3*x4*x5";
pub const GABOR: &str = "pi*exp(-2*(x1^2+x2^2))*cos(2*pi*(x1+x2))/2";

/// Friedman and friedman2 use 60 rows so that the 30/30 and 20/20/20 noise
/// splits cover the data exactly.
pub fn builtin_spec(name: &str) -> Result<DatasetSpec> {
    let unknown =
        || Error::invalid(format!("unknown builtin dataset `{name}`; valid names: {}", BUILTIN_NAMES.join(", ")));
    let n = 60;
    let seg = |start, end, std| NoiseSegment { start, end, mean: 0.0, std };
    let friedman_base = NoiseLayer { shuffled: true, segments: vec![seg(0, 30, 1.0), seg(30, 60, 5.0)] };
    let (generator, d, range, noise_plan, nuisance) = match name {
        "friedman1" => (FRIEDMAN, 5, (0.0, 1.0), vec![friedman_base], 0),
        "friedman2" => (
            FRIEDMAN,
            5,
            (0.0, 1.0),
            vec![
                friedman_base,
                NoiseLayer { shuffled: false, segments: vec![seg(0, 20, 1.0), seg(20, 40, 2.0), seg(40, 60, 3.0)] },
            ],
            0,
        ),
        "plane1" | "plane2" => {
            (PLANE, 2, (-1.0, 1.0), vec![NoiseLayer::uniform(n, 0.0, 1.0)], usize::from(name == "plane2"))
        }
        "multi1" | "multi2" => {
            (MULTI, 5, (-1.0, 1.0), vec![NoiseLayer::uniform(n, 0.0, 1.0)], if name == "multi2" { 5 } else { 0 })
        }
        "gabor1" => (GABOR, 2, (-1.0, 1.0), vec![NoiseLayer::uniform(n, 0.0, 1.0)], 0),
        "gabor2" => (
            GABOR,
            2,
            (-1.0, 1.0),
            vec![NoiseLayer { shuffled: false, segments: vec![seg(0, 30, 0.1), seg(30, 60, 0.5)] }],
            0,
        ),
        _ => return Err(unknown()),
    };
    Ok(DatasetSpec {
        name: name.to_string(),
        generator: parse_expr(generator).expect("builtin generator parses"),
        n_samples: n,
        input_ranges: vec![range; d],
        noise_plan,
        nuisance_count: nuisance,
        nuisance_noise: (0.0, 1.0),
    })
}

/// The generator's additive terms (without the constant), used as the
/// default interpretation basis for each builtin.
pub fn builtin_basis(name: &str) -> Result<Vec<Expr>> {
    let terms: &[&str] = match name {
        "friedman1" | "friedman2" => &["sin(pi*x1*x2)", "(x3-0.5)^2", "x4", "x5"],
        "plane1" | "plane2" => &["x1", "x2"],
        "multi1" | "multi2" => &["x1*x2", "x1*x4", "x2*x5", "x3*x4*x5"],
        "gabor1" | "gabor2" => &["exp(-2*(x1^2+x2^2))*cos(2*pi*(x1+x2))"],
        _ => return builtin_spec(name).map(|_| Vec::new()),
    };
    Ok(terms.iter().map(|t| parse_expr(t).expect("builtin basis parses")).collect())
}

pub fn generate_builtin(name: &str, seed: u64) -> Result<Dataset> {
    generate_dataset(&builtin_spec(name)?, seed)
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ColumnRange {
    pub min: f64,
    pub max: f64,
}

impl ColumnRange {
    fn of(values: impl Iterator<Item = f64>) -> ColumnRange {
        let mut r = ColumnRange { min: f64::INFINITY, max: f64::NEG_INFINITY };
        for v in values {
            r.min = r.min.min(v);
            r.max = r.max.max(v);
        }
        r
    }

    pub fn forward(&self, v: f64) -> f64 {
        2.0 * (v - self.min) / (self.max - self.min) - 1.0
    }

    pub fn inverse(&self, v: f64) -> f64 {
        (v + 1.0) * (self.max - self.min) / 2.0 + self.min
    }

    /// Multiplier applied to differences by `forward`.
    pub fn scale(&self) -> f64 {
        2.0 / (self.max - self.min)
    }
}

/// Per-column ranges mapping each input and the target onto [-1, 1].
#[derive(Debug, Clone, PartialEq)]
pub struct NormParams {
    pub inputs: Vec<ColumnRange>,
    pub target: ColumnRange,
}

impl NormParams {
    pub fn fit(ds: &Dataset) -> Result<NormParams> {
        let mut inputs = Vec::with_capacity(ds.dim());
        for j in 0..ds.dim() {
            let r = ColumnRange::of(ds.x.column(j).iter().copied());
            if !(r.max > r.min) {
                return Err(Error::ConstantColumn(ds.attr_names[j].clone()));
            }
            inputs.push(r);
        }
        let target = ColumnRange::of(ds.y.iter().copied());
        if !(target.max > target.min) {
            return Err(Error::ConstantColumn("y".into()));
        }
        Ok(NormParams { inputs, target })
    }

    pub fn identity(d: usize) -> NormParams {
        let unit = ColumnRange { min: -1.0, max: 1.0 };
        NormParams { inputs: vec![unit; d], target: unit }
    }

    pub fn apply_inputs(&self, x: &DMatrix<f64>) -> Result<DMatrix<f64>> {
        if x.ncols() != self.inputs.len() {
            return Err(Error::DimensionMismatch { expected: self.inputs.len(), got: x.ncols() });
        }
        Ok(DMatrix::from_fn(x.nrows(), x.ncols(), |i, j| self.inputs[j].forward(x[(i, j)])))
    }

    pub fn apply_target(&self, values: &[f64]) -> Vec<f64> {
        values.iter().map(|&v| self.target.forward(v)).collect()
    }

    pub fn invert_target(&self, values: &[f64]) -> Vec<f64> {
        values.iter().map(|&v| self.target.inverse(v)).collect()
    }
}

pub fn normalize_minmax(ds: &Dataset) -> Result<(Dataset, NormParams)> {
    let params = NormParams::fit(ds)?;
    Ok((apply_norm(&params, ds)?, params))
}

pub fn apply_norm(params: &NormParams, ds: &Dataset) -> Result<Dataset> {
    Ok(Dataset {
        x: params.apply_inputs(&ds.x)?,
        y: params.apply_target(&ds.y),
        y_clean: ds.y_clean.as_deref().map(|c| params.apply_target(c)),
        attr_names: ds.attr_names.clone(),
        name: ds.name.clone(),
        seed: ds.seed,
    })
}

pub fn invert_norm(params: &NormParams, values: &[f64]) -> Vec<f64> {
    params.invert_target(values)
}

fn fmt_value(v: f64) -> String {
    format!("{v:.16e}")
}

pub fn dataset_to_csv(ds: &Dataset) -> String {
    let mut out = String::new();
    let mut header: Vec<&str> = ds.attr_names.iter().map(String::as_str).collect();
    header.push("y");
    if ds.y_clean.is_some() {
        header.push("y_clean");
    }
    out.push_str(&header.join(","));
    out.push('\n');
    for i in 0..ds.len() {
        let mut cells: Vec<String> = (0..ds.dim()).map(|j| fmt_value(ds.x[(i, j)])).collect();
        cells.push(fmt_value(ds.y[i]));
        if let Some(c) = &ds.y_clean {
            cells.push(fmt_value(c[i]));
        }
        let _ = writeln!(out, "{}", cells.join(","));
    }
    out
}

struct NumericTable {
    columns: Vec<String>,
    rows: Vec<Vec<f64>>,
}

fn read_numeric_csv(text: &str) -> Result<NumericTable> {
    let mut reader = csv::ReaderBuilder::new().comment(Some(b'#')).trim(csv::Trim::All).from_reader(text.as_bytes());
    let csv_err = |e: csv::Error| Error::Csv {
        line: e.position().map_or(0, |p| p.line() as usize),
        message: match e.kind() {
            csv::ErrorKind::UnequalLengths { expected_len, len, .. } => {
                format!("expected {expected_len} cells, found {len}")
            }
            _ => e.to_string(),
        },
    };
    let columns: Vec<String> = reader.headers().map_err(csv_err)?.iter().map(str::to_string).collect();
    if columns.is_empty() || (columns.len() == 1 && columns[0].is_empty()) {
        return Err(Error::Csv { line: 1, message: "empty file".into() });
    }
    if columns.iter().any(String::is_empty) {
        return Err(Error::Csv { line: 1, message: "empty column name in header".into() });
    }
    let mut rows = Vec::new();
    for record in reader.records() {
        let record = record.map_err(csv_err)?;
        let line = record.position().map_or(0, |p| p.line() as usize);
        let row = record
            .iter()
            .map(|c| c.parse::<f64>().map_err(|_| Error::Csv { line, message: format!("non-numeric cell `{c}`") }))
            .collect::<Result<Vec<_>>>()?;
        rows.push(row);
    }
    Ok(NumericTable { columns, rows })
}

pub fn dataset_from_csv(text: &str, name: &str) -> Result<Dataset> {
    let NumericTable { columns: cols, rows } = read_numeric_csv(text)?;
    let y_idx =
        cols.iter().position(|c| c == "y").ok_or(Error::Csv { line: 1, message: "missing column `y`".into() })?;
    let clean_idx = cols.iter().position(|c| c == "y_clean");
    let attr_idx: Vec<usize> = (0..cols.len()).filter(|&i| i != y_idx && Some(i) != clean_idx).collect();
    if attr_idx.is_empty() {
        return Err(Error::Csv { line: 1, message: "no attribute columns".into() });
    }
    let n = rows.len();
    let x = DMatrix::from_fn(n, attr_idx.len(), |i, j| rows[i][attr_idx[j]]);
    let y = rows.iter().map(|r| r[y_idx]).collect();
    let y_clean = clean_idx.map(|c| rows.iter().map(|r| r[c]).collect());
    let names = attr_idx.iter().map(|&i| cols[i].clone()).collect();
    Dataset::new(x, y, y_clean, names, name, 0)
}

/// Attribute columns of a CSV, ignoring `y` and `y_clean` when present.
pub fn inputs_from_csv(text: &str) -> Result<(DMatrix<f64>, Vec<String>)> {
    let NumericTable { columns, rows } = read_numeric_csv(text)?;
    let keep: Vec<usize> = (0..columns.len()).filter(|&i| columns[i] != "y" && columns[i] != "y_clean").collect();
    if keep.is_empty() {
        return Err(Error::Csv { line: 1, message: "no attribute columns".into() });
    }
    let x = DMatrix::from_fn(rows.len(), keep.len(), |i, j| rows[i][keep[j]]);
    Ok((x, keep.iter().map(|&i| columns[i].clone()).collect()))
}

pub fn write_csv(ds: &Dataset, path: impl AsRef<Path>) -> Result<()> {
    std::fs::write(path, dataset_to_csv(ds))?;
    Ok(())
}

pub fn read_csv(path: impl AsRef<Path>) -> Result<Dataset> {
    let path = path.as_ref();
    let text = std::fs::read_to_string(path)?;
    let name = path.file_stem().and_then(|s| s.to_str()).unwrap_or("data");
    dataset_from_csv(&text, name)
}
