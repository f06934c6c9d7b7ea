use std::fs;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use ilssvm::bounds::{evaluate, BoundInputs, BoundRow};
use ilssvm::config::{parse_table, remove_value, set_value, ConfigTable as Table, ExperimentConfig, SweepAxis};
use ilssvm::data::{dataset_to_csv, inputs_from_csv, Dataset};
use ilssvm::experiment::{
    best_fit, expand_suite, fit_interp_runs, interp_for, load_dataset, resolve_interp, run_benchmark, train_full,
};
use ilssvm::interp::InterpModel;
use ilssvm::report::{benchmark_csv, benchmark_text, fmt_sig, interp_csv, interp_text, InterpRow, REPORT_DIGITS};
use ilssvm::svm::TrainedModel;
use ilssvm::{Error, Result};

#[derive(Parser)]
#[command(name = "ilssvm", version, about = "Interpretable LSSVM experiments")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Generate a dataset CSV and a metadata sidecar.
    Generate(DataArgs),
    /// Fit interpretation models by particle swarm and print their interpretation distances.
    FitInterp(FitInterpArgs),
    /// Train one model on the full dataset and save it.
    Train(TrainArgs),
    /// Predict with a saved model.
    Predict(PredictArgs),
    /// Cross-validate LSSVM against ILSSVM and print the metric report.
    Benchmark(BenchmarkArgs),
    /// Evaluate the equilibrium error bound.
    Bounds(BoundsArgs),
}

#[derive(Args, Clone)]
struct DataArgs {
    /// Experiment config file.
    #[arg(long)]
    config: Option<PathBuf>,
    /// Builtin dataset name, or `all` where supported.
    #[arg(long)]
    builtin: Option<String>,
    /// Dataset CSV with a `y` column.
    #[arg(long)]
    data: Option<PathBuf>,
    /// Dataset seed.
    #[arg(long)]
    seed: Option<u64>,
    /// Output directory.
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Args)]
struct FitInterpArgs {
    #[command(flatten)]
    data: DataArgs,
    /// Number of PSO runs.
    #[arg(long)]
    repeat: Option<u64>,
    /// Seed of the first PSO run.
    #[arg(long)]
    pso_seed: Option<u64>,
}

#[derive(Args, Clone)]
struct ModelArgs {
    #[arg(long)]
    kernel: Option<String>,
    #[arg(long)]
    width: Option<f64>,
    #[arg(long)]
    phi: Option<f64>,
    #[arg(long)]
    sigma: Option<f64>,
    /// Interpretation model file written by fit-interp.
    #[arg(long)]
    interp: Option<PathBuf>,
}

#[derive(Args)]
struct TrainArgs {
    #[command(flatten)]
    data: DataArgs,
    #[command(flatten)]
    model: ModelArgs,
}

#[derive(Args)]
struct PredictArgs {
    /// Model file written by train.
    #[arg(long)]
    model: PathBuf,
    /// CSV of inputs; `y` and `y_clean` columns are ignored.
    #[arg(long)]
    input: PathBuf,
    /// Output CSV; stdout when omitted.
    #[arg(long)]
    output: Option<PathBuf>,
}

#[derive(Args)]
struct BenchmarkArgs {
    #[command(flatten)]
    data: DataArgs,
    #[command(flatten)]
    model: ModelArgs,
    /// Run every builtin dataset.
    #[arg(long)]
    all: bool,
    /// Tune hyperparameters by cross-validation.
    #[arg(long)]
    tune: bool,
    #[arg(long)]
    folds: Option<u64>,
    /// Fold seed.
    #[arg(long)]
    fold_seed: Option<u64>,
    /// Include fold wall times in the report.
    #[arg(long)]
    timing: bool,
}

#[derive(Args)]
struct BoundsArgs {
    #[arg(long)]
    config: Option<PathBuf>,
    #[arg(long)]
    m: Option<f64>,
    #[arg(long)]
    delta: Option<f64>,
    /// Bound M on |f - y|.
    #[arg(long = "big-m")]
    big_m: Option<f64>,
    /// Bound M_P on the centered interpretation residual.
    #[arg(long)]
    m_p: Option<f64>,
    #[arg(long)]
    tau: Option<f64>,
    /// Operator norm D.
    #[arg(long = "d-norm")]
    d_norm: Option<f64>,
    #[arg(long)]
    sigma_rho_sq: Option<f64>,
    #[arg(long)]
    c_e: Option<f64>,
    #[arg(long)]
    ell_e: Option<f64>,
    /// Sweep `m` or `delta` over --values.
    #[arg(long)]
    sweep: Option<String>,
    #[arg(long, value_delimiter = ',')]
    values: Vec<f64>,
    /// Output CSV; stdout when omitted.
    #[arg(long)]
    output: Option<PathBuf>,
}

fn load_table(path: Option<&Path>) -> Result<Table> {
    match path {
        Some(p) => parse_table(&fs::read_to_string(p).map_err(|e| Error::Io(format!("{}: {e}", p.display())))?),
        None => Ok(Table::new()),
    }
}

fn apply_data_args(table: &mut Table, a: &DataArgs) {
    if let Some(b) = &a.builtin {
        for k in ["generator", "csv"] {
            remove_value(table, "dataset", k);
        }
        set_value(table, "dataset", "builtin", b.as_str());
    }
    if let Some(p) = &a.data {
        for k in ["generator", "builtin"] {
            remove_value(table, "dataset", k);
        }
        set_value(table, "dataset", "csv", p.to_string_lossy().as_ref());
    }
    if let Some(s) = a.seed {
        set_value(table, "dataset", "seed", s as i64);
    }
    if let Some(o) = &a.out {
        set_value(table, "output", "dir", o.to_string_lossy().as_ref());
    }
}

fn apply_model_args(table: &mut Table, a: &ModelArgs) {
    if let Some(k) = &a.kernel {
        set_value(table, "model", "kernel", k.as_str());
    }
    for (key, v) in [("width", a.width), ("phi", a.phi), ("sigma", a.sigma)] {
        if let Some(v) = v {
            set_value(table, "model", key, v);
        }
    }
    if let Some(p) = &a.interp {
        set_value(table, "interp", "model", p.to_string_lossy().as_ref());
    }
}

fn write_file(path: &Path, contents: &str) -> Result<()> {
    if let Some(dir) = path.parent().filter(|d| !d.as_os_str().is_empty()) {
        fs::create_dir_all(dir).map_err(|e| Error::Io(format!("{}: {e}", dir.display())))?;
    }
    fs::write(path, contents).map_err(|e| Error::Io(format!("{}: {e}", path.display())))
}

fn generate(a: DataArgs) -> Result<()> {
    let mut table = load_table(a.config.as_deref())?;
    apply_data_args(&mut table, &a);
    let cfg = ExperimentConfig::from_table(table)?;
    for d in expand_suite(cfg.require_dataset()?) {
        let ds = load_dataset(&d)?;
        let name = d.name();
        let csv = cfg.output.dir.join(format!("{name}.csv"));
        write_file(&csv, &dataset_to_csv(&ds))?;
        let meta = format!(
            "name = {name}\nseed = {}\nsamples = {}\ninputs = {}\nconfig_sha256 = {}\n# config\n{}",
            d.seed,
            ds.len(),
            ds.dim(),
            cfg.hash(),
            cfg.canonical
        );
        write_file(&cfg.output.dir.join(format!("{name}.meta")), &meta)?;
        println!("{}", csv.display());
    }
    Ok(())
}

fn fit_interp_cmd(a: FitInterpArgs) -> Result<()> {
    let mut table = load_table(a.data.config.as_deref())?;
    apply_data_args(&mut table, &a.data);
    if let Some(r) = a.repeat {
        set_value(&mut table, "interp", "repeat", r as i64);
    }
    if let Some(s) = a.pso_seed {
        set_value(&mut table, "interp", "seed", s as i64);
    }
    let cfg = ExperimentConfig::from_table(table)?;
    let mut rows = Vec::new();
    for d in expand_suite(cfg.require_dataset()?) {
        let ds = load_dataset(&d)?;
        let interp = interp_for(&cfg.interp, &d)?;
        if interp.basis.is_empty() {
            return Err(Error::Config {
                section: "interp".into(),
                key: "basis".into(),
                message: "no interpretation basis (set basis, or use a builtin dataset)".into(),
            });
        }
        let fits = fit_interp_runs(&ds, &interp.basis, &interp.pso, interp.repeat, interp.centering)?;
        let best = best_fit(&fits).expect("repeat >= 1");
        write_file(&cfg.output.dir.join(format!("{}.interp", d.name())), &best.model.to_text())?;
        rows.push(InterpRow { dataset: d.name(), runs: fits.iter().map(|f| f.id).collect() });
    }
    write_file(&cfg.output.dir.join("interp_fit.csv"), &interp_csv(&cfg.hash(), &rows))?;
    print!("{}", interp_text(&cfg.hash(), &rows));
    Ok(())
}

fn train_cmd(a: TrainArgs) -> Result<()> {
    let mut table = load_table(a.data.config.as_deref())?;
    apply_data_args(&mut table, &a.data);
    apply_model_args(&mut table, &a.model);
    let cfg = ExperimentConfig::from_table(table)?;
    let d = cfg.require_dataset()?;
    let ds = load_dataset(d)?;
    let interp =
        if cfg.model.hyper.sigma > 0.0 { Some(resolve_interp(&interp_for(&cfg.interp, d)?, &ds)?) } else { None };
    let model = train_full(&ds, interp.as_ref(), &cfg.model.kernel, &cfg.model.hyper, cfg.protocol.normalize)?;
    let path = cfg.output.dir.join(format!("{}.model", d.name()));
    write_file(&path, &model.to_text())?;
    println!("{}", path.display());
    Ok(())
}

fn predict_cmd(a: PredictArgs) -> Result<()> {
    let read = |p: &Path| fs::read_to_string(p).map_err(|e| Error::Io(format!("{}: {e}", p.display())));
    let model = TrainedModel::from_text(&read(&a.model)?)?;
    let (x, _) = inputs_from_csv(&read(&a.input)?)?;
    let pred = model.predict_raw(&x)?;
    let mut out = String::from("prediction\n");
    for v in pred {
        out.push_str(&format!("{v:.16e}\n"));
    }
    match a.output {
        Some(p) => write_file(&p, &out),
        None => {
            print!("{out}");
            Ok(())
        }
    }
}

fn benchmark_cmd(a: BenchmarkArgs) -> Result<()> {
    let mut table = load_table(a.data.config.as_deref())?;
    apply_data_args(&mut table, &a.data);
    apply_model_args(&mut table, &a.model);
    if a.all {
        apply_data_args(&mut table, &DataArgs { builtin: Some("all".into()), ..a.data.clone() });
    }
    if a.tune {
        set_value(&mut table, "model", "tune", true);
    }
    if let Some(k) = a.folds {
        set_value(&mut table, "protocol", "folds", k as i64);
    }
    if let Some(s) = a.fold_seed {
        set_value(&mut table, "protocol", "seed", s as i64);
    }
    if a.timing {
        set_value(&mut table, "output", "timing", true);
    }
    let cfg = ExperimentConfig::from_table(table)?;
    let mut reports = Vec::new();
    for d in expand_suite(cfg.require_dataset()?) {
        let ds: Dataset = load_dataset(&d)?;
        let interp: InterpModel = resolve_interp(&interp_for(&cfg.interp, &d)?, &ds)?;
        let bench = run_benchmark(&ds, &interp, &cfg.model, &cfg.protocol, cfg.interp.centering)?;
        reports.push(bench.dataset_report(&d.name()));
    }
    let hash = cfg.hash();
    let timing = cfg.output.timing;
    write_file(&cfg.output.dir.join("benchmark.csv"), &benchmark_csv(&hash, &reports, timing))?;
    let text = benchmark_text(&hash, &reports, timing);
    write_file(&cfg.output.dir.join("benchmark.txt"), &text)?;
    print!("{text}");
    Ok(())
}

fn bound_line(r: &BoundRow) -> String {
    [r.m, r.delta, r.theta, r.sample_error, r.total]
        .iter()
        .map(|v| fmt_sig(*v, REPORT_DIGITS))
        .collect::<Vec<_>>()
        .join(",")
}

fn bounds_cmd(a: BoundsArgs) -> Result<()> {
    let mut table = load_table(a.config.as_deref())?;
    let flags = [
        ("m", a.m),
        ("delta", a.delta),
        ("M", a.big_m),
        ("M_P", a.m_p),
        ("tau", a.tau),
        ("D", a.d_norm),
        ("sigma_rho_sq", a.sigma_rho_sq),
        ("C_E", a.c_e),
        ("ell_E", a.ell_e),
    ];
    for (key, v) in flags {
        if let Some(v) = v {
            set_value(&mut table, "bounds", key, v);
        }
    }
    if let Some(s) = &a.sweep {
        set_value(&mut table, "bounds", "sweep", s.as_str());
        set_value(&mut table, "bounds", "values", a.values.clone());
    }
    let cfg = ExperimentConfig::from_table(table)?;
    let base = &cfg.bounds.inputs;
    let inputs: Vec<BoundInputs> = match &cfg.bounds.sweep {
        None => vec![base.clone()],
        Some((axis, values)) => values
            .iter()
            .map(|&v| match axis {
                SweepAxis::M => BoundInputs { m: v, ..base.clone() },
                SweepAxis::Delta => BoundInputs { delta: v, ..base.clone() },
            })
            .collect(),
    };
    let mut out = format!("# config_sha256={}\nm,delta,theta_star,epsilon,total\n", cfg.hash());
    for i in &inputs {
        out.push_str(&bound_line(&evaluate(i)?));
        out.push('\n');
    }
    match a.output {
        Some(p) => write_file(&p, &out),
        None => {
            print!("{out}");
            Ok(())
        }
    }
}

fn run(cli: Cli) -> Result<()> {
    match cli.command {
        Command::Generate(a) => generate(a),
        Command::FitInterp(a) => fit_interp_cmd(a),
        Command::Train(a) => train_cmd(a),
        Command::Predict(a) => predict_cmd(a),
        Command::Benchmark(a) => benchmark_cmd(a),
        Command::Bounds(a) => bounds_cmd(a),
    }
}

fn main() -> ExitCode {
    match run(Cli::parse()) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            let message = e.to_string().replace(['\n', '\r'], " ");
            eprintln!("error kind={} message={message}", e.kind());
            ExitCode::FAILURE
        }
    }
}
