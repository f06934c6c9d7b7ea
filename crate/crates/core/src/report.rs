//! Interpretation-fit and benchmark reports as CSV and aligned text.

use std::fmt::Write as _;

use crate::tuning::{EvalReport, METRIC_NAMES};

/// Formats `v` with `digits` significant digits. Plain notation for
/// magnitudes in [1e-4, 1e7), scientific otherwise.
pub fn fmt_sig(v: f64, digits: usize) -> String {
    if v.is_nan() {
        return "NaN".into();
    }
    if v.is_infinite() {
        return if v > 0.0 { "inf".into() } else { "-inf".into() };
    }
    if v == 0.0 {
        return "0".into();
    }
    let digits = digits.max(1);
    let sci = format!("{:.*e}", digits - 1, v);
    let exp: i32 = sci.split_once('e').and_then(|(_, e)| e.parse().ok()).unwrap_or(0);
    if (-4..7).contains(&exp) {
        let decimals = (digits as i32 - 1 - exp).max(0) as usize;
        format!("{v:.decimals$}")
    } else {
        sci
    }
}

pub const REPORT_DIGITS: usize = 7;

fn lower_is_better(column: usize) -> bool {
    !matches!(METRIC_NAMES[column], "PPCC" | "R_SCC")
}

#[derive(Debug, Clone, PartialEq)]
pub struct MethodReport {
    pub method: String,
    pub report: EvalReport,
}

#[derive(Debug, Clone, PartialEq)]
pub struct DatasetReport {
    pub dataset: String,
    pub methods: Vec<MethodReport>,
}

impl DatasetReport {
    /// `best[m][c]` is true when method `m` has the best mean in column `c`.
    #[allow(clippy::needless_range_loop)]
    pub fn best_marks(&self, timing: bool) -> Vec<[bool; 6]> {
        let mut marks = vec![[false; 6]; self.methods.len()];
        for c in 0..METRIC_NAMES.len() {
            if c == 5 && !timing {
                continue;
            }
            let means: Vec<f64> = self.methods.iter().map(|m| m.report.summaries()[c].mean).collect();
            let best = means.iter().copied().filter(|v| !v.is_nan()).fold(None, |acc: Option<f64>, v| {
                Some(match acc {
                    None => v,
                    Some(a) if lower_is_better(c) => a.min(v),
                    Some(a) => a.max(v),
                })
            });
            if let Some(best) = best {
                for (m, v) in means.iter().enumerate() {
                    marks[m][c] = *v == best;
                }
            }
        }
        marks
    }
}

type StatRow<'a> = (&'static str, fn(&crate::metrics::MetricSummary) -> f64);

const STATS: [StatRow; 3] = [("mean", |s| s.mean), ("VAR", |s| s.variance), ("STD", |s| s.std)];

fn cell(value: f64, column: usize, timing: bool) -> String {
    if column == 5 && !timing {
        "-".into()
    } else {
        fmt_sig(value, REPORT_DIGITS)
    }
}

/// Rows `dataset,method,stat,<metrics>,best` where `best` lists the columns
/// whose mean is the best among the dataset's methods.
pub fn benchmark_csv(config_hash: &str, datasets: &[DatasetReport], timing: bool) -> String {
    let mut out = format!("# config_sha256={config_hash}\n");
    let _ = writeln!(out, "dataset,method,stat,{},best", METRIC_NAMES.join(","));
    for ds in datasets {
        let marks = ds.best_marks(timing);
        for (m, method) in ds.methods.iter().enumerate() {
            for (stat, get) in STATS {
                let values: Vec<String> =
                    method.report.summaries().iter().enumerate().map(|(c, s)| cell(get(s), c, timing)).collect();
                let best = if stat == "mean" {
                    (0..6).filter(|&c| marks[m][c]).map(|c| METRIC_NAMES[c]).collect::<Vec<_>>().join(";")
                } else {
                    String::new()
                };
                let _ = writeln!(out, "{},{},{},{},{}", ds.dataset, method.method, stat, values.join(","), best);
            }
        }
    }
    out
}

fn aligned(rows: &[Vec<String>]) -> String {
    let cols = rows.iter().map(Vec::len).max().unwrap_or(0);
    let widths: Vec<usize> =
        (0..cols).map(|c| rows.iter().filter_map(|r| r.get(c)).map(String::len).max().unwrap_or(0)).collect();
    let mut out = String::new();
    for row in rows {
        let line: Vec<String> = row.iter().enumerate().map(|(c, s)| format!("{s:<w$}", w = widths[c])).collect();
        out.push_str(line.join("  ").trim_end());
        out.push('\n');
    }
    out
}

/// Human-readable benchmark report; best means carry a trailing `*`.
pub fn benchmark_text(config_hash: &str, datasets: &[DatasetReport], timing: bool) -> String {
    let mut rows = vec![["dataset", "method", "stat"]
        .iter()
        .map(|s| s.to_string())
        .chain(METRIC_NAMES.iter().map(|s| s.to_string()))
        .collect::<Vec<_>>()];
    for ds in datasets {
        let marks = ds.best_marks(timing);
        for (m, method) in ds.methods.iter().enumerate() {
            for (stat, get) in STATS {
                let mut row = vec![ds.dataset.clone(), method.method.clone(), stat.to_string()];
                for (c, s) in method.report.summaries().iter().enumerate() {
                    let mut v = cell(get(s), c, timing);
                    if stat == "mean" && marks[m][c] {
                        v.push('*');
                    }
                    row.push(v);
                }
                rows.push(row);
            }
        }
    }
    format!("# config sha256: {config_hash}\n{}", aligned(&rows))
}

/// One interpretation-fit row: per-run interpretation distances and their average.
#[derive(Debug, Clone, PartialEq)]
pub struct InterpRow {
    pub dataset: String,
    pub runs: Vec<f64>,
}

impl InterpRow {
    pub fn average(&self) -> f64 {
        self.runs.iter().sum::<f64>() / self.runs.len() as f64
    }
}

fn interp_rows(rows: &[InterpRow]) -> Vec<Vec<String>> {
    let runs = rows.iter().map(|r| r.runs.len()).max().unwrap_or(0);
    let mut header = vec!["dataset".to_string()];
    header.extend((1..=runs).map(|i| format!("run{i}")));
    header.push("average".into());
    let mut out = vec![header];
    for r in rows {
        let mut line = vec![r.dataset.clone()];
        line.extend(r.runs.iter().map(|v| fmt_sig(*v, REPORT_DIGITS)));
        line.extend(std::iter::repeat_n(String::new(), runs - r.runs.len()));
        line.push(fmt_sig(r.average(), REPORT_DIGITS));
        out.push(line);
    }
    out
}

pub fn interp_csv(config_hash: &str, rows: &[InterpRow]) -> String {
    let mut out = format!("# config_sha256={config_hash}\n");
    for line in interp_rows(rows) {
        out.push_str(&line.join(","));
        out.push('\n');
    }
    out
}

pub fn interp_text(config_hash: &str, rows: &[InterpRow]) -> String {
    format!("# config sha256: {config_hash}\n{}", aligned(&interp_rows(rows)))
}
