//! Plot-ready CSV and JSON artifacts.

use std::fmt::Write as _;
use std::fs::{self, File};
use std::io::{BufWriter, Write};
use std::path::{Path, PathBuf};

use oltr_core::evaluation::{t_test_two_tailed, ComparisonReport};
use serde::Serialize;

use crate::error::{CliError, CliResult};
use crate::experiment::{ExperimentSummary, RunResult};

pub const CURVES_HEADER: [&str; 5] = ["run_id", "impression", "displayed_ndcg", "offline_ndcg", "phase"];
pub const RUNS_HEADER: [&str; 7] = [
    "run_id",
    "repeat",
    "fold",
    "seed",
    "online_performance",
    "final_offline_ndcg",
    "switch_impression",
];

/// Paths written by [`emit_outputs`].
#[derive(Debug, Clone)]
pub struct OutputPaths {
    pub curves: PathBuf,
    pub summary: PathBuf,
    pub table: PathBuf,
    /// One per-run CSV per condition, in config order.
    pub runs: Vec<PathBuf>,
}

impl OutputPaths {
    pub fn in_dir(dir: &Path, summary: &ExperimentSummary) -> Self {
        OutputPaths {
            curves: dir.join("curves.csv"),
            summary: dir.join("summary.json"),
            table: dir.join("table.txt"),
            runs: summary
                .conditions
                .iter()
                .map(|c| dir.join(format!("runs_{}.csv", c.name)))
                .collect(),
        }
    }
}

pub fn write_json<V: Serialize + ?Sized>(path: &Path, value: &V) -> CliResult<()> {
    let text = serde_json::to_string_pretty(value).expect("outputs always serialize");
    fs::write(path, text + "\n").map_err(|e| CliError::io(path, e))
}

fn csv_writer(path: &Path) -> CliResult<csv::Writer<BufWriter<File>>> {
    let file = File::create(path).map_err(|e| CliError::io(path, e))?;
    Ok(csv::Writer::from_writer(BufWriter::new(file)))
}

fn curve_rows<W: Write>(w: &mut csv::Writer<W>, result: &RunResult) -> csv::Result<()> {
    for rec in &result.trace.records {
        w.write_record([
            result.record.run_id.as_str(),
            &rec.t.to_string(),
            &rec.displayed_ndcg.to_string(),
            &rec.offline_ndcg.map(|v| v.to_string()).unwrap_or_default(),
            rec.phase.as_str(),
        ])?;
    }
    Ok(())
}

/// Learning curve of a single run, in the `curves.csv` layout.
pub fn write_run_curve(path: &Path, result: &RunResult) -> CliResult<()> {
    let mut w = csv_writer(path)?;
    w.write_record(CURVES_HEADER)
        .and_then(|_| curve_rows(&mut w, result))
        .and_then(|_| w.flush().map_err(Into::into))
        .map_err(|e| CliError::csv(path, e))
}

pub fn write_curves(path: &Path, results: &[RunResult]) -> CliResult<()> {
    let mut w = csv_writer(path)?;
    let mut go = || -> csv::Result<()> {
        w.write_record(CURVES_HEADER)?;
        for r in results {
            curve_rows(&mut w, r)?;
        }
        w.flush()?;
        Ok(())
    };
    go().map_err(|e| CliError::csv(path, e))
}

pub fn write_runs(path: &Path, summary: &ExperimentSummary, condition: &str) -> CliResult<()> {
    let mut w = csv_writer(path)?;
    let mut go = || -> csv::Result<()> {
        w.write_record(RUNS_HEADER)?;
        for r in summary.runs_of(condition) {
            w.write_record([
                r.run_id.clone(),
                r.repeat.to_string(),
                r.fold.to_string(),
                r.seed.to_string(),
                r.online_performance.to_string(),
                r.final_offline_ndcg.to_string(),
                r.switch_impression.map(|t| t.to_string()).unwrap_or_default(),
            ])?;
        }
        w.flush()?;
        Ok(())
    };
    go().map_err(|e| CliError::csv(path, e))
}

fn cell(mean: f64, std: f64, precision: usize, report: Option<&ComparisonReport>) -> String {
    let marker = report.map_or("", |r| r.significance().marker());
    format!("{mean:.precision$} ({std:.precision$}){marker}")
}

/// Text table with one row per condition and markers for significant
/// differences from the baseline.
pub fn render_table(summary: &ExperimentSummary) -> String {
    let mut rows = vec![[
        "condition".to_string(),
        "algorithm".to_string(),
        "click model".to_string(),
        "runs".to_string(),
        "online".to_string(),
        "offline".to_string(),
    ]];
    for c in &summary.conditions {
        let name = if summary.baseline.as_deref() == Some(c.name.as_str()) {
            format!("{} (baseline)", c.name)
        } else {
            c.name.clone()
        };
        rows.push([
            name,
            c.algorithm.as_str().to_string(),
            c.click_model.clone(),
            c.runs.to_string(),
            cell(
                c.online_mean,
                c.online_std,
                1,
                c.vs_baseline.as_ref().map(|b| &b.online_performance),
            ),
            cell(
                c.offline_mean,
                c.offline_std,
                3,
                c.vs_baseline.as_ref().map(|b| &b.final_offline_ndcg),
            ),
        ]);
    }
    let widths: Vec<usize> = (0..6)
        .map(|i| rows.iter().map(|r| r[i].chars().count()).max().unwrap_or(0))
        .collect();
    let mut out = String::new();
    for row in &rows {
        let mut line = String::new();
        for (i, text) in row.iter().enumerate() {
            let pad = widths[i] - text.chars().count();
            let _ = write!(line, "{text}{}  ", " ".repeat(pad));
        }
        out.push_str(line.trim_end());
        out.push('\n');
    }
    out.push_str("\n\u{25b5}/\u{25b4}: better than baseline at p < 0.05 / p < 0.01; \u{25bf}/\u{25be}: worse.\n");
    out
}

/// Writes curves, summary, table and per-condition run files.
pub fn emit_outputs(summary: &ExperimentSummary, results: &[RunResult], paths: &OutputPaths) -> CliResult<()> {
    for p in [&paths.curves, &paths.summary, &paths.table] {
        if let Some(parent) = p.parent() {
            fs::create_dir_all(parent).map_err(|e| CliError::io(parent, e))?;
        }
    }
    write_curves(&paths.curves, results)?;
    fs::write(&paths.summary, summary.canonical_json()).map_err(|e| CliError::io(&paths.summary, e))?;
    fs::write(&paths.table, render_table(summary)).map_err(|e| CliError::io(&paths.table, e))?;
    for (c, path) in summary.conditions.iter().zip(&paths.runs) {
        write_runs(path, summary, &c.name)?;
    }
    Ok(())
}

/// Reads one numeric column from a CSV with a header row. Empty cells are
/// skipped.
pub fn read_column(path: &Path, column: &str) -> CliResult<Vec<f64>> {
    let mut reader = csv::Reader::from_path(path).map_err(|e| CliError::csv(path, e))?;
    let headers = reader.headers().map_err(|e| CliError::csv(path, e))?.clone();
    let index = headers
        .iter()
        .position(|h| h == column)
        .ok_or_else(|| CliError::invalid("column", format!("{} has no column {column:?}", path.display())))?;
    let mut values = Vec::new();
    for (line, row) in reader.records().enumerate() {
        let row = row.map_err(|e| CliError::csv(path, e))?;
        let text = row.get(index).unwrap_or("").trim();
        if text.is_empty() {
            continue;
        }
        let v = text.parse().map_err(|_| {
            CliError::invalid(
                "column",
                format!("{} row {}: {text:?} is not a number", path.display(), line + 2),
            )
        })?;
        values.push(v);
    }
    Ok(values)
}

/// Two-tailed test of column `column` in `a` against the same column in `b`.
pub fn ttest_files(a: &Path, b: &Path, column: &str) -> CliResult<ComparisonReport> {
    Ok(t_test_two_tailed(&read_column(a, column)?, &read_column(b, column)?)?)
}
