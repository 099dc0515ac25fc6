//! CSV trajectories, JSON summaries and error records.

use std::fs;
use std::path::Path;

use serde::Serialize;
use spstiefel::solver::IterRow;
use spstiefel::Mat;

use crate::experiment::RunResult;
use crate::mtx::write_matrix_market;
use crate::{fmt_f64, CliError};

pub const TRAJECTORY_COLUMNS: [&str; 6] = ["iter", "fval", "gradf", "feasi", "t_k", "backtracks"];

fn csv_err(path: &Path, e: csv::Error) -> CliError {
    CliError::Report(format!("{}: {e}", path.display()))
}

fn row_fields(r: &IterRow) -> [String; 6] {
    [
        r.iter.to_string(),
        fmt_f64(r.f),
        fmt_f64(r.gradf),
        fmt_f64(r.feasi),
        fmt_f64(r.t),
        r.backtracks.to_string(),
    ]
}

/// One trajectory; the iterate at `iter = 0` is the starting point.
pub fn write_trajectory(path: &Path, rows: &[IterRow]) -> Result<(), CliError> {
    let mut w = csv::Writer::from_path(path).map_err(|e| csv_err(path, e))?;
    w.write_record(TRAJECTORY_COLUMNS).map_err(|e| csv_err(path, e))?;
    for r in rows {
        w.write_record(row_fields(r)).map_err(|e| csv_err(path, e))?;
    }
    w.flush().map_err(|e| CliError::io(path, e))
}

/// Several trajectories stacked, keyed by a leading `label` column.
pub fn write_merged(path: &Path, runs: &[RunResult]) -> Result<(), CliError> {
    let mut w = csv::Writer::from_path(path).map_err(|e| csv_err(path, e))?;
    let header: Vec<&str> = std::iter::once("label").chain(TRAJECTORY_COLUMNS).collect();
    w.write_record(&header).map_err(|e| csv_err(path, e))?;
    for run in runs {
        for r in &run.report.rows {
            let fields = row_fields(r);
            let record = std::iter::once(run.summary.label.as_str()).chain(fields.iter().map(String::as_str));
            w.write_record(record).map_err(|e| csv_err(path, e))?;
        }
    }
    w.flush().map_err(|e| CliError::io(path, e))
}

/// One row per run with its final state.
pub fn write_summary_table(path: &Path, runs: &[RunResult]) -> Result<(), CliError> {
    let mut w = csv::Writer::from_path(path).map_err(|e| csv_err(path, e))?;
    w.write_record(["label", "rho", "fval", "gradf", "feasi", "iter", "time", "termination"])
        .map_err(|e| csv_err(path, e))?;
    for run in runs {
        let s = &run.summary;
        w.write_record([
            s.label.clone(),
            s.config["rho"].clone(),
            fmt_f64(s.fval),
            fmt_f64(s.gradf),
            fmt_f64(s.feasi),
            s.iter.to_string(),
            fmt_f64(s.time),
            s.termination.clone(),
        ])
        .map_err(|e| csv_err(path, e))?;
    }
    w.flush().map_err(|e| CliError::io(path, e))
}

pub fn write_json(path: &Path, value: &impl Serialize) -> Result<(), CliError> {
    let mut text = serde_json::to_string_pretty(value).map_err(|e| CliError::Report(e.to_string()))?;
    text.push('\n');
    fs::write(path, text).map_err(|e| CliError::io(path, e))
}

pub fn write_matrix(path: &Path, a: &Mat) -> Result<(), CliError> {
    fs::write(path, write_matrix_market(a)).map_err(|e| CliError::io(path, e))
}

#[derive(Serialize)]
struct ErrorRecord<'a> {
    error: &'a str,
    message: String,
}

/// Best effort: the error itself may be that `out` cannot be written.
pub fn write_error(out: &Path, kind: &str, message: String) {
    if fs::create_dir_all(out).is_ok() {
        let _ = write_json(&out.join("error.json"), &ErrorRecord { error: kind, message });
    }
}
