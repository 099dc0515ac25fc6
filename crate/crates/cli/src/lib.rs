//! Batch experiment runner around the `spstiefel` solver.

pub mod config;
pub mod experiment;
pub mod mtx;
pub mod report;

use std::path::{Path, PathBuf};

use thiserror::Error;

#[derive(Debug, Error)]
pub enum CliError {
    #[error("configuration: {0}")]
    Config(String),
    #[error("{}: {source}", path.display())]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },
    #[error("{}: {source}", path.display())]
    Mtx {
        path: PathBuf,
        #[source]
        source: mtx::MtxError,
    },
    #[error(transparent)]
    Solver(#[from] spstiefel::Error),
    #[error("report: {0}")]
    Report(String),
}

/// Shortest text that parses back to `v`, in scientific notation outside
/// `[1e-4, 1e6)`.
pub fn fmt_f64(v: f64) -> String {
    let a = v.abs();
    if a == 0.0 || !a.is_finite() || (1e-4..1e6).contains(&a) {
        v.to_string()
    } else {
        format!("{v:e}")
    }
}

impl CliError {
    pub fn io(path: &Path, source: std::io::Error) -> Self {
        Self::Io {
            path: path.to_path_buf(),
            source,
        }
    }

    /// Stable identifier written to `error.json`.
    pub fn kind(&self) -> &'static str {
        match self {
            Self::Config(_) => "config",
            Self::Io { .. } => "io",
            Self::Mtx { .. } => "ingestion",
            Self::Solver(_) => "solver",
            Self::Report(_) => "report",
        }
    }
}
