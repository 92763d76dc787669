//! Repeated fitness-vs-novelty runs, effect sizes, rank tests and reports.

mod compare;
mod report;
mod stats;

pub use compare::{median, repetition_seed, run_comparison, run_comparison_with, ComparisonReport, RunSummary, ALPHA};
pub use report::{
    box_svg, coverage_svg, median_curve, stats_json, timelines_csv, write_report, BOX_SVG, COVERAGE_SVG, STATS_FILE,
    TIMELINES_FILE,
};
pub use stats::{mann_whitney_u, vargha_delaney_a12, MannWhitney, EXACT_LIMIT};

use std::path::{Path, PathBuf};

use thiserror::Error;

use crate::search::SearchError;

#[derive(Debug, Error)]
pub enum ExperimentError {
    #[error("samples must not be empty")]
    EmptySample,
    #[error("at least 2 repetitions are needed, got {0}")]
    TooFewRepetitions(usize),
    #[error(transparent)]
    Search(#[from] SearchError),
    #[error("{path}: {source}")]
    Io { path: PathBuf, source: std::io::Error },
}

impl ExperimentError {
    pub fn io(path: &Path, source: std::io::Error) -> Self {
        ExperimentError::Io { path: path.to_path_buf(), source }
    }
}
