//! Experiment runner behind the `qlsi` binary.

pub mod config;
pub mod report;
mod suites;

pub use config::{ExperimentConfig, Suite};
pub use report::{emit_plot_data, plot_csv, rows_from_csv, PlotPoint, Report, ReportRow};

use crate::error::Result;

/// Validates `cfg`, runs its suite and returns the report. Nothing is
/// written; see [`Report::write`].
pub fn run(cfg: &ExperimentConfig) -> Result<Report> {
    cfg.validate()?;
    let rows = suites::run_suite(cfg)?;
    Ok(Report { suite: cfg.suite, seed: cfg.seed, rows })
}
