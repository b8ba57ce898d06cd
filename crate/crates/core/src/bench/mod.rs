//! Experiment grid: every (instance, r, α, β, method) combination is solved
//! once under a wall-clock budget, then methods are compared per
//! configuration with a relative tie tolerance.

mod config;
mod report;
mod run;

pub use config::{
    BenchConfig, InstanceSource, Method, ModelChoice, DEFAULT_ALPHA, DEFAULT_BETA, DEFAULT_R,
    NYC_ALPHA, NYC_BETA,
};
pub use report::{
    best_counts, emit_report, read_records_csv, records_csv, report_markdown, ComparisonReport,
    FamilyRow, ReportFormat,
};
pub use run::{run_grid, GridOutput, RunFailure, RunRecord};
