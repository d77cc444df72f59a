//! Experiment runner for the `oscar2d` group-sparse recovery toolkit.
//!
//! The library half of the `oscar2d` binary: configuration loading and
//! validation ([`config`]), grid execution with per-cell timing
//! ([`experiment`]), CSV report serialization ([`report`]) and PGM snapshot
//! export ([`heatmap`]). The binary itself only parses arguments, applies
//! overrides and maps errors to exit codes, so everything observable is
//! testable through this crate.

pub mod config;
pub mod experiment;
pub mod heatmap;
pub mod report;

pub use config::{ConfigError, DebiasMode, ExperimentConfig, RunConfig, SCHEMA_VERSION};
pub use experiment::{
    load_instance, run_experiment, write_instance, ExperimentError, ExperimentOutcome,
    ExperimentReport, ReportRow,
};
pub use heatmap::export_heatmap;
pub use report::{emit_report, format_report, REPORT_HEADER};
