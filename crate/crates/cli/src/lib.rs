//! Scenario runner for the hybrid-ensemble backends: flat config files in,
//! plot-ready CSV out.

pub mod config;
pub mod report;
pub mod scenario;

pub use config::{ConfigError, Diagnostic, ScenarioConfig, TomographyConfig};
pub use report::{format_cell, ScenarioReport};
pub use scenario::{
    mediator_moments, run_scenario, tomography_demo, validate_backends, RunError, ScenarioRun, TomographyReport,
    ValidationSummary, MEDIATOR_LABELS,
};

/// Overrides the worker-thread count of the inner parallel loops.
pub const THREADS_ENV: &str = "HYBRIDLAB_THREADS";
