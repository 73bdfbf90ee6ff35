//! Experiment orchestration for the qforest classifiers: qubit x layer grids
//! under 10-fold cross-validation or a 70/30 holdout, multi-run averaging,
//! and report emission (JSON / CSV / text table plus ROC files).

pub mod config;
pub mod datagen;
pub mod report;
pub mod runner;

pub use config::{ExperimentConfig, ImputationMode, ModelKind, Protocol};
pub use report::{emit_report, ReportFormat};
pub use runner::{run_grid, GridReport};
