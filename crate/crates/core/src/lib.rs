//! Hybrid quantum-classical binary classifiers on an exact statevector simulator.
//!
//! The crate provides the pieces of a small data re-uploading classifier stack:
//!
//! - [`qsim`]: exact statevector simulation of Ry/Rz/CNOT circuits, per-qubit
//!   Pauli-Z expectations, and parameter-shift gradients.
//! - [`nncore`]: minimal dense layers, softmax cross-entropy, and an Adam
//!   optimizer with exact backpropagation.
//! - [`hqnn`]: the hybrid network (classical front layer, re-uploading circuit,
//!   two-neuron head) with training and prediction.
//! - [`hqrf`]: the feature-partition ensemble of independent hybrid networks
//!   with soft-vote aggregation.
//! - [`dataio`]: heart-disease dataset ingestion (UCI Cleveland / Statlog file
//!   formats), group-median imputation, standardization, and stratified splits.
//! - [`metrics`]: confusion-matrix summaries, ROC curves, and trapezoidal AUC.
//!
//! Everything is deterministic given a seed: models, splits, and ensembles all
//! derive their randomness through [`seeding`].

pub mod dataio;
pub mod error;
pub mod hqnn;
pub mod hqrf;
pub mod metrics;
pub mod nncore;
pub mod qsim;
pub mod seeding;

pub use error::{Error, Result};
