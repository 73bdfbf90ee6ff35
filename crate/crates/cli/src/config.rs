//! Experiment configuration and validation.

use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};

use qforest_core::dataio::DatasetName;
use qforest_core::hqrf::PartitionPolicy;
use qforest_core::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum ModelKind {
    Hqnn,
    Hqrf,
}

impl std::fmt::Display for ModelKind {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(match self {
            ModelKind::Hqnn => "hqnn",
            ModelKind::Hqrf => "hqrf",
        })
    }
}

/// Evaluation protocol: stratified 10-fold cross-validation or a stratified
/// 70/30 train/test split.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Protocol {
    Cv10,
    Split70,
}

impl Protocol {
    pub fn folds(&self) -> usize {
        match self {
            Protocol::Cv10 => 10,
            Protocol::Split70 => 1,
        }
    }
}

impl std::fmt::Display for Protocol {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(match self {
            Protocol::Cv10 => "cv10",
            Protocol::Split70 => "split70",
        })
    }
}

/// Where missing values get their medians from.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum ImputationMode {
    /// Group medians over the whole dataset, applied once before splitting.
    Paper,
    /// Medians computed per split from the training rows only (no leakage).
    TrainOnly,
}

/// Default run counts: 10 independent runs for the single network, 5 for the
/// forest (which re-partitions features every run).
pub fn default_runs(model: ModelKind) -> usize {
    match model {
        ModelKind::Hqnn => 10,
        ModelKind::Hqrf => 5,
    }
}

/// Everything that identifies an experiment. Two configs that compare equal
/// produce byte-identical JSON reports; `threads` and `data_dir` deliberately
/// influence nothing but wall time and file lookup.
#[derive(Debug, Clone, PartialEq)]
pub struct ExperimentConfig {
    pub dataset: DatasetName,
    pub model: ModelKind,
    pub qubits: Vec<usize>,
    pub layers: Vec<usize>,
    pub protocol: Protocol,
    pub runs: usize,
    pub seed: u64,
    pub epochs: usize,
    pub batch_size: usize,
    pub learning_rate: f64,
    pub standardize: bool,
    pub imputation: ImputationMode,
    pub partition: PartitionPolicy,
    /// Reuse run 0's fold assignment for every run instead of re-deriving.
    pub fixed_folds: bool,
    /// Worker threads; 0 uses the ambient rayon pool.
    pub threads: usize,
    pub data_dir: PathBuf,
}

impl ExperimentConfig {
    pub fn new(dataset: DatasetName, model: ModelKind) -> Self {
        ExperimentConfig {
            dataset,
            model,
            qubits: vec![2, 3, 4],
            layers: vec![1, 2, 3, 4],
            protocol: Protocol::Cv10,
            runs: default_runs(model),
            seed: 42,
            epochs: 100,
            batch_size: 16,
            learning_rate: 0.01,
            standardize: true,
            imputation: ImputationMode::Paper,
            partition: PartitionPolicy::Balanced,
            fixed_folds: false,
            threads: 0,
            data_dir: PathBuf::from("data"),
        }
    }

    pub fn validate(&self) -> Result<()> {
        if self.dataset == DatasetName::Synthetic {
            return Err(Error::config(
                "experiments run on the cleveland or statlog dataset".to_string(),
            ));
        }
        if self.qubits.is_empty() || self.layers.is_empty() {
            return Err(Error::config("qubit and layer grids must be non-empty".to_string()));
        }
        for &q in &self.qubits {
            if !(2..=4).contains(&q) {
                return Err(Error::config(format!(
                    "qubit count {q} outside supported range 2..=4"
                )));
            }
        }
        for &l in &self.layers {
            if !(1..=4).contains(&l) {
                return Err(Error::config(format!(
                    "layer count {l} outside supported range 1..=4"
                )));
            }
        }
        if self.runs == 0 {
            return Err(Error::config("runs must be at least 1".to_string()));
        }
        if self.epochs == 0 {
            return Err(Error::config("epochs must be at least 1".to_string()));
        }
        if self.batch_size == 0 {
            return Err(Error::config("batch size must be at least 1".to_string()));
        }
        if !self.learning_rate.is_finite() || self.learning_rate <= 0.0 {
            return Err(Error::config(format!(
                "learning rate {} must be positive",
                self.learning_rate
            )));
        }
        Ok(())
    }

    /// Path of the dataset file inside `data_dir`.
    pub fn dataset_path(&self) -> PathBuf {
        self.data_dir.join(dataset_file_name(self.dataset))
    }
}

pub fn dataset_file_name(name: DatasetName) -> &'static str {
    match name {
        DatasetName::Cleveland => "cleveland.data",
        DatasetName::Statlog => "statlog.dat",
        DatasetName::Synthetic => "synthetic.data",
    }
}

/// Convenience for tests and the acceptance suite: a single-cell config.
pub fn single_cell(
    dataset: DatasetName,
    model: ModelKind,
    qubits: usize,
    layers: usize,
    protocol: Protocol,
    data_dir: &Path,
) -> ExperimentConfig {
    let mut cfg = ExperimentConfig::new(dataset, model);
    cfg.qubits = vec![qubits];
    cfg.layers = vec![layers];
    cfg.protocol = protocol;
    cfg.data_dir = data_dir.to_path_buf();
    cfg
}
