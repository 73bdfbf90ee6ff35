//! The grid runner: for every (qubits, layers) cell, every run, and every
//! fold, train a model, score train and test sets, and aggregate AUC and
//! threshold-0.5 metrics.
//!
//! Determinism: fold assignments derive from (seed, run), model seeds from
//! (seed, qubits, layers, run, fold), forest partitions from
//! (seed, qubits, layers, run). Tasks share only immutable inputs and results
//! merge in task order, so the report is a pure function of the config and the
//! input file; the thread count only changes wall time. Wall times are kept
//! out of the serialized report for that reason (the CSV emitter prints them
//! as an informational column).

use std::time::Instant;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use qforest_core::dataio::{
    holdout_split, impute_group_median, impute_split_medians, parse_cleveland, parse_statlog,
    standardize, stratified_kfold, Dataset, DatasetName, RawTable,
};
use qforest_core::hqnn::{self, TrainConfig};
use qforest_core::hqrf::{self, PartitionPolicy};
use qforest_core::metrics::{confusion, roc_auc, summary_metrics, RocCurve, SummaryMetrics};
use qforest_core::seeding;
use qforest_core::{Error, Result};

use crate::config::{ExperimentConfig, ImputationMode, ModelKind, Protocol};

const REPORT_SCHEMA: &str = "qforest-gridreport/v1";

/// The config fields echoed into the report (everything that determines the
/// numbers; `threads` and `data_dir` are intentionally absent).
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ReportConfig {
    pub dataset: DatasetName,
    pub model: ModelKind,
    pub protocol: Protocol,
    pub qubits: Vec<usize>,
    pub layers: Vec<usize>,
    pub runs: usize,
    pub seed: u64,
    pub epochs: usize,
    pub batch_size: usize,
    pub learning_rate: f64,
    pub standardize: bool,
    pub imputation: ImputationMode,
    pub partition: PartitionPolicy,
    pub fixed_folds: bool,
}

impl ReportConfig {
    fn from_experiment(cfg: &ExperimentConfig) -> Self {
        ReportConfig {
            dataset: cfg.dataset,
            model: cfg.model,
            protocol: cfg.protocol,
            qubits: cfg.qubits.clone(),
            layers: cfg.layers.clone(),
            runs: cfg.runs,
            seed: cfg.seed,
            epochs: cfg.epochs,
            batch_size: cfg.batch_size,
            learning_rate: cfg.learning_rate,
            standardize: cfg.standardize,
            imputation: cfg.imputation,
            partition: cfg.partition,
            fixed_folds: cfg.fixed_folds,
        }
    }
}

/// One (run, fold) result inside a cell.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TaskRow {
    pub run: usize,
    pub fold: usize,
    pub train_auc: f64,
    pub test_auc: f64,
    /// Test-set metrics at threshold 0.5.
    pub metrics: SummaryMetrics,
    /// Wall time; informational only, never serialized.
    #[serde(skip)]
    pub seconds: f64,
}

/// Aggregates for one (qubits, layers) grid cell. A failed cell carries the
/// error string and no rows; other cells are unaffected.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CellReport {
    pub qubits: usize,
    pub layers: usize,
    pub error: Option<String>,
    pub rows: Vec<TaskRow>,
    pub train_auc_mean: Option<f64>,
    pub train_auc_std: Option<f64>,
    pub test_auc_mean: Option<f64>,
    pub test_auc_std: Option<f64>,
    /// Field-wise mean of the per-row metrics (undefined entries skipped).
    pub metrics_mean: Option<SummaryMetrics>,
    #[serde(skip)]
    pub seconds: f64,
}

/// Test-set ROC curve of one fold of the best cell's first run.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RocRecord {
    pub run: usize,
    pub fold: usize,
    pub auc: f64,
    pub curve: RocCurve,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BestCell {
    pub qubits: usize,
    pub layers: usize,
    pub test_auc_mean: f64,
    pub rocs: Vec<RocRecord>,
}

/// Full experiment report.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GridReport {
    pub schema: String,
    pub config: ReportConfig,
    pub cells: Vec<CellReport>,
    pub best: Option<BestCell>,
}

enum Loaded {
    /// Paper-style imputation already applied to the whole dataset.
    Whole(Dataset),
    /// Raw table kept around so each split can impute from its train rows.
    PerSplit(RawTable),
}

impl Loaded {
    fn labels(&self) -> Vec<u8> {
        match self {
            Loaded::Whole(ds) => ds.labels(),
            Loaded::PerSplit(raw) => raw.labels.clone(),
        }
    }

    fn feature_count(&self) -> usize {
        match self {
            Loaded::Whole(ds) => ds.feature_count(),
            Loaded::PerSplit(raw) => raw.rows.first().map_or(0, Vec::len),
        }
    }

    fn materialize(&self, train_idx: &[usize], test_idx: &[usize]) -> Result<(Dataset, Dataset)> {
        match self {
            Loaded::Whole(ds) => Ok((ds.subset(train_idx)?, ds.subset(test_idx)?)),
            Loaded::PerSplit(raw) => impute_split_medians(raw, train_idx, test_idx),
        }
    }
}

fn load(config: &ExperimentConfig) -> Result<Loaded> {
    let path = config.dataset_path();
    let file = std::fs::File::open(&path)
        .map_err(|e| Error::config(format!("cannot open {}: {e}", path.display())))?;
    let table = match config.dataset {
        DatasetName::Cleveland => parse_cleveland(file)?,
        DatasetName::Statlog => parse_statlog(file)?,
        DatasetName::Synthetic => {
            return Err(Error::config("no file format for synthetic datasets".to_string()))
        }
    };
    match config.imputation {
        ImputationMode::Paper => Ok(Loaded::Whole(impute_group_median(&table)?)),
        ImputationMode::TrainOnly => Ok(Loaded::PerSplit(table)),
    }
}

struct TaskOutput {
    row: TaskRow,
    test_scores: Vec<f64>,
    test_labels: Vec<u8>,
}

/// Test scores kept around long enough to build the best cell's ROC curves.
struct Retained {
    run: usize,
    fold: usize,
    scores: Vec<f64>,
    labels: Vec<u8>,
}

struct TaskSpec<'a> {
    cell: (usize, usize),
    run: usize,
    fold: usize,
    train_idx: &'a [usize],
    test_idx: &'a [usize],
}

fn run_task(config: &ExperimentConfig, data: &Loaded, spec: &TaskSpec) -> Result<TaskOutput> {
    let started = Instant::now();
    let (qubits, layers) = spec.cell;
    let (train_raw, test_raw) = data.materialize(spec.train_idx, spec.test_idx)?;
    let (train, test) = if config.standardize {
        let (train_std, mut others, _) = standardize(&train_raw, &[&test_raw]);
        (train_std, others.remove(0))
    } else {
        (train_raw, test_raw)
    };

    let model_seed = seeding::derive(
        config.seed,
        &[
            seeding::tag::MODEL,
            qubits as u64,
            layers as u64,
            spec.run as u64,
            spec.fold as u64,
        ],
    );
    let train_config = TrainConfig {
        epochs: config.epochs,
        batch_size: config.batch_size,
        learning_rate: config.learning_rate,
        seed: model_seed,
        ..TrainConfig::default()
    };

    let (train_scores, test_scores) = match config.model {
        ModelKind::Hqnn => {
            let (model, _) = hqnn::train(&train, qubits, layers, &train_config)?;
            (
                model.predict_scores(&train.samples)?,
                model.predict_scores(&test.samples)?,
            )
        }
        ModelKind::Hqrf => {
            // One partition per (cell, run): every fold of a run shares it.
            let partition_seed = seeding::derive(
                config.seed,
                &[
                    seeding::tag::PARTITION,
                    qubits as u64,
                    layers as u64,
                    spec.run as u64,
                ],
            );
            let partition = hqrf::partition_features_with_policy(
                train.feature_count(),
                qubits,
                partition_seed,
                config.partition,
            )?;
            let forest = hqrf::train_forest_with_partition(&train, &partition, layers, &train_config)?;
            (
                forest.predict_scores(&train.samples)?,
                forest.predict_scores(&test.samples)?,
            )
        }
    };

    let train_labels = train.labels();
    let test_labels = test.labels();
    let train_auc = roc_auc(&train_scores, &train_labels)?.auc;
    let test_auc = roc_auc(&test_scores, &test_labels)?.auc;
    let metrics = summary_metrics(&confusion(&test_scores, &test_labels, 0.5)?);

    Ok(TaskOutput {
        row: TaskRow {
            run: spec.run,
            fold: spec.fold,
            train_auc,
            test_auc,
            metrics,
            seconds: started.elapsed().as_secs_f64(),
        },
        test_scores,
        test_labels,
    })
}

fn mean(values: &[f64]) -> f64 {
    values.iter().sum::<f64>() / values.len() as f64
}

/// Sample standard deviation (ddof = 1); 0 for a single value.
fn std_dev(values: &[f64]) -> f64 {
    if values.len() < 2 {
        return 0.0;
    }
    let m = mean(values);
    (values.iter().map(|v| (v - m) * (v - m)).sum::<f64>() / (values.len() - 1) as f64).sqrt()
}

fn mean_defined(values: impl Iterator<Item = Option<f64>>) -> Option<f64> {
    let defined: Vec<f64> = values.flatten().collect();
    if defined.is_empty() {
        None
    } else {
        Some(mean(&defined))
    }
}

fn aggregate_cell(qubits: usize, layers: usize, outcome: Result<Vec<TaskRow>>) -> CellReport {
    match outcome {
        Err(e) => CellReport {
            qubits,
            layers,
            error: Some(e.to_string()),
            rows: Vec::new(),
            train_auc_mean: None,
            train_auc_std: None,
            test_auc_mean: None,
            test_auc_std: None,
            metrics_mean: None,
            seconds: 0.0,
        },
        Ok(rows) => {
            let train: Vec<f64> = rows.iter().map(|r| r.train_auc).collect();
            let test: Vec<f64> = rows.iter().map(|r| r.test_auc).collect();
            let seconds = rows.iter().map(|r| r.seconds).sum();
            let metrics_mean = Some(SummaryMetrics {
                accuracy: mean_defined(rows.iter().map(|r| r.metrics.accuracy)),
                sensitivity: mean_defined(rows.iter().map(|r| r.metrics.sensitivity)),
                specificity: mean_defined(rows.iter().map(|r| r.metrics.specificity)),
                ppv: mean_defined(rows.iter().map(|r| r.metrics.ppv)),
                f1: mean_defined(rows.iter().map(|r| r.metrics.f1)),
            });
            CellReport {
                qubits,
                layers,
                error: None,
                train_auc_mean: Some(mean(&train)),
                train_auc_std: Some(std_dev(&train)),
                test_auc_mean: Some(mean(&test)),
                test_auc_std: Some(std_dev(&test)),
                metrics_mean,
                rows,
                seconds,
            }
        }
    }
}

/// Run the whole grid described by `config`.
pub fn run_grid(config: &ExperimentConfig) -> Result<GridReport> {
    config.validate()?;
    let data = load(config)?;
    let labels = data.labels();
    if data.feature_count() == 0 {
        return Err(Error::structure("dataset has no features".to_string()));
    }

    // Fold assignments per run, shared by every cell.
    let mut splits_per_run: Vec<Vec<(Vec<usize>, Vec<usize>)>> = Vec::with_capacity(config.runs);
    for run in 0..config.runs {
        let split_run = if config.fixed_folds { 0 } else { run as u64 };
        let split_seed = seeding::derive(config.seed, &[seeding::tag::SPLIT, split_run]);
        let folds = match config.protocol {
            Protocol::Cv10 => stratified_kfold(&labels, 10, split_seed)?,
            Protocol::Split70 => vec![holdout_split(&labels, 0.7, split_seed)?],
        };
        splits_per_run.push(folds);
    }

    let mut cells: Vec<(usize, usize)> = Vec::new();
    for &q in &config.qubits {
        for &l in &config.layers {
            cells.push((q, l));
        }
    }
    let mut tasks: Vec<TaskSpec> = Vec::new();
    for &cell in &cells {
        for (run, folds) in splits_per_run.iter().enumerate() {
            for (fold, (train_idx, test_idx)) in folds.iter().enumerate() {
                tasks.push(TaskSpec {
                    cell,
                    run,
                    fold,
                    train_idx,
                    test_idx,
                });
            }
        }
    }

    let execute = || -> Vec<Result<TaskOutput>> {
        tasks
            .par_iter()
            .map(|spec| {
                run_task(config, &data, spec).map_err(|e| {
                    e.annotate(format!(
                        "cell q={} L={} run={} fold={}",
                        spec.cell.0, spec.cell.1, spec.run, spec.fold
                    ))
                })
            })
            .collect()
    };
    let outputs = if config.threads > 0 {
        rayon::ThreadPoolBuilder::new()
            .num_threads(config.threads)
            .build()
            .map_err(|e| Error::config(format!("cannot build thread pool: {e}")))?
            .install(execute)
    } else {
        execute()
    };

    // Merge in task order: results chunk evenly because every run has the
    // same fold count.
    let per_cell = outputs.len() / cells.len();
    let mut cell_reports = Vec::with_capacity(cells.len());
    let mut retained: Vec<Vec<Retained>> = Vec::with_capacity(cells.len());
    for (i, &(qubits, layers)) in cells.iter().enumerate() {
        let chunk = &outputs[i * per_cell..(i + 1) * per_cell];
        let mut rows = Vec::with_capacity(per_cell);
        let mut scores = Vec::new();
        let mut error: Option<String> = None;
        for out in chunk {
            match out {
                Ok(task) => {
                    rows.push(task.row.clone());
                    if task.row.run == 0 {
                        scores.push(Retained {
                            run: task.row.run,
                            fold: task.row.fold,
                            scores: task.test_scores.clone(),
                            labels: task.test_labels.clone(),
                        });
                    }
                }
                Err(e) => {
                    if error.is_none() {
                        error = Some(e.to_string());
                    }
                }
            }
        }
        let outcome = match error {
            Some(msg) => Err(Error::config(msg)),
            None => Ok(rows),
        };
        cell_reports.push(aggregate_cell(qubits, layers, outcome));
        retained.push(scores);
    }

    // Best cell by mean test AUC (deterministic: last grid cell on exact
    // ties); its run-0 ROC curves are attached for plotting.
    let best = cell_reports
        .iter()
        .enumerate()
        .filter_map(|(i, c)| c.test_auc_mean.map(|auc| (i, auc)))
        .max_by(|a, b| a.1.partial_cmp(&b.1).expect("finite AUC"))
        .map(|(i, auc)| -> Result<BestCell> {
            let mut rocs = Vec::new();
            for kept in &retained[i] {
                let curve = roc_auc(&kept.scores, &kept.labels)?;
                rocs.push(RocRecord {
                    run: kept.run,
                    fold: kept.fold,
                    auc: curve.auc,
                    curve,
                });
            }
            Ok(BestCell {
                qubits: cell_reports[i].qubits,
                layers: cell_reports[i].layers,
                test_auc_mean: auc,
                rocs,
            })
        })
        .transpose()?;

    Ok(GridReport {
        schema: REPORT_SCHEMA.to_string(),
        config: ReportConfig::from_experiment(config),
        cells: cell_reports,
        best,
    })
}
