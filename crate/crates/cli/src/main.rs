//! `qforest`: run qubit x layer experiment grids and emit reports.

use std::path::PathBuf;
use std::process::ExitCode;

use clap::Parser;

use qforest_cli::config::{default_runs, ExperimentConfig, ImputationMode, ModelKind, Protocol};
use qforest_cli::report::{emit_report, report_table, ReportFormat};
use qforest_cli::runner::run_grid;
use qforest_core::dataio::DatasetName;
use qforest_core::hqrf::PartitionPolicy;
use qforest_core::Error;

#[derive(Parser, Debug)]
#[command(
    name = "qforest",
    about = "Hybrid quantum-classical classifier experiments on the heart-disease datasets",
    version
)]
struct Args {
    /// Dataset to load from the data directory.
    #[arg(long, value_parser = parse_dataset)]
    dataset: DatasetName,

    /// Classifier: the single hybrid network or the feature-partition forest.
    #[arg(long, value_parser = parse_model)]
    model: ModelKind,

    /// Qubit counts to sweep (comma separated, each in 2..=4).
    #[arg(long, value_delimiter = ',', default_value = "2,3,4")]
    qubits: Vec<usize>,

    /// Layer counts to sweep (comma separated, each in 1..=4).
    #[arg(long, value_delimiter = ',', default_value = "1,2,3,4")]
    layers: Vec<usize>,

    /// Evaluation protocol.
    #[arg(long, value_parser = parse_protocol, default_value = "cv10")]
    protocol: Protocol,

    /// Independent repetitions; defaults to 10 for hqnn and 5 for hqrf.
    #[arg(long)]
    runs: Option<usize>,

    /// Master seed; every other seed derives from it.
    #[arg(long, default_value_t = 42)]
    seed: u64,

    #[arg(long, default_value_t = 100)]
    epochs: usize,

    #[arg(long, default_value_t = 16)]
    batch: usize,

    #[arg(long, default_value_t = 0.01)]
    lr: f64,

    /// Output directory for the report and ROC files.
    #[arg(long, default_value = "out")]
    out: PathBuf,

    /// Report format: json, csv or table-text.
    #[arg(long, default_value = "json")]
    format: String,

    /// Skip per-feature z-scoring by the training statistics.
    #[arg(long)]
    no_standardize: bool,

    /// Missing-value handling: whole-dataset group medians or train-only.
    #[arg(long, value_parser = parse_imputation, default_value = "paper")]
    imputation: ImputationMode,

    /// Feature partition policy for hqrf.
    #[arg(long, value_parser = parse_partition, default_value = "balanced")]
    partition: PartitionPolicy,

    /// Worker threads (0 = all cores). Never changes results, only wall time.
    #[arg(long, default_value_t = 0)]
    threads: usize,

    /// Reuse run 0's fold assignment in every run.
    #[arg(long)]
    fixed_folds: bool,

    /// Directory containing cleveland.data / statlog.dat.
    #[arg(long, default_value = "data")]
    data: PathBuf,
}

fn parse_dataset(s: &str) -> Result<DatasetName, String> {
    match s {
        "cleveland" => Ok(DatasetName::Cleveland),
        "statlog" => Ok(DatasetName::Statlog),
        other => Err(format!("unknown dataset '{other}' (expected cleveland or statlog)")),
    }
}

fn parse_model(s: &str) -> Result<ModelKind, String> {
    match s {
        "hqnn" => Ok(ModelKind::Hqnn),
        "hqrf" => Ok(ModelKind::Hqrf),
        other => Err(format!("unknown model '{other}' (expected hqnn or hqrf)")),
    }
}

fn parse_protocol(s: &str) -> Result<Protocol, String> {
    match s {
        "cv10" => Ok(Protocol::Cv10),
        "split70" => Ok(Protocol::Split70),
        other => Err(format!("unknown protocol '{other}' (expected cv10 or split70)")),
    }
}

fn parse_imputation(s: &str) -> Result<ImputationMode, String> {
    match s {
        "paper" => Ok(ImputationMode::Paper),
        "train-only" => Ok(ImputationMode::TrainOnly),
        other => Err(format!("unknown imputation mode '{other}' (expected paper or train-only)")),
    }
}

fn parse_partition(s: &str) -> Result<PartitionPolicy, String> {
    match s {
        "balanced" => Ok(PartitionPolicy::Balanced),
        "paper-5-5-3" => Ok(PartitionPolicy::PaperFiveFiveThree),
        other => Err(format!("unknown partition policy '{other}' (expected balanced or paper-5-5-3)")),
    }
}

fn build_config(args: &Args) -> ExperimentConfig {
    let mut cfg = ExperimentConfig::new(args.dataset, args.model);
    cfg.qubits = args.qubits.clone();
    cfg.layers = args.layers.clone();
    cfg.protocol = args.protocol;
    cfg.runs = args.runs.unwrap_or_else(|| default_runs(args.model));
    cfg.seed = args.seed;
    cfg.epochs = args.epochs;
    cfg.batch_size = args.batch;
    cfg.learning_rate = args.lr;
    cfg.standardize = !args.no_standardize;
    cfg.imputation = args.imputation;
    cfg.partition = args.partition;
    cfg.fixed_folds = args.fixed_folds;
    cfg.threads = args.threads;
    cfg.data_dir = args.data.clone();
    cfg
}

fn exit_code_for(err: &Error) -> u8 {
    match err {
        // Invalid flag combinations behave like usage errors.
        Error::Config(_) => 2,
        _ => 1,
    }
}

fn main() -> ExitCode {
    let args = Args::parse();
    let format: ReportFormat = match args.format.parse() {
        Ok(f) => f,
        Err(e) => {
            eprintln!("error: {e}");
            return ExitCode::from(2);
        }
    };
    let config = build_config(&args);
    let report = match run_grid(&config) {
        Ok(report) => report,
        Err(e) => {
            eprintln!("error: {e}");
            return ExitCode::from(exit_code_for(&e));
        }
    };
    print!("{}", report_table(&report));
    match emit_report(&report, format, &args.out) {
        Ok(paths) => {
            for path in paths {
                eprintln!("wrote {}", path.display());
            }
            ExitCode::SUCCESS
        }
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(1)
        }
    }
}
