//! Report rendering: JSON (full nested report), CSV (one row per cell, run
//! and fold), a qubit x layer text table with AUC percent to two decimals,
//! and one ROC file per retained curve of the best cell.

use std::fs;
use std::path::{Path, PathBuf};

use qforest_core::metrics::roc_to_csv;
use qforest_core::{Error, Result};

use crate::config::Protocol;
use crate::runner::{CellReport, GridReport};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ReportFormat {
    Json,
    Csv,
    TableText,
}

impl std::str::FromStr for ReportFormat {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "json" => Ok(ReportFormat::Json),
            "csv" => Ok(ReportFormat::Csv),
            "table-text" => Ok(ReportFormat::TableText),
            other => Err(Error::config(format!(
                "unknown report format '{other}' (expected json, csv or table-text)"
            ))),
        }
    }
}

/// Deterministic JSON rendering of the report (wall times excluded by schema).
pub fn report_json(report: &GridReport) -> Result<String> {
    let mut text = serde_json::to_string_pretty(report)?;
    text.push('\n');
    Ok(text)
}

fn csv_opt(value: Option<f64>) -> String {
    value.map(|v| v.to_string()).unwrap_or_default()
}

/// One row per (cell, run, fold). The `seconds` column is wall time and is
/// the only non-deterministic field anywhere in the outputs.
pub fn report_csv(report: &GridReport) -> String {
    let mut out = String::from(
        "dataset,model,qubits,layers,protocol,run,fold,train_auc,test_auc,acc,sens,spec,ppv,f1,seconds\n",
    );
    let cfg = &report.config;
    for cell in &report.cells {
        for row in &cell.rows {
            out.push_str(&format!(
                "{},{},{},{},{},{},{},{},{},{},{},{},{},{},{:.3}\n",
                cfg.dataset,
                cfg.model,
                cell.qubits,
                cell.layers,
                cfg.protocol,
                row.run,
                row.fold,
                row.train_auc,
                row.test_auc,
                csv_opt(row.metrics.accuracy),
                csv_opt(row.metrics.sensitivity),
                csv_opt(row.metrics.specificity),
                csv_opt(row.metrics.ppv),
                csv_opt(row.metrics.f1),
                row.seconds,
            ));
        }
    }
    out
}

fn cell_for(report: &GridReport, qubits: usize, layers: usize) -> Option<&CellReport> {
    report
        .cells
        .iter()
        .find(|c| c.qubits == qubits && c.layers == layers)
}

fn table_cell(report: &GridReport, cell: Option<&CellReport>) -> String {
    match cell {
        None => "-".to_string(),
        Some(c) if c.error.is_some() => "ERR".to_string(),
        Some(c) => match report.config.protocol {
            // Holdout cells show train/test pairs, CV cells the mean test AUC.
            Protocol::Split70 => format!(
                "{:.2}/{:.2}",
                100.0 * c.train_auc_mean.unwrap_or(f64::NAN),
                100.0 * c.test_auc_mean.unwrap_or(f64::NAN)
            ),
            Protocol::Cv10 => format!("{:.2}", 100.0 * c.test_auc_mean.unwrap_or(f64::NAN)),
        },
    }
}

/// The qubit x layer matrix with AUC percent to two decimals.
pub fn report_table(report: &GridReport) -> String {
    let cfg = &report.config;
    let mut out = format!(
        "dataset={} model={} protocol={} runs={} seed={} epochs={} batch={} lr={}\n",
        cfg.dataset,
        cfg.model,
        cfg.protocol,
        cfg.runs,
        cfg.seed,
        cfg.epochs,
        cfg.batch_size,
        cfg.learning_rate
    );
    out.push_str(match cfg.protocol {
        Protocol::Cv10 => "mean test AUC %\n",
        Protocol::Split70 => "train/test AUC %\n",
    });
    let mut qubits = cfg.qubits.clone();
    qubits.sort_unstable();
    qubits.dedup();
    let mut layers = cfg.layers.clone();
    layers.sort_unstable();
    layers.dedup();

    out.push_str(&format!("{:<10}", "qubits"));
    for &l in &layers {
        out.push_str(&format!("{:>14}", format!("L={l}")));
    }
    out.push('\n');
    for &q in &qubits {
        out.push_str(&format!("{q:<10}"));
        for &l in &layers {
            out.push_str(&format!("{:>14}", table_cell(report, cell_for(report, q, l))));
        }
        out.push('\n');
    }
    if let Some(best) = &report.best {
        out.push_str(&format!(
            "best cell: qubits={} layers={} mean test AUC {:.2}%\n",
            best.qubits,
            best.layers,
            100.0 * best.test_auc_mean
        ));
    }
    for cell in &report.cells {
        if let Some(err) = &cell.error {
            out.push_str(&format!(
                "cell qubits={} layers={} failed: {err}\n",
                cell.qubits, cell.layers
            ));
        }
    }
    out
}

/// Write the report in `format` plus one ROC file per retained curve of the
/// best cell. Returns every path written.
pub fn emit_report(report: &GridReport, format: ReportFormat, out_dir: &Path) -> Result<Vec<PathBuf>> {
    fs::create_dir_all(out_dir)?;
    let mut written = Vec::new();
    let (name, body) = match format {
        ReportFormat::Json => ("report.json", report_json(report)?),
        ReportFormat::Csv => ("report.csv", report_csv(report)),
        ReportFormat::TableText => ("report.txt", report_table(report)),
    };
    let path = out_dir.join(name);
    fs::write(&path, body)?;
    written.push(path);

    if let Some(best) = &report.best {
        for record in &best.rocs {
            let path = out_dir.join(format!(
                "roc_q{}_L{}_run{}_fold{}.csv",
                best.qubits, best.layers, record.run, record.fold
            ));
            fs::write(&path, roc_to_csv(&record.curve))?;
            written.push(path);
        }
    }
    Ok(written)
}
