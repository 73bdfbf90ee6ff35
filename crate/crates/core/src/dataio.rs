//! Heart-disease dataset ingestion and split tooling.
//!
//! Two UCI file formats are supported bit-exactly:
//!
//! - Cleveland (`processed` format): 14 comma-separated fields per line, `?`
//!   marks a missing value, the last field is the raw target in {0..4} which is
//!   collapsed to binary (0 stays 0, 1-4 become 1).
//! - Statlog (`heart.dat` format): 13 whitespace-separated features plus a
//!   label in {1,2} mapped to {0,1}. The file has no missing values; any `?`
//!   is an ingest error.
//!
//! The 13 features, in column order: age, sex, cp, trestbps, chol, fbs,
//! restecg, thalach, exang, oldpeak, slope, ca, thal. Class 1 is disease.
//!
//! Missing cells are filled by the median of the same feature over samples of
//! the same label ([`impute_group_median`]); a leakage-free variant computes
//! medians from a training subset only ([`impute_split_medians`]).

use std::fmt;
use std::fs::File;
use std::io::{BufRead, BufReader, Read, Write};
use std::path::Path;
use std::str::FromStr;

use rand::seq::SliceRandom;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Number of input features in both heart-disease files.
pub const FEATURE_COUNT: usize = 13;

/// Column names in file order.
pub const FEATURE_NAMES: [&str; FEATURE_COUNT] = [
    "age", "sex", "cp", "trestbps", "chol", "fbs", "restecg", "thalach", "exang", "oldpeak",
    "slope", "ca", "thal",
];

const CACHE_MAGIC: &str = "qforest-dataset v1";

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum DatasetName {
    Cleveland,
    Statlog,
    /// In-memory datasets built by tests or callers, never by the loaders.
    Synthetic,
}

impl fmt::Display for DatasetName {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let s = match self {
            DatasetName::Cleveland => "cleveland",
            DatasetName::Statlog => "statlog",
            DatasetName::Synthetic => "synthetic",
        };
        f.write_str(s)
    }
}

impl FromStr for DatasetName {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "cleveland" => Ok(DatasetName::Cleveland),
            "statlog" => Ok(DatasetName::Statlog),
            "synthetic" => Ok(DatasetName::Synthetic),
            other => Err(Error::config(format!("unknown dataset name '{other}'"))),
        }
    }
}

/// One labeled feature vector.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Sample {
    pub features: Vec<f64>,
    pub label: u8,
}

/// A fully dense, binary-labeled dataset.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Dataset {
    pub name: DatasetName,
    pub samples: Vec<Sample>,
    /// How many rows had at least one cell imputed at load time.
    pub imputed_rows: usize,
}

impl Dataset {
    pub fn new(name: DatasetName, samples: Vec<Sample>) -> Result<Self> {
        if samples.is_empty() {
            return Err(Error::structure("dataset has no samples".to_string()));
        }
        let m = samples[0].features.len();
        for (i, s) in samples.iter().enumerate() {
            if s.features.len() != m {
                return Err(Error::structure(format!(
                    "sample {i} has {} features, expected {m}",
                    s.features.len()
                )));
            }
            if s.label > 1 {
                return Err(Error::structure(format!(
                    "sample {i} label {} is not binary",
                    s.label
                )));
            }
        }
        Ok(Dataset {
            name,
            samples,
            imputed_rows: 0,
        })
    }

    pub fn len(&self) -> usize {
        self.samples.len()
    }

    pub fn is_empty(&self) -> bool {
        self.samples.is_empty()
    }

    pub fn feature_count(&self) -> usize {
        self.samples.first().map_or(0, |s| s.features.len())
    }

    pub fn labels(&self) -> Vec<u8> {
        self.samples.iter().map(|s| s.label).collect()
    }

    /// (class-0 count, class-1 count).
    pub fn class_counts(&self) -> (usize, usize) {
        let ones = self.samples.iter().filter(|s| s.label == 1).count();
        (self.samples.len() - ones, ones)
    }

    /// Rows at the given indices, in the given order.
    pub fn subset(&self, rows: &[usize]) -> Result<Dataset> {
        let mut samples = Vec::with_capacity(rows.len());
        for &r in rows {
            let s = self
                .samples
                .get(r)
                .ok_or_else(|| Error::structure(format!("row index {r} out of range")))?;
            samples.push(s.clone());
        }
        Ok(Dataset {
            name: self.name,
            samples,
            imputed_rows: 0,
        })
    }

    /// Project every sample onto the given feature columns, in the given order.
    pub fn select_features(&self, columns: &[usize]) -> Result<Dataset> {
        let m = self.feature_count();
        let mut samples = Vec::with_capacity(self.samples.len());
        for s in &self.samples {
            let mut features = Vec::with_capacity(columns.len());
            for &c in columns {
                if c >= m {
                    return Err(Error::structure(format!(
                        "feature index {c} out of range for {m} features"
                    )));
                }
                features.push(s.features[c]);
            }
            samples.push(Sample {
                features,
                label: s.label,
            });
        }
        Ok(Dataset {
            name: self.name,
            samples,
            imputed_rows: self.imputed_rows,
        })
    }
}

/// A parsed table that may still contain missing cells.
#[derive(Debug, Clone, PartialEq)]
pub struct RawTable {
    pub name: DatasetName,
    pub rows: Vec<Vec<Option<f64>>>,
    pub labels: Vec<u8>,
}

impl RawTable {
    pub fn len(&self) -> usize {
        self.rows.len()
    }

    pub fn is_empty(&self) -> bool {
        self.rows.is_empty()
    }

    /// Rows containing at least one missing cell.
    pub fn rows_with_missing(&self) -> usize {
        self.rows
            .iter()
            .filter(|r| r.iter().any(Option::is_none))
            .count()
    }
}

fn parse_cell(token: &str, line: usize) -> Result<Option<f64>> {
    let token = token.trim();
    if token == "?" {
        return Ok(None);
    }
    token
        .parse::<f64>()
        .map(Some)
        .map_err(|_| Error::ingest(line, format!("unparseable token '{token}'")))
}

/// Parse the comma-separated Cleveland format and collapse targets 1-4 to 1.
pub fn parse_cleveland<R: Read>(reader: R) -> Result<RawTable> {
    let reader = BufReader::new(reader);
    let mut rows = Vec::new();
    let mut labels = Vec::new();
    for (idx, line) in reader.lines().enumerate() {
        let line_no = idx + 1;
        let line = line?;
        let line = line.trim();
        if line.is_empty() {
            continue;
        }
        let fields: Vec<&str> = line.split(',').collect();
        if fields.len() != FEATURE_COUNT + 1 {
            return Err(Error::ingest(
                line_no,
                format!("expected {} fields, found {}", FEATURE_COUNT + 1, fields.len()),
            ));
        }
        let mut row = Vec::with_capacity(FEATURE_COUNT);
        for token in &fields[..FEATURE_COUNT] {
            row.push(parse_cell(token, line_no)?);
        }
        let raw_target = parse_cell(fields[FEATURE_COUNT], line_no)?
            .ok_or_else(|| Error::ingest(line_no, "missing target value".to_string()))?;
        if raw_target.fract() != 0.0 || !(0.0..=4.0).contains(&raw_target) {
            return Err(Error::ingest(
                line_no,
                format!("target {raw_target} outside {{0,1,2,3,4}}"),
            ));
        }
        labels.push(u8::from(raw_target > 0.0));
        rows.push(row);
    }
    if rows.is_empty() {
        return Err(Error::ingest(0, "file contains no rows".to_string()));
    }
    Ok(RawTable {
        name: DatasetName::Cleveland,
        rows,
        labels,
    })
}

/// Parse the whitespace-separated Statlog format (label 1 = absence, 2 = presence).
pub fn parse_statlog<R: Read>(reader: R) -> Result<RawTable> {
    let reader = BufReader::new(reader);
    let mut rows = Vec::new();
    let mut labels = Vec::new();
    for (idx, line) in reader.lines().enumerate() {
        let line_no = idx + 1;
        let line = line?;
        let line = line.trim();
        if line.is_empty() {
            continue;
        }
        let fields: Vec<&str> = line.split_whitespace().collect();
        if fields.len() != FEATURE_COUNT + 1 {
            return Err(Error::ingest(
                line_no,
                format!("expected {} fields, found {}", FEATURE_COUNT + 1, fields.len()),
            ));
        }
        let mut row = Vec::with_capacity(FEATURE_COUNT);
        for token in &fields[..FEATURE_COUNT] {
            let value = parse_cell(token, line_no)?.ok_or_else(|| {
                Error::ingest(line_no, "missing value in a dataset that guarantees none")
            })?;
            row.push(Some(value));
        }
        let raw_target = parse_cell(fields[FEATURE_COUNT], line_no)?
            .ok_or_else(|| Error::ingest(line_no, "missing target value".to_string()))?;
        let label = if raw_target == 1.0 {
            0
        } else if raw_target == 2.0 {
            1
        } else {
            return Err(Error::ingest(
                line_no,
                format!("target {raw_target} outside {{1,2}}"),
            ));
        };
        labels.push(label);
        rows.push(row);
    }
    if rows.is_empty() {
        return Err(Error::ingest(0, "file contains no rows".to_string()));
    }
    Ok(RawTable {
        name: DatasetName::Statlog,
        rows,
        labels,
    })
}

/// Median with the even-count convention mean-of-middle-two.
fn median(values: &mut [f64]) -> Option<f64> {
    if values.is_empty() {
        return None;
    }
    values.sort_by(|a, b| a.partial_cmp(b).expect("finite feature values"));
    let n = values.len();
    Some(if n % 2 == 1 {
        values[n / 2]
    } else {
        (values[n / 2 - 1] + values[n / 2]) / 2.0
    })
}

fn group_medians(table: &RawTable, rows: &[usize]) -> Result<[Vec<Option<f64>>; 2]> {
    let m = table.rows.first().map_or(0, Vec::len);
    let mut medians = [vec![None; m], vec![None; m]];
    for (class, class_medians) in medians.iter_mut().enumerate() {
        for (col, slot) in class_medians.iter_mut().enumerate() {
            let mut values: Vec<f64> = rows
                .iter()
                .filter(|&&r| usize::from(table.labels[r]) == class)
                .filter_map(|&r| table.rows[r][col])
                .collect();
            *slot = median(&mut values);
        }
    }
    Ok(medians)
}

fn fill_rows(
    table: &RawTable,
    rows: &[usize],
    value_for: impl Fn(usize, u8) -> Option<f64>,
) -> Result<Dataset> {
    let mut samples = Vec::with_capacity(rows.len());
    let mut imputed_rows = 0;
    for &r in rows {
        let label = table.labels[r];
        let mut features = Vec::with_capacity(table.rows[r].len());
        let mut touched = false;
        for (col, cell) in table.rows[r].iter().enumerate() {
            match cell {
                Some(v) => features.push(*v),
                None => {
                    let v = value_for(col, label).ok_or_else(|| {
                        Error::ingest(
                            r + 1,
                            format!(
                                "feature '{}' has no observed values to impute from",
                                FEATURE_NAMES.get(col).copied().unwrap_or("?")
                            ),
                        )
                    })?;
                    features.push(v);
                    touched = true;
                }
            }
        }
        if touched {
            imputed_rows += 1;
        }
        samples.push(Sample { features, label });
    }
    let mut ds = Dataset::new(table.name, samples)?;
    ds.imputed_rows = imputed_rows;
    Ok(ds)
}

/// Fill every missing cell with the median of that feature over same-label
/// samples. Labels must already be binary. Non-missing cells are untouched.
pub fn impute_group_median(table: &RawTable) -> Result<Dataset> {
    let all_rows: Vec<usize> = (0..table.len()).collect();
    let medians = group_medians(table, &all_rows)?;
    fill_rows(table, &all_rows, |col, label| medians[usize::from(label)][col])
}

/// Leakage-free imputation for one split: train rows use group medians
/// computed over the train rows only; test rows use the label-free overall
/// train median (a test row's label never influences its imputation).
pub fn impute_split_medians(
    table: &RawTable,
    train_rows: &[usize],
    test_rows: &[usize],
) -> Result<(Dataset, Dataset)> {
    let train_medians = group_medians(table, train_rows)?;
    let m = table.rows.first().map_or(0, Vec::len);
    let mut overall = Vec::with_capacity(m);
    for col in 0..m {
        let mut values: Vec<f64> = train_rows
            .iter()
            .filter_map(|&r| table.rows[r][col])
            .collect();
        overall.push(median(&mut values));
    }
    let train = fill_rows(table, train_rows, |col, label| {
        train_medians[usize::from(label)][col]
    })?;
    let test = fill_rows(table, test_rows, |col, _| overall[col])?;
    Ok((train, test))
}

fn require_both_classes(ds: &Dataset) -> Result<()> {
    let (zeros, ones) = ds.class_counts();
    if zeros == 0 || ones == 0 {
        return Err(Error::config(format!(
            "dataset '{}' must contain both classes (got {zeros}/{ones})",
            ds.name
        )));
    }
    Ok(())
}

/// Load and impute the Cleveland file.
pub fn load_cleveland(path: impl AsRef<Path>) -> Result<Dataset> {
    let table = parse_cleveland(File::open(path)?)?;
    let ds = impute_group_median(&table)?;
    require_both_classes(&ds)?;
    Ok(ds)
}

/// Load the Statlog file (no imputation needed).
pub fn load_statlog(path: impl AsRef<Path>) -> Result<Dataset> {
    let table = parse_statlog(File::open(path)?)?;
    let ds = impute_group_median(&table)?;
    require_both_classes(&ds)?;
    Ok(ds)
}

/// Per-feature train statistics used for the z-score transform.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FeatureStats {
    pub means: Vec<f64>,
    /// Population standard deviations; exactly 0.0 marks a constant column,
    /// which is centered only.
    pub stds: Vec<f64>,
}

impl FeatureStats {
    pub fn from_dataset(train: &Dataset) -> FeatureStats {
        let n = train.len() as f64;
        let m = train.feature_count();
        let mut means = vec![0.0; m];
        for s in &train.samples {
            for (acc, v) in means.iter_mut().zip(&s.features) {
                *acc += v;
            }
        }
        for mean in means.iter_mut() {
            *mean /= n;
        }
        let mut vars = vec![0.0; m];
        for s in &train.samples {
            for ((acc, v), mean) in vars.iter_mut().zip(&s.features).zip(&means) {
                let d = v - mean;
                *acc += d * d;
            }
        }
        let stds = vars.into_iter().map(|v| (v / n).sqrt()).collect();
        FeatureStats { means, stds }
    }

    pub fn apply(&self, ds: &Dataset) -> Dataset {
        let samples = ds
            .samples
            .iter()
            .map(|s| Sample {
                features: s
                    .features
                    .iter()
                    .zip(self.means.iter().zip(&self.stds))
                    .map(|(v, (mean, std))| {
                        if *std > 0.0 {
                            (v - mean) / std
                        } else {
                            v - mean
                        }
                    })
                    .collect(),
                label: s.label,
            })
            .collect();
        Dataset {
            name: ds.name,
            samples,
            imputed_rows: ds.imputed_rows,
        }
    }
}

/// Z-score `train` by its own statistics and apply the same transform to
/// `others` (no leakage: their means generally stay nonzero).
pub fn standardize(train: &Dataset, others: &[&Dataset]) -> (Dataset, Vec<Dataset>, FeatureStats) {
    let stats = FeatureStats::from_dataset(train);
    let train_std = stats.apply(train);
    let others_std = others.iter().map(|ds| stats.apply(ds)).collect();
    (train_std, others_std, stats)
}

/// Stratified k-fold assignment over `labels`. Returns `(train, test)` index
/// pairs; test sets are disjoint and cover all indices, per-fold class counts
/// are within 1 of proportionality, and fold totals are as equal as possible.
pub fn stratified_kfold(labels: &[u8], k: usize, seed: u64) -> Result<Vec<(Vec<usize>, Vec<usize>)>> {
    if k < 2 {
        return Err(Error::config(format!("fold count {k} must be at least 2")));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut fold_test: Vec<Vec<usize>> = vec![Vec::new(); k];
    // Rotate the starting fold between classes so the +1 remainders land on
    // different folds, keeping fold totals balanced.
    let mut offset = 0usize;
    for class in 0..2u8 {
        let mut members: Vec<usize> = labels
            .iter()
            .enumerate()
            .filter(|(_, &l)| l == class)
            .map(|(i, _)| i)
            .collect();
        if members.len() < k {
            return Err(Error::config(format!(
                "class {class} has {} members, fewer than k={k}",
                members.len()
            )));
        }
        members.shuffle(&mut rng);
        for (j, idx) in members.iter().enumerate() {
            fold_test[(offset + j) % k].push(*idx);
        }
        offset = (offset + members.len() % k) % k;
    }
    let mut folds = Vec::with_capacity(k);
    for test in fold_test.iter_mut() {
        test.sort_unstable();
        let mut in_test = vec![false; labels.len()];
        for &i in test.iter() {
            in_test[i] = true;
        }
        let train: Vec<usize> = (0..labels.len()).filter(|&i| !in_test[i]).collect();
        folds.push((train, std::mem::take(test)));
    }
    Ok(folds)
}

/// Stratified holdout split; train takes `round(fraction * class_count)` of
/// each class (clamped so neither side loses a class entirely).
pub fn holdout_split(labels: &[u8], train_fraction: f64, seed: u64) -> Result<(Vec<usize>, Vec<usize>)> {
    if !(train_fraction > 0.0 && train_fraction < 1.0) {
        return Err(Error::config(format!(
            "train fraction {train_fraction} must lie in (0, 1)"
        )));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut train = Vec::new();
    let mut test = Vec::new();
    for class in 0..2u8 {
        let mut members: Vec<usize> = labels
            .iter()
            .enumerate()
            .filter(|(_, &l)| l == class)
            .map(|(i, _)| i)
            .collect();
        if members.is_empty() {
            continue;
        }
        members.shuffle(&mut rng);
        let mut n_train = (train_fraction * members.len() as f64).round() as usize;
        if members.len() >= 2 {
            n_train = n_train.clamp(1, members.len() - 1);
        }
        train.extend_from_slice(&members[..n_train]);
        test.extend_from_slice(&members[n_train..]);
    }
    train.sort_unstable();
    test.sort_unstable();
    Ok((train, test))
}

/// Write the canonical cache format: a magic line, a header with the counts,
/// then one comma-separated row per sample with full float precision.
pub fn write_cache<W: Write>(ds: &Dataset, mut writer: W) -> Result<()> {
    let (zeros, ones) = ds.class_counts();
    writeln!(writer, "{CACHE_MAGIC}")?;
    writeln!(
        writer,
        "name={} n={} m={} class0={} class1={} imputed={}",
        ds.name,
        ds.len(),
        ds.feature_count(),
        zeros,
        ones,
        ds.imputed_rows
    )?;
    for s in &ds.samples {
        let fields: Vec<String> = s.features.iter().map(f64::to_string).collect();
        writeln!(writer, "{},{}", fields.join(","), s.label)?;
    }
    Ok(())
}

/// Read the canonical cache format back, validating the header counts.
pub fn read_cache<R: Read>(reader: R) -> Result<Dataset> {
    let mut lines = BufReader::new(reader).lines();
    let magic = lines
        .next()
        .transpose()?
        .ok_or_else(|| Error::ingest(1, "empty cache file".to_string()))?;
    if magic.trim() != CACHE_MAGIC {
        return Err(Error::ingest(1, format!("bad magic line '{magic}'")));
    }
    let header = lines
        .next()
        .transpose()?
        .ok_or_else(|| Error::ingest(2, "missing cache header".to_string()))?;
    let mut name = None;
    let mut n = None;
    let mut m = None;
    let mut class0 = None;
    let mut class1 = None;
    let mut imputed = None;
    for pair in header.split_whitespace() {
        let (key, value) = pair
            .split_once('=')
            .ok_or_else(|| Error::ingest(2, format!("bad header field '{pair}'")))?;
        match key {
            "name" => name = Some(DatasetName::from_str(value)?),
            "n" => n = value.parse::<usize>().ok(),
            "m" => m = value.parse::<usize>().ok(),
            "class0" => class0 = value.parse::<usize>().ok(),
            "class1" => class1 = value.parse::<usize>().ok(),
            "imputed" => imputed = value.parse::<usize>().ok(),
            other => return Err(Error::ingest(2, format!("unknown header key '{other}'"))),
        }
    }
    let (name, n, m, class0, class1, imputed) = match (name, n, m, class0, class1, imputed) {
        (Some(a), Some(b), Some(c), Some(d), Some(e), Some(f)) => (a, b, c, d, e, f),
        _ => return Err(Error::ingest(2, "incomplete cache header".to_string())),
    };

    let mut samples = Vec::with_capacity(n);
    for (idx, line) in lines.enumerate() {
        let line_no = idx + 3;
        let line = line?;
        let line = line.trim();
        if line.is_empty() {
            continue;
        }
        let fields: Vec<&str> = line.split(',').collect();
        if fields.len() != m + 1 {
            return Err(Error::ingest(
                line_no,
                format!("expected {} fields, found {}", m + 1, fields.len()),
            ));
        }
        let mut features = Vec::with_capacity(m);
        for token in &fields[..m] {
            features.push(token.parse::<f64>().map_err(|_| {
                Error::ingest(line_no, format!("unparseable token '{token}'"))
            })?);
        }
        let label: u8 = fields[m]
            .parse()
            .map_err(|_| Error::ingest(line_no, format!("bad label '{}'", fields[m])))?;
        samples.push(Sample { features, label });
    }
    let mut ds = Dataset::new(name, samples)?;
    ds.imputed_rows = imputed;
    if ds.len() != n {
        return Err(Error::ingest(
            2,
            format!("header declares {} rows, file has {}", n, ds.len()),
        ));
    }
    let (zeros, ones) = ds.class_counts();
    if zeros != class0 || ones != class1 {
        return Err(Error::ingest(
            2,
            format!("header class counts {class0}/{class1} do not match {zeros}/{ones}"),
        ));
    }
    Ok(ds)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn cleveland_lines(rows: &[(&str, u8)]) -> String {
        rows.iter()
            .map(|(prefix, target)| format!("{prefix},{target}\n"))
            .collect()
    }

    // 13 feature fields with a distinctive chol value and optional '?' in ca.
    fn row(chol: &str, ca: &str) -> String {
        format!("57.0,1.0,4.0,130.0,{chol},0.0,2.0,150.0,0.0,1.0,2.0,{ca},3.0")
    }

    #[test]
    fn cleveland_collapses_targets() {
        let text = cleveland_lines(&[
            (&row("200.0", "0.0"), 0),
            (&row("210.0", "0.0"), 1),
            (&row("220.0", "0.0"), 3),
            (&row("230.0", "0.0"), 4),
        ]);
        let table = parse_cleveland(text.as_bytes()).unwrap();
        assert_eq!(table.labels, vec![0, 1, 1, 1]);
    }

    #[test]
    fn cleveland_rejects_bad_rows() {
        let err = parse_cleveland("1.0,2.0\n".as_bytes()).unwrap_err();
        assert!(matches!(err, Error::Ingest { line: 1, .. }));

        let text = cleveland_lines(&[(&row("abc", "0.0"), 0)]);
        let err = parse_cleveland(text.as_bytes()).unwrap_err();
        assert!(matches!(err, Error::Ingest { line: 1, .. }));

        let text = cleveland_lines(&[(&row("200.0", "0.0"), 7)]);
        assert!(parse_cleveland(text.as_bytes()).is_err());
    }

    #[test]
    fn statlog_maps_labels() {
        let text = "57.0 1.0 4.0 130.0 200.0 0.0 2.0 150.0 0.0 1.0 2.0 0.0 3.0 1\n\
                    60.0 0.0 3.0 120.0 180.0 0.0 0.0 160.0 0.0 0.5 1.0 0.0 3.0 2\n";
        let table = parse_statlog(text.as_bytes()).unwrap();
        assert_eq!(table.labels, vec![0, 1]);
        assert_eq!(table.rows_with_missing(), 0);
    }

    #[test]
    fn statlog_rejects_question_marks() {
        let text = "57.0 1.0 4.0 130.0 ? 0.0 2.0 150.0 0.0 1.0 2.0 0.0 3.0 1\n";
        let err = parse_statlog(text.as_bytes()).unwrap_err();
        assert!(matches!(err, Error::Ingest { line: 1, .. }));
    }

    #[test]
    fn impute_identity_when_nothing_missing() {
        let text = cleveland_lines(&[(&row("200.0", "0.0"), 0), (&row("210.0", "1.0"), 1)]);
        let table = parse_cleveland(text.as_bytes()).unwrap();
        let ds = impute_group_median(&table).unwrap();
        assert_eq!(ds.imputed_rows, 0);
        assert_eq!(ds.samples[0].features[4], 200.0);
        assert_eq!(ds.samples[1].features[4], 210.0);
    }

    #[test]
    fn impute_uses_odd_and_even_group_medians() {
        // Class 1 chol values {1,2,3} plus one missing -> 2; class 0 {1,2,3,4}
        // plus one missing -> 2.5.
        let text = cleveland_lines(&[
            (&row("1.0", "0.0"), 1),
            (&row("2.0", "0.0"), 2),
            (&row("3.0", "0.0"), 3),
            (&row("?", "0.0"), 4),
            (&row("1.0", "0.0"), 0),
            (&row("2.0", "0.0"), 0),
            (&row("3.0", "0.0"), 0),
            (&row("4.0", "0.0"), 0),
            (&row("?", "0.0"), 0),
        ]);
        let table = parse_cleveland(text.as_bytes()).unwrap();
        assert_eq!(table.rows_with_missing(), 2);
        let ds = impute_group_median(&table).unwrap();
        assert_eq!(ds.imputed_rows, 2);
        assert_eq!(ds.samples[3].features[4], 2.0);
        assert_eq!(ds.samples[8].features[4], 2.5);
    }

    #[test]
    fn impute_errors_when_whole_class_is_missing() {
        let text = cleveland_lines(&[(&row("?", "0.0"), 1), (&row("200.0", "0.0"), 0)]);
        let table = parse_cleveland(text.as_bytes()).unwrap();
        assert!(impute_group_median(&table).is_err());
    }

    #[test]
    fn split_imputation_keeps_test_labels_out() {
        let text = cleveland_lines(&[
            (&row("10.0", "0.0"), 0),
            (&row("20.0", "0.0"), 0),
            (&row("100.0", "0.0"), 1),
            (&row("?", "0.0"), 1), // test row, label 1
        ]);
        let table = parse_cleveland(text.as_bytes()).unwrap();
        let (train, test) = impute_split_medians(&table, &[0, 1, 2], &[3]).unwrap();
        assert_eq!(train.len(), 3);
        // Overall train median of {10, 20, 100} = 20, not the class-1 value 100.
        assert_eq!(test.samples[0].features[4], 20.0);
    }

    #[test]
    fn standardize_train_is_zero_mean_unit_std() {
        let samples = (0..10)
            .map(|i| Sample {
                features: vec![i as f64, 5.0],
                label: (i % 2) as u8,
            })
            .collect();
        let train = Dataset::new(DatasetName::Synthetic, samples).unwrap();
        let (train_std, _, stats) = standardize(&train, &[]);
        let col: Vec<f64> = train_std.samples.iter().map(|s| s.features[0]).collect();
        let mean: f64 = col.iter().sum::<f64>() / col.len() as f64;
        let var: f64 = col.iter().map(|v| (v - mean) * (v - mean)).sum::<f64>() / col.len() as f64;
        assert!(mean.abs() < 1e-10);
        assert!((var.sqrt() - 1.0).abs() < 1e-10);
        // Constant column: centered to exactly zero.
        assert!(train_std.samples.iter().all(|s| s.features[1] == 0.0));
        assert_eq!(stats.stds[1], 0.0);
    }

    #[test]
    fn standardize_does_not_recenter_others() {
        let train = Dataset::new(
            DatasetName::Synthetic,
            (0..6)
                .map(|i| Sample {
                    features: vec![i as f64],
                    label: (i % 2) as u8,
                })
                .collect(),
        )
        .unwrap();
        let test = Dataset::new(
            DatasetName::Synthetic,
            vec![
                Sample {
                    features: vec![100.0],
                    label: 0,
                },
                Sample {
                    features: vec![101.0],
                    label: 1,
                },
            ],
        )
        .unwrap();
        let (_, others, _) = standardize(&train, &[&test]);
        let mean: f64 = others[0]
            .samples
            .iter()
            .map(|s| s.features[0])
            .sum::<f64>()
            / 2.0;
        assert!(mean.abs() > 1.0);
    }

    #[test]
    fn kfold_partitions_exactly() {
        let labels: Vec<u8> = (0..23).map(|i| (i % 3 == 0) as u8).collect();
        let folds = stratified_kfold(&labels, 4, 9).unwrap();
        let mut seen = vec![0usize; labels.len()];
        for (train, test) in &folds {
            for &i in test {
                seen[i] += 1;
            }
            let mut all: Vec<usize> = train.iter().chain(test.iter()).copied().collect();
            all.sort_unstable();
            assert_eq!(all, (0..labels.len()).collect::<Vec<_>>());
        }
        assert!(seen.iter().all(|&c| c == 1));
    }

    #[test]
    fn kfold_with_k_equal_to_class_size() {
        // k at the per-class count is the finest stratified split this
        // accepts: every test fold gets exactly one member of each class.
        // Full leave-one-out (k = N) would leave some class smaller than k,
        // which is rejected below.
        let labels = [0u8, 1, 0, 1];
        let folds = stratified_kfold(&labels, 2, 1).unwrap();
        assert_eq!(folds.len(), 2);
        for (_, test) in &folds {
            assert_eq!(test.len(), 2);
            let ones = test.iter().filter(|&&i| labels[i] == 1).count();
            assert_eq!(ones, 1);
        }
        assert!(matches!(
            stratified_kfold(&labels, 4, 1),
            Err(Error::Config(_))
        ));
    }

    #[test]
    fn kfold_is_seed_deterministic_and_errors_on_small_class() {
        let labels: Vec<u8> = (0..30).map(|i| (i % 2) as u8).collect();
        assert_eq!(
            stratified_kfold(&labels, 5, 42).unwrap(),
            stratified_kfold(&labels, 5, 42).unwrap()
        );
        assert_ne!(
            stratified_kfold(&labels, 5, 42).unwrap(),
            stratified_kfold(&labels, 5, 43).unwrap()
        );
        let tiny = [0u8, 0, 0, 1];
        assert!(matches!(
            stratified_kfold(&tiny, 2, 0),
            Err(Error::Config(_))
        ));
    }

    #[test]
    fn holdout_is_stratified_and_deterministic() {
        let labels: Vec<u8> = (0..100).map(|i| (i < 40) as u8).collect();
        let (train, test) = holdout_split(&labels, 0.7, 3).unwrap();
        assert_eq!(train.len() + test.len(), 100);
        let train_ones = train.iter().filter(|&&i| labels[i] == 1).count();
        assert_eq!(train_ones, 28); // round(0.7 * 40)
        assert_eq!(
            holdout_split(&labels, 0.7, 3).unwrap(),
            holdout_split(&labels, 0.7, 3).unwrap()
        );
        assert!(matches!(
            holdout_split(&labels, 1.0, 3),
            Err(Error::Config(_))
        ));
    }

    #[test]
    fn cache_round_trips_exactly() {
        let samples = vec![
            Sample {
                features: vec![0.1 + 0.2, 1.0 / 3.0, -2.5e-7],
                label: 0,
            },
            Sample {
                features: vec![std::f64::consts::PI, 2.0, 3.0],
                label: 1,
            },
        ];
        let mut ds = Dataset::new(DatasetName::Synthetic, samples).unwrap();
        ds.imputed_rows = 1;
        let mut buf = Vec::new();
        write_cache(&ds, &mut buf).unwrap();
        let back = read_cache(buf.as_slice()).unwrap();
        assert_eq!(ds, back);
    }

    #[test]
    fn cache_rejects_tampered_header() {
        let ds = Dataset::new(
            DatasetName::Synthetic,
            vec![
                Sample {
                    features: vec![1.0],
                    label: 0,
                },
                Sample {
                    features: vec![2.0],
                    label: 1,
                },
            ],
        )
        .unwrap();
        let mut buf = Vec::new();
        write_cache(&ds, &mut buf).unwrap();
        let text = String::from_utf8(buf).unwrap().replace("class0=1", "class0=2");
        assert!(read_cache(text.as_bytes()).is_err());
    }
}
