//! Deterministic generation of the bundled dataset fixtures.
//!
//! The files under `data/` are synthetic stand-ins written in the exact UCI
//! file formats (the original repository files cannot be redistributed or
//! fetched here). Feature marginals follow the familiar per-class clinical
//! ranges; the class-conditional separations are scaled by `signal` so the
//! bundled fixtures sit in the AUC regime the toolkit's regression targets
//! expect. Row counts, class balances, and missing-value placement match the
//! documented dataset properties: Cleveland 303 rows (138 healthy / 165
//! disease across raw targets 1-4) with 6 rows containing `?`, Statlog 270
//! rows (150/120) with none.

use std::fs;
use std::path::{Path, PathBuf};

use rand::seq::SliceRandom;
use rand::Rng;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, Normal};

use qforest_core::Result;

/// Default master seed for the bundled fixtures.
pub const FIXTURE_SEED: u64 = 20240501;

/// Default class-separation scale for the bundled fixtures.
pub const FIXTURE_SIGNAL: f64 = 1.0;

enum Column {
    Continuous {
        mean: [f64; 2],
        std: [f64; 2],
        min: f64,
        max: f64,
    },
    Categorical {
        values: &'static [f64],
        weights: [&'static [f64]; 2],
    },
}

/// Per-class generators for the 13 features, in file column order:
/// age, sex, cp, trestbps, chol, fbs, restecg, thalach, exang, oldpeak,
/// slope, ca, thal.
fn schema() -> Vec<Column> {
    vec![
        Column::Continuous {
            mean: [51.0, 57.0],
            std: [9.0, 8.0],
            min: 29.0,
            max: 77.0,
        },
        Column::Categorical {
            values: &[0.0, 1.0],
            weights: [&[0.44, 0.56], &[0.17, 0.83]],
        },
        Column::Categorical {
            values: &[1.0, 2.0, 3.0, 4.0],
            weights: [&[0.25, 0.30, 0.30, 0.15], &[0.04, 0.08, 0.14, 0.74]],
        },
        Column::Continuous {
            mean: [128.0, 136.0],
            std: [16.0, 18.0],
            min: 94.0,
            max: 200.0,
        },
        Column::Continuous {
            mean: [240.0, 256.0],
            std: [50.0, 48.0],
            min: 126.0,
            max: 564.0,
        },
        Column::Categorical {
            values: &[0.0, 1.0],
            weights: [&[0.88, 0.12], &[0.82, 0.18]],
        },
        Column::Categorical {
            values: &[0.0, 1.0, 2.0],
            weights: [&[0.60, 0.05, 0.35], &[0.42, 0.05, 0.53]],
        },
        Column::Continuous {
            mean: [160.0, 138.0],
            std: [18.0, 22.0],
            min: 71.0,
            max: 202.0,
        },
        Column::Categorical {
            values: &[0.0, 1.0],
            weights: [&[0.86, 0.14], &[0.45, 0.55]],
        },
        Column::Continuous {
            mean: [0.6, 1.8],
            std: [0.75, 1.1],
            min: 0.0,
            max: 6.2,
        },
        Column::Categorical {
            values: &[1.0, 2.0, 3.0],
            weights: [&[0.64, 0.31, 0.05], &[0.22, 0.65, 0.13]],
        },
        Column::Categorical {
            values: &[0.0, 1.0, 2.0, 3.0],
            weights: [&[0.74, 0.16, 0.07, 0.03], &[0.27, 0.32, 0.24, 0.17]],
        },
        Column::Categorical {
            values: &[3.0, 6.0, 7.0],
            weights: [&[0.79, 0.08, 0.13], &[0.25, 0.12, 0.63]],
        },
    ]
}

/// Column index of oldpeak, the only feature printed with a fractional part.
const OLDPEAK: usize = 9;
const CA: usize = 11;
const THAL: usize = 12;

fn scaled_mean(mean: [f64; 2], class: usize, signal: f64) -> f64 {
    let mid = (mean[0] + mean[1]) / 2.0;
    mid + signal * (mean[class] - mid)
}

fn scaled_weights(weights: [&[f64]; 2], class: usize, signal: f64) -> Vec<f64> {
    let scaled: Vec<f64> = weights[0]
        .iter()
        .zip(weights[1])
        .map(|(w0, w1)| {
            let mid = (w0 + w1) / 2.0;
            let own = if class == 0 { *w0 } else { *w1 };
            (mid + signal * (own - mid)).max(0.01)
        })
        .collect();
    let total: f64 = scaled.iter().sum();
    scaled.into_iter().map(|w| w / total).collect()
}

fn sample_row(rng: &mut ChaCha8Rng, class: usize, signal: f64, columns: &[Column]) -> Vec<f64> {
    columns
        .iter()
        .enumerate()
        .map(|(col, spec)| match spec {
            Column::Continuous { mean, std, min, max } => {
                let normal = Normal::new(scaled_mean(*mean, class, signal), std[class]).unwrap();
                let value: f64 = normal.sample(rng).clamp(*min, *max);
                if col == OLDPEAK {
                    (value * 10.0).round() / 10.0
                } else {
                    value.round()
                }
            }
            Column::Categorical { values, weights } => {
                let w = scaled_weights(*weights, class, signal);
                let mut draw = rng.gen_range(0.0..1.0);
                for (value, weight) in values.iter().zip(&w) {
                    if draw < *weight {
                        return *value;
                    }
                    draw -= weight;
                }
                *values.last().unwrap()
            }
        })
        .collect()
}

/// 303 Cleveland-format lines: comma-separated, `?` in 6 rows (4 in ca, 2 in
/// thal), raw targets 0 and 1..=4.
pub fn cleveland_text(seed: u64, signal: f64) -> String {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let columns = schema();

    // 138 healthy, 165 disease split over raw targets 1-4.
    let mut targets: Vec<u8> = Vec::with_capacity(303);
    targets.extend(std::iter::repeat_n(0u8, 138));
    for (target, count) in [(1u8, 60), (2u8, 45), (3u8, 40), (4u8, 20)] {
        targets.extend(std::iter::repeat_n(target, count));
    }
    targets.shuffle(&mut rng);

    let mut missing_rows: Vec<usize> = (0..targets.len()).collect();
    missing_rows.shuffle(&mut rng);
    let missing_ca = &missing_rows[..4];
    let missing_thal = &missing_rows[4..6];

    let mut out = String::new();
    for (row_idx, &target) in targets.iter().enumerate() {
        let class = usize::from(target > 0);
        let features = sample_row(&mut rng, class, signal, &columns);
        let mut fields: Vec<String> = features
            .iter()
            .map(|v| format!("{v:.1}"))
            .collect();
        if missing_ca.contains(&row_idx) {
            fields[CA] = "?".to_string();
        }
        if missing_thal.contains(&row_idx) {
            fields[THAL] = "?".to_string();
        }
        out.push_str(&fields.join(","));
        out.push(',');
        out.push_str(&target.to_string());
        out.push('\n');
    }
    out
}

/// 270 Statlog-format lines: space-separated, label 1 (absence) or 2
/// (presence), no missing values. The Statlog file is cleaner than Cleveland,
/// so it gets a mildly stronger separation.
pub fn statlog_text(seed: u64, signal: f64) -> String {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let columns = schema();
    let signal = signal * 1.1;

    let mut labels: Vec<u8> = Vec::with_capacity(270);
    labels.extend(std::iter::repeat_n(1u8, 150));
    labels.extend(std::iter::repeat_n(2u8, 120));
    labels.shuffle(&mut rng);

    let mut out = String::new();
    for &label in &labels {
        let class = usize::from(label == 2);
        let features = sample_row(&mut rng, class, signal, &columns);
        let fields: Vec<String> = features.iter().map(|v| format!("{v:.1}")).collect();
        out.push_str(&fields.join(" "));
        out.push(' ');
        out.push_str(&label.to_string());
        out.push('\n');
    }
    out
}

/// Write both fixtures into `dir` and return their paths.
pub fn write_fixtures(dir: &Path, seed: u64, signal: f64) -> Result<(PathBuf, PathBuf)> {
    fs::create_dir_all(dir)?;
    let cleveland = dir.join("cleveland.data");
    fs::write(&cleveland, cleveland_text(seed, signal))?;
    let statlog = dir.join("statlog.dat");
    fs::write(&statlog, statlog_text(seed.wrapping_add(1), signal))?;
    Ok((cleveland, statlog))
}

#[cfg(test)]
mod tests {
    use super::*;
    use qforest_core::dataio::{parse_cleveland, parse_statlog};

    #[test]
    fn cleveland_fixture_matches_documented_counts() {
        let text = cleveland_text(FIXTURE_SEED, FIXTURE_SIGNAL);
        let table = parse_cleveland(text.as_bytes()).unwrap();
        assert_eq!(table.len(), 303);
        assert_eq!(table.rows_with_missing(), 6);
        let ones = table.labels.iter().filter(|&&l| l == 1).count();
        assert_eq!((table.len() - ones, ones), (138, 165));
    }

    #[test]
    fn statlog_fixture_matches_documented_counts() {
        let text = statlog_text(FIXTURE_SEED, FIXTURE_SIGNAL);
        let table = parse_statlog(text.as_bytes()).unwrap();
        assert_eq!(table.len(), 270);
        assert_eq!(table.rows_with_missing(), 0);
        let ones = table.labels.iter().filter(|&&l| l == 1).count();
        assert_eq!((table.len() - ones, ones), (150, 120));
    }

    #[test]
    fn generation_is_deterministic() {
        assert_eq!(
            cleveland_text(FIXTURE_SEED, FIXTURE_SIGNAL),
            cleveland_text(FIXTURE_SEED, FIXTURE_SIGNAL)
        );
        assert_ne!(
            cleveland_text(FIXTURE_SEED, FIXTURE_SIGNAL),
            cleveland_text(FIXTURE_SEED + 1, FIXTURE_SIGNAL)
        );
    }
}
