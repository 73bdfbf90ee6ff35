//! Confusion-matrix summaries, ROC curves, and trapezoidal AUC.
//!
//! Class 1 is positive. A sample is predicted positive iff `score >= threshold`
//! (closed on the left, so ties at the threshold go to class 1). The ROC curve
//! uses the conventional axes x = FPR = 1 − specificity, y = TPR = sensitivity,
//! sweeping thresholds over the unique scores from +inf downward; tied scores
//! are processed together, which makes the trapezoidal area equal to the
//! Mann-Whitney statistic with ties counted half.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct ConfusionMatrix {
    pub true_pos: usize,
    pub true_neg: usize,
    pub false_pos: usize,
    pub false_neg: usize,
}

impl ConfusionMatrix {
    pub fn total(&self) -> usize {
        self.true_pos + self.true_neg + self.false_pos + self.false_neg
    }
}

/// Derived rates; `None` where the denominator is zero (undefined, not 0).
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SummaryMetrics {
    pub accuracy: Option<f64>,
    pub sensitivity: Option<f64>,
    pub specificity: Option<f64>,
    pub ppv: Option<f64>,
    pub f1: Option<f64>,
}

/// One ROC operating point. The threshold of the origin point is +inf, which
/// JSON cannot carry as a number, so it round-trips as the string "inf".
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct RocPoint {
    pub fpr: f64,
    pub tpr: f64,
    #[serde(with = "serde_threshold")]
    pub threshold: f64,
}

mod serde_threshold {
    use serde::{Deserialize, Deserializer, Serializer};

    pub fn serialize<S: Serializer>(value: &f64, s: S) -> Result<S::Ok, S::Error> {
        if value.is_finite() {
            s.serialize_f64(*value)
        } else if *value > 0.0 {
            s.serialize_str("inf")
        } else {
            s.serialize_str("-inf")
        }
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(d: D) -> Result<f64, D::Error> {
        #[derive(Deserialize)]
        #[serde(untagged)]
        enum Raw {
            Num(f64),
            Text(String),
        }
        match Raw::deserialize(d)? {
            Raw::Num(v) => Ok(v),
            Raw::Text(t) => match t.as_str() {
                "inf" => Ok(f64::INFINITY),
                "-inf" => Ok(f64::NEG_INFINITY),
                other => Err(serde::de::Error::custom(format!(
                    "bad threshold '{other}'"
                ))),
            },
        }
    }
}

/// ROC curve with its trapezoidal area.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RocCurve {
    pub points: Vec<RocPoint>,
    pub auc: f64,
}

fn check_scores_labels(scores: &[f64], labels: &[u8]) -> Result<()> {
    if scores.is_empty() || scores.len() != labels.len() {
        return Err(Error::structure(format!(
            "scores/labels length mismatch: {} vs {}",
            scores.len(),
            labels.len()
        )));
    }
    if let Some(pos) = scores.iter().position(|s| !s.is_finite()) {
        return Err(Error::numeric(format!(
            "non-finite score {} at index {pos}",
            scores[pos]
        )));
    }
    if let Some(pos) = labels.iter().position(|&l| l > 1) {
        return Err(Error::structure(format!(
            "label {} at index {pos} is not binary",
            labels[pos]
        )));
    }
    Ok(())
}

/// Count TP/TN/FP/FN under the `score >= threshold` rule.
pub fn confusion(scores: &[f64], labels: &[u8], threshold: f64) -> Result<ConfusionMatrix> {
    check_scores_labels(scores, labels)?;
    let mut cm = ConfusionMatrix {
        true_pos: 0,
        true_neg: 0,
        false_pos: 0,
        false_neg: 0,
    };
    for (&score, &label) in scores.iter().zip(labels) {
        let predicted = score >= threshold;
        match (predicted, label) {
            (true, 1) => cm.true_pos += 1,
            (true, 0) => cm.false_pos += 1,
            (false, 1) => cm.false_neg += 1,
            (false, 0) => cm.true_neg += 1,
            _ => unreachable!("labels validated binary"),
        }
    }
    Ok(cm)
}

fn ratio(num: usize, den: usize) -> Option<f64> {
    if den == 0 {
        None
    } else {
        Some(num as f64 / den as f64)
    }
}

/// Accuracy, sensitivity, specificity, PPV and F1 from the counts.
pub fn summary_metrics(cm: &ConfusionMatrix) -> SummaryMetrics {
    let accuracy = ratio(cm.true_pos + cm.true_neg, cm.total());
    let sensitivity = ratio(cm.true_pos, cm.true_pos + cm.false_neg);
    let specificity = ratio(cm.true_neg, cm.true_neg + cm.false_pos);
    let ppv = ratio(cm.true_pos, cm.true_pos + cm.false_pos);
    let f1 = match (ppv, sensitivity) {
        (Some(p), Some(s)) if p + s > 0.0 => Some(2.0 * p * s / (p + s)),
        _ => None,
    };
    SummaryMetrics {
        accuracy,
        sensitivity,
        specificity,
        ppv,
        f1,
    }
}

/// Build the ROC curve and its trapezoidal AUC.
///
/// Errors with a metric error when only one class is present (AUC undefined).
pub fn roc_auc(scores: &[f64], labels: &[u8]) -> Result<RocCurve> {
    check_scores_labels(scores, labels)?;
    let pos_total = labels.iter().filter(|&&l| l == 1).count();
    let neg_total = labels.len() - pos_total;
    if pos_total == 0 || neg_total == 0 {
        return Err(Error::metric(
            "AUC undefined: both classes must be present".to_string(),
        ));
    }

    // Descending by score; ties grouped so they are processed together.
    let mut order: Vec<usize> = (0..scores.len()).collect();
    order.sort_by(|&a, &b| scores[b].partial_cmp(&scores[a]).expect("finite scores"));

    let mut points = vec![RocPoint {
        fpr: 0.0,
        tpr: 0.0,
        threshold: f64::INFINITY,
    }];
    let mut auc = 0.0;
    let mut tp = 0usize;
    let mut fp = 0usize;
    let mut i = 0;
    while i < order.len() {
        let threshold = scores[order[i]];
        let mut j = i;
        while j < order.len() && scores[order[j]] == threshold {
            if labels[order[j]] == 1 {
                tp += 1;
            } else {
                fp += 1;
            }
            j += 1;
        }
        let prev = *points.last().expect("at least the origin");
        let point = RocPoint {
            fpr: fp as f64 / neg_total as f64,
            tpr: tp as f64 / pos_total as f64,
            threshold,
        };
        auc += (point.fpr - prev.fpr) * (point.tpr + prev.tpr) / 2.0;
        points.push(point);
        i = j;
    }
    Ok(RocCurve { points, auc })
}

/// Render a curve as `fpr,tpr,threshold` lines with a header, the format the
/// grid runner writes next to its reports.
pub fn roc_to_csv(curve: &RocCurve) -> String {
    let mut out = String::from("fpr,tpr,threshold\n");
    for p in &curve.points {
        out.push_str(&format!("{},{},{}\n", p.fpr, p.tpr, p.threshold));
    }
    out
}
