//! Confusion-based metrics, ROC/AUC, test-set log-likelihood and AIC.

use serde::Serialize;
use thiserror::Error;

use crate::ingest::Dataset;
use crate::learners::{Category, FittedModel};

/// Probabilities are clipped to `[PROB_CLIP, 1 - PROB_CLIP]` before logs.
pub const PROB_CLIP: f64 = 1e-6;

#[derive(Debug, Error, PartialEq)]
pub enum EvalError {
    #[error("confusion matrix is empty")]
    EmptyMatrix,
    #[error("ROC needs both classes among the labels")]
    SingleClass,
    #[error("no rows to evaluate")]
    NoRows,
}

/// Counts with class 1 as the positive class.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Serialize)]
pub struct ConfusionMatrix {
    pub tp: u64,
    pub fp: u64,
    #[serde(rename = "fn")]
    pub fn_: u64,
    pub tn: u64,
}

impl ConfusionMatrix {
    pub fn from_pairs(pairs: impl IntoIterator<Item = (u8, u8)>) -> ConfusionMatrix {
        let mut c = ConfusionMatrix::default();
        for (predicted, actual) in pairs {
            match (predicted, actual) {
                (1, 1) => c.tp += 1,
                (1, _) => c.fp += 1,
                (_, 1) => c.fn_ += 1,
                _ => c.tn += 1,
            }
        }
        c
    }

    pub fn total(&self) -> u64 {
        self.tp + self.fp + self.fn_ + self.tn
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct Metrics {
    pub accuracy: f64,
    pub precision: f64,
    pub recall: f64,
    pub f_measure: f64,
}

fn ratio(num: u64, den: u64) -> f64 {
    if den == 0 {
        0.0
    } else {
        num as f64 / den as f64
    }
}

pub fn f_measure(precision: f64, recall: f64) -> f64 {
    if precision + recall > 0.0 {
        2.0 * precision * recall / (precision + recall)
    } else {
        0.0
    }
}

/// Accuracy, precision, recall and F-measure. Undefined ratios are 0.
pub fn classification_metrics(c: &ConfusionMatrix) -> Result<Metrics, EvalError> {
    if c.total() == 0 {
        return Err(EvalError::EmptyMatrix);
    }
    let precision = ratio(c.tp, c.tp + c.fp);
    let recall = ratio(c.tp, c.tp + c.fn_);
    Ok(Metrics {
        accuracy: ratio(c.tp + c.tn, c.total()),
        precision,
        recall,
        f_measure: f_measure(precision, recall),
    })
}

/// ROC vertices. `points[0]` is (0, 0) for the +inf sentinel threshold and
/// `points[i + 1]` belongs to `thresholds[i]`.
#[derive(Debug, Clone, PartialEq)]
pub struct RocCurve {
    /// (false positive rate, true positive rate)
    pub points: Vec<(f64, f64)>,
    /// Distinct scores, descending.
    pub thresholds: Vec<f64>,
}

impl RocCurve {
    /// `threshold,fpr,tpr` rows, sentinel first as `inf`.
    pub fn to_csv(&self) -> String {
        let mut out = String::from("threshold,fpr,tpr\n");
        for (i, (fpr, tpr)) in self.points.iter().enumerate() {
            let t = if i == 0 {
                "inf".to_string()
            } else {
                self.thresholds[i - 1].to_string()
            };
            out.push_str(&format!("{t},{fpr},{tpr}\n"));
        }
        out
    }
}

/// Sweeps every distinct score from high to low; tied scores move together.
pub fn roc_curve(scores: &[(f64, u8)]) -> Result<RocCurve, EvalError> {
    let positives = scores.iter().filter(|s| s.1 == 1).count();
    let negatives = scores.len() - positives;
    if positives == 0 || negatives == 0 {
        return Err(EvalError::SingleClass);
    }
    let mut sorted = scores.to_vec();
    sorted.sort_by(|a, b| b.0.total_cmp(&a.0));

    let mut points = vec![(0.0, 0.0)];
    let mut thresholds = Vec::new();
    let (mut tp, mut fp) = (0usize, 0usize);
    let mut i = 0;
    while i < sorted.len() {
        let t = sorted[i].0;
        while i < sorted.len() && sorted[i].0 == t {
            if sorted[i].1 == 1 {
                tp += 1;
            } else {
                fp += 1;
            }
            i += 1;
        }
        thresholds.push(t);
        points.push((fp as f64 / negatives as f64, tp as f64 / positives as f64));
    }
    Ok(RocCurve { points, thresholds })
}

/// Trapezoidal area under the curve.
pub fn auc(curve: &RocCurve) -> f64 {
    curve
        .points
        .windows(2)
        .map(|w| (w[1].0 - w[0].0) * (w[1].1 + w[0].1) / 2.0)
        .sum()
}

fn clip(p: f64) -> f64 {
    p.clamp(PROB_CLIP, 1.0 - PROB_CLIP)
}

/// Natural-log likelihood of the true labels under the predicted
/// class-1 probabilities.
pub fn log_likelihood(predictions: &[(f64, u8)]) -> f64 {
    predictions
        .iter()
        .map(|&(p, y)| {
            let p = clip(p);
            if y == 1 {
                p.ln()
            } else {
                (1.0 - p).ln()
            }
        })
        .sum()
}

/// `2k - 2 ln L`.
pub fn aic_score(k: usize, log_likelihood: f64) -> f64 {
    2.0 * k as f64 - 2.0 * log_likelihood
}

#[derive(Debug, Clone, Serialize)]
pub struct EvaluationRecord {
    pub model_name: String,
    pub category: Category,
    pub accuracy: f64,
    pub precision: f64,
    pub recall: f64,
    pub f_measure: f64,
    /// `None` when the test set holds a single class.
    pub auc: Option<f64>,
    pub log_likelihood: f64,
    pub param_count: usize,
    pub aic: f64,
    pub confusion: ConfusionMatrix,
    #[serde(skip)]
    pub roc: Option<RocCurve>,
}

impl EvaluationRecord {
    /// Record from raw predictions; used by [`evaluate_model`] and handy for
    /// building records without a model.
    pub fn from_predictions(
        model_name: &str,
        category: Category,
        param_count: usize,
        scored: &[(f64, u8)],
    ) -> Result<EvaluationRecord, EvalError> {
        if scored.is_empty() {
            return Err(EvalError::NoRows);
        }
        let confusion = ConfusionMatrix::from_pairs(
            scored.iter().map(|&(p, y)| (u8::from(p >= 0.5), y)),
        );
        let m = classification_metrics(&confusion)?;
        let roc = roc_curve(scored).ok();
        let ll = log_likelihood(scored);
        Ok(EvaluationRecord {
            model_name: model_name.to_string(),
            category,
            accuracy: m.accuracy,
            precision: m.precision,
            recall: m.recall,
            f_measure: m.f_measure,
            auc: roc.as_ref().map(auc),
            log_likelihood: ll,
            param_count,
            aic: aic_score(param_count, ll),
            confusion,
            roc,
        })
    }
}

/// Scores every test row and assembles the full record.
pub fn evaluate_model(model: &FittedModel, test: &Dataset) -> Result<EvaluationRecord, EvalError> {
    let scored: Vec<(f64, u8)> = (0..test.n_rows())
        .map(|r| (model.predict(&test.feature_row(r)).probability, test.rows[r][test.target_index] as u8))
        .collect();
    EvaluationRecord::from_predictions(&model.spec.name, model.spec.category, model.param_count(), &scored)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::learners::{fit, Hyperparameters, LearnerSpec};

    #[test]
    fn metric_examples() {
        let c = ConfusionMatrix { tp: 8, fp: 2, fn_: 1, tn: 9 };
        let m = classification_metrics(&c).unwrap();
        assert!((m.accuracy - 0.85).abs() < 1e-15);
        assert!((m.precision - 0.8).abs() < 1e-15);
        assert!((m.recall - 8.0 / 9.0).abs() < 1e-15);
        assert!((m.f_measure - 0.842_105_263_157_894_7).abs() < 1e-12);

        let perfect = ConfusionMatrix { tp: 3, fp: 0, fn_: 0, tn: 4 };
        let m = classification_metrics(&perfect).unwrap();
        assert_eq!((m.accuracy, m.precision, m.recall, m.f_measure), (1.0, 1.0, 1.0, 1.0));

        let none_positive = ConfusionMatrix { tp: 0, fp: 0, fn_: 3, tn: 4 };
        let m = classification_metrics(&none_positive).unwrap();
        assert_eq!((m.precision, m.recall, m.f_measure), (0.0, 0.0, 0.0));

        assert_eq!(
            classification_metrics(&ConfusionMatrix::default()),
            Err(EvalError::EmptyMatrix)
        );
    }

    #[test]
    fn roc_examples() {
        let c = roc_curve(&[(0.9, 1), (0.8, 0), (0.7, 1), (0.1, 0)]).unwrap();
        assert_eq!(
            c.points,
            vec![(0.0, 0.0), (0.0, 0.5), (0.5, 0.5), (0.5, 1.0), (1.0, 1.0)]
        );
        assert_eq!(c.thresholds, vec![0.9, 0.8, 0.7, 0.1]);
        assert!((auc(&c) - 0.75).abs() < 1e-15);

        let perfect = roc_curve(&[(0.9, 1), (0.8, 1), (0.3, 0), (0.2, 0)]).unwrap();
        assert!(perfect.points.contains(&(0.0, 1.0)));
        assert_eq!(auc(&perfect), 1.0);

        let flat = roc_curve(&[(0.4, 1), (0.4, 0), (0.4, 0)]).unwrap();
        assert_eq!(flat.points, vec![(0.0, 0.0), (1.0, 1.0)]);
        assert_eq!(auc(&flat), 0.5);

        assert_eq!(roc_curve(&[(0.4, 1), (0.3, 1)]), Err(EvalError::SingleClass));
    }

    #[test]
    fn roc_csv_dump() {
        let c = roc_curve(&[(0.9, 1), (0.1, 0)]).unwrap();
        assert_eq!(c.to_csv(), "threshold,fpr,tpr\ninf,0,0\n0.9,0,1\n0.1,1,1\n");
    }

    #[test]
    fn likelihood_examples() {
        let ll = log_likelihood(&[(1.0, 1), (0.0, 0)]);
        assert!((ll - 2.0 * (1.0 - 1e-6f64).ln()).abs() < 1e-15);
        assert!((ll + 2e-6).abs() < 1e-11);
        assert!((log_likelihood(&[(0.5, 1), (0.5, 0)]) + 1.386_294_361_119_890_6).abs() < 1e-12);
        assert!((log_likelihood(&[(0.0, 1)]) - 1e-6f64.ln()).abs() < 1e-12);
    }

    #[test]
    fn aic_examples() {
        assert_eq!(aic_score(2, -5.0), 14.0);
        assert_eq!(aic_score(0, 0.0), 0.0);
        assert_eq!(aic_score(3, -10.0), 26.0);
    }

    #[test]
    fn constant_majority_classifier() {
        let scored: Vec<(f64, u8)> = (0..10).map(|i| (0.3, u8::from(i < 4))).collect();
        let r = EvaluationRecord::from_predictions("const", Category::Eager, 1, &scored).unwrap();
        assert!((r.accuracy - 0.6).abs() < 1e-15);
        assert_eq!(r.recall, 0.0);
        assert_eq!(r.auc, Some(0.5));
    }

    #[test]
    fn single_class_test_has_no_auc() {
        let r = EvaluationRecord::from_predictions("x", Category::Lazy, 2, &[(0.7, 1), (0.2, 1)]).unwrap();
        assert_eq!(r.auc, None);
        assert!(r.roc.is_none());
        assert_eq!(r.aic, 2.0 * 2.0 - 2.0 * r.log_likelihood);
    }

    #[test]
    fn perfect_tree_record() {
        let x: Vec<Vec<f64>> = (0..40).map(|i| vec![i as f64]).collect();
        let y: Vec<u8> = (0..40).map(|i| u8::from(i >= 20)).collect();
        let d = Dataset::from_features("p", &x, &y).unwrap();
        let spec = LearnerSpec::new("DT", Hyperparameters::default()).unwrap();
        let model = fit(&spec, &d, 1).unwrap();
        let r = evaluate_model(&model, &d).unwrap();
        assert_eq!(r.accuracy, 1.0);
        assert_eq!(r.auc, Some(1.0));
        assert_eq!(r.param_count, 1);
        assert_eq!(r.aic, 2.0 - 2.0 * r.log_likelihood);
        assert!(r.log_likelihood < 0.0);
    }
}
