//! Score normalisation, weighted aggregation, per-category averages and the
//! final recommendation.
//!
//! Each criterion is min-max normalised across the candidate models before
//! weighting, so that AIC (tens to thousands) and the metrics (0 to 1) are
//! commensurable. AIC enters inverted: the lowest AIC normalises to 1.

use std::cmp::Ordering;

use log::warn;
use serde::Serialize;
use thiserror::Error;

use crate::evaluation::EvaluationRecord;
use crate::learners::Category;

pub const CRITERIA: [&str; 5] = ["accuracy", "precision", "recall", "f_measure", "aic"];

#[derive(Debug, Error, PartialEq)]
pub enum RecommendError {
    #[error("need at least 2 evaluated models, got {0}")]
    TooFewRecords(usize),
    #[error("weights must be finite and non-negative")]
    InvalidWeight,
    #[error("at least one weight must be positive")]
    ZeroWeights,
}

/// Criterion weights in `CRITERIA` order.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct Weights {
    pub accuracy: f64,
    pub precision: f64,
    pub recall: f64,
    pub f_measure: f64,
    pub aic: f64,
}

impl Default for Weights {
    fn default() -> Self {
        Weights::equal()
    }
}

impl Weights {
    pub fn equal() -> Weights {
        Weights {
            accuracy: 0.2,
            precision: 0.2,
            recall: 0.2,
            f_measure: 0.2,
            aic: 0.2,
        }
    }

    pub fn from_array(w: [f64; 5]) -> Result<Weights, RecommendError> {
        let weights = Weights {
            accuracy: w[0],
            precision: w[1],
            recall: w[2],
            f_measure: w[3],
            aic: w[4],
        };
        weights.normalized()?;
        Ok(weights)
    }

    pub fn as_array(&self) -> [f64; 5] {
        [self.accuracy, self.precision, self.recall, self.f_measure, self.aic]
    }

    /// Weights rescaled to sum to 1.
    pub fn normalized(&self) -> Result<[f64; 5], RecommendError> {
        let w = self.as_array();
        if w.iter().any(|v| !v.is_finite() || *v < 0.0) {
            return Err(RecommendError::InvalidWeight);
        }
        let sum: f64 = w.iter().sum();
        if sum <= 0.0 {
            return Err(RecommendError::ZeroWeights);
        }
        Ok(w.map(|v| v / sum))
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct CriterionRange {
    pub criterion: String,
    pub min: f64,
    pub max: f64,
}

fn raw_criteria(r: &EvaluationRecord) -> [f64; 5] {
    [r.accuracy, r.precision, r.recall, r.f_measure, r.aic]
}

fn minmax(value: f64, min: f64, max: f64) -> f64 {
    if max > min {
        ((value - min) / (max - min)).clamp(0.0, 1.0)
    } else {
        1.0
    }
}

/// Per-model criterion vectors in `[0, 1]`, plus the raw range of each
/// criterion. A criterion on which every model ties normalises to 1.
pub fn normalize_scores(
    records: &[EvaluationRecord],
) -> Result<(Vec<[f64; 5]>, Vec<CriterionRange>), RecommendError> {
    if records.len() < 2 {
        return Err(RecommendError::TooFewRecords(records.len()));
    }
    let raw: Vec<[f64; 5]> = records.iter().map(raw_criteria).collect();
    let ranges: Vec<CriterionRange> = (0..5)
        .map(|c| CriterionRange {
            criterion: CRITERIA[c].to_string(),
            min: raw.iter().map(|r| r[c]).fold(f64::INFINITY, f64::min),
            max: raw.iter().map(|r| r[c]).fold(f64::NEG_INFINITY, f64::max),
        })
        .collect();
    let normalized = raw
        .iter()
        .map(|r| {
            let mut out = [0.0; 5];
            for c in 0..5 {
                let v = minmax(r[c], ranges[c].min, ranges[c].max);
                out[c] = if c == 4 && ranges[c].max > ranges[c].min {
                    1.0 - v
                } else {
                    v
                };
            }
            out
        })
        .collect();
    Ok((normalized, ranges))
}

/// Convex combination of normalised criteria.
pub fn weighted_score(criteria: &[f64; 5], weights: &Weights) -> Result<f64, RecommendError> {
    let w = weights.normalized()?;
    Ok(criteria.iter().zip(w).map(|(c, w)| c * w).sum::<f64>().clamp(0.0, 1.0))
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct CategorySummary {
    pub category: Category,
    pub avg_accuracy: f64,
    pub avg_precision: f64,
    pub avg_recall: f64,
    pub avg_f_measure: f64,
    pub avg_aic: f64,
    pub member_count: usize,
}

/// Arithmetic means per category in eager, lazy, hybrid order. Categories
/// without members are left out.
pub fn category_averages(records: &[EvaluationRecord]) -> Vec<CategorySummary> {
    Category::ALL
        .iter()
        .filter_map(|&category| {
            let members: Vec<&EvaluationRecord> =
                records.iter().filter(|r| r.category == category).collect();
            if members.is_empty() {
                warn!("no {category} models evaluated; category summary omitted");
                return None;
            }
            let n = members.len() as f64;
            let mean = |f: fn(&EvaluationRecord) -> f64| members.iter().map(|r| f(r)).sum::<f64>() / n;
            Some(CategorySummary {
                category,
                avg_accuracy: mean(|r| r.accuracy),
                avg_precision: mean(|r| r.precision),
                avg_recall: mean(|r| r.recall),
                avg_f_measure: mean(|r| r.f_measure),
                avg_aic: mean(|r| r.aic),
                member_count: members.len(),
            })
        })
        .collect()
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct RankedModel {
    pub model_name: String,
    pub composite_score: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Recommendation {
    /// Composite score descending; ties by accuracy, F-measure, then name.
    pub ranked_models: Vec<RankedModel>,
    pub best_by_accuracy: String,
    pub best_by_aic: String,
    pub best_overall: String,
    /// Weights after normalisation to sum 1.
    pub weights: Weights,
    pub ranges: Vec<CriterionRange>,
}

/// Higher accuracy first, then higher F-measure, then name.
pub fn by_accuracy_order(a: &EvaluationRecord, b: &EvaluationRecord) -> Ordering {
    b.accuracy
        .total_cmp(&a.accuracy)
        .then(b.f_measure.total_cmp(&a.f_measure))
        .then_with(|| a.model_name.cmp(&b.model_name))
}

pub fn recommend_model(
    records: &[EvaluationRecord],
    weights: &Weights,
) -> Result<Recommendation, RecommendError> {
    let (normalized, ranges) = normalize_scores(records)?;
    let w = weights.normalized()?;

    let mut scored = records
        .iter()
        .zip(&normalized)
        .map(|(r, c)| Ok((r, weighted_score(c, weights)?)))
        .collect::<Result<Vec<_>, RecommendError>>()?;
    // equal composites fall back to the accuracy-basis order
    scored.sort_by(|(ra, a), (rb, b)| b.total_cmp(a).then_with(|| by_accuracy_order(ra, rb)));
    let ranked: Vec<RankedModel> = scored
        .into_iter()
        .map(|(r, composite_score)| RankedModel {
            model_name: r.model_name.clone(),
            composite_score,
        })
        .collect();

    let by_accuracy = records.iter().min_by(|a, b| by_accuracy_order(a, b)).unwrap();
    let by_aic = records
        .iter()
        .min_by(|a, b| match a.aic.total_cmp(&b.aic) {
            Ordering::Equal => a.model_name.cmp(&b.model_name),
            o => o,
        })
        .unwrap();

    Ok(Recommendation {
        best_overall: ranked[0].model_name.clone(),
        ranked_models: ranked,
        best_by_accuracy: by_accuracy.model_name.clone(),
        best_by_aic: by_aic.model_name.clone(),
        weights: Weights {
            accuracy: w[0],
            precision: w[1],
            recall: w[2],
            f_measure: w[3],
            aic: w[4],
        },
        ranges,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::evaluation::ConfusionMatrix;

    fn record(name: &str, category: Category, m: [f64; 4], aic: f64) -> EvaluationRecord {
        EvaluationRecord {
            model_name: name.into(),
            category,
            accuracy: m[0],
            precision: m[1],
            recall: m[2],
            f_measure: m[3],
            auc: Some(0.5),
            log_likelihood: -aic / 2.0,
            param_count: 0,
            aic,
            confusion: ConfusionMatrix::default(),
            roc: None,
        }
    }

    #[test]
    fn min_max_examples() {
        let rs = vec![
            record("a", Category::Eager, [0.8, 0.5, 0.5, 0.5], 10.0),
            record("b", Category::Eager, [0.9, 0.5, 0.5, 0.5], 20.0),
            record("c", Category::Lazy, [1.0, 0.5, 0.5, 0.5], 20.0),
        ];
        let (n, ranges) = normalize_scores(&rs).unwrap();
        assert_eq!([n[0][0], n[1][0], n[2][0]], [0.0, 0.5, 1.0]);
        assert_eq!([n[0][4], n[1][4]], [1.0, 0.0]);
        assert!(n.iter().all(|c| c[1] == 1.0));
        assert_eq!(ranges[4].min, 10.0);
        assert_eq!(
            normalize_scores(&rs[..1]),
            Err(RecommendError::TooFewRecords(1))
        );
    }

    #[test]
    fn weighted_examples() {
        let w = Weights::equal();
        assert_eq!(weighted_score(&[1.0; 5], &w).unwrap(), 1.0);
        let only_acc = Weights::from_array([1.0, 0.0, 0.0, 0.0, 0.0]).unwrap();
        assert_eq!(weighted_score(&[1.0, 0.0, 0.0, 0.0, 0.0], &only_acc).unwrap(), 1.0);
        assert!((weighted_score(&[1.0, 1.0, 1.0, 1.0, 0.0], &w).unwrap() - 0.8).abs() < 1e-15);
        assert_eq!(
            Weights::from_array([0.0; 5]),
            Err(RecommendError::ZeroWeights)
        );
        assert_eq!(
            Weights::from_array([1.0, -1.0, 0.0, 0.0, 0.0]),
            Err(RecommendError::InvalidWeight)
        );
    }

    #[test]
    fn averages_per_category() {
        let rs = vec![
            record("DT", Category::Eager, [0.9, 0.8, 0.7, 0.6], 10.0),
            record("SVM", Category::Eager, [1.0, 1.0, 1.0, 1.0], 20.0),
            record("KNN", Category::Lazy, [0.5, 0.5, 0.5, 0.5], 30.0),
        ];
        let s = category_averages(&rs);
        assert_eq!(s.len(), 2);
        assert_eq!(s[0].category, Category::Eager);
        assert!((s[0].avg_accuracy - 0.95).abs() < 1e-15);
        assert_eq!(s[0].avg_aic, 15.0);
        assert_eq!(s[0].member_count, 2);
        assert_eq!(s[1].category, Category::Lazy);
    }

    #[test]
    fn dominant_model_wins_everything() {
        let rs = vec![
            record("B", Category::Eager, [0.7, 0.7, 0.7, 0.7], 30.0),
            record("A", Category::Lazy, [0.9, 0.9, 0.9, 0.9], 10.0),
            record("C", Category::Hybrid, [0.8, 0.6, 0.9, 0.7], 20.0),
        ];
        let rec = recommend_model(&rs, &Weights::equal()).unwrap();
        assert_eq!(rec.best_overall, "A");
        assert_eq!(rec.best_by_accuracy, "A");
        assert_eq!(rec.best_by_aic, "A");
    }

    #[test]
    fn bases_can_disagree() {
        let rs = vec![
            record("SVM", Category::Eager, [0.95, 0.9, 0.9, 0.9], 40.0),
            record("KNN", Category::Lazy, [0.85, 0.8, 0.8, 0.8], 12.0),
        ];
        let rec = recommend_model(&rs, &Weights::equal()).unwrap();
        assert_eq!(rec.best_by_accuracy, "SVM");
        assert_eq!(rec.best_by_aic, "KNN");
    }

    #[test]
    fn accuracy_ties_break_on_f_then_name() {
        let rs = vec![
            record("b", Category::Eager, [0.9, 0.5, 0.5, 0.6], 10.0),
            record("a", Category::Eager, [0.9, 0.5, 0.5, 0.6], 10.0),
            record("c", Category::Eager, [0.9, 0.5, 0.5, 0.5], 10.0),
        ];
        let rec = recommend_model(&rs, &Weights::from_array([1.0, 0.0, 0.0, 0.0, 0.0]).unwrap()).unwrap();
        assert_eq!(rec.best_by_accuracy, "a");
        assert_eq!(rec.best_by_aic, "a");
        assert_eq!(rec.best_overall, "a");
        let names: Vec<&str> = rec.ranked_models.iter().map(|m| m.model_name.as_str()).collect();
        assert_eq!(names, ["a", "b", "c"]);

        // composite ties resolve like the accuracy basis, not by name alone
        let rs = vec![
            record("a", Category::Eager, [0.9, 0.5, 0.5, 0.5], 10.0),
            record("b", Category::Eager, [0.9, 0.5, 0.5, 0.6], 10.0),
        ];
        let rec = recommend_model(&rs, &Weights::from_array([1.0, 0.0, 0.0, 0.0, 0.0]).unwrap()).unwrap();
        assert_eq!(rec.best_by_accuracy, "b");
        assert_eq!(rec.best_overall, "b");
    }
}
