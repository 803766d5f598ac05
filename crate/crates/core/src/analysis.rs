//! Attribute profiling, linearity/size heuristics and correlation-based
//! feature filtering.

use serde::Serialize;
use thiserror::Error;

use crate::ingest::{ColumnKind, Dataset};
use crate::learners::MODEL_NAMES;

#[derive(Debug, Error, PartialEq)]
pub enum AnalysisError {
    #[error("vectors have different lengths ({0} vs {1})")]
    LengthMismatch(usize, usize),
    #[error("correlation needs at least 2 observations, got {0}")]
    TooShort(usize),
    #[error("every feature was filtered out; lower target_threshold or raise pairwise_threshold")]
    NoFeaturesLeft,
}

/// Thresholds that drive the input analysis.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct AnalysisSettings {
    /// Features whose |correlation with the target| falls below this are dropped.
    pub target_threshold: f64,
    /// Feature pairs correlated above this lose their weaker member.
    pub pairwise_threshold: f64,
    /// Max |feature-target correlation| at or above which data counts as linear.
    pub linearity_threshold: f64,
    /// Row count below which a dataset counts as small.
    pub size_boundary: usize,
}

impl Default for AnalysisSettings {
    fn default() -> Self {
        AnalysisSettings {
            target_threshold: 0.02,
            pairwise_threshold: 0.95,
            linearity_threshold: 0.5,
            size_boundary: 1000,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct AttributeProfile {
    pub column_index: usize,
    pub kind: ColumnKind,
    /// Distinct values in the encoded column.
    pub cardinality: usize,
    pub target_correlation: f64,
    pub variance: f64,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Linearity {
    LinearTendency,
    NonlinearTendency,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum SizeClass {
    Small,
    Large,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct AnalysisReport {
    pub n_rows: usize,
    pub n_features: usize,
    pub linearity: Linearity,
    pub size_class: SizeClass,
    pub suggested_algorithms: Vec<String>,
    pub selected_features: Vec<usize>,
}

fn is_constant(v: &[f64]) -> bool {
    v.iter().all(|&x| x == v[0])
}

fn mean(v: &[f64]) -> f64 {
    v.iter().sum::<f64>() / v.len() as f64
}

/// Pearson product-moment correlation. Zero when either side is constant.
pub fn pearson_correlation(x: &[f64], y: &[f64]) -> Result<f64, AnalysisError> {
    if x.len() != y.len() {
        return Err(AnalysisError::LengthMismatch(x.len(), y.len()));
    }
    if x.len() < 2 {
        return Err(AnalysisError::TooShort(x.len()));
    }
    if is_constant(x) || is_constant(y) {
        return Ok(0.0);
    }
    let (mx, my) = (mean(x), mean(y));
    let (mut sxy, mut sxx, mut syy) = (0.0, 0.0, 0.0);
    for (a, b) in x.iter().zip(y) {
        let (dx, dy) = (a - mx, b - my);
        sxy += dx * dy;
        sxx += dx * dx;
        syy += dy * dy;
    }
    if sxx == 0.0 || syy == 0.0 {
        return Ok(0.0);
    }
    Ok((sxy / (sxx * syy).sqrt()).clamp(-1.0, 1.0))
}

fn population_variance(v: &[f64]) -> f64 {
    if is_constant(v) {
        return 0.0;
    }
    let m = mean(v);
    v.iter().map(|x| (x - m) * (x - m)).sum::<f64>() / v.len() as f64
}

/// One profile per feature column, in column order.
pub fn profile_attributes(d: &Dataset) -> Vec<AttributeProfile> {
    let target = d.column_values(d.target_index);
    d.feature_indices()
        .into_iter()
        .map(|c| {
            let values = d.column_values(c);
            let mut distinct = values.clone();
            distinct.sort_by(f64::total_cmp);
            distinct.dedup();
            AttributeProfile {
                column_index: c,
                kind: d.columns[c].kind,
                cardinality: distinct.len(),
                target_correlation: if values.len() < 2 {
                    0.0
                } else {
                    pearson_correlation(&values, &target).unwrap_or(0.0)
                },
                variance: if values.is_empty() {
                    0.0
                } else {
                    population_variance(&values)
                },
            }
        })
        .collect()
}

/// Pairwise feature correlations, indexed by position in
/// [`Dataset::feature_indices`]. The diagonal is 1, or 0 for constant columns.
pub fn collinearity_matrix(d: &Dataset) -> Vec<Vec<f64>> {
    let cols: Vec<Vec<f64>> = d
        .feature_indices()
        .into_iter()
        .map(|c| d.column_values(c))
        .collect();
    let m = cols.len();
    let mut out = vec![vec![0.0; m]; m];
    if d.n_rows() < 2 {
        return out;
    }
    for i in 0..m {
        out[i][i] = if is_constant(&cols[i]) { 0.0 } else { 1.0 };
        for j in i + 1..m {
            let r = pearson_correlation(&cols[i], &cols[j]).unwrap_or(0.0);
            out[i][j] = r;
            out[j][i] = r;
        }
    }
    out
}

/// Correlation filter. Returns surviving column indices in ascending order.
///
/// Features below `target_threshold` in |target correlation| are dropped
/// first. The rest are visited strongest-first (ties: lower column index
/// first) and a feature is kept only if its |correlation| with every feature
/// already kept is at most `pairwise_threshold`.
pub fn select_features(
    d: &Dataset,
    target_threshold: f64,
    pairwise_threshold: f64,
) -> Result<Vec<usize>, AnalysisError> {
    let profiles = profile_attributes(d);
    select_from_profiles(d, &profiles, target_threshold, pairwise_threshold)
}

pub(crate) fn select_from_profiles(
    d: &Dataset,
    profiles: &[AttributeProfile],
    target_threshold: f64,
    pairwise_threshold: f64,
) -> Result<Vec<usize>, AnalysisError> {
    let mut candidates: Vec<&AttributeProfile> = profiles
        .iter()
        .filter(|p| p.target_correlation.abs() >= target_threshold)
        .collect();
    candidates.sort_by(|a, b| {
        b.target_correlation
            .abs()
            .total_cmp(&a.target_correlation.abs())
            .then(a.column_index.cmp(&b.column_index))
    });

    let mut kept: Vec<(usize, Vec<f64>)> = Vec::new();
    for p in candidates {
        let values = d.column_values(p.column_index);
        let redundant = kept.iter().any(|(_, other)| {
            pearson_correlation(&values, other)
                .map(|r| r.abs() > pairwise_threshold)
                .unwrap_or(false)
        });
        if !redundant {
            kept.push((p.column_index, values));
        }
    }
    if kept.is_empty() {
        return Err(AnalysisError::NoFeaturesLeft);
    }
    let mut selected: Vec<usize> = kept.into_iter().map(|(c, _)| c).collect();
    selected.sort_unstable();
    Ok(selected)
}

/// Phase-one heuristics: SVM first for linear-looking data, LNB first for
/// small data, then the rest of the registry in order.
///
/// `selected_features` is filled with every profiled column; the pipeline
/// overwrites it after filtering.
pub fn suggest_initial_algorithms(
    profiles: &[AttributeProfile],
    n_rows: usize,
    settings: &AnalysisSettings,
) -> AnalysisReport {
    let max_corr = profiles
        .iter()
        .map(|p| p.target_correlation.abs())
        .fold(0.0, f64::max);
    let linearity = if max_corr >= settings.linearity_threshold {
        Linearity::LinearTendency
    } else {
        Linearity::NonlinearTendency
    };
    let size_class = if n_rows < settings.size_boundary {
        SizeClass::Small
    } else {
        SizeClass::Large
    };

    let mut order: Vec<&str> = MODEL_NAMES.to_vec();
    let mut promote = |name: &str| {
        order.retain(|m| *m != name);
        order.insert(0, MODEL_NAMES.iter().find(|m| **m == name).unwrap());
    };
    if linearity == Linearity::LinearTendency {
        promote("SVM");
    }
    if size_class == SizeClass::Small {
        promote("LNB");
    }

    AnalysisReport {
        n_rows,
        n_features: profiles.len(),
        linearity,
        size_class,
        suggested_algorithms: order.into_iter().map(String::from).collect(),
        selected_features: profiles.iter().map(|p| p.column_index).collect(),
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn profile(column_index: usize, corr: f64) -> AttributeProfile {
        AttributeProfile {
            column_index,
            kind: ColumnKind::Numeric,
            cardinality: 10,
            target_correlation: corr,
            variance: 1.0,
        }
    }

    #[test]
    fn correlation_examples() {
        let x = [1.0, 2.0, 3.0];
        assert_eq!(pearson_correlation(&x, &x).unwrap(), 1.0);
        assert_eq!(pearson_correlation(&x, &[3.0, 2.0, 1.0]).unwrap(), -1.0);
        let r = pearson_correlation(&[1.0, 2.0, 3.0, 4.0], &[1.0, 3.0, 2.0, 4.0]).unwrap();
        assert!((r - 0.8).abs() < 1e-12);
    }

    #[test]
    fn correlation_errors() {
        assert_eq!(
            pearson_correlation(&[1.0, 2.0], &[1.0]),
            Err(AnalysisError::LengthMismatch(2, 1))
        );
        assert_eq!(
            pearson_correlation(&[1.0], &[1.0]),
            Err(AnalysisError::TooShort(1))
        );
        assert_eq!(pearson_correlation(&[2.0, 2.0], &[1.0, 5.0]).unwrap(), 0.0);
    }

    #[test]
    fn profiles_of_degenerate_columns() {
        let features = vec![
            vec![5.0, 0.0],
            vec![5.0, 1.0],
            vec![5.0, 1.0],
            vec![5.0, 0.0],
        ];
        let d = Dataset::from_features("p", &features, &[0, 1, 1, 0]).unwrap();
        let p = profile_attributes(&d);
        assert_eq!(p.len(), 2);
        assert_eq!(p[0].variance, 0.0);
        assert_eq!(p[0].target_correlation, 0.0);
        assert_eq!(p[1].target_correlation, 1.0);
        assert_eq!(p[1].cardinality, 2);
    }

    #[test]
    fn collinearity_of_duplicates() {
        let features: Vec<Vec<f64>> = (0..6)
            .map(|i| vec![i as f64, i as f64, ((i * 7) % 5) as f64, 3.0])
            .collect();
        let d = Dataset::from_features("c", &features, &[0, 1, 0, 1, 0, 1]).unwrap();
        let m = collinearity_matrix(&d);
        assert_eq!(m[0][1], 1.0);
        assert_eq!(m[0][0], 1.0);
        assert_eq!(m[3][3], 0.0);
        for i in 0..4 {
            for j in 0..4 {
                assert_eq!(m[i][j], m[j][i]);
            }
        }
    }

    #[test]
    fn duplicate_with_weaker_target_link_is_dropped() {
        // x1 is a noisy copy of x0; x0 tracks the target better
        let labels = [0u8, 0, 0, 1, 1, 1, 0, 1];
        let features: Vec<Vec<f64>> = labels
            .iter()
            .enumerate()
            .map(|(i, &y)| {
                let base = f64::from(y) * 4.0 + i as f64 * 0.1;
                vec![base, base + if i == 2 { 0.3 } else { 0.0 }, (i % 3) as f64]
            })
            .collect();
        let d = Dataset::from_features("dup", &features, &labels).unwrap();
        let p = profile_attributes(&d);
        assert!(p[0].target_correlation > p[1].target_correlation);
        let kept = select_features(&d, 0.0, 0.95).unwrap();
        assert!(kept.contains(&0));
        assert!(!kept.contains(&1));
        assert_eq!(select_features(&d, 0.0, 1.0).unwrap(), vec![0, 1, 2]);
    }

    #[test]
    fn target_threshold_filter() {
        let labels = [0u8, 1, 0, 1, 0, 1, 0, 1, 0, 1];
        let d = Dataset::from_features(
            "t",
            &labels.iter().map(|_| vec![0.0; 3]).collect::<Vec<_>>(),
            &labels,
        )
        .unwrap();
        let profiles = vec![profile(0, 0.9), profile(1, 0.02), profile(2, 0.5)];
        let kept = select_from_profiles(&d, &profiles, 0.05, 1.0).unwrap();
        assert_eq!(kept, vec![0, 2]);
        assert_eq!(
            select_from_profiles(&d, &profiles, 0.95, 1.0),
            Err(AnalysisError::NoFeaturesLeft)
        );
    }

    #[test]
    fn suggestions() {
        let s = AnalysisSettings::default();
        let r = suggest_initial_algorithms(&[profile(0, 0.9), profile(1, 0.1)], 5000, &s);
        assert_eq!(r.linearity, Linearity::LinearTendency);
        assert_eq!(r.size_class, SizeClass::Large);
        assert_eq!(r.suggested_algorithms[0], "SVM");

        let r = suggest_initial_algorithms(&[profile(0, -0.1)], 200, &s);
        assert_eq!(r.linearity, Linearity::NonlinearTendency);
        assert_eq!(r.size_class, SizeClass::Small);
        assert_eq!(r.suggested_algorithms[0], "LNB");

        let r = suggest_initial_algorithms(&[profile(0, 0.5)], 1000, &s);
        assert_eq!(r.linearity, Linearity::LinearTendency);
        assert_eq!(r.size_class, SizeClass::Large);

        let r = suggest_initial_algorithms(&[profile(0, 0.7)], 10, &s);
        assert_eq!(&r.suggested_algorithms[..2], &["LNB", "SVM"]);
        assert_eq!(r.suggested_algorithms.len(), 13);
    }
}
