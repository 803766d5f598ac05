//! k-nearest neighbours with elbow-tuned k.

use log::warn;

use super::{Classifier, LearnError, Prediction, Standardizer, TrainView};
use crate::ingest::{stratified_indices, Dataset};

pub fn euclidean_distance(x: &[f64], y: &[f64]) -> Result<f64, LearnError> {
    if x.len() != y.len() {
        return Err(LearnError::DimensionMismatch {
            expected: x.len(),
            found: y.len(),
        });
    }
    Ok(sq_distance(x, y).sqrt())
}

fn sq_distance(x: &[f64], y: &[f64]) -> f64 {
    x.iter().zip(y).map(|(a, b)| (a - b) * (a - b)).sum()
}

/// Indices of the `k` points closest to `query`, nearest first. Equal
/// distances go to the lower index.
fn nearest(points: &[Vec<f64>], query: &[f64], k: usize) -> Vec<usize> {
    let mut dists: Vec<(f64, usize)> = points
        .iter()
        .enumerate()
        .map(|(i, p)| (sq_distance(p, query).sqrt(), i))
        .collect();
    let k = k.min(dists.len());
    let order = |a: &(f64, usize), b: &(f64, usize)| a.0.total_cmp(&b.0).then(a.1.cmp(&b.1));
    if k < dists.len() && k > 0 {
        dists.select_nth_unstable_by(k - 1, order);
        dists.truncate(k);
    }
    dists.sort_unstable_by(order);
    dists.truncate(k);
    dists.into_iter().map(|(_, i)| i).collect()
}

/// Picks k at the elbow of a validation-error curve: the interior
/// candidate with the largest second difference `e[i-1] - 2 e[i] + e[i+1]`
/// (ties: smallest k). With fewer than three candidates the lowest-error k
/// wins (ties: smallest k).
pub fn elbow_k(candidates: &[usize], errors: &[f64]) -> usize {
    assert_eq!(candidates.len(), errors.len());
    assert!(!candidates.is_empty());
    if candidates.len() < 3 {
        let mut best = 0;
        for i in 1..candidates.len() {
            if errors[i] < errors[best] {
                best = i;
            }
        }
        return candidates[best];
    }
    let mut best = 1;
    let mut best_curve = f64::NEG_INFINITY;
    for i in 1..candidates.len() - 1 {
        let curve = errors[i - 1] - 2.0 * errors[i] + errors[i + 1];
        if curve > best_curve {
            best_curve = curve;
            best = i;
        }
    }
    candidates[best]
}

/// Odd k from 1 to `min(k_max, floor(sqrt(n)))`.
fn candidate_ks(n: usize, k_max: usize) -> Vec<usize> {
    let limit = k_max.min((n as f64).sqrt().floor() as usize).max(1);
    (1..=limit).step_by(2).collect()
}

pub(crate) fn tune_k_view(view: &TrainView, k_max: usize, seed: u64) -> Result<usize, LearnError> {
    if view.len() < 10 {
        return Err(LearnError::TooFewRows {
            needed: 10,
            found: view.len(),
        });
    }
    let candidates = candidate_ks(view.len(), k_max);
    let (fit_rows, val_rows) = match stratified_indices(&view.y, 0.75, seed) {
        Ok(split) => split,
        Err(e) => {
            warn!("k tuning falls back to k = 1: {e}");
            return Ok(1);
        }
    };
    let sub = view.subset(&fit_rows);
    let scaler = Standardizer::fit(&sub.x, sub.width());
    let points: Vec<Vec<f64>> = sub.x.iter().map(|r| scaler.transform(r)).collect();
    let k_top = *candidates.last().unwrap();

    let mut wrong = vec![0usize; candidates.len()];
    for &v in &val_rows {
        let q = scaler.transform(&view.x[v]);
        let order = nearest(&points, &q, k_top);
        for (slot, &k) in candidates.iter().enumerate() {
            let k = k.min(order.len());
            let ones = order[..k].iter().filter(|&&i| sub.y[i] == 1).count();
            let p = (ones as f64 + 1.0) / (k as f64 + 2.0);
            if u8::from(p >= 0.5) != view.y[v] {
                wrong[slot] += 1;
            }
        }
    }
    let errors: Vec<f64> = wrong
        .iter()
        .map(|&w| w as f64 / val_rows.len() as f64)
        .collect();
    Ok(elbow_k(&candidates, &errors))
}

/// Tunes k on a seeded 75/25 stratified sub-split of `train`.
pub fn tune_k(train: &Dataset, k_max: usize, seed: u64) -> Result<usize, LearnError> {
    tune_k_view(&TrainView::from_dataset(train), k_max, seed)
}

#[derive(Debug, Clone, PartialEq)]
pub struct KnnModel {
    scaler: Standardizer,
    points: Vec<Vec<f64>>,
    labels: Vec<u8>,
    pub k: usize,
}

impl KnnModel {
    /// Stores the standardised training set and tunes k. Sets with fewer
    /// than 10 rows use k = 1.
    pub fn fit(view: &TrainView, k_max: usize, seed: u64) -> KnnModel {
        let k = tune_k_view(view, k_max, seed).unwrap_or(1);
        KnnModel::with_k(view, k)
    }

    pub fn with_k(view: &TrainView, k: usize) -> KnnModel {
        let scaler = Standardizer::fit(&view.x, view.width());
        let points = view.x.iter().map(|r| scaler.transform(r)).collect();
        KnnModel {
            scaler,
            points,
            labels: view.y.clone(),
            k: k.max(1),
        }
    }
}

/// Laplace-corrected vote: `(class-1 neighbours + 1) / (k + 2)`.
pub fn knn_predict(model: &KnnModel, x: &[f64]) -> Prediction {
    Prediction::from_probability(model.probability(x))
}

impl Classifier for KnnModel {
    fn probability(&self, x: &[f64]) -> f64 {
        let q = self.scaler.transform(x);
        let order = nearest(&self.points, &q, self.k);
        let ones = order.iter().filter(|&&i| self.labels[i] == 1).count();
        (ones as f64 + 1.0) / (order.len() as f64 + 2.0)
    }

    fn param_count(&self) -> usize {
        self.points.first().map_or(0, Vec::len)
    }
}
