//! Lazy naive Bayes: the training set is stored as-is and class statistics
//! are computed on the first query, then reused.
//!
//! Priors and categorical likelihoods are Laplace-smoothed with `alpha`;
//! numeric likelihoods are per-class Gaussians with variance floored at
//! 1e-9.

use std::sync::OnceLock;

use super::{Classifier, Prediction, TrainView};
use crate::ingest::{Dataset, FeatureKind};

const VARIANCE_FLOOR: f64 = 1e-9;

#[derive(Debug, Clone, PartialEq)]
enum FeatureStats {
    Gaussian { mean: [f64; 2], var: [f64; 2] },
    Categorical { counts: [Vec<usize>; 2], levels: usize },
}

#[derive(Debug, Clone, PartialEq)]
struct ClassStats {
    class_counts: [usize; 2],
    features: Vec<FeatureStats>,
}

impl ClassStats {
    fn compute(view: &TrainView) -> ClassStats {
        let class_counts = view.class_counts();
        let features = view
            .kinds
            .iter()
            .enumerate()
            .map(|(j, kind)| match *kind {
                FeatureKind::Numeric => {
                    let mut mean = [0.0; 2];
                    let mut var = [1.0; 2];
                    for c in 0..2 {
                        let vals: Vec<f64> = view
                            .x
                            .iter()
                            .zip(&view.y)
                            .filter(|(_, &y)| y as usize == c)
                            .map(|(x, _)| x[j])
                            .collect();
                        if vals.is_empty() {
                            continue;
                        }
                        let m = vals.iter().sum::<f64>() / vals.len() as f64;
                        let v = vals.iter().map(|x| (x - m) * (x - m)).sum::<f64>() / vals.len() as f64;
                        mean[c] = m;
                        var[c] = v.max(VARIANCE_FLOOR);
                    }
                    FeatureStats::Gaussian { mean, var }
                }
                FeatureKind::Categorical { levels } => {
                    let mut counts = [vec![0usize; levels], vec![0usize; levels]];
                    for (x, &y) in view.x.iter().zip(&view.y) {
                        let code = x[j];
                        if code >= 0.0 && (code as usize) < levels {
                            counts[y as usize][code as usize] += 1;
                        }
                    }
                    FeatureStats::Categorical { counts, levels }
                }
            })
            .collect();
        ClassStats {
            class_counts,
            features,
        }
    }

    fn probability(&self, x: &[f64], alpha: f64) -> f64 {
        let n = (self.class_counts[0] + self.class_counts[1]) as f64;
        let mut log_post = [0.0; 2];
        for (c, lp) in log_post.iter_mut().enumerate() {
            let nc = self.class_counts[c] as f64;
            *lp = ((nc + alpha) / (n + 2.0 * alpha)).ln();
            for (stats, &v) in self.features.iter().zip(x) {
                *lp += match stats {
                    FeatureStats::Gaussian { mean, var } => {
                        let d = v - mean[c];
                        -0.5 * (2.0 * std::f64::consts::PI * var[c]).ln() - d * d / (2.0 * var[c])
                    }
                    FeatureStats::Categorical { counts, levels } => {
                        let seen = if v >= 0.0 && (v as usize) < *levels && v.fract() == 0.0 {
                            counts[c][v as usize]
                        } else {
                            0
                        };
                        ((seen as f64 + alpha) / (nc + alpha * *levels as f64)).ln()
                    }
                };
            }
        }
        // P(1 | x) = 1 / (1 + exp(log P0 - log P1))
        1.0 / (1.0 + (log_post[0] - log_post[1]).exp())
    }
}

#[derive(Debug, Clone)]
pub struct LazyBayes {
    train: TrainView,
    alpha: f64,
    stats: OnceLock<ClassStats>,
}

impl LazyBayes {
    pub fn new(view: &TrainView, alpha: f64) -> LazyBayes {
        LazyBayes {
            train: view.clone(),
            alpha,
            stats: OnceLock::new(),
        }
    }

    /// Whether the class statistics have been computed yet.
    pub fn is_warm(&self) -> bool {
        self.stats.get().is_some()
    }
}

impl Classifier for LazyBayes {
    fn probability(&self, x: &[f64]) -> f64 {
        self.stats
            .get_or_init(|| ClassStats::compute(&self.train))
            .probability(x, self.alpha)
    }

    fn param_count(&self) -> usize {
        2 * self.train.width() + 1
    }
}

/// One-shot lazy naive Bayes query against a training set.
pub fn lnb_predict(train: &Dataset, x: &[f64], alpha: f64) -> Prediction {
    let view = TrainView::from_dataset(train);
    Prediction::from_probability(ClassStats::compute(&view).probability(x, alpha))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn no_features_gives_smoothed_prior() {
        let view = TrainView {
            x: vec![vec![]; 4],
            y: vec![1, 1, 1, 0],
            kinds: vec![],
        };
        let m = LazyBayes::new(&view, 1.0);
        assert!((m.probability(&[]) - 4.0 / 6.0).abs() < 1e-12);
        assert_eq!(m.param_count(), 1);
    }

    #[test]
    fn binary_feature_seen_only_with_class_one() {
        let mut x = vec![vec![1.0]; 5];
        x.extend(vec![vec![0.0]; 5]);
        let y = [vec![1u8; 5], vec![0u8; 5]].concat();
        let view = TrainView {
            x,
            y,
            kinds: vec![FeatureKind::Categorical { levels: 2 }],
        };
        let m = LazyBayes::new(&view, 1.0);
        assert!(!m.is_warm());
        assert!((m.probability(&[1.0]) - 6.0 / 7.0).abs() < 1e-12);
        assert!(m.is_warm());
    }

    #[test]
    fn symmetric_classes_give_one_half() {
        let view = TrainView::numeric(
            vec![vec![1.0], vec![3.0], vec![1.0], vec![3.0]],
            vec![0, 0, 1, 1],
        );
        let m = LazyBayes::new(&view, 1.0);
        assert!((m.probability(&[2.5]) - 0.5).abs() < 1e-12);
    }

    #[test]
    fn gaussian_separation() {
        let view = TrainView::numeric(
            vec![vec![0.0], vec![0.2], vec![-0.2], vec![5.0], vec![5.2], vec![4.8]],
            vec![0, 0, 0, 1, 1, 1],
        );
        let m = LazyBayes::new(&view, 1.0);
        assert!(m.probability(&[5.0]) > 0.99);
        assert!(m.probability(&[0.0]) < 0.01);
    }

    #[test]
    fn one_shot_matches_memoised_model() {
        let features = vec![vec![0.0, 1.0], vec![1.0, 3.0], vec![2.0, 2.0], vec![3.0, 0.5]];
        let d = Dataset::from_features("b", &features, &[0, 1, 1, 0]).unwrap();
        let m = LazyBayes::new(&TrainView::from_dataset(&d), 0.5);
        let q = [1.5, 1.0];
        assert_eq!(lnb_predict(&d, &q, 0.5).probability, m.probability(&q));
    }
}
