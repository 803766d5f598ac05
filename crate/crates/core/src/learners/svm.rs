//! Linear SVM trained on the primal hinge loss.
//!
//! Objective: `0.5 * |w|^2 + C * sum_i max(0, 1 - y_i (w . x_i + b))` with
//! `y_i` in {-1, +1}. Each epoch visits the rows in a freshly shuffled order;
//! at global step `t` (starting at 1) the update follows the per-row
//! subgradient `w / n - C * y_i * x_i * [margin_i < 1]` with step
//! `1 / (C * t)`. The bias is not regularised.

use super::{logistic, Classifier, Hyperparameters, LearnError, Standardizer, TrainView};
use crate::rng::SplitMix64;

/// Signed score `w . x + b`.
pub fn svm_decision(w: &[f64], b: f64, x: &[f64]) -> Result<f64, LearnError> {
    if w.len() != x.len() {
        return Err(LearnError::DimensionMismatch {
            expected: w.len(),
            found: x.len(),
        });
    }
    Ok(dot(w, x) + b)
}

fn dot(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

#[derive(Debug, Clone, PartialEq)]
pub struct LinearSvm {
    scaler: Standardizer,
    pub weights: Vec<f64>,
    pub bias: f64,
}

impl LinearSvm {
    pub fn fit(view: &TrainView, hp: &Hyperparameters, seed: u64) -> Result<LinearSvm, LearnError> {
        view.require_both_classes()?;
        let width = view.width();
        let scaler = Standardizer::fit(&view.x, width);
        let x: Vec<Vec<f64>> = view.x.iter().map(|r| scaler.transform(r)).collect();
        let y: Vec<f64> = view.y.iter().map(|&c| if c == 1 { 1.0 } else { -1.0 }).collect();
        let n = x.len() as f64;
        let c = hp.svm_penalty;

        let mut rng = SplitMix64::new(seed);
        let mut w = vec![0.0; width];
        let mut b = 0.0;
        let mut t = 0u64;
        for _ in 0..hp.svm_epochs {
            let mut order: Vec<usize> = (0..x.len()).collect();
            rng.shuffle(&mut order);
            for i in order {
                t += 1;
                let eta = 1.0 / (c * t as f64);
                let margin = y[i] * (dot(&w, &x[i]) + b);
                for wj in w.iter_mut() {
                    *wj -= eta * *wj / n;
                }
                if margin < 1.0 {
                    for (wj, xj) in w.iter_mut().zip(&x[i]) {
                        *wj += eta * c * y[i] * xj;
                    }
                    b += eta * c * y[i];
                }
            }
        }
        Ok(LinearSvm {
            scaler,
            weights: w,
            bias: b,
        })
    }

    /// `w . x + b` on the raw (unscaled) feature vector.
    pub fn decision(&self, x: &[f64]) -> f64 {
        dot(&self.weights, &self.scaler.transform(x)) + self.bias
    }

    /// Mean hinge loss over a view.
    pub fn hinge_loss(&self, view: &TrainView) -> f64 {
        let total: f64 = view
            .x
            .iter()
            .zip(&view.y)
            .map(|(x, &c)| {
                let y = if c == 1 { 1.0 } else { -1.0 };
                (1.0 - y * self.decision(x)).max(0.0)
            })
            .sum();
        total / view.len() as f64
    }
}

impl Classifier for LinearSvm {
    fn probability(&self, x: &[f64]) -> f64 {
        logistic(self.decision(x))
    }

    fn param_count(&self) -> usize {
        self.weights.len() + 1
    }
}
