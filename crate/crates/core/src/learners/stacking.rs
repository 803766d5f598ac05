//! Two-level stacking.
//!
//! Level 0: every base model is cross-fitted over stratified folds so each
//! training row gets exactly one out-of-fold probability per base. Level 1:
//! a single logistic unit, trained with the delta rule on those probability
//! columns, combines the bases. The bases are then refitted on the whole
//! training set for prediction.

use super::{fit_view, logistic, weight_update, Classifier, FittedModel, Hyperparameters};
use super::{LearnError, LearnerSpec, TrainView};
use crate::ingest::Dataset;
use crate::rng::{derive_seed, SplitMix64};

/// Stratified fold assignment: each class is shuffled and dealt round-robin
/// over `folds` folds. Falls back to 2 folds when some fold would miss a
/// class.
pub fn assign_folds(labels: &[u8], folds: usize, seed: u64) -> Result<Vec<usize>, LearnError> {
    let deal = |k: usize| {
        let mut rng = SplitMix64::new(seed);
        let mut fold_of = vec![0usize; labels.len()];
        for class in 0..2u8 {
            let mut members: Vec<usize> = (0..labels.len()).filter(|&i| labels[i] == class).collect();
            rng.shuffle(&mut members);
            for (pos, &row) in members.iter().enumerate() {
                fold_of[row] = pos % k;
            }
        }
        fold_of
    };
    let complete = |fold_of: &[usize], k: usize| {
        (0..k).all(|f| {
            let mut seen = [false; 2];
            for (row, &g) in fold_of.iter().enumerate() {
                if g == f {
                    seen[labels[row] as usize] = true;
                }
            }
            seen[0] && seen[1]
        })
    };
    let folds = folds.max(2);
    let fold_of = deal(folds);
    if complete(&fold_of, folds) {
        return Ok(fold_of);
    }
    let fold_of = deal(2);
    if complete(&fold_of, 2) {
        return Ok(fold_of);
    }
    Err(LearnError::SingleClassFold)
}

/// Out-of-fold class-1 probabilities, `oof[row][base]`.
pub fn out_of_fold(
    view: &TrainView,
    bases: &[LearnerSpec],
    fold_of: &[usize],
    seed: u64,
) -> Result<Vec<Vec<f64>>, LearnError> {
    let folds = fold_of.iter().max().map_or(0, |m| m + 1);
    let mut oof = vec![vec![f64::NAN; bases.len()]; view.len()];
    for f in 0..folds {
        let (held, kept): (Vec<usize>, Vec<usize>) = (0..view.len()).partition(|&r| fold_of[r] == f);
        let train = view.subset(&kept);
        for (b, spec) in bases.iter().enumerate() {
            let model = fit_view(spec, &train, derive_seed(seed, &format!("{}/fold{f}", spec.name)))?;
            for &r in &held {
                oof[r][b] = model.predict(&view.x[r]).probability;
            }
        }
    }
    Ok(oof)
}

#[derive(Debug, Clone)]
pub struct StackedModel {
    pub bases: Vec<FittedModel>,
    pub meta_weights: Vec<f64>,
    pub meta_bias: f64,
    /// Folds actually used (may be reduced to 2).
    pub folds: usize,
}

/// Delta-rule logistic unit on meta features; weights start at zero.
fn train_meta(inputs: &[Vec<f64>], y: &[u8], lr: f64, epochs: usize, seed: u64) -> (Vec<f64>, f64) {
    let width = inputs.first().map_or(0, Vec::len);
    let mut w = vec![0.0; width];
    let mut b = 0.0;
    let mut rng = SplitMix64::new(seed);
    for _ in 0..epochs {
        let mut order: Vec<usize> = (0..inputs.len()).collect();
        rng.shuffle(&mut order);
        for i in order {
            let target = f64::from(y[i]);
            let y_hat = logistic(b + w.iter().zip(&inputs[i]).map(|(a, c)| a * c).sum::<f64>());
            for (wj, xj) in w.iter_mut().zip(&inputs[i]) {
                *wj = weight_update(*wj, lr, target, y_hat, *xj);
            }
            b = weight_update(b, lr, target, y_hat, 1.0);
        }
    }
    (w, b)
}

pub(crate) fn fit_stack_view(
    view: &TrainView,
    bases: &[LearnerSpec],
    hp: &Hyperparameters,
    seed: u64,
) -> Result<StackedModel, LearnError> {
    if bases.len() < 2 {
        return Err(LearnError::NotEnoughBases);
    }
    view.require_both_classes()?;
    let fold_of = assign_folds(&view.y, hp.stack_folds, derive_seed(seed, "folds"))?;
    let folds = fold_of.iter().max().unwrap() + 1;
    let oof = out_of_fold(view, bases, &fold_of, seed)?;
    let (meta_weights, meta_bias) = train_meta(
        &oof,
        &view.y,
        hp.meta_learning_rate,
        hp.meta_epochs,
        derive_seed(seed, "meta"),
    );
    let bases = bases
        .iter()
        .map(|spec| fit_view(spec, view, derive_seed(seed, &spec.name)))
        .collect::<Result<Vec<_>, _>>()?;
    Ok(StackedModel {
        bases,
        meta_weights,
        meta_bias,
        folds,
    })
}

/// Stacks `base_specs` under a logistic meta-learner configured by `spec`.
pub fn fit_stacking(
    train: &Dataset,
    base_specs: &[LearnerSpec],
    spec: &LearnerSpec,
    seed: u64,
) -> Result<StackedModel, LearnError> {
    fit_stack_view(&TrainView::from_dataset(train), base_specs, &spec.hyperparameters, seed)
}

impl StackedModel {
    pub fn meta_probability(&self, base_probabilities: &[f64]) -> f64 {
        logistic(
            self.meta_bias
                + self
                    .meta_weights
                    .iter()
                    .zip(base_probabilities)
                    .map(|(w, p)| w * p)
                    .sum::<f64>(),
        )
    }
}

impl Classifier for StackedModel {
    fn probability(&self, x: &[f64]) -> f64 {
        let inputs: Vec<f64> = self.bases.iter().map(|m| m.predict(x).probability).collect();
        self.meta_probability(&inputs)
    }

    fn param_count(&self) -> usize {
        self.bases.iter().map(FittedModel::param_count).sum::<usize>() + self.bases.len() + 1
    }
}
