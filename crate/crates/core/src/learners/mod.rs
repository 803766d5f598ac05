//! The thirteen-model registry: eager learners (decision tree, linear SVM,
//! neural network), lazy learners (k-nearest neighbours, lazy naive Bayes)
//! and eight stacking hybrids built from them.
//!
//! Every model predicts a probability for class 1; the hard class is 1 iff
//! that probability is at least 0.5.

use std::collections::BTreeMap;
use std::fmt;
use std::str::FromStr;

use serde::Serialize;
use thiserror::Error;

use crate::ingest::{Dataset, FeatureKind};

pub mod bayes;
pub mod knn;
pub mod neural;
pub mod stacking;
pub mod svm;
pub mod tree;

pub use bayes::{lnb_predict, LazyBayes};
pub use knn::{elbow_k, euclidean_distance, knn_predict, tune_k, KnnModel};
pub use neural::{weight_update, NeuralNet};
pub use stacking::{fit_stacking, StackedModel};
pub use svm::{svm_decision, LinearSvm};
pub use tree::{gain_ratio, DecisionTree, SplitRule, TreeNode};

#[derive(Debug, Error, PartialEq)]
pub enum LearnError {
    #[error("training data contains a single class")]
    SingleClass,
    #[error("training data is empty")]
    EmptyTraining,
    #[error("expected {expected} features, got {found}")]
    DimensionMismatch { expected: usize, found: usize },
    #[error("need at least {needed} rows, got {found}")]
    TooFewRows { needed: usize, found: usize },
    #[error("split leaves one side empty")]
    EmptySplit,
    #[error("unknown model {0:?}")]
    UnknownModel(String),
    #[error("unknown category {0:?} (expected eager, lazy or hybrid)")]
    UnknownCategory(String),
    #[error("unknown hyperparameter {0:?}")]
    UnknownHyperparameter(String),
    #[error("invalid hyperparameter {name} = {value}")]
    InvalidHyperparameter { name: String, value: f64 },
    #[error("a stack needs at least 2 base models")]
    NotEnoughBases,
    #[error("a stacking fold holds a single class even with 2 folds")]
    SingleClassFold,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Category {
    Eager,
    Lazy,
    Hybrid,
}

impl Category {
    pub const ALL: [Category; 3] = [Category::Eager, Category::Lazy, Category::Hybrid];

    pub fn as_str(self) -> &'static str {
        match self {
            Category::Eager => "eager",
            Category::Lazy => "lazy",
            Category::Hybrid => "hybrid",
        }
    }

    /// Row label used in the rendered tables.
    pub fn title(self) -> &'static str {
        match self {
            Category::Eager => "Eager",
            Category::Lazy => "Lazy",
            Category::Hybrid => "Hybrid",
        }
    }
}

impl fmt::Display for Category {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for Category {
    type Err = LearnError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "eager" => Ok(Category::Eager),
            "lazy" => Ok(Category::Lazy),
            "hybrid" => Ok(Category::Hybrid),
            other => Err(LearnError::UnknownCategory(other.to_string())),
        }
    }
}

/// Registry order: eager, lazy, then the hybrids.
const REGISTRY: [(&str, Category); 13] = [
    ("DT", Category::Eager),
    ("SVM", Category::Eager),
    ("NN", Category::Eager),
    ("KNN", Category::Lazy),
    ("LNB", Category::Lazy),
    ("KNN+LNB", Category::Hybrid),
    ("SVM+DT+NN", Category::Hybrid),
    ("SVM+KNN", Category::Hybrid),
    ("DT+KNN", Category::Hybrid),
    ("NN+KNN", Category::Hybrid),
    ("SVM+LNB", Category::Hybrid),
    ("DT+LNB", Category::Hybrid),
    ("NN+LNB", Category::Hybrid),
];

pub const MODEL_NAMES: [&str; 13] = [
    "DT", "SVM", "NN", "KNN", "LNB", "KNN+LNB", "SVM+DT+NN", "SVM+KNN", "DT+KNN", "NN+KNN",
    "SVM+LNB", "DT+LNB", "NN+LNB",
];

/// Training knobs shared by every learner. Each model reads only its own.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct Hyperparameters {
    pub learning_rate: f64,
    pub hidden_units: usize,
    pub nn_epochs: usize,
    pub svm_penalty: f64,
    pub svm_epochs: usize,
    pub k_max: usize,
    pub min_leaf: usize,
    pub smoothing: f64,
    pub stack_folds: usize,
    pub meta_learning_rate: f64,
    pub meta_epochs: usize,
}

impl Default for Hyperparameters {
    fn default() -> Self {
        Hyperparameters {
            learning_rate: 0.1,
            hidden_units: 16,
            nn_epochs: 500,
            svm_penalty: 1.0,
            svm_epochs: 100,
            k_max: 25,
            min_leaf: 5,
            smoothing: 1.0,
            stack_folds: 5,
            meta_learning_rate: 0.1,
            meta_epochs: 500,
        }
    }
}

impl Hyperparameters {
    pub const NAMES: [&'static str; 11] = [
        "learning_rate",
        "hidden_units",
        "nn_epochs",
        "svm_penalty",
        "svm_epochs",
        "k_max",
        "min_leaf",
        "smoothing",
        "stack_folds",
        "meta_learning_rate",
        "meta_epochs",
    ];

    pub fn get(&self, name: &str) -> Option<f64> {
        Some(match name {
            "learning_rate" => self.learning_rate,
            "hidden_units" => self.hidden_units as f64,
            "nn_epochs" => self.nn_epochs as f64,
            "svm_penalty" => self.svm_penalty,
            "svm_epochs" => self.svm_epochs as f64,
            "k_max" => self.k_max as f64,
            "min_leaf" => self.min_leaf as f64,
            "smoothing" => self.smoothing,
            "stack_folds" => self.stack_folds as f64,
            "meta_learning_rate" => self.meta_learning_rate,
            "meta_epochs" => self.meta_epochs as f64,
            _ => return None,
        })
    }

    /// Sets one knob by name, validating its range.
    pub fn set(&mut self, name: &str, value: f64) -> Result<(), LearnError> {
        let invalid = || LearnError::InvalidHyperparameter {
            name: name.to_string(),
            value,
        };
        let positive = |v: f64| if v > 0.0 && v.is_finite() { Ok(v) } else { Err(invalid()) };
        let count = |v: f64, min: f64| {
            if v.is_finite() && v.fract() == 0.0 && v >= min {
                Ok(v as usize)
            } else {
                Err(invalid())
            }
        };
        match name {
            "learning_rate" => self.learning_rate = positive(value)?,
            "hidden_units" => self.hidden_units = count(value, 1.0)?,
            "nn_epochs" => self.nn_epochs = count(value, 0.0)?,
            "svm_penalty" => self.svm_penalty = positive(value)?,
            "svm_epochs" => self.svm_epochs = count(value, 0.0)?,
            "k_max" => self.k_max = count(value, 1.0)?,
            "min_leaf" => self.min_leaf = count(value, 1.0)?,
            "smoothing" => self.smoothing = positive(value)?,
            "stack_folds" => self.stack_folds = count(value, 2.0)?,
            "meta_learning_rate" => self.meta_learning_rate = positive(value)?,
            "meta_epochs" => self.meta_epochs = count(value, 0.0)?,
            other => return Err(LearnError::UnknownHyperparameter(other.to_string())),
        }
        Ok(())
    }

    fn relevant(&self, names: &[&str]) -> BTreeMap<String, f64> {
        names
            .iter()
            .map(|n| (n.to_string(), self.get(n).unwrap()))
            .collect()
    }
}

/// A base algorithm (the building block of every registry entry).
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Algorithm {
    DecisionTree,
    Svm,
    NeuralNet,
    Knn,
    Lnb,
}

impl Algorithm {
    fn from_name(name: &str) -> Option<Algorithm> {
        Some(match name {
            "DT" => Algorithm::DecisionTree,
            "SVM" => Algorithm::Svm,
            "NN" => Algorithm::NeuralNet,
            "KNN" => Algorithm::Knn,
            "LNB" => Algorithm::Lnb,
            _ => return None,
        })
    }

    fn knobs(self) -> &'static [&'static str] {
        match self {
            Algorithm::DecisionTree => &["min_leaf"],
            Algorithm::Svm => &["svm_penalty", "svm_epochs"],
            Algorithm::NeuralNet => &["learning_rate", "hidden_units", "nn_epochs"],
            Algorithm::Knn => &["k_max"],
            Algorithm::Lnb => &["smoothing"],
        }
    }
}

/// One registry entry with its hyperparameters.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct LearnerSpec {
    pub name: String,
    pub category: Category,
    #[serde(skip)]
    pub hyperparameters: Hyperparameters,
}

impl LearnerSpec {
    pub fn new(name: &str, hyperparameters: Hyperparameters) -> Result<LearnerSpec, LearnError> {
        let (name, category) = REGISTRY
            .iter()
            .find(|(n, _)| *n == name)
            .ok_or_else(|| LearnError::UnknownModel(name.to_string()))?;
        Ok(LearnerSpec {
            name: name.to_string(),
            category: *category,
            hyperparameters,
        })
    }

    /// Base algorithms of this entry; a single one for eager/lazy models.
    pub fn algorithms(&self) -> Vec<Algorithm> {
        self.name
            .split('+')
            .map(|n| Algorithm::from_name(n).expect("registry names are valid"))
            .collect()
    }

    /// Base-model specs of a hybrid.
    pub fn base_specs(&self) -> Vec<LearnerSpec> {
        if self.category != Category::Hybrid {
            return Vec::new();
        }
        self.name
            .split('+')
            .map(|n| LearnerSpec::new(n, self.hyperparameters).expect("registry names are valid"))
            .collect()
    }

    /// The hyperparameters this learner actually reads.
    pub fn hyperparameter_map(&self) -> BTreeMap<String, f64> {
        let mut names: Vec<&str> = self
            .algorithms()
            .iter()
            .flat_map(|a| a.knobs().iter().copied())
            .collect();
        if self.category == Category::Hybrid {
            names.extend(["stack_folds", "meta_learning_rate", "meta_epochs"]);
        }
        self.hyperparameters.relevant(&names)
    }
}

/// The registry, optionally restricted to one category (`"eager"`, `"lazy"`
/// or `"hybrid"`).
pub fn registry_all_models(
    hyperparameters: &Hyperparameters,
    category_filter: Option<&str>,
) -> Result<Vec<LearnerSpec>, LearnError> {
    let filter = category_filter.map(str::parse::<Category>).transpose()?;
    Ok(REGISTRY
        .iter()
        .filter(|(_, c)| filter.is_none_or(|f| f == *c))
        .map(|(n, _)| LearnerSpec::new(n, *hyperparameters).unwrap())
        .collect())
}

/// Hard class and probability of class 1.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Prediction {
    pub class: u8,
    pub probability: f64,
}

impl Prediction {
    pub fn from_probability(p: f64) -> Prediction {
        let probability = if p.is_nan() { 0.5 } else { p.clamp(0.0, 1.0) };
        Prediction {
            class: u8::from(probability >= 0.5),
            probability,
        }
    }
}

/// A trained model that scores feature vectors.
pub trait Classifier {
    /// Probability of class 1 for one feature vector.
    fn probability(&self, x: &[f64]) -> f64;
    /// Parameter count used as `k` in the information criterion.
    fn param_count(&self) -> usize;
}

#[derive(Debug, Clone)]
pub enum ModelInternals {
    Tree(DecisionTree),
    Svm(LinearSvm),
    Net(NeuralNet),
    Knn(KnnModel),
    Lnb(LazyBayes),
    Stack(StackedModel),
}

impl ModelInternals {
    fn as_classifier(&self) -> &dyn Classifier {
        match self {
            ModelInternals::Tree(m) => m,
            ModelInternals::Svm(m) => m,
            ModelInternals::Net(m) => m,
            ModelInternals::Knn(m) => m,
            ModelInternals::Lnb(m) => m,
            ModelInternals::Stack(m) => m,
        }
    }
}

/// A trained registry model. Immutable once fitted.
#[derive(Debug, Clone)]
pub struct FittedModel {
    pub spec: LearnerSpec,
    pub internals: ModelInternals,
    n_features: usize,
}

impl FittedModel {
    pub fn n_features(&self) -> usize {
        self.n_features
    }

    pub fn predict(&self, x: &[f64]) -> Prediction {
        Prediction::from_probability(self.internals.as_classifier().probability(x))
    }

    /// Like [`FittedModel::predict`] but checks the vector length first.
    pub fn try_predict(&self, x: &[f64]) -> Result<Prediction, LearnError> {
        if x.len() != self.n_features {
            return Err(LearnError::DimensionMismatch {
                expected: self.n_features,
                found: x.len(),
            });
        }
        Ok(self.predict(x))
    }

    pub fn param_count(&self) -> usize {
        self.internals.as_classifier().param_count()
    }
}

/// Feature matrix, labels and feature kinds of a training set.
#[derive(Debug, Clone, PartialEq)]
pub struct TrainView {
    pub x: Vec<Vec<f64>>,
    pub y: Vec<u8>,
    pub kinds: Vec<FeatureKind>,
}

impl TrainView {
    pub fn from_dataset(d: &Dataset) -> TrainView {
        TrainView {
            x: d.feature_matrix(),
            y: d.labels(),
            kinds: d.feature_kinds(),
        }
    }

    /// Numeric-only view, handy for tests and synthetic problems.
    pub fn numeric(x: Vec<Vec<f64>>, y: Vec<u8>) -> TrainView {
        let width = x.first().map_or(0, Vec::len);
        TrainView {
            x,
            y,
            kinds: vec![FeatureKind::Numeric; width],
        }
    }

    pub fn len(&self) -> usize {
        self.y.len()
    }

    pub fn is_empty(&self) -> bool {
        self.y.is_empty()
    }

    pub fn width(&self) -> usize {
        self.kinds.len()
    }

    pub fn subset(&self, rows: &[usize]) -> TrainView {
        TrainView {
            x: rows.iter().map(|&r| self.x[r].clone()).collect(),
            y: rows.iter().map(|&r| self.y[r]).collect(),
            kinds: self.kinds.clone(),
        }
    }

    pub fn class_counts(&self) -> [usize; 2] {
        let ones = self.y.iter().filter(|&&y| y == 1).count();
        [self.y.len() - ones, ones]
    }

    fn require_both_classes(&self) -> Result<(), LearnError> {
        if self.is_empty() {
            return Err(LearnError::EmptyTraining);
        }
        let [zeros, ones] = self.class_counts();
        if zeros == 0 || ones == 0 {
            return Err(LearnError::SingleClass);
        }
        Ok(())
    }
}

/// Zero-mean, unit-variance scaling fitted on training rows. Constant
/// columns map to 0.
#[derive(Debug, Clone, PartialEq)]
pub struct Standardizer {
    mean: Vec<f64>,
    inv_std: Vec<f64>,
}

impl Standardizer {
    pub fn fit(x: &[Vec<f64>], width: usize) -> Standardizer {
        let n = x.len().max(1) as f64;
        let mut mean = vec![0.0; width];
        let mut inv_std = vec![0.0; width];
        for j in 0..width {
            let m = x.iter().map(|r| r[j]).sum::<f64>() / n;
            let constant = x.iter().all(|r| r[j] == x[0][j]);
            let var = x.iter().map(|r| (r[j] - m) * (r[j] - m)).sum::<f64>() / n;
            mean[j] = m;
            inv_std[j] = if constant || var <= 0.0 { 0.0 } else { 1.0 / var.sqrt() };
        }
        Standardizer { mean, inv_std }
    }

    pub fn transform(&self, x: &[f64]) -> Vec<f64> {
        x.iter()
            .zip(self.mean.iter().zip(&self.inv_std))
            .map(|(v, (m, s))| (v - m) * s)
            .collect()
    }
}

pub(crate) fn logistic(z: f64) -> f64 {
    1.0 / (1.0 + (-z).exp())
}

/// Trains `spec` on `train`. All randomness comes from `seed`.
pub fn fit(spec: &LearnerSpec, train: &Dataset, seed: u64) -> Result<FittedModel, LearnError> {
    fit_view(spec, &TrainView::from_dataset(train), seed)
}

pub fn fit_view(spec: &LearnerSpec, view: &TrainView, seed: u64) -> Result<FittedModel, LearnError> {
    if view.is_empty() {
        return Err(LearnError::EmptyTraining);
    }
    let hp = &spec.hyperparameters;
    let internals = if spec.category == Category::Hybrid {
        ModelInternals::Stack(stacking::fit_stack_view(view, &spec.base_specs(), hp, seed)?)
    } else {
        match spec.algorithms()[0] {
            Algorithm::DecisionTree => ModelInternals::Tree(tree::DecisionTree::fit(view, hp.min_leaf)),
            Algorithm::Svm => ModelInternals::Svm(svm::LinearSvm::fit(view, hp, seed)?),
            Algorithm::NeuralNet => ModelInternals::Net(neural::NeuralNet::fit(view, hp, seed)),
            Algorithm::Knn => ModelInternals::Knn(knn::KnnModel::fit(view, hp.k_max, seed)),
            Algorithm::Lnb => ModelInternals::Lnb(bayes::LazyBayes::new(view, hp.smoothing)),
        }
    };
    Ok(FittedModel {
        spec: spec.clone(),
        internals,
        n_features: view.width(),
    })
}
