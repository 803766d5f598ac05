//! The dataset × model grid.
//!
//! Each dataset goes through ingest, attribute analysis, feature selection,
//! a stratified split, then every registry model is fitted and scored. Model
//! fits run on a rayon pool; each model draws from its own generator seeded
//! by `derive_seed(master_seed, model_name)`, so the report does not depend
//! on scheduling. A failing dataset is recorded and the grid moves on.

pub mod config;
pub mod synth;
pub mod tables;

use std::cmp::Ordering;
use std::collections::BTreeMap;
use std::path::Path;
use std::time::{Duration, Instant};

use log::{info, warn};
use rayon::prelude::*;
use serde::Serialize;
use thiserror::Error;

use crate::analysis::{profile_attributes, select_from_profiles, suggest_initial_algorithms};
use crate::analysis::AnalysisReport;
use crate::evaluation::{evaluate_model, EvaluationRecord};
use crate::ingest::{load_csv, stratified_split, Dataset};
use crate::learners::{fit, registry_all_models, Category, LearnerSpec};
use crate::recommend::{by_accuracy_order, category_averages, recommend_model};
use crate::recommend::{CategorySummary, Recommendation};
use crate::rng::derive_seed;

pub use config::{parse_config, ConfigError, DatasetSource, ExperimentConfig};

pub const VERSION: &str = env!("CARGO_PKG_VERSION");

#[derive(Debug, Error)]
pub enum GridError {
    #[error(transparent)]
    Config(#[from] ConfigError),
    #[error("cannot start worker pool: {0}")]
    Pool(String),
}

/// Registry entry as echoed in the report.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ModelSummary {
    pub name: String,
    pub category: Category,
    pub hyperparameters: BTreeMap<String, f64>,
    pub param_count: usize,
}

/// A category picked by its average, and the best model inside it.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct BasisChoice {
    pub category: Category,
    pub model: String,
}

/// Accuracy basis next to AIC basis.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Comparison {
    pub accuracy_basis: BasisChoice,
    pub aic_basis: BasisChoice,
}

#[derive(Debug, Clone, Serialize)]
pub struct DatasetResult {
    pub n_rows: usize,
    pub n_features: usize,
    pub class_labels: [String; 2],
    pub class_counts: [usize; 2],
    pub analysis: AnalysisReport,
    pub selected_features: Vec<String>,
    pub train_rows: usize,
    pub test_rows: usize,
    pub models: Vec<ModelSummary>,
    pub records: Vec<EvaluationRecord>,
    pub summaries: Vec<CategorySummary>,
    /// `None` when fewer than two models ran.
    pub recommendation: Option<Recommendation>,
    pub comparison: Comparison,
}

#[derive(Debug, Clone, Serialize)]
#[serde(tag = "status", rename_all = "lowercase")]
pub enum DatasetOutcome {
    Completed(Box<DatasetResult>),
    Failed { error: String },
}

#[derive(Debug, Clone, Serialize)]
pub struct DatasetReport {
    pub name: String,
    pub path: String,
    pub target: String,
    #[serde(flatten)]
    pub outcome: DatasetOutcome,
}

impl DatasetReport {
    pub fn result(&self) -> Option<&DatasetResult> {
        match &self.outcome {
            DatasetOutcome::Completed(r) => Some(r),
            DatasetOutcome::Failed { .. } => None,
        }
    }
}

#[derive(Debug, Clone, Serialize)]
pub struct RunReport {
    pub version: String,
    pub config: BTreeMap<String, String>,
    pub datasets: Vec<DatasetReport>,
    /// Kept out of the JSON so reruns stay byte-identical.
    #[serde(skip)]
    pub wall_time: Duration,
}

impl RunReport {
    pub fn records(&self) -> impl Iterator<Item = &EvaluationRecord> {
        self.datasets
            .iter()
            .filter_map(DatasetReport::result)
            .flat_map(|r| r.records.iter())
    }

    pub fn failures(&self) -> impl Iterator<Item = (&str, &str)> {
        self.datasets.iter().filter_map(|d| match &d.outcome {
            DatasetOutcome::Failed { error } => Some((d.name.as_str(), error.as_str())),
            DatasetOutcome::Completed(_) => None,
        })
    }
}

fn pick_category(summaries: &[CategorySummary], better: impl Fn(&CategorySummary, &CategorySummary) -> Ordering) -> Category {
    // first best in eager, lazy, hybrid order
    summaries
        .iter()
        .reduce(|best, s| if better(s, best) == Ordering::Less { s } else { best })
        .expect("at least one category")
        .category
}

/// Picks, per basis, the category with the best average and the best model
/// within it. Accuracy basis: highest mean accuracy, then the model order of
/// the accuracy recommendation. AIC basis: lowest mean AIC, then lowest AIC
/// (ties by name).
pub fn compare_bases(records: &[EvaluationRecord], summaries: &[CategorySummary]) -> Comparison {
    let acc_cat = pick_category(summaries, |a, b| b.avg_accuracy.total_cmp(&a.avg_accuracy));
    let aic_cat = pick_category(summaries, |a, b| a.avg_aic.total_cmp(&b.avg_aic));
    let acc_model = records
        .iter()
        .filter(|r| r.category == acc_cat)
        .min_by(|a, b| by_accuracy_order(a, b))
        .unwrap();
    let aic_model = records
        .iter()
        .filter(|r| r.category == aic_cat)
        .min_by(|a, b| a.aic.total_cmp(&b.aic).then_with(|| a.model_name.cmp(&b.model_name)))
        .unwrap();
    Comparison {
        accuracy_basis: BasisChoice {
            category: acc_cat,
            model: acc_model.model_name.clone(),
        },
        aic_basis: BasisChoice {
            category: aic_cat,
            model: aic_model.model_name.clone(),
        },
    }
}

/// Runs analysis, selection, split and every spec on an encoded dataset.
/// Model fits run on the current rayon pool.
pub fn run_dataset(
    data: &Dataset,
    config: &ExperimentConfig,
    specs: &[LearnerSpec],
) -> Result<DatasetResult, String> {
    if specs.is_empty() {
        return Err("no models selected".into());
    }
    let profiles = profile_attributes(data);
    let mut analysis = suggest_initial_algorithms(&profiles, data.n_rows(), &config.analysis);
    let selected = select_from_profiles(
        data,
        &profiles,
        config.analysis.target_threshold,
        config.analysis.pairwise_threshold,
    )
    .map_err(|e| e.to_string())?;
    analysis.selected_features = selected.clone();
    let reduced = data.select_columns(&selected);
    let split = stratified_split(&reduced, config.split_ratio, config.master_seed)
        .map_err(|e| e.to_string())?;

    let outcomes: Vec<Result<(ModelSummary, EvaluationRecord), String>> = specs
        .par_iter()
        .map(|spec| {
            let seed = derive_seed(config.master_seed, &spec.name);
            let model = fit(spec, &split.train, seed).map_err(|e| format!("{}: {e}", spec.name))?;
            let record =
                evaluate_model(&model, &split.test).map_err(|e| format!("{}: {e}", spec.name))?;
            let summary = ModelSummary {
                name: spec.name.clone(),
                category: spec.category,
                hyperparameters: spec.hyperparameter_map(),
                param_count: model.param_count(),
            };
            Ok((summary, record))
        })
        .collect();
    let (models, records): (Vec<_>, Vec<_>) =
        outcomes.into_iter().collect::<Result<Vec<_>, _>>()?.into_iter().unzip();

    let summaries = category_averages(&records);
    let recommendation = if records.len() >= 2 {
        Some(recommend_model(&records, &config.weights).map_err(|e| e.to_string())?)
    } else {
        warn!("{}: a single model ran; no recommendation", data.name);
        None
    };
    let comparison = compare_bases(&records, &summaries);
    Ok(DatasetResult {
        n_rows: data.n_rows(),
        n_features: data.n_features(),
        class_labels: data.class_labels.clone(),
        class_counts: data.class_counts(),
        analysis,
        selected_features: selected.iter().map(|&c| data.columns[c].name.clone()).collect(),
        train_rows: split.train.n_rows(),
        test_rows: split.test.n_rows(),
        models,
        records,
        summaries,
        recommendation,
        comparison,
    })
}

fn load_source(source: &DatasetSource, config: &ExperimentConfig) -> Result<Dataset, String> {
    let (table, schema) =
        load_csv(Path::new(&source.path), &source.target, &config.missing_tokens)
            .map_err(|e| e.to_string())?;
    Dataset::from_table(&source.name(), &table, &schema, &source.target).map_err(|e| e.to_string())
}

/// Runs every configured dataset through the full model grid.
pub fn run_experiment_grid(config: &ExperimentConfig) -> Result<RunReport, GridError> {
    config.require_datasets()?;
    let started = Instant::now();
    let category = config.category_filter.map(Category::as_str);
    let specs = registry_all_models(&config.hyperparameters, category)
        .expect("category filter is already validated");
    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(config.threads)
        .build()
        .map_err(|e| GridError::Pool(e.to_string()))?;

    let mut datasets = Vec::new();
    for source in &config.datasets {
        let name = source.name();
        info!("{name}: fitting {} models", specs.len());
        let outcome = match load_source(source, config)
            .and_then(|d| pool.install(|| run_dataset(&d, config, &specs)))
        {
            Ok(result) => DatasetOutcome::Completed(Box::new(result)),
            Err(error) => {
                warn!("{name}: {error}");
                DatasetOutcome::Failed { error }
            }
        };
        datasets.push(DatasetReport {
            name,
            path: source.path.display().to_string(),
            target: source.target.clone(),
            outcome,
        });
    }
    Ok(RunReport {
        version: VERSION.to_string(),
        config: config.echo(),
        datasets,
        wall_time: started.elapsed(),
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::evaluation::ConfusionMatrix;

    fn record(name: &str, category: Category, accuracy: f64, aic: f64) -> EvaluationRecord {
        EvaluationRecord {
            model_name: name.into(),
            category,
            accuracy,
            precision: accuracy,
            recall: accuracy,
            f_measure: accuracy,
            auc: None,
            log_likelihood: 0.0,
            param_count: 1,
            aic,
            confusion: ConfusionMatrix::default(),
            roc: None,
        }
    }

    #[test]
    fn bases_can_disagree() {
        let records = vec![
            record("DT", Category::Eager, 0.9, 30.0),
            record("SVM", Category::Eager, 0.95, 28.0),
            record("KNN", Category::Lazy, 0.85, 12.0),
            record("LNB", Category::Lazy, 0.8, 14.0),
        ];
        let summaries = category_averages(&records);
        let c = compare_bases(&records, &summaries);
        assert_eq!(
            c.accuracy_basis,
            BasisChoice {
                category: Category::Eager,
                model: "SVM".into()
            }
        );
        assert_eq!(
            c.aic_basis,
            BasisChoice {
                category: Category::Lazy,
                model: "KNN".into()
            }
        );
    }

    #[test]
    fn tied_category_averages_keep_registry_order() {
        let records = vec![
            record("DT", Category::Eager, 0.9, 10.0),
            record("KNN", Category::Lazy, 0.9, 10.0),
        ];
        let c = compare_bases(&records, &category_averages(&records));
        assert_eq!(c.accuracy_basis.category, Category::Eager);
        assert_eq!(c.aic_basis.category, Category::Eager);
    }

    #[test]
    fn grid_needs_a_dataset() {
        let err = run_experiment_grid(&ExperimentConfig::default()).unwrap_err();
        assert!(matches!(err, GridError::Config(ConfigError::MissingDataset)));
    }

    #[test]
    fn in_memory_dataset_runs_all_models() {
        let csv = synth::generate_csv(&synth::TABLE_SHAPES[7], 11, Some(120));
        let (table, schema) = crate::ingest::parse_csv(
            csv.as_bytes(),
            synth::TABLE_SHAPES[7].target,
            &ExperimentConfig::default().missing_tokens,
        )
        .unwrap();
        let data = Dataset::from_table("mini", &table, &schema, synth::TABLE_SHAPES[7].target).unwrap();
        let config = ExperimentConfig::default();
        let specs = registry_all_models(&config.hyperparameters, None).unwrap();
        let result = run_dataset(&data, &config, &specs).unwrap();
        assert_eq!(result.records.len(), 13);
        assert_eq!(result.summaries.len(), 3);
        assert_eq!(result.train_rows + result.test_rows, 120);
        let names: Vec<&str> = result.records.iter().map(|r| r.model_name.as_str()).collect();
        assert_eq!(names, crate::learners::MODEL_NAMES);
    }
}
