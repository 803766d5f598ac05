//! Flat `key=value` experiment configuration.
//!
//! Sources are layered: defaults, then the config file, then command-line
//! overrides. Within one source a scalar key may appear once; `data` and
//! `target` may repeat and pair up by position (a single `target` applies to
//! every `data` entry). A source that sets `data` or `target` replaces the
//! lists from lower layers.
//!
//! | key | default |
//! |-----|---------|
//! | `data` / `target` | none |
//! | `split_ratio` | 0.8 |
//! | `seed` | 42 |
//! | `weights` | `0.2,0.2,0.2,0.2,0.2` (accuracy, precision, recall, F, AIC) |
//! | `category` | all (`eager`, `lazy`, `hybrid`, or `all`) |
//! | `target_threshold` | 0.02 |
//! | `pairwise_threshold` | 0.95 |
//! | `linearity_threshold` | 0.5 |
//! | `size_boundary` | 1000 |
//! | `missing_tokens` | `,NA` (comma separated; the empty token is kept) |
//! | learner knobs | see [`Hyperparameters`] |
//! | `report`, `tables`, `roc_dir` | unset |
//! | `threads` | 0 (one per core) |

use std::collections::BTreeMap;
use std::fmt::Write as _;
use std::path::{Path, PathBuf};

use serde::Serialize;
use thiserror::Error;

use crate::analysis::AnalysisSettings;
use crate::ingest::DEFAULT_MISSING_TOKENS;
use crate::learners::{Category, Hyperparameters};
use crate::recommend::Weights;

#[derive(Debug, Error)]
pub enum ConfigError {
    #[error("cannot read config {path}: {source}")]
    Io {
        path: String,
        #[source]
        source: std::io::Error,
    },
    #[error("line {line}: expected key=value, got {text:?}")]
    Malformed { line: usize, text: String },
    #[error("unknown config key {0:?}")]
    UnknownKey(String),
    #[error("key {0:?} given more than once")]
    DuplicateKey(String),
    #[error("invalid value {value:?} for {key}: {reason}")]
    InvalidValue {
        key: String,
        value: String,
        reason: String,
    },
    #[error("{data} data paths but {targets} target columns")]
    TargetMismatch { data: usize, targets: usize },
    #[error("no dataset given (set data=<csv> and target=<column>)")]
    MissingDataset,
}

/// One CSV input and the name of its class column.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct DatasetSource {
    pub path: PathBuf,
    pub target: String,
}

impl DatasetSource {
    /// File stem, used to label the dataset in reports.
    pub fn name(&self) -> String {
        self.path
            .file_stem()
            .map(|s| s.to_string_lossy().into_owned())
            .unwrap_or_else(|| self.path.display().to_string())
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct ExperimentConfig {
    pub datasets: Vec<DatasetSource>,
    pub split_ratio: f64,
    pub master_seed: u64,
    pub weights: Weights,
    pub category_filter: Option<Category>,
    pub analysis: AnalysisSettings,
    pub hyperparameters: Hyperparameters,
    pub missing_tokens: Vec<String>,
    pub report_path: Option<PathBuf>,
    pub tables_path: Option<PathBuf>,
    pub roc_dir: Option<PathBuf>,
    /// Worker threads for model fitting; 0 picks one per core.
    pub threads: usize,
}

impl Default for ExperimentConfig {
    fn default() -> Self {
        ExperimentConfig {
            datasets: Vec::new(),
            split_ratio: 0.8,
            master_seed: 42,
            weights: Weights::equal(),
            category_filter: None,
            analysis: AnalysisSettings::default(),
            hyperparameters: Hyperparameters::default(),
            missing_tokens: DEFAULT_MISSING_TOKENS.iter().map(|s| s.to_string()).collect(),
            report_path: None,
            tables_path: None,
            roc_dir: None,
            threads: 0,
        }
    }
}

const SCALAR_KEYS: [&str; 13] = [
    "split_ratio",
    "seed",
    "weights",
    "category",
    "target_threshold",
    "pairwise_threshold",
    "linearity_threshold",
    "size_boundary",
    "missing_tokens",
    "report",
    "tables",
    "roc_dir",
    "threads",
];

fn is_known(key: &str) -> bool {
    key == "data"
        || key == "target"
        || SCALAR_KEYS.contains(&key)
        || Hyperparameters::NAMES.contains(&key)
}

/// Parses config text into ordered `(key, value)` pairs. Blank lines and
/// lines starting with `#` are skipped; keys and values are trimmed.
pub fn parse_pairs(text: &str) -> Result<Vec<(String, String)>, ConfigError> {
    let mut pairs = Vec::new();
    for (i, line) in text.lines().enumerate() {
        let trimmed = line.trim();
        if trimmed.is_empty() || trimmed.starts_with('#') {
            continue;
        }
        let (key, value) = trimmed.split_once('=').ok_or_else(|| ConfigError::Malformed {
            line: i + 1,
            text: line.to_string(),
        })?;
        pairs.push((key.trim().to_string(), value.trim().to_string()));
    }
    Ok(pairs)
}

fn invalid(key: &str, value: &str, reason: impl Into<String>) -> ConfigError {
    ConfigError::InvalidValue {
        key: key.to_string(),
        value: value.to_string(),
        reason: reason.into(),
    }
}

fn parse_f64(key: &str, value: &str) -> Result<f64, ConfigError> {
    match value.parse::<f64>() {
        Ok(v) if v.is_finite() => Ok(v),
        _ => Err(invalid(key, value, "expected a finite number")),
    }
}

fn parse_usize(key: &str, value: &str) -> Result<usize, ConfigError> {
    value
        .parse::<usize>()
        .map_err(|_| invalid(key, value, "expected a non-negative integer"))
}

fn parse_path(key: &str, value: &str) -> Result<PathBuf, ConfigError> {
    if value.is_empty() {
        return Err(invalid(key, value, "empty path"));
    }
    Ok(PathBuf::from(value))
}

/// Parses `a,p,rc,f,aic`.
pub fn parse_weights(value: &str) -> Result<Weights, ConfigError> {
    let parts: Vec<&str> = value.split(',').map(str::trim).collect();
    if parts.len() != 5 {
        return Err(invalid("weights", value, "expected five comma-separated numbers"));
    }
    let mut w = [0.0; 5];
    for (slot, part) in w.iter_mut().zip(&parts) {
        *slot = parse_f64("weights", part)?;
    }
    Weights::from_array(w).map_err(|e| invalid("weights", value, e.to_string()))
}

fn parse_category(value: &str) -> Result<Option<Category>, ConfigError> {
    if value == "all" {
        return Ok(None);
    }
    value
        .parse::<Category>()
        .map(Some)
        .map_err(|e| invalid("category", value, e.to_string()))
}

impl ExperimentConfig {
    /// Applies one source of pairs on top of `self`.
    pub fn apply(&mut self, pairs: &[(String, String)]) -> Result<(), ConfigError> {
        let mut seen: Vec<&str> = Vec::new();
        let mut data: Vec<PathBuf> = Vec::new();
        let mut targets: Vec<String> = Vec::new();
        for (key, value) in pairs {
            if !is_known(key) {
                return Err(ConfigError::UnknownKey(key.clone()));
            }
            match key.as_str() {
                "data" => {
                    data.push(parse_path(key, value)?);
                    continue;
                }
                "target" => {
                    if value.is_empty() {
                        return Err(invalid(key, value, "empty column name"));
                    }
                    targets.push(value.clone());
                    continue;
                }
                _ => {}
            }
            if seen.contains(&key.as_str()) {
                return Err(ConfigError::DuplicateKey(key.clone()));
            }
            seen.push(key);
            self.set_scalar(key, value)?;
        }

        if data.is_empty() && targets.is_empty() {
            return Ok(());
        }
        let data = if data.is_empty() {
            self.datasets.iter().map(|d| d.path.clone()).collect()
        } else {
            data
        };
        let targets = if targets.is_empty() {
            self.datasets.iter().map(|d| d.target.clone()).collect()
        } else {
            targets
        };
        let targets = match (data.len(), targets.len()) {
            (d, 1) if d > 1 => vec![targets[0].clone(); d],
            (d, t) if d == t => targets,
            (d, t) => return Err(ConfigError::TargetMismatch { data: d, targets: t }),
        };
        self.datasets = data
            .into_iter()
            .zip(targets)
            .map(|(path, target)| DatasetSource { path, target })
            .collect();
        Ok(())
    }

    fn set_scalar(&mut self, key: &str, value: &str) -> Result<(), ConfigError> {
        match key {
            "split_ratio" => {
                let r = parse_f64(key, value)?;
                if !(r > 0.0 && r < 1.0) {
                    return Err(invalid(key, value, "must lie strictly between 0 and 1"));
                }
                self.split_ratio = r;
            }
            "seed" => {
                self.master_seed = value
                    .parse::<u64>()
                    .map_err(|_| invalid(key, value, "expected an unsigned 64-bit integer"))?
            }
            "weights" => self.weights = parse_weights(value)?,
            "category" => self.category_filter = parse_category(value)?,
            "target_threshold" | "pairwise_threshold" | "linearity_threshold" => {
                let v = parse_f64(key, value)?;
                if !(0.0..=1.0).contains(&v) {
                    return Err(invalid(key, value, "must lie in [0, 1]"));
                }
                match key {
                    "target_threshold" => self.analysis.target_threshold = v,
                    "pairwise_threshold" => self.analysis.pairwise_threshold = v,
                    _ => self.analysis.linearity_threshold = v,
                }
            }
            "size_boundary" => self.analysis.size_boundary = parse_usize(key, value)?,
            "missing_tokens" => {
                self.missing_tokens = value.split(',').map(str::to_string).collect();
            }
            "report" => self.report_path = Some(parse_path(key, value)?),
            "tables" => self.tables_path = Some(parse_path(key, value)?),
            "roc_dir" => self.roc_dir = Some(parse_path(key, value)?),
            "threads" => self.threads = parse_usize(key, value)?,
            knob => {
                let v = parse_f64(knob, value)?;
                self.hyperparameters
                    .set(knob, v)
                    .map_err(|e| invalid(knob, value, e.to_string()))?;
            }
        }
        Ok(())
    }

    /// Defaults, then `file_text`, then `overrides`.
    pub fn resolve(
        file_text: Option<&str>,
        overrides: &[(String, String)],
    ) -> Result<ExperimentConfig, ConfigError> {
        let mut config = ExperimentConfig::default();
        if let Some(text) = file_text {
            config.apply(&parse_pairs(text)?)?;
        }
        config.apply(overrides)?;
        Ok(config)
    }

    /// Fails when no dataset is configured.
    pub fn require_datasets(&self) -> Result<(), ConfigError> {
        if self.datasets.is_empty() {
            Err(ConfigError::MissingDataset)
        } else {
            Ok(())
        }
    }

    /// Every setting as ordered `(key, value)` pairs. `Display` of `f64` is
    /// shortest round-trip, so re-parsing the pairs is lossless.
    pub fn to_pairs(&self) -> Vec<(String, String)> {
        let mut pairs: Vec<(String, String)> = Vec::new();
        let mut push = |k: &str, v: String| pairs.push((k.to_string(), v));
        for d in &self.datasets {
            push("data", d.path.display().to_string());
            push("target", d.target.clone());
        }
        push("split_ratio", self.split_ratio.to_string());
        push("seed", self.master_seed.to_string());
        let w = self.weights.as_array().map(|v| v.to_string());
        push("weights", w.join(","));
        push(
            "category",
            self.category_filter.map_or("all", Category::as_str).to_string(),
        );
        push("target_threshold", self.analysis.target_threshold.to_string());
        push("pairwise_threshold", self.analysis.pairwise_threshold.to_string());
        push("linearity_threshold", self.analysis.linearity_threshold.to_string());
        push("size_boundary", self.analysis.size_boundary.to_string());
        push("missing_tokens", self.missing_tokens.join(","));
        for name in Hyperparameters::NAMES {
            push(name, self.hyperparameters.get(name).unwrap().to_string());
        }
        if let Some(p) = &self.report_path {
            push("report", p.display().to_string());
        }
        if let Some(p) = &self.tables_path {
            push("tables", p.display().to_string());
        }
        if let Some(p) = &self.roc_dir {
            push("roc_dir", p.display().to_string());
        }
        push("threads", self.threads.to_string());
        pairs
    }

    /// Config-file text that [`ExperimentConfig::resolve`] reads back to an
    /// equal config.
    pub fn to_config_string(&self) -> String {
        let mut out = String::new();
        for (k, v) in self.to_pairs() {
            let _ = writeln!(out, "{k}={v}");
        }
        out
    }

    /// Settings that determine results: everything except output paths and
    /// the thread count, so the echo is stable across output locations and
    /// parallelism.
    pub fn echo(&self) -> BTreeMap<String, String> {
        let mut map = BTreeMap::new();
        for (k, v) in self.to_pairs() {
            if matches!(k.as_str(), "data" | "target" | "report" | "tables" | "roc_dir" | "threads") {
                continue;
            }
            map.insert(k, v);
        }
        map
    }
}

/// Reads an optional config file and layers `overrides` on top.
pub fn parse_config(
    path: Option<&Path>,
    overrides: &[(String, String)],
) -> Result<ExperimentConfig, ConfigError> {
    let text = path
        .map(|p| {
            std::fs::read_to_string(p).map_err(|source| ConfigError::Io {
                path: p.display().to_string(),
                source,
            })
        })
        .transpose()?;
    ExperimentConfig::resolve(text.as_deref(), overrides)
}
