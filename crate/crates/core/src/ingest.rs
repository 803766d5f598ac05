//! CSV loading, schema inference, label encoding, imputation and
//! stratified train/test splitting.

use std::collections::BTreeMap;
use std::fs::File;
use std::io::Read;
use std::path::Path;

use log::warn;
use serde::Serialize;
use thiserror::Error;

use crate::rng::SplitMix64;

/// Cell tokens treated as missing when nothing else is configured.
pub const DEFAULT_MISSING_TOKENS: [&str; 2] = ["", "NA"];

#[derive(Debug, Error)]
pub enum IngestError {
    #[error("cannot open {path}: {source}")]
    Io {
        path: String,
        #[source]
        source: std::io::Error,
    },
    #[error("malformed CSV: {0}")]
    Csv(#[from] csv::Error),
    #[error("header has no column named {0:?}")]
    MissingTarget(String),
    #[error("row on line {line} has {found} fields, header has {expected}")]
    RaggedRow {
        line: u64,
        expected: usize,
        found: usize,
    },
    #[error("target column {column:?} must have exactly 2 distinct values, found {distinct}")]
    TargetNotBinary { column: String, distinct: usize },
    #[error("need at least 2 data rows, found {0}")]
    TooFewRows(usize),
    #[error("value {value:?} was not seen in column {column:?}")]
    UnseenCategory { column: String, value: String },
    #[error("column {0:?} has no observed values")]
    AllMissing(String),
    #[error("column {0:?} is not categorical")]
    NotCategorical(String),
    #[error("split ratio must lie strictly between 0 and 1, got {0}")]
    InvalidRatio(f64),
    #[error("class {class:?} has {count} rows; at least 2 are required")]
    ClassTooSmall { class: String, count: usize },
    #[error("{0}")]
    Invalid(String),
}

pub type Result<T, E = IngestError> = std::result::Result<T, E>;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum ColumnKind {
    Numeric,
    Categorical,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ColumnSchema {
    pub name: String,
    pub kind: ColumnKind,
    /// Sorted, duplicate-free. Empty for numeric columns.
    pub categories: Vec<String>,
    pub missing_count: usize,
    pub observed_mean: Option<f64>,
    pub mode_category: Option<String>,
}

impl ColumnSchema {
    /// Infers the schema of one column. `None` cells are missing.
    pub fn infer(name: &str, cells: &[Option<&str>]) -> ColumnSchema {
        let observed: Vec<&str> = cells.iter().flatten().copied().collect();
        let numeric: Option<Vec<f64>> = observed.iter().map(|c| parse_number(c)).collect();
        match numeric {
            Some(values) => numeric_schema(name, &values, cells.len() - observed.len()),
            None => categorical_schema(name, &observed, cells.len() - observed.len()),
        }
    }

    /// Infers a categorical schema regardless of parseability (used for targets).
    pub fn infer_categorical(name: &str, cells: &[Option<&str>]) -> ColumnSchema {
        let observed: Vec<&str> = cells.iter().flatten().copied().collect();
        categorical_schema(name, &observed, cells.len() - observed.len())
    }

    pub fn is_categorical(&self) -> bool {
        self.kind == ColumnKind::Categorical
    }

    /// Maps a code produced by [`label_encode`] back to its category.
    pub fn decode(&self, code: f64) -> Option<&str> {
        if code < 0.0 || code.fract() != 0.0 {
            return None;
        }
        self.categories.get(code as usize).map(String::as_str)
    }
}

fn parse_number(cell: &str) -> Option<f64> {
    cell.trim().parse::<f64>().ok().filter(|v| v.is_finite())
}

fn numeric_schema(name: &str, values: &[f64], missing: usize) -> ColumnSchema {
    let observed_mean = if values.is_empty() {
        None
    } else {
        Some(values.iter().sum::<f64>() / values.len() as f64)
    };
    ColumnSchema {
        name: name.to_string(),
        kind: ColumnKind::Numeric,
        categories: Vec::new(),
        missing_count: missing,
        observed_mean,
        mode_category: None,
    }
}

fn categorical_schema(name: &str, observed: &[&str], missing: usize) -> ColumnSchema {
    let mut counts: BTreeMap<&str, usize> = BTreeMap::new();
    for c in observed {
        *counts.entry(c).or_default() += 1;
    }
    // BTreeMap iterates in lexicographic order, so the first maximum wins ties
    let mut mode: Option<(&str, usize)> = None;
    for (&value, &count) in &counts {
        if mode.is_none_or(|(_, best)| count > best) {
            mode = Some((value, count));
        }
    }
    ColumnSchema {
        name: name.to_string(),
        kind: ColumnKind::Categorical,
        categories: counts.keys().map(|s| s.to_string()).collect(),
        missing_count: missing,
        observed_mean: None,
        mode_category: mode.map(|(v, _)| v.to_string()),
    }
}

/// Parsed CSV with missing markers resolved to `None`.
#[derive(Debug, Clone, PartialEq)]
pub struct RawTable {
    pub headers: Vec<String>,
    pub rows: Vec<Vec<Option<String>>>,
}

impl RawTable {
    pub fn column(&self, index: usize) -> Vec<Option<&str>> {
        self.rows.iter().map(|r| r[index].as_deref()).collect()
    }

    pub fn column_index(&self, name: &str) -> Option<usize> {
        self.headers.iter().position(|h| h == name)
    }

    /// Schema per column; the target column is always categorical.
    pub fn infer_schema(&self, target_index: usize) -> Vec<ColumnSchema> {
        self.headers
            .iter()
            .enumerate()
            .map(|(i, name)| {
                let cells = self.column(i);
                if i == target_index {
                    ColumnSchema::infer_categorical(name, &cells)
                } else {
                    ColumnSchema::infer(name, &cells)
                }
            })
            .collect()
    }
}

/// Reads CSV text. Cells equal to one of `missing_tokens` become `None`.
pub fn read_table<R: Read>(reader: R, missing_tokens: &[String]) -> Result<RawTable> {
    let mut csv_reader = csv::ReaderBuilder::new()
        .has_headers(true)
        .flexible(true)
        .from_reader(reader);
    let headers: Vec<String> = csv_reader.headers()?.iter().map(str::to_string).collect();
    let mut rows = Vec::new();
    for record in csv_reader.records() {
        let record = record?;
        if record.len() != headers.len() {
            return Err(IngestError::RaggedRow {
                line: record.position().map_or(0, |p| p.line()),
                expected: headers.len(),
                found: record.len(),
            });
        }
        rows.push(
            record
                .iter()
                .map(|cell| {
                    if missing_tokens.iter().any(|t| t == cell) {
                        None
                    } else {
                        Some(cell.to_string())
                    }
                })
                .collect(),
        );
    }
    Ok(RawTable { headers, rows })
}

/// Reads a CSV file and infers its schema. The target column must exist and
/// hold exactly two distinct values.
pub fn load_csv(
    path: &Path,
    target_name: &str,
    missing_tokens: &[String],
) -> Result<(RawTable, Vec<ColumnSchema>)> {
    let file = File::open(path).map_err(|source| IngestError::Io {
        path: path.display().to_string(),
        source,
    })?;
    parse_csv(file, target_name, missing_tokens)
}

/// [`load_csv`] over any reader.
pub fn parse_csv<R: Read>(
    reader: R,
    target_name: &str,
    missing_tokens: &[String],
) -> Result<(RawTable, Vec<ColumnSchema>)> {
    let table = read_table(reader, missing_tokens)?;
    let target_index = table
        .column_index(target_name)
        .ok_or_else(|| IngestError::MissingTarget(target_name.to_string()))?;
    if table.rows.len() < 2 {
        return Err(IngestError::TooFewRows(table.rows.len()));
    }
    let schema = table.infer_schema(target_index);
    let distinct = schema[target_index].categories.len();
    if distinct != 2 {
        return Err(IngestError::TargetNotBinary {
            column: target_name.to_string(),
            distinct,
        });
    }
    Ok((table, schema))
}

/// Code of `cell` in the sorted category list. A missing cell encodes as the
/// mode category.
pub fn label_encode(schema: &ColumnSchema, cell: Option<&str>) -> Result<f64> {
    if !schema.is_categorical() {
        return Err(IngestError::NotCategorical(schema.name.clone()));
    }
    let value = match cell {
        Some(v) => v,
        None => schema
            .mode_category
            .as_deref()
            .ok_or_else(|| IngestError::AllMissing(schema.name.clone()))?,
    };
    schema
        .categories
        .binary_search_by(|c| c.as_str().cmp(value))
        .map(|i| i as f64)
        .map_err(|_| IngestError::UnseenCategory {
            column: schema.name.clone(),
            value: value.to_string(),
        })
}

#[derive(Debug, Clone, PartialEq)]
pub enum ImputedColumn {
    Numeric(Vec<f64>),
    Categorical(Vec<String>),
}

/// Fills gaps with the observed mean (numeric) or the mode category.
pub fn impute_missing(cells: &[Option<&str>], schema: &ColumnSchema) -> Result<ImputedColumn> {
    let all_missing = || IngestError::AllMissing(schema.name.clone());
    match schema.kind {
        ColumnKind::Numeric => {
            let mean = schema.observed_mean.ok_or_else(all_missing)?;
            cells
                .iter()
                .map(|c| match c {
                    None => Ok(mean),
                    Some(v) => parse_number(v).ok_or_else(|| {
                        IngestError::Invalid(format!(
                            "non-numeric value {v:?} in numeric column {:?}",
                            schema.name
                        ))
                    }),
                })
                .collect::<Result<_>>()
                .map(ImputedColumn::Numeric)
        }
        ColumnKind::Categorical => {
            let mode = schema.mode_category.as_deref().ok_or_else(all_missing)?;
            Ok(ImputedColumn::Categorical(
                cells.iter().map(|c| c.unwrap_or(mode).to_string()).collect(),
            ))
        }
    }
}

/// Type of a feature column as seen by the learners.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum FeatureKind {
    Numeric,
    Categorical { levels: usize },
}

/// Fully encoded binary-classification table.
#[derive(Debug, Clone, PartialEq)]
pub struct Dataset {
    pub name: String,
    pub columns: Vec<ColumnSchema>,
    /// Row-major, one entry per column, target encoded as 0/1.
    pub rows: Vec<Vec<f64>>,
    pub target_index: usize,
    pub class_labels: [String; 2],
}

impl Dataset {
    /// Encodes a loaded table. All-missing feature columns are dropped with a
    /// warning and rows without a target value are discarded.
    pub fn from_table(
        name: &str,
        table: &RawTable,
        schema: &[ColumnSchema],
        target_name: &str,
    ) -> Result<Dataset> {
        let target = table
            .column_index(target_name)
            .ok_or_else(|| IngestError::MissingTarget(target_name.to_string()))?;
        let kept_rows: Vec<&Vec<Option<String>>> =
            table.rows.iter().filter(|r| r[target].is_some()).collect();
        if kept_rows.len() < table.rows.len() {
            warn!(
                "{name}: dropped {} rows with a missing target",
                table.rows.len() - kept_rows.len()
            );
        }
        let target_schema = &schema[target];
        if target_schema.categories.len() != 2 {
            return Err(IngestError::TargetNotBinary {
                column: target_name.to_string(),
                distinct: target_schema.categories.len(),
            });
        }

        let mut columns = Vec::new();
        let mut encoded: Vec<Vec<f64>> = Vec::new();
        let mut target_index = 0;
        for (i, col) in schema.iter().enumerate() {
            let cells: Vec<Option<&str>> = kept_rows.iter().map(|r| r[i].as_deref()).collect();
            if i == target {
                target_index = columns.len();
                let codes = cells
                    .iter()
                    .map(|c| label_encode(col, *c))
                    .collect::<Result<Vec<_>>>()?;
                let mut target_col = col.clone();
                target_col.missing_count = 0;
                columns.push(target_col);
                encoded.push(codes);
                continue;
            }
            if cells.iter().all(Option::is_none) {
                warn!("{name}: dropping column {:?}, every value is missing", col.name);
                continue;
            }
            let values = match impute_missing(&cells, col)? {
                ImputedColumn::Numeric(v) => v,
                ImputedColumn::Categorical(v) => v
                    .iter()
                    .map(|c| label_encode(col, Some(c)))
                    .collect::<Result<_>>()?,
            };
            columns.push(col.clone());
            encoded.push(values);
        }

        let n = kept_rows.len();
        let rows = (0..n).map(|r| encoded.iter().map(|c| c[r]).collect()).collect();
        let labels = &target_schema.categories;
        Dataset::new(
            name,
            columns,
            rows,
            target_index,
            [labels[0].clone(), labels[1].clone()],
        )
    }

    /// Validating constructor.
    pub fn new(
        name: &str,
        columns: Vec<ColumnSchema>,
        rows: Vec<Vec<f64>>,
        target_index: usize,
        class_labels: [String; 2],
    ) -> Result<Dataset> {
        if target_index >= columns.len() {
            return Err(IngestError::Invalid("target index out of range".into()));
        }
        for (i, row) in rows.iter().enumerate() {
            if row.len() != columns.len() {
                return Err(IngestError::Invalid(format!(
                    "row {i} has {} entries, expected {}",
                    row.len(),
                    columns.len()
                )));
            }
            if row.iter().any(|v| !v.is_finite()) {
                return Err(IngestError::Invalid(format!("row {i} has a non-finite value")));
            }
            let y = row[target_index];
            if y != 0.0 && y != 1.0 {
                return Err(IngestError::Invalid(format!("row {i} has target {y}")));
            }
        }
        Ok(Dataset {
            name: name.to_string(),
            columns,
            rows,
            target_index,
            class_labels,
        })
    }

    /// All-numeric dataset with features `x0, x1, ...` followed by a 0/1
    /// `target` column.
    pub fn from_features(name: &str, features: &[Vec<f64>], labels: &[u8]) -> Result<Dataset> {
        if features.len() != labels.len() {
            return Err(IngestError::Invalid("feature/label length mismatch".into()));
        }
        let width = features.first().map_or(0, Vec::len);
        let mut columns: Vec<ColumnSchema> = (0..width)
            .map(|j| {
                let values: Vec<f64> = features.iter().map(|r| r[j]).collect();
                numeric_schema(&format!("x{j}"), &values, 0)
            })
            .collect();
        columns.push(ColumnSchema {
            name: "target".into(),
            kind: ColumnKind::Categorical,
            categories: vec!["0".into(), "1".into()],
            missing_count: 0,
            observed_mean: None,
            mode_category: None,
        });
        let rows = features
            .iter()
            .zip(labels)
            .map(|(x, &y)| {
                let mut row = x.clone();
                row.push(f64::from(y));
                row
            })
            .collect();
        Dataset::new(name, columns, rows, width, ["0".into(), "1".into()])
    }

    pub fn n_rows(&self) -> usize {
        self.rows.len()
    }

    pub fn n_features(&self) -> usize {
        self.columns.len() - 1
    }

    /// Column indices of every non-target column, ascending.
    pub fn feature_indices(&self) -> Vec<usize> {
        (0..self.columns.len()).filter(|&i| i != self.target_index).collect()
    }

    pub fn feature_kinds(&self) -> Vec<FeatureKind> {
        self.feature_indices()
            .into_iter()
            .map(|i| match self.columns[i].kind {
                ColumnKind::Numeric => FeatureKind::Numeric,
                ColumnKind::Categorical => FeatureKind::Categorical {
                    levels: self.columns[i].categories.len(),
                },
            })
            .collect()
    }

    /// Feature vector of one row (target removed).
    pub fn feature_row(&self, row: usize) -> Vec<f64> {
        let r = &self.rows[row];
        r.iter()
            .enumerate()
            .filter(|&(i, _)| i != self.target_index)
            .map(|(_, &v)| v)
            .collect()
    }

    pub fn feature_matrix(&self) -> Vec<Vec<f64>> {
        (0..self.n_rows()).map(|r| self.feature_row(r)).collect()
    }

    pub fn column_values(&self, column: usize) -> Vec<f64> {
        self.rows.iter().map(|r| r[column]).collect()
    }

    pub fn labels(&self) -> Vec<u8> {
        self.rows.iter().map(|r| r[self.target_index] as u8).collect()
    }

    pub fn class_counts(&self) -> [usize; 2] {
        let mut counts = [0, 0];
        for y in self.labels() {
            counts[y as usize] += 1;
        }
        counts
    }

    /// Dataset restricted to the given rows, in the given order.
    pub fn subset_rows(&self, rows: &[usize]) -> Dataset {
        Dataset {
            rows: rows.iter().map(|&r| self.rows[r].clone()).collect(),
            ..self.clone()
        }
    }

    /// Dataset keeping only `features` (column indices) plus the target.
    pub fn select_columns(&self, features: &[usize]) -> Dataset {
        let mut keep: Vec<usize> = features
            .iter()
            .copied()
            .filter(|&c| c != self.target_index && c < self.columns.len())
            .collect();
        keep.sort_unstable();
        keep.dedup();
        keep.push(self.target_index);
        keep.sort_unstable();
        let target_index = keep.iter().position(|&c| c == self.target_index).unwrap();
        Dataset {
            name: self.name.clone(),
            columns: keep.iter().map(|&c| self.columns[c].clone()).collect(),
            rows: self
                .rows
                .iter()
                .map(|r| keep.iter().map(|&c| r[c]).collect())
                .collect(),
            target_index,
            class_labels: self.class_labels.clone(),
        }
    }
}

/// Train/test partition of a dataset.
#[derive(Debug, Clone, PartialEq)]
pub struct SplitPair {
    pub train: Dataset,
    pub test: Dataset,
    pub ratio: f64,
    pub seed: u64,
}

/// Stratified index split: each class is shuffled with one generator seeded
/// by `seed` (class 0 first) and its first `floor(ratio * count)` rows go to
/// the training side. Both sides are returned in ascending order.
pub fn stratified_indices(
    labels: &[u8],
    ratio: f64,
    seed: u64,
) -> Result<(Vec<usize>, Vec<usize>)> {
    if !(ratio > 0.0 && ratio < 1.0) {
        return Err(IngestError::InvalidRatio(ratio));
    }
    let mut rng = SplitMix64::new(seed);
    let mut train = Vec::new();
    let mut test = Vec::new();
    for class in 0..2u8 {
        let mut members: Vec<usize> = (0..labels.len()).filter(|&i| labels[i] == class).collect();
        if members.len() < 2 {
            return Err(IngestError::ClassTooSmall {
                class: class.to_string(),
                count: members.len(),
            });
        }
        rng.shuffle(&mut members);
        let cut = (ratio * members.len() as f64).floor() as usize;
        train.extend_from_slice(&members[..cut]);
        test.extend_from_slice(&members[cut..]);
    }
    train.sort_unstable();
    test.sort_unstable();
    Ok((train, test))
}

pub fn stratified_split(d: &Dataset, ratio: f64, seed: u64) -> Result<SplitPair> {
    let (train, test) = stratified_indices(&d.labels(), ratio, seed).map_err(|e| match e {
        IngestError::ClassTooSmall { class, count } => IngestError::ClassTooSmall {
            class: d.class_labels[if class == "0" { 0 } else { 1 }].clone(),
            count,
        },
        other => other,
    })?;
    Ok(SplitPair {
        train: d.subset_rows(&train),
        test: d.subset_rows(&test),
        ratio,
        seed,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn tokens() -> Vec<String> {
        DEFAULT_MISSING_TOKENS.iter().map(|s| s.to_string()).collect()
    }

    #[test]
    fn infers_schema_by_parseability() {
        let csv = "age,sex,target\n63,M,1\n37,F,0\n";
        let (_, schema) = parse_csv(csv.as_bytes(), "target", &tokens()).unwrap();
        assert_eq!(schema[0].kind, ColumnKind::Numeric);
        assert_eq!(schema[1].kind, ColumnKind::Categorical);
        assert_eq!(schema[1].categories, vec!["F", "M"]);
        assert_eq!(schema[2].kind, ColumnKind::Categorical);
        assert_eq!(schema[2].categories, vec!["0", "1"]);
    }

    #[test]
    fn ragged_rows_are_rejected() {
        let csv = "a,b,target\n1,2\n1,2,3\n";
        let err = parse_csv(csv.as_bytes(), "target", &tokens()).unwrap_err();
        assert!(matches!(
            err,
            IngestError::RaggedRow {
                expected: 3,
                found: 2,
                ..
            }
        ));
    }

    #[test]
    fn header_without_target() {
        let csv = "a,b\n1,0\n2,1\n";
        let err = parse_csv(csv.as_bytes(), "target", &tokens()).unwrap_err();
        assert!(matches!(err, IngestError::MissingTarget(_)));
    }

    #[test]
    fn target_must_be_binary() {
        let csv = "a,target\n1,x\n2,y\n3,z\n";
        let err = parse_csv(csv.as_bytes(), "target", &tokens()).unwrap_err();
        assert!(matches!(err, IngestError::TargetNotBinary { distinct: 3, .. }));
    }

    #[test]
    fn missing_file() {
        let err = load_csv(Path::new("/no/such/file.csv"), "t", &tokens()).unwrap_err();
        assert!(matches!(err, IngestError::Io { .. }));
    }

    #[test]
    fn quoted_fields_and_missing_markers() {
        let csv = "name,score,target\n\"Smith, J\",NA,yes\n\"Doe\",4,no\n,2,yes\n";
        let (table, schema) = parse_csv(csv.as_bytes(), "target", &tokens()).unwrap();
        assert_eq!(table.rows[0][0].as_deref(), Some("Smith, J"));
        assert_eq!(table.rows[0][1], None);
        assert_eq!(table.rows[2][0], None);
        assert_eq!(schema[1].missing_count, 1);
        assert_eq!(schema[1].observed_mean, Some(3.0));
        // "na" is not a marker; markers are case-sensitive
        let csv = "v,target\nna,0\n1,1\n";
        let (_, schema) = parse_csv(csv.as_bytes(), "target", &tokens()).unwrap();
        assert_eq!(schema[0].kind, ColumnKind::Categorical);
    }

    #[test]
    fn label_encoding_is_lexicographic() {
        let schema = ColumnSchema::infer("c", &[Some("yes"), Some("no")]);
        assert_eq!(label_encode(&schema, Some("yes")).unwrap(), 1.0);
        let schema = ColumnSchema::infer("c", &[Some("M"), Some("F")]);
        assert_eq!(label_encode(&schema, Some("F")).unwrap(), 0.0);
        let schema = ColumnSchema::infer("c", &[Some("a"), Some("b"), Some("c")]);
        assert!(matches!(
            label_encode(&schema, Some("d")),
            Err(IngestError::UnseenCategory { .. })
        ));
        assert_eq!(schema.decode(2.0), Some("c"));
        assert_eq!(schema.decode(3.0), None);
    }

    #[test]
    fn imputation() {
        let cells = [Some("1"), None, Some("3")];
        let schema = ColumnSchema::infer("n", &cells);
        assert_eq!(
            impute_missing(&cells, &schema).unwrap(),
            ImputedColumn::Numeric(vec![1.0, 2.0, 3.0])
        );

        let cells = [Some("a"), Some("a"), None, Some("b")];
        let schema = ColumnSchema::infer("c", &cells);
        assert_eq!(
            impute_missing(&cells, &schema).unwrap(),
            ImputedColumn::Categorical(vec!["a".into(), "a".into(), "a".into(), "b".into()])
        );

        let cells = [None, None];
        let schema = ColumnSchema::infer("m", &cells);
        assert!(matches!(
            impute_missing(&cells, &schema),
            Err(IngestError::AllMissing(_))
        ));
    }

    #[test]
    fn mode_ties_pick_smallest_category() {
        let schema = ColumnSchema::infer("c", &[Some("b"), Some("a"), Some("b"), Some("a")]);
        assert_eq!(schema.mode_category.as_deref(), Some("a"));
    }

    #[test]
    fn all_missing_columns_are_dropped() {
        let csv = "a,empty,target\n1,,x\n2,NA,y\n3,,x\n";
        let (table, schema) = parse_csv(csv.as_bytes(), "target", &tokens()).unwrap();
        let d = Dataset::from_table("t", &table, &schema, "target").unwrap();
        assert_eq!(d.columns.len(), 2);
        assert_eq!(d.labels(), vec![0, 1, 0]);
        assert_eq!(d.class_labels, ["x".to_string(), "y".to_string()]);
    }

    fn blocks(n0: usize, n1: usize) -> Dataset {
        let features: Vec<Vec<f64>> = (0..n0 + n1).map(|i| vec![i as f64]).collect();
        let labels: Vec<u8> = (0..n0 + n1).map(|i| u8::from(i >= n0)).collect();
        Dataset::from_features("blocks", &features, &labels).unwrap()
    }

    #[test]
    fn split_proportions() {
        let d = blocks(60, 40);
        let s = stratified_split(&d, 0.8, 42).unwrap();
        assert_eq!(s.train.class_counts(), [48, 32]);
        assert_eq!(s.test.class_counts(), [12, 8]);

        let d = blocks(2, 2);
        let s = stratified_split(&d, 0.5, 1).unwrap();
        assert_eq!(s.train.class_counts(), [1, 1]);
        assert_eq!(s.test.class_counts(), [1, 1]);
    }

    #[test]
    fn split_is_deterministic() {
        let d = blocks(60, 40);
        assert_eq!(
            stratified_split(&d, 0.8, 42).unwrap(),
            stratified_split(&d, 0.8, 42).unwrap()
        );
        assert_ne!(
            stratified_split(&d, 0.8, 42).unwrap().train,
            stratified_split(&d, 0.8, 43).unwrap().train
        );
    }

    #[test]
    fn split_errors() {
        let d = blocks(1, 5);
        assert!(matches!(
            stratified_split(&d, 0.8, 42),
            Err(IngestError::ClassTooSmall { count: 1, .. })
        ));
        let d = blocks(5, 5);
        assert!(matches!(
            stratified_split(&d, 1.0, 42),
            Err(IngestError::InvalidRatio(_))
        ));
    }

    #[test]
    fn select_columns_keeps_target() {
        let features = vec![vec![1.0, 2.0, 3.0], vec![4.0, 5.0, 6.0]];
        let d = Dataset::from_features("s", &features, &[0, 1]).unwrap();
        let s = d.select_columns(&[2, 0]);
        assert_eq!(s.n_features(), 2);
        assert_eq!(s.feature_row(1), vec![4.0, 6.0]);
        assert_eq!(s.labels(), vec![0, 1]);
    }
}
