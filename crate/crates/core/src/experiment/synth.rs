//! Seeded synthetic stand-ins for the eight benchmark tables.
//!
//! Each clone matches its source's row count and attribute count (target
//! included) and mixes:
//! * four informative numeric columns and one informative categorical one,
//! * a near-duplicate of the first informative column,
//! * uninformative numeric and categorical columns,
//! * `NA` and empty cells in a few columns.
//!
//! The class is a thresholded noisy linear score, so a linear model can get
//! close to 90% accuracy.

use std::fs;
use std::io;
use std::path::{Path, PathBuf};

use crate::rng::{derive_seed, SplitMix64};

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SynthShape {
    pub name: &'static str,
    pub sector: &'static str,
    pub rows: usize,
    /// Column count including the target.
    pub attributes: usize,
    pub target: &'static str,
    /// Class values in lexicographic order; the second is the positive class.
    pub labels: [&'static str; 2],
    pub positive_rate: f64,
}

pub const TABLE_SHAPES: [SynthShape; 8] = [
    SynthShape {
        name: "marketing_avocado",
        sector: "marketing",
        rows: 18249,
        attributes: 13,
        target: "type",
        labels: ["conventional", "organic"],
        positive_rate: 0.5,
    },
    SynthShape {
        name: "marketing_bank",
        sector: "marketing",
        rows: 11162,
        attributes: 17,
        target: "deposit",
        labels: ["no", "yes"],
        positive_rate: 0.47,
    },
    SynthShape {
        name: "telecom_telecom",
        sector: "telecommunication",
        rows: 4000,
        attributes: 12,
        target: "churn",
        labels: ["no", "yes"],
        positive_rate: 0.25,
    },
    SynthShape {
        name: "telecom_cell2cell",
        sector: "telecommunication",
        rows: 51047,
        attributes: 38,
        target: "Churn",
        labels: ["No", "Yes"],
        positive_rate: 0.29,
    },
    SynthShape {
        name: "telecom_churn",
        sector: "telecommunication",
        rows: 3333,
        attributes: 21,
        target: "churn",
        labels: ["False", "True"],
        positive_rate: 0.145,
    },
    SynthShape {
        name: "health_cardio",
        sector: "healthcare",
        rows: 70000,
        attributes: 13,
        target: "cardio",
        labels: ["0", "1"],
        positive_rate: 0.5,
    },
    SynthShape {
        name: "health_fetal",
        sector: "healthcare",
        rows: 2126,
        attributes: 22,
        target: "fetal_health",
        labels: ["abnormal", "normal"],
        positive_rate: 0.78,
    },
    SynthShape {
        name: "health_heart",
        sector: "healthcare",
        rows: 1025,
        attributes: 14,
        target: "target",
        labels: ["0", "1"],
        positive_rate: 0.51,
    },
];

/// Seed used for the clones shipped under `data/`.
pub const BUNDLED_SEED: u64 = 2020;

const HEART_COLUMNS: [&str; 13] = [
    "age", "sex", "cp", "trestbps", "chol", "fbs", "restecg", "thalach", "exang", "oldpeak",
    "slope", "ca", "thal",
];

const INFORMATIVE_WEIGHTS: [f64; 4] = [1.5, -0.8, 0.6, 0.4];
const CATEGORY_WEIGHT: f64 = 0.5;
const LABEL_NOISE: f64 = 0.3;
const INFORMATIVE_LEVELS: [&str; 3] = ["high", "low", "mid"];
const NOISE_LEVELS: [&str; 4] = ["A", "B", "C", "D"];

#[derive(Debug, Clone, Copy)]
enum ColumnRole {
    Informative(usize),
    NearDuplicate,
    InformativeCategory,
    NoiseNumeric { integer: bool },
    NoiseCategory,
}

fn role(j: usize) -> ColumnRole {
    match j {
        0..=3 => ColumnRole::Informative(j),
        4 => ColumnRole::NearDuplicate,
        5 => ColumnRole::InformativeCategory,
        _ if j % 3 == 0 => ColumnRole::NoiseCategory,
        _ => ColumnRole::NoiseNumeric { integer: j % 2 == 0 },
    }
}

/// Fraction of missing cells and the token used.
fn missing_rule(j: usize) -> Option<(f64, &'static str)> {
    match j {
        2 | 7 => Some((0.01, "NA")),
        9 => Some((0.005, "")),
        _ => None,
    }
}

fn column_names(shape: &SynthShape, width: usize) -> Vec<String> {
    if shape.name == "health_heart" && width == HEART_COLUMNS.len() {
        return HEART_COLUMNS.iter().map(|s| s.to_string()).collect();
    }
    (1..=width).map(|j| format!("f{j:02}")).collect()
}

fn category_of(z: f64) -> &'static str {
    // cut points at the normal terciles
    if z < -0.4307 {
        INFORMATIVE_LEVELS[1]
    } else if z < 0.4307 {
        INFORMATIVE_LEVELS[2]
    } else {
        INFORMATIVE_LEVELS[0]
    }
}

fn category_score(level: &str) -> f64 {
    match level {
        "low" => -1.0,
        "mid" => 0.0,
        _ => 1.0,
    }
}

/// Header and string rows (target last). At most `max_rows` rows.
pub fn generate_rows(
    shape: &SynthShape,
    seed: u64,
    max_rows: Option<usize>,
) -> (Vec<String>, Vec<Vec<String>>) {
    let n = max_rows.map_or(shape.rows, |cap| cap.min(shape.rows));
    let width = shape.attributes - 1;
    let mut rng = SplitMix64::new(derive_seed(seed, shape.name));

    // per-column location and scale
    let affine: Vec<(f64, f64)> = (0..width)
        .map(|_| (rng.uniform(0.0, 100.0).round(), rng.uniform(1.0, 20.0)))
        .collect();

    let mut cells: Vec<Vec<String>> = Vec::with_capacity(n);
    let mut scores = Vec::with_capacity(n);
    for _ in 0..n {
        let latent: Vec<f64> = (0..4).map(|_| rng.normal()).collect();
        let level = category_of(rng.normal());
        let mut score: f64 = latent
            .iter()
            .zip(&INFORMATIVE_WEIGHTS)
            .take(width.min(4))
            .map(|(z, w)| z * w)
            .sum();
        if width > 5 {
            score += CATEGORY_WEIGHT * category_score(level);
        }
        scores.push(score + LABEL_NOISE * rng.normal());

        let row = (0..width)
            .map(|j| {
                let (loc, scale) = affine[j];
                let value = match role(j) {
                    ColumnRole::Informative(i) => format!("{:.2}", loc + scale * latent[i]),
                    ColumnRole::NearDuplicate => {
                        format!("{:.2}", loc + scale * (latent[0] + 0.05 * rng.normal()))
                    }
                    ColumnRole::InformativeCategory => level.to_string(),
                    ColumnRole::NoiseCategory => NOISE_LEVELS[rng.below(NOISE_LEVELS.len())].to_string(),
                    ColumnRole::NoiseNumeric { integer: true } => {
                        format!("{}", (loc + scale * rng.normal()).round() as i64)
                    }
                    ColumnRole::NoiseNumeric { integer: false } => {
                        format!("{:.3}", loc + scale * rng.normal())
                    }
                };
                match missing_rule(j) {
                    Some((rate, token)) if rng.next_f64() < rate => token.to_string(),
                    _ => value,
                }
            })
            .collect();
        cells.push(row);
    }

    // threshold at the quantile that gives the requested positive rate
    let mut sorted = scores.clone();
    sorted.sort_by(f64::total_cmp);
    let negatives = ((1.0 - shape.positive_rate) * n as f64).round() as usize;
    let negatives = negatives.clamp(1, n.saturating_sub(1).max(1));
    let threshold = sorted[negatives - 1];
    for (row, score) in cells.iter_mut().zip(&scores) {
        let label = if *score > threshold { shape.labels[1] } else { shape.labels[0] };
        row.push(label.to_string());
    }

    let mut header = column_names(shape, width);
    header.push(shape.target.to_string());
    (header, cells)
}

/// The clone as CSV text.
pub fn generate_csv(shape: &SynthShape, seed: u64, max_rows: Option<usize>) -> String {
    let (header, rows) = generate_rows(shape, seed, max_rows);
    let mut w = csv::Writer::from_writer(Vec::new());
    w.write_record(&header).expect("in-memory write");
    for row in &rows {
        w.write_record(row).expect("in-memory write");
    }
    String::from_utf8(w.into_inner().expect("in-memory flush")).expect("ascii output")
}

/// Writes `<dir>/<name>.csv` and returns its path.
pub fn write_clone(
    shape: &SynthShape,
    seed: u64,
    max_rows: Option<usize>,
    dir: &Path,
) -> io::Result<PathBuf> {
    fs::create_dir_all(dir)?;
    let path = dir.join(format!("{}.csv", shape.name));
    fs::write(&path, generate_csv(shape, seed, max_rows))?;
    Ok(path)
}

pub fn shape_by_name(name: &str) -> Option<&'static SynthShape> {
    TABLE_SHAPES.iter().find(|s| s.name == name)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn shapes_match_row_and_column_counts() {
        let heart = shape_by_name("health_heart").unwrap();
        let (header, rows) = generate_rows(heart, BUNDLED_SEED, None);
        assert_eq!(header.len(), 14);
        assert_eq!(rows.len(), 1025);
        assert!(rows.iter().all(|r| r.len() == 14));
        assert_eq!(header[0], "age");

        for shape in &TABLE_SHAPES {
            let (header, rows) = generate_rows(shape, 1, Some(50));
            assert_eq!(header.len(), shape.attributes, "{}", shape.name);
            assert_eq!(rows.len(), 50);
        }
    }

    #[test]
    fn both_labels_appear_near_the_requested_rate() {
        for shape in &TABLE_SHAPES {
            let (_, rows) = generate_rows(shape, 3, Some(400));
            let positives = rows.iter().filter(|r| r.last().unwrap() == shape.labels[1]).count();
            let rate = positives as f64 / 400.0;
            assert!((rate - shape.positive_rate).abs() < 0.01, "{}: {rate}", shape.name);
        }
    }

    #[test]
    fn generation_is_seeded() {
        let shape = &TABLE_SHAPES[2];
        assert_eq!(generate_csv(shape, 9, Some(30)), generate_csv(shape, 9, Some(30)));
        assert_ne!(generate_csv(shape, 9, Some(30)), generate_csv(shape, 10, Some(30)));
    }

    #[test]
    fn some_cells_are_missing() {
        let (_, rows) = generate_rows(&TABLE_SHAPES[0], 5, Some(2000));
        let missing = rows.iter().flatten().filter(|c| c.is_empty() || *c == "NA").count();
        assert!(missing > 0);
    }
}
