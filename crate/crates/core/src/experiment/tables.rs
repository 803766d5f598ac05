//! Report rendering: plain-text tables, JSON, and ROC point dumps.
//!
//! Numbers in the text tables use [`sig4`]: four significant digits,
//! ties to even, positional notation.

use std::fmt::Write as _;
use std::fs;
use std::io;
use std::path::{Path, PathBuf};

use thiserror::Error;

use super::{DatasetOutcome, RunReport};
use crate::learners::Category;

#[derive(Debug, Error)]
pub enum EmitError {
    #[error("cannot write {path}: {source}")]
    Io {
        path: String,
        #[source]
        source: io::Error,
    },
    #[error("cannot serialise report: {0}")]
    Json(#[from] serde_json::Error),
}

/// Four significant digits, round half to even, no exponent.
pub fn sig4(v: f64) -> String {
    if !v.is_finite() {
        return v.to_string();
    }
    if v == 0.0 {
        return "0.000".into();
    }
    // `{:e}` rounds exact ties to even
    let sci = format!("{v:.3e}");
    let (mantissa, exp) = sci.split_once('e').expect("scientific format");
    let exp: i32 = exp.parse().expect("integer exponent");
    let rounded: f64 = format!("{mantissa}e{exp}").parse().expect("round trip");
    let decimals = (3 - exp).max(0) as usize;
    format!("{rounded:.decimals$}")
}

fn opt_sig4(v: Option<f64>) -> String {
    v.map_or_else(|| "n/a".into(), sig4)
}

/// Left-aligned columns separated by two spaces; trailing blanks trimmed.
fn render(rows: &[Vec<String>]) -> String {
    let cols = rows.iter().map(Vec::len).max().unwrap_or(0);
    let mut widths = vec![0; cols];
    for row in rows {
        for (w, cell) in widths.iter_mut().zip(row) {
            *w = (*w).max(cell.chars().count());
        }
    }
    let mut out = String::new();
    for row in rows {
        let mut line = String::new();
        for (i, cell) in row.iter().enumerate() {
            if i > 0 {
                line.push_str("  ");
            }
            let _ = write!(line, "{cell:<width$}", width = widths[i]);
        }
        out.push_str(line.trim_end());
        out.push('\n');
    }
    out
}

fn row<const N: usize>(cells: [&str; N]) -> Vec<String> {
    cells.iter().map(|s| s.to_string()).collect()
}

fn category_label(c: Category) -> String {
    format!("{} learner", c.title())
}

/// Every text table for the report.
pub fn render_tables(report: &RunReport) -> String {
    let mut out = String::new();
    for d in &report.datasets {
        let _ = writeln!(out, "== {} ==", d.name);
        let r = match &d.outcome {
            DatasetOutcome::Completed(r) => r,
            DatasetOutcome::Failed { error } => {
                let _ = writeln!(out, "FAILED: {error}\n");
                continue;
            }
        };
        let _ = writeln!(
            out,
            "Rows {}  Features {}  Selected {}  Train {}  Test {}",
            r.n_rows,
            r.n_features,
            r.selected_features.len(),
            r.train_rows,
            r.test_rows
        );
        let linearity = match r.analysis.linearity {
            crate::analysis::Linearity::LinearTendency => "linear",
            crate::analysis::Linearity::NonlinearTendency => "nonlinear",
        };
        let size = match r.analysis.size_class {
            crate::analysis::SizeClass::Small => "small",
            crate::analysis::SizeClass::Large => "large",
        };
        let _ = writeln!(out, "Nature {linearity}  Size {size}");
        let _ = writeln!(out, "Suggested order: {}", r.analysis.suggested_algorithms.join(", "));
        let _ = writeln!(out, "Selected features: {}\n", r.selected_features.join(", "));

        let _ = writeln!(out, "Result obtained with {}", d.name);
        let mut rows = vec![row([
            "Learning Methods",
            "Average Accuracy",
            "Average Precision",
            "Average Recall",
            "Average F-measure",
        ])];
        for s in &r.summaries {
            rows.push(vec![
                category_label(s.category),
                sig4(s.avg_accuracy),
                sig4(s.avg_precision),
                sig4(s.avg_recall),
                sig4(s.avg_f_measure),
            ]);
        }
        out.push_str(&render(&rows));
        out.push('\n');

        let _ = writeln!(out, "Model results for {}", d.name);
        let mut rows = vec![row([
            "Model",
            "Category",
            "Accuracy",
            "Precision",
            "Recall",
            "F-measure",
            "AUC",
            "Log-likelihood",
            "k",
            "AIC",
        ])];
        for rec in &r.records {
            rows.push(vec![
                rec.model_name.clone(),
                rec.category.title().to_string(),
                sig4(rec.accuracy),
                sig4(rec.precision),
                sig4(rec.recall),
                sig4(rec.f_measure),
                opt_sig4(rec.auc),
                sig4(rec.log_likelihood),
                rec.param_count.to_string(),
                sig4(rec.aic),
            ]);
        }
        out.push_str(&render(&rows));
        out.push('\n');

        let _ = writeln!(out, "Average AIC score for {}", d.name);
        let mut rows = vec![row(["Learning Methods", "Average AIC"])];
        for s in &r.summaries {
            rows.push(vec![category_label(s.category), sig4(s.avg_aic)]);
        }
        out.push_str(&render(&rows));
        out.push('\n');

        if let Some(rec) = &r.recommendation {
            let _ = writeln!(out, "Recommendation for {}", d.name);
            let mut rows = vec![row(["Rank", "Model", "Composite"])];
            for (i, m) in rec.ranked_models.iter().enumerate() {
                rows.push(vec![(i + 1).to_string(), m.model_name.clone(), sig4(m.composite_score)]);
            }
            out.push_str(&render(&rows));
            let _ = writeln!(
                out,
                "Best overall {}  Best by accuracy {}  Best by AIC {}\n",
                rec.best_overall, rec.best_by_accuracy, rec.best_by_aic
            );
        }
    }

    let completed: Vec<_> = report
        .datasets
        .iter()
        .filter_map(|d| d.result().map(|r| (d.name.as_str(), r)))
        .collect();
    if completed.is_empty() {
        return out;
    }

    for (title, metric) in [
        ("Average accuracy-based comparison", 0usize),
        ("Average precision-based comparison", 1),
        ("Results based on average AIC score", 2),
    ] {
        let _ = writeln!(out, "== {title} ==");
        let mut header = vec!["Learning Methods".to_string()];
        header.extend(completed.iter().map(|(name, _)| name.to_string()));
        let mut rows = vec![header];
        for category in Category::ALL {
            let mut line = vec![category_label(category)];
            for (_, r) in &completed {
                let cell = r.summaries.iter().find(|s| s.category == category).map(|s| match metric {
                    0 => s.avg_accuracy,
                    1 => s.avg_precision,
                    _ => s.avg_aic,
                });
                line.push(opt_sig4(cell));
            }
            rows.push(line);
        }
        out.push_str(&render(&rows));
        out.push('\n');
    }

    let _ = writeln!(out, "== Accuracy- vs AIC-based comparative analysis ==");
    let mut rows = vec![
        row(["", "Accuracy-Based Analysis", "", "AIC-Based Analysis", ""]),
        row(["Dataset", "Category", "Algorithm", "Category", "Algorithm"]),
    ];
    for (name, r) in &completed {
        let c = &r.comparison;
        rows.push(vec![
            name.to_string(),
            c.accuracy_basis.category.title().to_string(),
            c.accuracy_basis.model.clone(),
            c.aic_basis.category.title().to_string(),
            c.aic_basis.model.clone(),
        ]);
    }
    out.push_str(&render(&rows));
    out
}

/// Pretty JSON with a trailing newline.
pub fn report_json(report: &RunReport) -> Result<String, serde_json::Error> {
    let mut s = serde_json::to_string_pretty(report)?;
    s.push('\n');
    Ok(s)
}

/// Where [`emit_tables`] writes. Unset destinations are skipped.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct Destination {
    pub tables: Option<PathBuf>,
    pub report: Option<PathBuf>,
    pub roc_dir: Option<PathBuf>,
}

fn write_file(path: &Path, text: &str) -> Result<(), EmitError> {
    let io_err = |source| EmitError::Io {
        path: path.display().to_string(),
        source,
    };
    if let Some(parent) = path.parent().filter(|p| !p.as_os_str().is_empty()) {
        fs::create_dir_all(parent).map_err(io_err)?;
    }
    fs::write(path, text).map_err(io_err)
}

/// `<dataset>__<model>.csv`.
pub fn roc_file_name(dataset: &str, model: &str) -> String {
    format!("{dataset}__{model}.csv")
}

/// Writes the text tables, the JSON report and one ROC CSV per evaluated
/// model. Returns the paths written.
pub fn emit_tables(report: &RunReport, dest: &Destination) -> Result<Vec<PathBuf>, EmitError> {
    let mut written = Vec::new();
    if let Some(path) = &dest.tables {
        write_file(path, &render_tables(report))?;
        written.push(path.clone());
    }
    if let Some(path) = &dest.report {
        write_file(path, &report_json(report)?)?;
        written.push(path.clone());
    }
    if let Some(dir) = &dest.roc_dir {
        for d in &report.datasets {
            let Some(r) = d.result() else { continue };
            for rec in &r.records {
                if let Some(roc) = &rec.roc {
                    let path = dir.join(roc_file_name(&d.name, &rec.model_name));
                    write_file(&path, &roc.to_csv())?;
                    written.push(path);
                }
            }
        }
    }
    Ok(written)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn four_significant_digits() {
        assert_eq!(sig4(0.94), "0.9400");
        assert_eq!(sig4(15.41), "15.41");
        assert_eq!(sig4(1234.5), "1234");
        assert_eq!(sig4(1235.5), "1236");
        assert_eq!(sig4(0.125), "0.1250");
        assert_eq!(sig4(0.00012345), "0.0001234");
        assert_eq!(sig4(123456.0), "123500");
        assert_eq!(sig4(-2.0), "-2.000");
        assert_eq!(sig4(9.9996), "10.00");
        assert_eq!(sig4(0.0), "0.000");
        assert_eq!(sig4(1.0), "1.000");
    }

    #[test]
    fn render_pads_and_trims() {
        let t = render(&[row(["a", "bb"]), row(["ccc", ""])]);
        assert_eq!(t, "a    bb\nccc\n");
    }
}
