//! CSV dataset import and export.
//!
//! Layout: one row per sample with a header row naming every column.
//! Regression files carry feature columns (`x0, x1, ...`) followed by
//! target columns (`y0, y1, ...`), and the reader is told both counts
//! explicitly. Classification files carry feature columns plus one final
//! integer `label` column. Floats are written in shortest round-trip form,
//! so a written file reloads with identical bits.

use ndarray::{Array2, ArrayView2};
use std::path::Path;

use crate::error::{Error, Result};

/// Writes a regression dataset: features, then targets, with generated
/// column names.
pub fn write_features_targets(
    path: &Path,
    features: ArrayView2<'_, f64>,
    targets: ArrayView2<'_, f64>,
) -> Result<()> {
    if features.nrows() != targets.nrows() {
        return Err(Error::Config(format!(
            "feature rows ({}) and target rows ({}) differ",
            features.nrows(),
            targets.nrows()
        )));
    }
    let mut writer = csv::Writer::from_path(path)?;
    let header: Vec<String> = (0..features.ncols())
        .map(|j| format!("x{j}"))
        .chain((0..targets.ncols()).map(|j| format!("y{j}")))
        .collect();
    writer.write_record(&header)?;
    for (frow, trow) in features.rows().into_iter().zip(targets.rows()) {
        let record: Vec<String> = frow
            .iter()
            .chain(trow.iter())
            .map(|v| format!("{v}"))
            .collect();
        writer.write_record(&record)?;
    }
    writer.flush()?;
    Ok(())
}

/// Reads a regression dataset with the given column counts; the header row
/// is validated against the expected width.
pub fn read_features_targets(
    path: &Path,
    n_features: usize,
    n_targets: usize,
) -> Result<(Array2<f64>, Array2<f64>)> {
    let mut reader = csv::Reader::from_path(path)?;
    let width = n_features + n_targets;
    let header_len = reader.headers()?.len();
    if header_len != width {
        return Err(Error::Config(format!(
            "{}: expected {width} columns ({n_features} features + {n_targets} targets), header has {header_len}",
            path.display()
        )));
    }
    let mut features = Vec::new();
    let mut targets = Vec::new();
    let mut rows = 0usize;
    for record in reader.records() {
        let record = record?;
        for (j, field) in record.iter().enumerate() {
            let value = parse_float(path, rows, field)?;
            if j < n_features {
                features.push(value);
            } else {
                targets.push(value);
            }
        }
        rows += 1;
    }
    let features = Array2::from_shape_vec((rows, n_features), features)
        .map_err(|e| Error::Config(format!("{}: {e}", path.display())))?;
    let targets = Array2::from_shape_vec((rows, n_targets), targets)
        .map_err(|e| Error::Config(format!("{}: {e}", path.display())))?;
    Ok((features, targets))
}

/// Writes a classification dataset: features plus a final `label` column.
pub fn write_labeled(path: &Path, features: ArrayView2<'_, f64>, labels: &[usize]) -> Result<()> {
    if features.nrows() != labels.len() {
        return Err(Error::Config(format!(
            "feature rows ({}) and labels ({}) differ",
            features.nrows(),
            labels.len()
        )));
    }
    let mut writer = csv::Writer::from_path(path)?;
    let header: Vec<String> = (0..features.ncols())
        .map(|j| format!("x{j}"))
        .chain(std::iter::once("label".to_string()))
        .collect();
    writer.write_record(&header)?;
    for (row, &label) in features.rows().into_iter().zip(labels) {
        let record: Vec<String> = row
            .iter()
            .map(|v| format!("{v}"))
            .chain(std::iter::once(label.to_string()))
            .collect();
        writer.write_record(&record)?;
    }
    writer.flush()?;
    Ok(())
}

/// Reads a classification dataset; every column except the last is a
/// feature, the last must hold non-negative integers.
pub fn read_labeled(path: &Path) -> Result<(Array2<f64>, Vec<usize>)> {
    let mut reader = csv::Reader::from_path(path)?;
    let width = reader.headers()?.len();
    if width < 2 {
        return Err(Error::Config(format!(
            "{}: need at least one feature column plus the label column",
            path.display()
        )));
    }
    let n_features = width - 1;
    let mut features = Vec::new();
    let mut labels = Vec::new();
    let mut rows = 0usize;
    for record in reader.records() {
        let record = record?;
        if record.len() != width {
            return Err(Error::Config(format!(
                "{} row {rows}: expected {width} columns, got {}",
                path.display(),
                record.len()
            )));
        }
        for field in record.iter().take(n_features) {
            features.push(parse_float(path, rows, field)?);
        }
        let label_field = record.get(n_features).unwrap_or_default();
        let label = label_field.trim().parse::<usize>().map_err(|_| {
            Error::Config(format!(
                "{} row {rows}: label {label_field:?} is not a non-negative integer",
                path.display()
            ))
        })?;
        labels.push(label);
        rows += 1;
    }
    let features = Array2::from_shape_vec((rows, n_features), features)
        .map_err(|e| Error::Config(format!("{}: {e}", path.display())))?;
    Ok((features, labels))
}

/// Writes a `(percent, log10_error)` curve with a fixed two-column header.
pub fn write_curve(path: &Path, curve: &[(f64, f64)]) -> Result<()> {
    let mut writer = csv::Writer::from_path(path)?;
    writer.write_record(["percent", "log10_error"])?;
    for &(p, l) in curve {
        writer.write_record(&[format!("{p}"), format!("{l}")])?;
    }
    writer.flush()?;
    Ok(())
}

fn parse_float(path: &Path, row: usize, field: &str) -> Result<f64> {
    field.trim().parse::<f64>().map_err(|_| {
        Error::Config(format!(
            "{} row {row}: {field:?} is not a number",
            path.display()
        ))
    })
}
