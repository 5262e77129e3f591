use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::metric::{validate_finite_metric, DistanceMatrix, Point, ValidationReport};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum DatasetFormat {
    /// One point per row, `dim` columns, optional header row.
    PointsCsv,
    /// `n` rows of `n` distances.
    MetricCsv,
}

/// What a file provides before the cost exponent is chosen.
#[derive(Clone, Debug, PartialEq)]
pub enum Dataset {
    Points { dim: usize, points: Vec<Point> },
    Metric { matrix: DistanceMatrix, report: ValidationReport },
}

impl Dataset {
    pub fn len(&self) -> usize {
        match self {
            Dataset::Points { points, .. } => points.len(),
            Dataset::Metric { matrix, .. } => matrix.len(),
        }
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    /// `X` as points: coordinates, or indices `0..n` for a metric.
    pub fn points(&self) -> Vec<Point> {
        match self {
            Dataset::Points { points, .. } => points.clone(),
            Dataset::Metric { matrix, .. } => (0..matrix.len()).map(Point::Index).collect(),
        }
    }
}

/// Numeric rows of a CSV file with 1-based line numbers.
///
/// A first row that does not parse as numbers is taken as a header when
/// `allow_header` is set.
fn read_rows(path: &Path, allow_header: bool) -> Result<Vec<(u64, Vec<f64>)>> {
    let mut reader = csv::ReaderBuilder::new()
        .has_headers(false)
        .flexible(true)
        .trim(csv::Trim::All)
        .comment(Some(b'#'))
        .from_path(path)?;
    let mut rows = Vec::new();
    let mut width: Option<usize> = None;
    for (idx, record) in reader.records().enumerate() {
        let record = record.map_err(|e| {
            let line = e.position().map_or(0, |p| p.line());
            Error::Parse {
                path: path.to_path_buf(),
                line,
                msg: e.to_string(),
            }
        })?;
        let line = record.position().map_or(idx as u64 + 1, |p| p.line());
        if record.iter().all(str::is_empty) {
            continue;
        }
        let parsed: std::result::Result<Vec<f64>, _> =
            record.iter().map(str::parse::<f64>).collect();
        let values = match parsed {
            Ok(v) => v,
            Err(_) if allow_header && rows.is_empty() && width.is_none() => {
                width = Some(record.len());
                continue;
            }
            Err(e) => {
                return Err(Error::Parse {
                    path: path.to_path_buf(),
                    line,
                    msg: format!("not a number: {e}"),
                })
            }
        };
        if let Some(bad) = values.iter().find(|v| !v.is_finite()) {
            return Err(Error::Parse {
                path: path.to_path_buf(),
                line,
                msg: format!("non-finite value {bad}"),
            });
        }
        match width {
            Some(w) if w != values.len() => {
                return Err(Error::Parse {
                    path: path.to_path_buf(),
                    line,
                    msg: format!("expected {w} fields, found {}", values.len()),
                })
            }
            _ => width = Some(values.len()),
        }
        rows.push((line, values));
    }
    if rows.is_empty() {
        return Err(Error::Parse {
            path: path.to_path_buf(),
            line: 0,
            msg: "no data rows".into(),
        });
    }
    Ok(rows)
}

/// Loads Euclidean points.
pub fn load_points_csv(path: &Path) -> Result<Dataset> {
    let rows = read_rows(path, true)?;
    let dim = rows[0].1.len();
    Ok(Dataset::Points {
        dim,
        points: rows.into_iter().map(|(_, r)| Point::Coords(r)).collect(),
    })
}

/// Loads a distance matrix, refusing one that fails validation unless
/// `allow_invalid` is set. The validation report is kept either way.
pub fn load_metric_csv(path: &Path, allow_invalid: bool) -> Result<Dataset> {
    let rows = read_rows(path, false)?;
    let n = rows.len();
    if let Some((line, r)) = rows.iter().find(|(_, r)| r.len() != n) {
        return Err(Error::Parse {
            path: path.to_path_buf(),
            line: *line,
            msg: format!("distance matrix has {n} rows but this row has {} fields", r.len()),
        });
    }
    let rows: Vec<Vec<f64>> = rows.into_iter().map(|(_, r)| r).collect();
    let report = validate_finite_metric(&rows)?;
    if !report.is_valid() && !allow_invalid {
        return Err(Error::InvalidMetric(report));
    }
    Ok(Dataset::Metric {
        matrix: DistanceMatrix::from_rows(&rows)?,
        report,
    })
}

pub fn load_dataset(path: &Path, format: DatasetFormat, allow_invalid_metric: bool) -> Result<Dataset> {
    match format {
        DatasetFormat::PointsCsv => load_points_csv(path),
        DatasetFormat::MetricCsv => load_metric_csv(path, allow_invalid_metric),
    }
}

/// Writes points one per row, no header.
pub fn write_points_csv(path: &Path, points: &[Point]) -> Result<()> {
    let mut w = csv::WriterBuilder::new().has_headers(false).from_path(path)?;
    for p in points {
        let c = p
            .coords()
            .ok_or_else(|| Error::UnsupportedSpace("only coordinate points can be written".into()))?;
        w.write_record(c.iter().map(|v| format!("{v:?}")))?;
    }
    w.flush()?;
    Ok(())
}
