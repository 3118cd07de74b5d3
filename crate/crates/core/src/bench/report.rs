use std::path::Path;

use csv::{Reader, Writer};

use super::{BatchReport, TradeoffCurve};
use crate::error::{Error, Result};

/// Per-query distance-computation counts binned at a fixed width.
#[derive(Clone, Debug, PartialEq)]
pub struct Histogram {
    pub bin_width: f64,
    /// `counts[i]` holds queries with cost in `[i * bin_width, (i + 1) * bin_width)`.
    pub counts: Vec<u64>,
    pub mean_recall: f64,
}

impl Histogram {
    pub fn new(report: &BatchReport, bin_width: f64) -> Result<Self> {
        if !(bin_width > 0.0 && bin_width.is_finite()) {
            return Err(Error::InvalidBinWidth(bin_width));
        }
        let mut counts: Vec<u64> = Vec::new();
        for cost in report.costs() {
            let bin = (cost as f64 / bin_width).floor() as usize;
            if bin >= counts.len() {
                counts.resize(bin + 1, 0);
            }
            counts[bin] += 1;
        }
        Ok(Self {
            bin_width,
            counts,
            mean_recall: report.mean_recall,
        })
    }

    pub fn total(&self) -> u64 {
        self.counts.iter().sum()
    }

    pub fn bin_start(&self, i: usize) -> f64 {
        i as f64 * self.bin_width
    }
}

/// Bins the per-query costs of `report`; `bin_width` must be positive.
pub fn histogram(report: &BatchReport, bin_width: f64) -> Result<Histogram> {
    Histogram::new(report, bin_width)
}

/// A curve row as read back from CSV; `param` keeps its textual form.
#[derive(Clone, Debug, PartialEq)]
pub struct CurveRow {
    pub param: String,
    pub recall: f64,
    pub mean_distance_computations: f64,
    pub num_queries: usize,
}

pub fn write_curve_csv(curve: &TradeoffCurve, path: impl AsRef<Path>) -> Result<()> {
    let mut w = Writer::from_path(path)?;
    w.write_record([
        "param",
        "recall",
        "mean_distance_computations",
        "num_queries",
    ])?;
    for p in &curve.points {
        w.write_record([
            p.param.to_string(),
            p.recall.to_string(),
            p.mean_distance_computations.to_string(),
            p.num_queries.to_string(),
        ])?;
    }
    w.flush()?;
    Ok(())
}

pub fn write_histogram_csv(histogram: &Histogram, path: impl AsRef<Path>) -> Result<()> {
    let mut w = Writer::from_path(path)?;
    w.write_record(["bin_start", "count"])?;
    for (i, c) in histogram.counts.iter().enumerate() {
        w.write_record([histogram.bin_start(i).to_string(), c.to_string()])?;
    }
    w.flush()?;
    Ok(())
}

fn parse_field<T: std::str::FromStr>(
    record: &csv::StringRecord,
    i: usize,
    path: &Path,
) -> Result<T> {
    let offset = record.position().map_or(0, |p| p.byte());
    let field = record.get(i).ok_or_else(|| Error::Format {
        path: path.to_path_buf(),
        offset,
        reason: format!("missing column {i}"),
    })?;
    field.parse().map_err(|_| Error::Format {
        path: path.to_path_buf(),
        offset,
        reason: format!("cannot parse {field:?}"),
    })
}

pub fn read_curve_csv(path: impl AsRef<Path>) -> Result<Vec<CurveRow>> {
    let path = path.as_ref();
    let mut r = Reader::from_path(path)?;
    r.records()
        .map(|rec| {
            let rec = rec?;
            Ok(CurveRow {
                param: rec.get(0).unwrap_or_default().to_string(),
                recall: parse_field(&rec, 1, path)?,
                mean_distance_computations: parse_field(&rec, 2, path)?,
                num_queries: parse_field(&rec, 3, path)?,
            })
        })
        .collect()
}

/// Reads `(bin_start, count)` rows.
pub fn read_histogram_csv(path: impl AsRef<Path>) -> Result<Vec<(f64, u64)>> {
    let path = path.as_ref();
    let mut r = Reader::from_path(path)?;
    r.records()
        .map(|rec| {
            let rec = rec?;
            Ok((parse_field(&rec, 0, path)?, parse_field(&rec, 1, path)?))
        })
        .collect()
}
