//! Vector storage, the Euclidean metric, distance accounting and the
//! brute-force k-NN oracle.

use std::cmp::Ordering;

use rayon::prelude::*;

use crate::error::{Error, Result};

/// A fixed-dimension set of points stored row-major. Ids are implicit `0..n`.
///
/// Coordinates are kept as `f64`. Files in the fvecs format carry `f32`
/// values, which widen losslessly.
#[derive(Clone, Debug, PartialEq)]
pub struct Dataset {
    dim: usize,
    data: Vec<f64>,
}

impl Dataset {
    /// Builds a dataset from a flat row-major buffer.
    pub fn new(dim: usize, data: Vec<f64>) -> Result<Self> {
        if dim == 0 {
            return Err(Error::ZeroDimension);
        }
        if data.is_empty() {
            return Err(Error::EmptyDataset);
        }
        if !data.len().is_multiple_of(dim) {
            return Err(Error::DimensionMismatch {
                expected: dim,
                got: data.len() % dim,
            });
        }
        if let Some(pos) = data.iter().position(|v| !v.is_finite()) {
            return Err(Error::NonFinite {
                row: pos / dim,
                col: pos % dim,
            });
        }
        Ok(Self { dim, data })
    }

    pub fn from_rows<R: AsRef<[f64]>>(rows: &[R]) -> Result<Self> {
        let first = rows.first().ok_or(Error::EmptyDataset)?;
        let dim = first.as_ref().len();
        let mut data = Vec::with_capacity(rows.len() * dim);
        for row in rows {
            let row = row.as_ref();
            if row.len() != dim {
                return Err(Error::DimensionMismatch {
                    expected: dim,
                    got: row.len(),
                });
            }
            data.extend_from_slice(row);
        }
        Self::new(dim, data)
    }

    #[inline]
    pub fn len(&self) -> usize {
        self.data.len() / self.dim
    }

    /// Always false for a constructed dataset; present for API symmetry.
    pub fn is_empty(&self) -> bool {
        self.data.is_empty()
    }

    #[inline]
    pub fn dim(&self) -> usize {
        self.dim
    }

    #[inline]
    pub fn row(&self, i: usize) -> &[f64] {
        &self.data[i * self.dim..(i + 1) * self.dim]
    }

    pub fn get(&self, i: usize) -> Result<&[f64]> {
        if i >= self.len() {
            return Err(Error::InvalidNodeId {
                id: i,
                n: self.len(),
            });
        }
        Ok(self.row(i))
    }

    pub fn rows(&self) -> impl ExactSizeIterator<Item = &[f64]> + '_ {
        self.data.chunks_exact(self.dim)
    }

    pub fn as_slice(&self) -> &[f64] {
        &self.data
    }

    /// Keeps the rows at `ids`, in that order.
    pub fn select(&self, ids: &[usize]) -> Result<Self> {
        let mut data = Vec::with_capacity(ids.len() * self.dim);
        for &i in ids {
            data.extend_from_slice(self.get(i)?);
        }
        Self::new(self.dim, data)
    }

    pub(crate) fn check_query(&self, q: &[f64]) -> Result<()> {
        if q.len() != self.dim {
            return Err(Error::DimensionMismatch {
                expected: self.dim,
                got: q.len(),
            });
        }
        if let Some(col) = q.iter().position(|v| !v.is_finite()) {
            return Err(Error::NonFinite { row: 0, col });
        }
        Ok(())
    }

    /// Coordinate-wise mean of all points.
    pub fn centroid(&self) -> Vec<f64> {
        let mut mean = vec![0.0; self.dim];
        for row in self.rows() {
            for (m, v) in mean.iter_mut().zip(row) {
                *m += v;
            }
        }
        let n = self.len() as f64;
        mean.iter_mut().for_each(|m| *m /= n);
        mean
    }

    /// The point closest to the centroid, smaller id on ties.
    pub fn medoid(&self) -> u32 {
        let mean = self.centroid();
        let mut best = (f64::INFINITY, 0u32);
        for (i, row) in self.rows().enumerate() {
            let d = euclidean(row, &mean);
            if d < best.0 {
                best = (d, i as u32);
            }
        }
        best.1
    }
}

/// Distance function descriptor. Euclidean is the only built-in metric.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Hash)]
pub enum Metric {
    #[default]
    Euclidean,
}

impl Metric {
    #[inline]
    pub fn eval(self, a: &[f64], b: &[f64]) -> f64 {
        match self {
            Metric::Euclidean => euclidean(a, b),
        }
    }
}

#[inline]
pub(crate) fn euclidean(a: &[f64], b: &[f64]) -> f64 {
    debug_assert_eq!(a.len(), b.len());
    a.iter()
        .zip(b)
        .map(|(x, y)| {
            let d = x - y;
            d * d
        })
        .sum::<f64>()
        .sqrt()
}

/// True (non-squared) distance between two vectors.
pub fn distance(metric: Metric, a: &[f64], b: &[f64]) -> Result<f64> {
    if a.len() != b.len() {
        return Err(Error::DimensionMismatch {
            expected: a.len(),
            got: b.len(),
        });
    }
    Ok(metric.eval(a, b))
}

/// Per-query distance evaluator that counts every query-to-node evaluation.
///
/// Not meant to be shared between concurrent queries.
#[derive(Debug, Default)]
pub struct CountedEvaluator {
    metric: Metric,
    count: u64,
}

impl CountedEvaluator {
    pub fn new(metric: Metric) -> Self {
        Self { metric, count: 0 }
    }

    pub fn metric(&self) -> Metric {
        self.metric
    }

    pub fn count(&self) -> u64 {
        self.count
    }

    /// Distance from `q` to node `node`, counted once.
    pub fn counted_distance(&mut self, q: &[f64], node: usize, dataset: &Dataset) -> Result<f64> {
        let x = dataset.get(node)?;
        if x.len() != q.len() {
            return Err(Error::DimensionMismatch {
                expected: x.len(),
                got: q.len(),
            });
        }
        Ok(self.eval_unchecked(q, node, dataset))
    }

    /// Callers have validated `node` and the query dimension.
    #[inline]
    pub(crate) fn eval_unchecked(&mut self, q: &[f64], node: usize, dataset: &Dataset) -> f64 {
        self.count += 1;
        self.metric.eval(q, dataset.row(node))
    }
}

/// Total order on `(distance, id)` pairs: smaller distance first, then smaller id.
#[inline]
pub fn cmp_dist_id(a: (f64, u32), b: (f64, u32)) -> Ordering {
    a.0.total_cmp(&b.0).then(a.1.cmp(&b.1))
}

/// Exact k nearest neighbors with their distances, ascending, id tie-break.
pub fn brute_force_knn_with_distances(
    dataset: &Dataset,
    metric: Metric,
    q: &[f64],
    k: usize,
) -> Result<Vec<(u32, f64)>> {
    dataset.check_query(q)?;
    let n = dataset.len();
    if k == 0 || k > n {
        return Err(Error::InvalidK { k, n });
    }
    let mut all: Vec<(f64, u32)> = dataset
        .rows()
        .enumerate()
        .map(|(i, row)| (metric.eval(q, row), i as u32))
        .collect();
    if k < n {
        all.select_nth_unstable_by(k - 1, |a, b| cmp_dist_id(*a, *b));
        all.truncate(k);
    }
    all.sort_unstable_by(|a, b| cmp_dist_id(*a, *b));
    Ok(all.into_iter().map(|(d, i)| (i, d)).collect())
}

/// Exact k nearest neighbor ids, ascending distance, id tie-break.
pub fn brute_force_knn(dataset: &Dataset, metric: Metric, q: &[f64], k: usize) -> Result<Vec<u32>> {
    Ok(brute_force_knn_with_distances(dataset, metric, q, k)?
        .into_iter()
        .map(|(i, _)| i)
        .collect())
}

/// Exact nearest neighbor lists for a batch of queries.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct GroundTruth {
    depth: usize,
    ids: Vec<Vec<u32>>,
}

impl GroundTruth {
    /// Computes the `depth` nearest neighbors of every query.
    pub fn compute(
        dataset: &Dataset,
        metric: Metric,
        queries: &Dataset,
        depth: usize,
    ) -> Result<Self> {
        if queries.dim() != dataset.dim() {
            return Err(Error::DimensionMismatch {
                expected: dataset.dim(),
                got: queries.dim(),
            });
        }
        let ids = (0..queries.len())
            .into_par_iter()
            .map(|i| brute_force_knn(dataset, metric, queries.row(i), depth))
            .collect::<Result<Vec<_>>>()?;
        Ok(Self { depth, ids })
    }

    /// Wraps precomputed lists, e.g. loaded from an ivecs file.
    pub fn from_lists(ids: Vec<Vec<u32>>, n: usize) -> Result<Self> {
        let depth = ids.iter().map(Vec::len).min().unwrap_or(0);
        for list in &ids {
            if let Some(&bad) = list.iter().find(|&&id| id as usize >= n) {
                return Err(Error::InvalidNodeId {
                    id: bad as usize,
                    n,
                });
            }
        }
        Ok(Self { depth, ids })
    }

    /// Minimum list length over all queries.
    pub fn depth(&self) -> usize {
        self.depth
    }

    pub fn len(&self) -> usize {
        self.ids.len()
    }

    pub fn is_empty(&self) -> bool {
        self.ids.is_empty()
    }

    pub fn get(&self, query: usize) -> &[u32] {
        &self.ids[query]
    }

    pub fn lists(&self) -> &[Vec<u32>] {
        &self.ids
    }
}
