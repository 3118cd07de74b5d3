use rayon::prelude::*;

use crate::dataset::{euclidean, Dataset};

/// Default memory budget for a precomputed distance table: 1 GiB.
pub const DEFAULT_MEMORY_BUDGET: usize = 1 << 30;

/// Point-to-point distances over a fixed node set.
pub trait PairDistance: Sync {
    fn num_points(&self) -> usize;
    fn pair(&self, i: usize, j: usize) -> f64;

    /// Writes `d(i, j)` for every `j` into `out`.
    fn row_into(&self, i: usize, out: &mut Vec<f64>) {
        out.clear();
        out.extend((0..self.num_points()).map(|j| self.pair(i, j)));
    }
}

impl PairDistance for Dataset {
    fn num_points(&self) -> usize {
        self.len()
    }

    #[inline]
    fn pair(&self, i: usize, j: usize) -> f64 {
        euclidean(self.row(i), self.row(j))
    }
}

/// Dense `n x n` table of pairwise distances.
#[derive(Clone, Debug)]
pub struct DistanceTable {
    n: usize,
    data: Vec<f64>,
}

impl DistanceTable {
    pub fn bytes_needed(n: usize) -> usize {
        n.saturating_mul(n)
            .saturating_mul(std::mem::size_of::<f64>())
    }

    /// Computes all pairwise distances. Entries are exactly what the dataset
    /// would return, so results never depend on whether a table was used.
    pub fn compute(dataset: &Dataset) -> Self {
        let n = dataset.len();
        let mut data = vec![0.0; n * n];
        data.par_chunks_mut(n).enumerate().for_each(|(i, row)| {
            let xi = dataset.row(i);
            for (j, slot) in row.iter_mut().enumerate() {
                *slot = euclidean(xi, dataset.row(j));
            }
        });
        Self { n, data }
    }

    /// Computes the table only if it fits in `budget` bytes.
    pub fn compute_within(dataset: &Dataset, budget: usize) -> Option<Self> {
        (Self::bytes_needed(dataset.len()) <= budget).then(|| Self::compute(dataset))
    }

    pub fn row(&self, i: usize) -> &[f64] {
        &self.data[i * self.n..(i + 1) * self.n]
    }
}

impl PairDistance for DistanceTable {
    fn num_points(&self) -> usize {
        self.n
    }

    #[inline]
    fn pair(&self, i: usize, j: usize) -> f64 {
        self.data[i * self.n + j]
    }

    fn row_into(&self, i: usize, out: &mut Vec<f64>) {
        out.clear();
        out.extend_from_slice(self.row(i));
    }
}

/// Either a precomputed table or on-the-fly evaluation, chosen by memory budget.
pub enum Distances<'a> {
    Table(DistanceTable),
    Direct(&'a Dataset),
}

impl<'a> Distances<'a> {
    pub fn new(dataset: &'a Dataset, budget: usize) -> Self {
        match DistanceTable::compute_within(dataset, budget) {
            Some(t) => Distances::Table(t),
            None => Distances::Direct(dataset),
        }
    }

    pub fn is_precomputed(&self) -> bool {
        matches!(self, Distances::Table(_))
    }
}

impl PairDistance for Distances<'_> {
    fn num_points(&self) -> usize {
        match self {
            Distances::Table(t) => t.num_points(),
            Distances::Direct(d) => d.num_points(),
        }
    }

    #[inline]
    fn pair(&self, i: usize, j: usize) -> f64 {
        match self {
            Distances::Table(t) => t.pair(i, j),
            Distances::Direct(d) => d.pair(i, j),
        }
    }

    fn row_into(&self, i: usize, out: &mut Vec<f64>) {
        match self {
            Distances::Table(t) => t.row_into(i, out),
            Distances::Direct(d) => d.row_into(i, out),
        }
    }
}
