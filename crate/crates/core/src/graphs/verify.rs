use rayon::prelude::*;

use super::distances::{Distances, PairDistance, DEFAULT_MEMORY_BUDGET};
use super::graph::SearchGraph;
use crate::dataset::Dataset;
use crate::error::{Error, Result};

/// Outcome of a navigability (or alpha-shortcut) check.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct NavigabilityReport {
    pub navigable: bool,
    /// Lexicographically first pair `(x, y)` with `d(x, y) > 0` such that no
    /// out-neighbor of `x` gets strictly closer to `y`. Present iff the check failed.
    pub witness: Option<(u32, u32)>,
}

impl NavigabilityReport {
    fn from_witness(witness: Option<(u32, u32)>) -> Self {
        Self {
            navigable: witness.is_none(),
            witness,
        }
    }
}

/// True when some out-neighbor `z` of `x` has `alpha * d(z, y) < d(x, y)`,
/// or when `d(x, y) == 0`.
pub fn pair_is_covered<D: PairDistance>(
    graph: &SearchGraph,
    dist: &D,
    x: usize,
    y: usize,
    alpha: f64,
) -> bool {
    let d_xy = dist.pair(x, y);
    d_xy <= 0.0
        || graph
            .neighbors(x)
            .iter()
            .any(|&z| alpha * dist.pair(z as usize, y) < d_xy)
}

/// Brute-force check over all ordered pairs. `alpha = 1` is plain navigability.
pub fn navigability_with<D: PairDistance>(
    graph: &SearchGraph,
    dist: &D,
    alpha: f64,
) -> NavigabilityReport {
    let n = graph.len();
    let witness = (0..n).into_par_iter().find_map_first(|x| {
        (0..n)
            .find(|&y| y != x && !pair_is_covered(graph, dist, x, y, alpha))
            .map(|y| (x as u32, y as u32))
    });
    NavigabilityReport::from_witness(witness)
}

/// Checks that for every `x, y` with `d(x, y) > 0` some out-neighbor of `x`
/// is strictly closer to `y` than `x` is.
pub fn is_navigable(graph: &SearchGraph, dataset: &Dataset) -> NavigabilityReport {
    if graph.len() != dataset.len() {
        // a graph over a different node set cannot cover the dataset
        return NavigabilityReport::from_witness(Some((0, 0)));
    }
    let dist = Distances::new(dataset, DEFAULT_MEMORY_BUDGET);
    navigability_with(graph, &dist, 1.0)
}

/// Strengthened check: some out-neighbor `z` of `x` must satisfy
/// `alpha * d(z, y) < d(x, y)`.
pub fn is_alpha_shortcut_reachable(
    graph: &SearchGraph,
    dataset: &Dataset,
    alpha: f64,
) -> Result<NavigabilityReport> {
    if !(alpha >= 1.0 && alpha.is_finite()) {
        return Err(Error::InvalidAlpha(alpha));
    }
    if graph.len() != dataset.len() {
        return Err(Error::GraphSizeMismatch {
            graph: graph.len(),
            dataset: dataset.len(),
        });
    }
    let dist = Distances::new(dataset, DEFAULT_MEMORY_BUDGET);
    Ok(navigability_with(graph, &dist, alpha))
}

/// Searches for a triple `(x, y, z)` with `z` distinct from `x` and `y` and
/// `alpha * d(z, y) < d(x, y)`. When none exists, every edge `x -> y` is the
/// only way to cover the pair, so the complete graph is the sole
/// alpha-shortcut reachable graph on these points.
pub fn find_alpha_detour<D: PairDistance>(dist: &D, alpha: f64) -> Option<(u32, u32, u32)> {
    let n = dist.num_points();
    (0..n).into_par_iter().find_map_first(|x| {
        for y in (0..n).filter(|&y| y != x) {
            let d_xy = dist.pair(x, y);
            if let Some(z) = (0..n).find(|&z| z != x && z != y && alpha * dist.pair(z, y) < d_xy) {
                return Some((x as u32, y as u32, z as u32));
            }
        }
        None
    })
}
