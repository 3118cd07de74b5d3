use rayon::prelude::*;

use super::distances::{Distances, PairDistance};
use super::graph::SearchGraph;
use super::verify::navigability_with;
use crate::dataset::{cmp_dist_id, Dataset};
use crate::error::{Error, Result};

/// Removes out-edges that are not needed for navigability.
///
/// For each source `s`, targets `t` are visited in ascending distance from
/// `s` (id tie-break). If no kept neighbor is strictly closer to `t` than `s`
/// is, the first still-removable neighbor that is closer gets kept;
/// removable neighbors are scanned in the same ascending order. Neighbors
/// never kept are dropped.
///
/// The input must be navigable; the check runs first and its witness is
/// returned on failure. A distance table is precomputed when it fits in
/// `memory_budget` bytes.
pub fn prune_navigable(
    graph: &SearchGraph,
    dataset: &Dataset,
    memory_budget: usize,
) -> Result<SearchGraph> {
    if graph.len() != dataset.len() {
        return Err(Error::GraphSizeMismatch {
            graph: graph.len(),
            dataset: dataset.len(),
        });
    }
    let dist = Distances::new(dataset, memory_budget);
    prune_navigable_with(graph, &dist)
}

pub fn prune_navigable_with<D: PairDistance>(graph: &SearchGraph, dist: &D) -> Result<SearchGraph> {
    let report = navigability_with(graph, dist, 1.0);
    if let Some((x, y)) = report.witness {
        return Err(Error::NotNavigable { x, y });
    }
    Ok(prune_unchecked(graph, dist))
}

/// Pruning without the navigability precondition check. On a non-navigable
/// input the output is still a subgraph, but navigability is not implied.
pub fn prune_unchecked<D: PairDistance>(graph: &SearchGraph, dist: &D) -> SearchGraph {
    let n = graph.len();
    let lists: Vec<Vec<u32>> = (0..n)
        .into_par_iter()
        .map_init(Vec::new, |from_s, s| {
            dist.row_into(s, from_s);
            let by_dist = |v: u32| (from_s[v as usize], v);

            let mut targets: Vec<u32> = (0..n as u32).filter(|&t| t as usize != s).collect();
            targets.sort_unstable_by(|&a, &b| cmp_dist_id(by_dist(a), by_dist(b)));

            let mut removable: Vec<u32> = graph.neighbors(s).to_vec();
            removable.sort_unstable_by(|&a, &b| cmp_dist_id(by_dist(a), by_dist(b)));
            let mut taken = vec![false; removable.len()];
            let mut keep: Vec<u32> = Vec::new();

            for &t in &targets {
                let t = t as usize;
                let d_st = from_s[t];
                if keep.iter().any(|&x| dist.pair(x as usize, t) < d_st) {
                    continue;
                }
                let pick = removable
                    .iter()
                    .enumerate()
                    .find(|&(i, &y)| !taken[i] && dist.pair(y as usize, t) < d_st);
                if let Some((i, &y)) = pick {
                    taken[i] = true;
                    keep.push(y);
                }
            }
            keep.sort_unstable();
            keep
        })
        .collect();
    SearchGraph::from_adjacency(&lists).expect("subgraph of a valid graph is valid")
}
