use rand::seq::index;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;

use super::distances::{Distances, PairDistance, DEFAULT_MEMORY_BUDGET};
use super::graph::SearchGraph;
use crate::dataset::{cmp_dist_id, Dataset};
use crate::error::{Error, Result};

/// Per-node edge counts of the navigable construction for `n` points:
/// `(nearest, random)` with `nearest = floor(sqrt(3 n ln n))` and
/// `random = ceil(3 n ln n / nearest)`.
pub fn navigable_degree_plan(n: usize) -> (usize, usize) {
    let budget = 3.0 * n as f64 * (n as f64).ln();
    let nearest = budget.sqrt().floor() as usize;
    let random = if nearest == 0 {
        0
    } else {
        (budget / nearest as f64).ceil() as usize
    };
    (nearest, random)
}

/// Out-degree from the nearest and random parts alone, capped at `n - 1`.
/// Nodes that appear in other nodes' nearest lists get those links on top.
pub fn navigable_out_degree(n: usize) -> usize {
    let (m, r) = navigable_degree_plan(n);
    (m + r).min(n.saturating_sub(1))
}

/// Builds a graph that is navigable with high probability.
///
/// With `m` nearest and `r` random per node (see [`navigable_degree_plan`]),
/// node `x` links to its `m` nearest neighbors, to every `y` that has `x`
/// among its own `m` nearest, and to `r` nodes sampled uniformly without
/// replacement from the rest. For a pair `(x, y)`, either fewer than `m`
/// nodes are closer to `y` than `x` is, in which case `x -> y` is an edge,
/// or at least `m` are, and the random sample hits one of them with
/// probability at least `1 - n^-3`.
pub fn build_navigable(dataset: &Dataset, seed: u64) -> Result<SearchGraph> {
    let dist = Distances::new(dataset, DEFAULT_MEMORY_BUDGET);
    build_navigable_with(&dist, seed)
}

pub fn build_navigable_with<D: PairDistance>(dist: &D, seed: u64) -> Result<SearchGraph> {
    let n = dist.num_points();
    if n < 2 {
        return Err(Error::TooFewNodes { n, min: 2 });
    }
    let (nearest, random) = navigable_degree_plan(n);
    if nearest + random >= n - 1 {
        return Ok(SearchGraph::complete(n));
    }
    let near: Vec<Vec<u32>> = (0..n)
        .into_par_iter()
        .map_init(Vec::new, |row, u| {
            dist.row_into(u, row);
            let mut order: Vec<(f64, u32)> = row
                .iter()
                .enumerate()
                .filter(|&(v, _)| v != u)
                .map(|(v, &d)| (d, v as u32))
                .collect();
            order.select_nth_unstable_by(nearest, |a, b| cmp_dist_id(*a, *b));
            order[..nearest].iter().map(|&(_, v)| v).collect()
        })
        .collect();
    let mut reverse: Vec<Vec<u32>> = vec![Vec::new(); n];
    for (y, list) in near.iter().enumerate() {
        for &x in list {
            reverse[x as usize].push(y as u32);
        }
    }
    let lists: Vec<Vec<u32>> = (0..n)
        .into_par_iter()
        .map(|u| {
            let mut linked = vec![false; n];
            linked[u] = true;
            let mut list: Vec<u32> = Vec::with_capacity(near[u].len() + reverse[u].len() + random);
            for &v in near[u].iter().chain(&reverse[u]) {
                if !linked[v as usize] {
                    linked[v as usize] = true;
                    list.push(v);
                }
            }
            let rest: Vec<u32> = (0..n as u32).filter(|&v| !linked[v as usize]).collect();
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            rng.set_stream(u as u64);
            let take = random.min(rest.len());
            list.extend(
                index::sample(&mut rng, rest.len(), take)
                    .into_iter()
                    .map(|i| rest[i]),
            );
            list.sort_unstable();
            list
        })
        .collect();
    SearchGraph::from_adjacency(&lists)
}
