//! Instance generators and deliberately naive oracles shared by the
//! integration and acceptance tests.
#![allow(dead_code)]

use navbeam::search::TerminationRule;
use navbeam::{Dataset, SearchGraph};
use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

/// Uniform points; with `grid` set, small integer coordinates so that
/// distance ties are common.
pub fn points(rng: &mut ChaCha8Rng, n: usize, dim: usize, grid: bool) -> Dataset {
    let data = (0..n * dim)
        .map(|_| {
            if grid {
                f64::from(rng.gen_range(0..4u8))
            } else {
                f64::from(rng.gen::<f32>())
            }
        })
        .collect();
    Dataset::new(dim, data).unwrap()
}

/// Random directed graph where each node draws up to `max_degree` distinct
/// out-neighbors.
pub fn random_graph(rng: &mut ChaCha8Rng, n: usize, max_degree: usize) -> SearchGraph {
    let ids: Vec<u32> = (0..n as u32).collect();
    let lists: Vec<Vec<u32>> = (0..n)
        .map(|u| {
            let d = rng.gen_range(0..=max_degree.min(n - 1));
            let mut others: Vec<u32> = ids.iter().copied().filter(|&v| v as usize != u).collect();
            others.shuffle(rng);
            others.truncate(d);
            others
        })
        .collect();
    SearchGraph::from_adjacency(&lists).unwrap()
}

pub fn dist(a: &[f64], b: &[f64]) -> f64 {
    a.iter()
        .zip(b)
        .map(|(x, y)| (x - y) * (x - y))
        .sum::<f64>()
        .sqrt()
}

/// Exact k nearest ids by full sort on `(distance, id)`.
pub fn naive_knn(ds: &Dataset, q: &[f64], k: usize) -> Vec<u32> {
    let mut all: Vec<(f64, u32)> = (0..ds.len())
        .map(|i| (dist(ds.row(i), q), i as u32))
        .collect();
    all.sort_by(|a, b| a.0.total_cmp(&b.0).then(a.1.cmp(&b.1)));
    all.into_iter().take(k).map(|(_, i)| i).collect()
}

/// Lexicographically first pair violating navigability, by direct scan.
pub fn naive_witness(g: &SearchGraph, ds: &Dataset) -> Option<(u32, u32)> {
    for x in 0..ds.len() {
        for y in 0..ds.len() {
            let dxy = dist(ds.row(x), ds.row(y));
            if x == y || dxy == 0.0 {
                continue;
            }
            if !g
                .neighbors(x)
                .iter()
                .any(|&z| dist(ds.row(z as usize), ds.row(y)) < dxy)
            {
                return Some((x as u32, y as u32));
            }
        }
    }
    None
}

pub struct NaiveRun {
    pub ids: Vec<u32>,
    pub discovered: Vec<u32>,
    pub expanded: Vec<u32>,
    pub fired: bool,
}

/// Best-first search written as literally as possible: linear-scan queue,
/// unsorted discovered list, rules counted from scratch at every pop.
pub fn naive_search(
    g: &SearchGraph,
    ds: &Dataset,
    start: u32,
    q: &[f64],
    k: usize,
    rule: TerminationRule,
) -> NaiveRun {
    let d = |i: u32| dist(ds.row(i as usize), q);
    let mut found: Vec<(u32, f64)> = vec![(start, d(start))];
    let mut queue: Vec<(u32, f64)> = found.clone();
    let mut expanded = Vec::new();
    let mut fired = false;
    while !queue.is_empty() {
        let mut best = 0;
        for i in 1..queue.len() {
            let (a, b) = (queue[i], queue[best]);
            if a.1 < b.1 || (a.1 == b.1 && a.0 < b.0) {
                best = i;
            }
        }
        let (x, dx) = queue.remove(best);
        let count = |width: usize, gamma: f64| {
            found
                .iter()
                .filter(|&&(j, dj)| j != x && (1.0 + gamma) * dj <= dx)
                .count()
                >= width
        };
        let stop = match rule {
            TerminationRule::Greedy => count(k, 0.0),
            TerminationRule::Beam { b } => count(b, 0.0),
            TerminationRule::Adaptive { gamma } => count(k, gamma),
            TerminationRule::Hybrid { b, gamma } => count(b, gamma),
            TerminationRule::AdaptiveV2 { gamma } => {
                let mut ds: Vec<f64> = found.iter().map(|p| p.1).collect();
                ds.sort_by(f64::total_cmp);
                ds.len() >= k && dx >= ds[0] + gamma * ds[k - 1]
            }
        };
        if stop {
            fired = true;
            break;
        }
        expanded.push(x);
        for &y in g.neighbors(x as usize) {
            if found.iter().all(|p| p.0 != y) {
                let entry = (y, d(y));
                found.push(entry);
                queue.push(entry);
            }
        }
    }
    let discovered = found.iter().map(|p| p.0).collect();
    found.sort_by(|a, b| a.1.total_cmp(&b.1).then(a.0.cmp(&b.0)));
    NaiveRun {
        ids: found.iter().take(k).map(|p| p.0).collect(),
        discovered,
        expanded,
        fired,
    }
}

/// A random rule valid for `k`, drawn from all five families.
pub fn random_rule(rng: &mut ChaCha8Rng, k: usize, n: usize) -> TerminationRule {
    let gammas = [0.0, 0.05, 0.1, 0.5, 1.0, 2.0, 3.5];
    let gamma = gammas[rng.gen_range(0..gammas.len())];
    let b = rng.gen_range(k..=n.max(k));
    match rng.gen_range(0..5) {
        0 => TerminationRule::Greedy,
        1 => TerminationRule::Beam { b },
        2 => TerminationRule::Adaptive { gamma },
        3 => TerminationRule::AdaptiveV2 { gamma },
        _ => TerminationRule::Hybrid { b, gamma },
    }
}
