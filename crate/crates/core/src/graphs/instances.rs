//! Constructed point sets used to exercise the search guarantees.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use super::distances::{DistanceTable, PairDistance};
use super::graph::SearchGraph;
use crate::dataset::Dataset;
use crate::error::{Error, Result};

/// Radius of the ball the clustered points of the counterexample live in.
pub const COUNTEREXAMPLE_EPS: f64 = 1e-3;

/// Default constant in the hypercube dimension formula.
pub const HYPERCUBE_C: f64 = 64.0;

/// Magnitude of the per-coordinate noise that makes hypercube distances unique.
pub const HYPERCUBE_NOISE: f64 = 1e-9;

/// A navigable instance on which fixed-width beam search misses the nearest
/// neighbor by an arbitrarily large factor.
#[derive(Clone, Debug)]
pub struct Counterexample {
    pub dataset: Dataset,
    pub graph: SearchGraph,
    pub query: Vec<f64>,
    /// Entry point the failure needs: the origin.
    pub start: u32,
    /// The exact nearest neighbor of `query`, at distance 1.
    pub nearest: u32,
    /// Horizontal offset of the far point.
    pub m: f64,
}

/// Builds the 2-D counterexample with `n` points and target factor `c`.
///
/// Node 0 is `(0, 0)`, node 1 is `(1, 1)`, node 2 is `(m, 1)` with
/// `m = c + 1 + eps`, and nodes `3..n` sit in an `eps`-ball around `(1, 0)`.
/// Edges (both directions): `1-2`, every `{0, 1}` to every clustered node, and
/// all pairs inside the cluster. The query is `(m, 0)`. Clustered points are
/// more than `m - 1 - eps = c` from the query while node 2 is at distance 1.
///
/// All coordinates are `f32` values (`m` rounded up), so the instance
/// survives an fvecs round trip unchanged.
pub fn counterexample_instance(n: usize, c: f64, seed: u64) -> Result<Counterexample> {
    if n < 5 {
        return Err(Error::TooFewNodes { n, min: 5 });
    }
    if !(c > 1.0 && c.is_finite() && c < f64::from(f32::MAX) / 2.0) {
        return Err(Error::InvalidParameter(format!(
            "approximation factor must be > 1, got {c}"
        )));
    }
    let eps = COUNTEREXAMPLE_EPS;
    let m = f32_at_least(c + 1.0 + eps);
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut rows = vec![[0.0, 0.0], [1.0, 1.0], [m, 1.0]];
    while rows.len() < n {
        let r = eps * rng.gen::<f64>().sqrt();
        let theta = std::f64::consts::TAU * rng.gen::<f64>();
        let x = f64::from((1.0 + r * theta.cos()) as f32);
        let y = f64::from((r * theta.sin()) as f32);
        // rounding may push a point onto or past the boundary
        if (x - 1.0).powi(2) + y * y < eps * eps {
            rows.push([x, y]);
        }
    }
    let dataset = Dataset::from_rows(&rows)?;

    let cluster = || 3..n as u32;
    let mut lists: Vec<Vec<u32>> = vec![Vec::new(); n];
    lists[0].extend(cluster());
    lists[1].push(2);
    lists[1].extend(cluster());
    lists[2].push(1);
    for j in cluster() {
        let list = &mut lists[j as usize];
        list.extend([0, 1]);
        list.extend(cluster().filter(|&i| i != j));
    }
    let graph = SearchGraph::from_adjacency(&lists)?;
    Ok(Counterexample {
        dataset,
        graph,
        query: vec![m, 0.0],
        start: 0,
        nearest: 2,
        m,
    })
}

fn f32_at_least(v: f64) -> f64 {
    let r = v as f32;
    if f64::from(r) >= v {
        f64::from(r)
    } else {
        f64::from(f32::from_bits(r.to_bits() + 1))
    }
}

/// Dimension used by [`random_hypercube_instance`]: `ceil(c ln n / (1 - 1/alpha)^2)`.
pub fn hypercube_dimension(n: usize, alpha: f64, c: f64) -> usize {
    let gap = 1.0 - 1.0 / alpha;
    (c * (n as f64).ln() / (gap * gap)).ceil() as usize
}

/// Extremes of the squared pairwise distances and whether all distances differ.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct PairwiseSummary {
    pub min_sq: f64,
    pub max_sq: f64,
    pub all_unique: bool,
}

pub fn pairwise_summary<D: PairDistance>(dist: &D) -> PairwiseSummary {
    let n = dist.num_points();
    let mut all = Vec::with_capacity(n * n.saturating_sub(1) / 2);
    for i in 0..n {
        for j in i + 1..n {
            all.push(dist.pair(i, j));
        }
    }
    all.sort_unstable_by(f64::total_cmp);
    let all_unique = all.windows(2).all(|w| w[0] < w[1]);
    let sq = |d: f64| d * d;
    PairwiseSummary {
        min_sq: all.first().copied().map_or(0.0, sq),
        max_sq: all.last().copied().map_or(0.0, sq),
        all_unique,
    }
}

/// Random `+-1` points whose normalized pairwise squared distances all fall
/// in `(1/alpha, 1]`, so every pair needs its direct edge for
/// alpha-shortcut reachability.
///
/// Points are scaled by the largest pairwise distance, then perturbed by
/// noise of magnitude `1e-9` so distances are unique, then shrunk by the few
/// ulps needed to keep the largest squared distance at most 1. If the sample
/// misses the interval or has a repeated distance, the next seed is tried.
pub fn random_hypercube_instance(n: usize, alpha: f64, seed: u64) -> Result<Dataset> {
    random_hypercube_instance_with(n, alpha, HYPERCUBE_C, seed)
}

pub fn random_hypercube_instance_with(n: usize, alpha: f64, c: f64, seed: u64) -> Result<Dataset> {
    const ATTEMPTS: u64 = 8;
    if n < 2 {
        return Err(Error::TooFewNodes { n, min: 2 });
    }
    if !(alpha > 1.0 && alpha.is_finite()) {
        return Err(Error::InvalidAlpha(alpha));
    }
    let dim = hypercube_dimension(n, alpha, c);
    for attempt in 0..ATTEMPTS {
        let mut rng = ChaCha8Rng::seed_from_u64(seed.wrapping_add(attempt));
        let signs: Vec<f64> = (0..n * dim)
            .map(|_| if rng.gen::<bool>() { 1.0 } else { -1.0 })
            .collect();
        // +-1 coordinates: squared distances are exact integers here
        let max = pairwise_summary(&DistanceTable::compute(&Dataset::new(dim, signs.clone())?))
            .max_sq
            .sqrt();
        let mut data: Vec<f64> = signs
            .iter()
            .map(|s| s / max + rng.gen_range(-HYPERCUBE_NOISE..=HYPERCUBE_NOISE))
            .collect();
        let summary = loop {
            let ds = Dataset::new(dim, data)?;
            let summary = pairwise_summary(&DistanceTable::compute(&ds));
            data = ds.as_slice().to_vec();
            if summary.max_sq <= 1.0 {
                break summary;
            }
            // noise pushed the largest distance just above 1
            let shrink = (1.0 - 4.0 * f64::EPSILON) / summary.max_sq.sqrt();
            data.iter_mut().for_each(|v| *v *= shrink);
        };
        if summary.min_sq > 1.0 / alpha && summary.all_unique {
            return Dataset::new(dim, data);
        }
    }
    Err(Error::InvalidParameter(format!(
        "no hypercube sample with distances in (1/{alpha}, 1] after {ATTEMPTS} attempts; raise c"
    )))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::dataset::{brute_force_knn_with_distances, Metric};
    use crate::graphs::is_navigable;

    #[test]
    fn counterexample_layout() {
        let ce = counterexample_instance(20, 5.0, 0).unwrap();
        assert_eq!(ce.dataset.len(), 20);
        assert!(is_navigable(&ce.graph, &ce.dataset).navigable);
        let nn =
            brute_force_knn_with_distances(&ce.dataset, Metric::Euclidean, &ce.query, 1).unwrap();
        assert_eq!(nn[0].0, 2);
        assert!((nn[0].1 - 1.0).abs() < 1e-12);
        for j in 3..20 {
            let d = crate::dataset::euclidean(ce.dataset.row(j), &ce.query);
            assert!(d > 5.0, "clustered point {j} at {d}");
        }
        // node 2 only links back to node 1
        assert_eq!(ce.graph.neighbors(2), &[1]);
    }

    #[test]
    fn counterexample_is_f32_exact() {
        let ce = counterexample_instance(200, 50.0, 4).unwrap();
        assert!(ce
            .dataset
            .as_slice()
            .iter()
            .all(|&v| f64::from(v as f32) == v));
        assert!(ce.m >= 51.0 + COUNTEREXAMPLE_EPS);
        for j in 3..200 {
            let row = ce.dataset.row(j);
            assert!((row[0] - 1.0).powi(2) + row[1].powi(2) < COUNTEREXAMPLE_EPS.powi(2));
        }
    }

    #[test]
    fn counterexample_is_reproducible() {
        let a = counterexample_instance(10, 3.0, 9).unwrap();
        let b = counterexample_instance(10, 3.0, 9).unwrap();
        assert_eq!(a.dataset, b.dataset);
        assert_eq!(a.graph, b.graph);
    }

    #[test]
    fn counterexample_rejects_bad_parameters() {
        assert!(counterexample_instance(4, 5.0, 0).is_err());
        assert!(counterexample_instance(10, 1.0, 0).is_err());
    }

    #[test]
    fn hypercube_dimension_formula() {
        // 64 * ln 200 / (1 - 1/1.05)^2
        let expected = (64.0 * 200f64.ln() / (1.0 - 1.0 / 1.05f64).powi(2)).ceil() as usize;
        assert_eq!(hypercube_dimension(200, 1.05, 64.0), expected);
        assert!(expected > 100_000);
    }

    #[test]
    fn small_hypercube_meets_interval() {
        let alpha = 2.0;
        let ds = random_hypercube_instance(30, alpha, 1).unwrap();
        let s = pairwise_summary(&DistanceTable::compute(&ds));
        assert!(s.max_sq <= 1.0);
        assert!(s.min_sq > 1.0 / alpha);
        assert!(s.all_unique);
        assert_eq!(find_detour(&ds, alpha), None);
    }

    fn find_detour(ds: &Dataset, alpha: f64) -> Option<(u32, u32, u32)> {
        crate::graphs::find_alpha_detour(ds, alpha)
    }
}
