//! Reference search: candidate min-queue plus the full discovered set,
//! with the rule evaluated directly against the discovered set.

use std::collections::BinaryHeap;

use super::{
    check_inputs, slack, v2_threshold, Candidate, SearchObserver, SearchResult, SearchStats,
    TerminationRule,
};
use crate::dataset::{cmp_dist_id, CountedEvaluator, Dataset};
use crate::error::Result;
use crate::graphs::SearchGraph;

/// Discovered nodes kept sorted by `(distance, id)`.
struct Discovered {
    seen: Vec<bool>,
    sorted: Vec<(f64, u32)>,
}

impl Discovered {
    fn insert(&mut self, dist: f64, id: u32) {
        self.seen[id as usize] = true;
        let pos = self
            .sorted
            .partition_point(|&e| cmp_dist_id(e, (dist, id)).is_lt());
        self.sorted.insert(pos, (dist, id));
    }

    /// Number of discovered nodes other than `x` with `(1 + gamma) d <= d_x`.
    fn others_within(&self, dist_x: f64, gamma: f64) -> usize {
        let within = self
            .sorted
            .partition_point(|&(d, _)| slack(gamma, d) <= dist_x);
        if slack(gamma, dist_x) <= dist_x {
            within - 1
        } else {
            within
        }
    }

    fn fires(&self, rule: &TerminationRule, k: usize, dist_x: f64) -> bool {
        match *rule {
            TerminationRule::AdaptiveV2 { gamma } => {
                self.sorted.len() >= k
                    && dist_x >= v2_threshold(gamma, self.sorted[0].0, self.sorted[k - 1].0)
            }
            _ => {
                let (width, gamma) = rule.width_and_slack(k).expect("counting rule");
                self.others_within(dist_x, gamma) >= width
            }
        }
    }
}

/// Generalized beam search with an arbitrary termination rule.
pub fn generalized_beam_search(
    graph: &SearchGraph,
    dataset: &Dataset,
    evaluator: &mut CountedEvaluator,
    start: u32,
    q: &[f64],
    k: usize,
    rule: TerminationRule,
) -> Result<SearchResult> {
    generalized_beam_search_observed(graph, dataset, evaluator, start, q, k, rule, &mut ())
}

#[allow(clippy::too_many_arguments)]
pub fn generalized_beam_search_observed<O: SearchObserver>(
    graph: &SearchGraph,
    dataset: &Dataset,
    evaluator: &mut CountedEvaluator,
    start: u32,
    q: &[f64],
    k: usize,
    rule: TerminationRule,
    observer: &mut O,
) -> Result<SearchResult> {
    check_inputs(graph, dataset, start, q, k, &rule)?;
    let counted_before = evaluator.count();
    let mut found = Discovered {
        seen: vec![false; dataset.len()],
        sorted: Vec::new(),
    };
    let mut queue = BinaryHeap::new();
    let mut stats = SearchStats::default();

    let d = evaluator.eval_unchecked(q, start as usize, dataset);
    found.insert(d, start);
    observer.on_discover(start, d);
    queue.push(Candidate { dist: d, id: start });

    while let Some(x) = queue.pop() {
        if found.fires(&rule, k, x.dist) {
            stats.terminated_early = true;
            break;
        }
        stats.expanded += 1;
        observer.on_expand(x.id);
        for &y in graph.neighbors(x.id as usize) {
            if found.seen[y as usize] {
                continue;
            }
            let d = evaluator.eval_unchecked(q, y as usize, dataset);
            found.insert(d, y);
            observer.on_discover(y, d);
            queue.push(Candidate { dist: d, id: y });
        }
    }

    stats.distance_computations = evaluator.count() - counted_before;
    stats.underfilled = found.sorted.len() < k;
    let top = &found.sorted[..k.min(found.sorted.len())];
    Ok(SearchResult {
        ids: top.iter().map(|&(_, id)| id).collect(),
        distances: top.iter().map(|&(d, _)| d).collect(),
        stats,
    })
}
