//! Bounded-memory search: keeps only the closest `width + 1` discovered nodes
//! and leaves out of the queue any node that is certain to fire when popped.
//! Returns exactly what the reference search returns, with the same counts.

use std::collections::BinaryHeap;

use super::{
    check_inputs, slack, v2_threshold, Candidate, SearchObserver, SearchResult, SearchStats,
    TerminationRule,
};
use crate::dataset::{cmp_dist_id, CountedEvaluator, Dataset};
use crate::error::Result;
use crate::graphs::SearchGraph;

/// Closest discovered nodes, sorted by `(distance, id)`, at most `cap` long.
struct Bounded {
    cap: usize,
    items: Vec<(f64, u32)>,
}

impl Bounded {
    fn new(cap: usize) -> Self {
        Self {
            cap,
            items: Vec::with_capacity(cap + 1),
        }
    }

    fn insert(&mut self, dist: f64, id: u32) {
        let pos = self
            .items
            .partition_point(|&e| cmp_dist_id(e, (dist, id)).is_lt());
        if pos < self.cap {
            self.items.insert(pos, (dist, id));
            self.items.truncate(self.cap);
        }
    }
}

/// Rule-specific bookkeeping over the bounded list.
enum Gate {
    /// Fires once `width` other nodes satisfy `(1 + gamma) d <= d_x`.
    Count { width: usize, gamma: f64 },
    /// Fires once `d_x >= d_1 + gamma * d_k`.
    Spread { k: usize, gamma: f64 },
}

impl Gate {
    fn new(rule: &TerminationRule, k: usize) -> Self {
        match (rule.width_and_slack(k), *rule) {
            (Some((width, gamma)), _) => Gate::Count { width, gamma },
            (None, TerminationRule::AdaptiveV2 { gamma }) => Gate::Spread { k, gamma },
            _ => unreachable!("every rule is counting or spread"),
        }
    }

    fn capacity(&self) -> usize {
        match *self {
            // one extra slot so the popped node can be excluded from its own count
            Gate::Count { width, .. } => width + 1,
            Gate::Spread { k, .. } => k,
        }
    }

    /// Whether a node just discovered at `dist` would certainly fire when popped.
    /// For counting rules `best` must not yet contain the node.
    fn doomed(&self, best: &Bounded, dist: f64) -> bool {
        let b = &best.items;
        match *self {
            Gate::Count { width, gamma } => {
                b.len() >= width && dist >= slack(gamma, b[width - 1].0)
            }
            Gate::Spread { k, gamma } => {
                b.len() >= k && dist >= v2_threshold(gamma, b[0].0, b[k - 1].0)
            }
        }
    }

    fn fires(&self, best: &Bounded, x: &Candidate) -> bool {
        let b = &best.items;
        match *self {
            Gate::Count { width, gamma } => {
                if b.len() <= width {
                    return false;
                }
                let in_top = cmp_dist_id((x.dist, x.id), b[width - 1]).is_le();
                let nth_other = if in_top { b[width].0 } else { b[width - 1].0 };
                slack(gamma, nth_other) <= x.dist
            }
            Gate::Spread { k, gamma } => {
                b.len() >= k && x.dist >= v2_threshold(gamma, b[0].0, b[k - 1].0)
            }
        }
    }
}

/// Beam search with any termination rule using bounded memory.
pub fn beam_search(
    graph: &SearchGraph,
    dataset: &Dataset,
    evaluator: &mut CountedEvaluator,
    start: u32,
    q: &[f64],
    k: usize,
    rule: TerminationRule,
) -> Result<SearchResult> {
    beam_search_observed(graph, dataset, evaluator, start, q, k, rule, &mut ())
}

#[allow(clippy::too_many_arguments)]
pub fn beam_search_observed<O: SearchObserver>(
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
    let gate = Gate::new(&rule, k);
    let mut best = Bounded::new(gate.capacity());
    let mut seen = vec![false; dataset.len()];
    let mut discovered = 0usize;
    let mut queue = BinaryHeap::new();
    let mut stats = SearchStats::default();
    let mut skipped = false;

    let d = evaluator.eval_unchecked(q, start as usize, dataset);
    seen[start as usize] = true;
    discovered += 1;
    best.insert(d, start);
    observer.on_discover(start, d);
    queue.push(Candidate { dist: d, id: start });

    let mut fired = false;
    while let Some(x) = queue.pop() {
        if gate.fires(&best, &x) {
            fired = true;
            break;
        }
        stats.expanded += 1;
        observer.on_expand(x.id);
        for &y in graph.neighbors(x.id as usize) {
            if seen[y as usize] {
                continue;
            }
            seen[y as usize] = true;
            discovered += 1;
            let d = evaluator.eval_unchecked(q, y as usize, dataset);
            observer.on_discover(y, d);
            let doomed = match gate {
                Gate::Count { .. } => {
                    let doomed = gate.doomed(&best, d);
                    best.insert(d, y);
                    doomed
                }
                Gate::Spread { .. } => {
                    best.insert(d, y);
                    gate.doomed(&best, d)
                }
            };
            if doomed {
                skipped = true;
            } else {
                queue.push(Candidate { dist: d, id: y });
            }
        }
    }

    stats.distance_computations = evaluator.count() - counted_before;
    stats.terminated_early = fired || skipped;
    stats.underfilled = discovered < k;
    let top = &best.items[..k.min(best.items.len())];
    Ok(SearchResult {
        ids: top.iter().map(|&(_, id)| id).collect(),
        distances: top.iter().map(|&(d, _)| d).collect(),
        stats,
    })
}

/// Search that stops once `k` discovered nodes are within a `1 + gamma` factor.
pub fn adaptive_beam_search(
    graph: &SearchGraph,
    dataset: &Dataset,
    evaluator: &mut CountedEvaluator,
    start: u32,
    q: &[f64],
    k: usize,
    gamma: f64,
) -> Result<SearchResult> {
    beam_search(
        graph,
        dataset,
        evaluator,
        start,
        q,
        k,
        TerminationRule::Adaptive { gamma },
    )
}

/// Fixed-width beam search with beam width `b >= k`.
pub fn classic_beam_search(
    graph: &SearchGraph,
    dataset: &Dataset,
    evaluator: &mut CountedEvaluator,
    start: u32,
    q: &[f64],
    k: usize,
    b: usize,
) -> Result<SearchResult> {
    beam_search(
        graph,
        dataset,
        evaluator,
        start,
        q,
        k,
        TerminationRule::Beam { b },
    )
}
