//! Best-first graph search with pluggable termination rules.
//!
//! Every variant shares one search order: repeatedly pop the closest
//! discovered-but-unexpanded node, stop if the termination rule fires on it,
//! otherwise discover all of its out-neighbors. Only the rule differs.
//!
//! Rules are evaluated against the popped node `x` only and count the other
//! discovered nodes (never `x` itself):
//!
//! | rule         | fires when                                                    |
//! |--------------|---------------------------------------------------------------|
//! | `Greedy`     | `k` other discovered `j` with `d(q,j) <= d(q,x)`               |
//! | `Beam`       | `b` other discovered `j` with `d(q,j) <= d(q,x)`               |
//! | `Adaptive`   | `k` other discovered `j` with `(1+gamma) d(q,j) <= d(q,x)`     |
//! | `Hybrid`     | `b` other discovered `j` with `(1+gamma) d(q,j) <= d(q,x)`     |
//! | `AdaptiveV2` | at least `k` discovered and `d(q,x) >= d_1 + gamma * d_k`      |
//!
//! `d_1` and `d_k` in the last rule are the smallest and `k`-th smallest
//! discovered distances, `x` included.

mod generalized;
mod optimized;

use std::cmp::Ordering;
use std::fmt;

pub use generalized::{generalized_beam_search, generalized_beam_search_observed};
pub use optimized::{adaptive_beam_search, beam_search, beam_search_observed, classic_beam_search};

use crate::dataset::{cmp_dist_id, Dataset};
use crate::error::{Error, Result};
use crate::graphs::SearchGraph;

/// When to stop expanding nodes.
#[derive(Clone, Copy, Debug, PartialEq)]
pub enum TerminationRule {
    Greedy,
    Beam { b: usize },
    Adaptive { gamma: f64 },
    AdaptiveV2 { gamma: f64 },
    Hybrid { b: usize, gamma: f64 },
}

impl TerminationRule {
    /// Checks parameters against the requested `k`.
    pub fn validate(&self, k: usize) -> Result<()> {
        let check_gamma = |gamma: f64| {
            if gamma.is_finite() && gamma >= 0.0 {
                Ok(())
            } else {
                Err(Error::InvalidGamma(gamma))
            }
        };
        match *self {
            TerminationRule::Greedy => Ok(()),
            TerminationRule::Beam { b } => {
                if b < k {
                    Err(Error::BeamTooNarrow { b, k })
                } else {
                    Ok(())
                }
            }
            TerminationRule::Adaptive { gamma } | TerminationRule::AdaptiveV2 { gamma } => {
                check_gamma(gamma)
            }
            TerminationRule::Hybrid { b, gamma } => {
                if b < k {
                    return Err(Error::BeamTooNarrow { b, k });
                }
                check_gamma(gamma)
            }
        }
    }

    pub fn name(&self) -> &'static str {
        match self {
            TerminationRule::Greedy => "greedy",
            TerminationRule::Beam { .. } => "beam",
            TerminationRule::Adaptive { .. } => "adaptive",
            TerminationRule::AdaptiveV2 { .. } => "adaptive-v2",
            TerminationRule::Hybrid { .. } => "hybrid",
        }
    }

    /// `(width, gamma)` for the rules that count `width` closer nodes.
    pub(crate) fn width_and_slack(&self, k: usize) -> Option<(usize, f64)> {
        match *self {
            TerminationRule::Greedy => Some((k, 0.0)),
            TerminationRule::Beam { b } => Some((b, 0.0)),
            TerminationRule::Adaptive { gamma } => Some((k, gamma)),
            TerminationRule::Hybrid { b, gamma } => Some((b, gamma)),
            TerminationRule::AdaptiveV2 { .. } => None,
        }
    }
}

impl fmt::Display for TerminationRule {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            TerminationRule::Greedy => write!(f, "greedy"),
            TerminationRule::Beam { b } => write!(f, "beam(b={b})"),
            TerminationRule::Adaptive { gamma } => write!(f, "adaptive(gamma={gamma})"),
            TerminationRule::AdaptiveV2 { gamma } => write!(f, "adaptive-v2(gamma={gamma})"),
            TerminationRule::Hybrid { b, gamma } => write!(f, "hybrid(b={b},gamma={gamma})"),
        }
    }
}

/// Per-query counters.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq)]
pub struct SearchStats {
    /// Query-to-node distance evaluations; equals the number of discovered nodes.
    pub distance_computations: u64,
    /// Nodes popped without firing the rule, whose neighbors were all discovered.
    pub expanded: u64,
    /// The rule fired before the candidate queue ran dry.
    pub terminated_early: bool,
    /// Fewer than `k` nodes were reachable from the start node.
    pub underfilled: bool,
}

/// Up to `k` closest discovered nodes, ascending by distance then id.
#[derive(Clone, Debug, Default, PartialEq)]
pub struct SearchResult {
    pub ids: Vec<u32>,
    pub distances: Vec<f64>,
    pub stats: SearchStats,
}

/// Hooks called as a search discovers and expands nodes.
pub trait SearchObserver {
    fn on_discover(&mut self, _node: u32, _dist: f64) {}
    fn on_expand(&mut self, _node: u32) {}
}

impl SearchObserver for () {}

/// Records discovery and expansion order.
#[derive(Clone, Debug, Default, PartialEq)]
pub struct SearchTrace {
    pub discovered: Vec<u32>,
    pub expanded: Vec<u32>,
}

impl SearchObserver for SearchTrace {
    fn on_discover(&mut self, node: u32, _dist: f64) {
        self.discovered.push(node);
    }

    fn on_expand(&mut self, node: u32) {
        self.expanded.push(node);
    }
}

/// Min-queue entry ordered by `(distance, id)`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub(crate) struct Candidate {
    pub dist: f64,
    pub id: u32,
}

impl Eq for Candidate {}

impl Ord for Candidate {
    fn cmp(&self, other: &Self) -> Ordering {
        // reversed: BinaryHeap is a max-heap
        cmp_dist_id((other.dist, other.id), (self.dist, self.id))
    }
}

impl PartialOrd for Candidate {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

/// Validates the shared search preconditions.
pub(crate) fn check_inputs(
    graph: &SearchGraph,
    dataset: &Dataset,
    start: u32,
    q: &[f64],
    k: usize,
    rule: &TerminationRule,
) -> Result<()> {
    if graph.is_empty() {
        return Err(Error::EmptyGraph);
    }
    let n = dataset.len();
    if graph.len() != n {
        return Err(Error::GraphSizeMismatch {
            graph: graph.len(),
            dataset: n,
        });
    }
    if start as usize >= n {
        return Err(Error::InvalidNodeId {
            id: start as usize,
            n,
        });
    }
    if k == 0 || k > n {
        return Err(Error::InvalidK { k, n });
    }
    dataset.check_query(q)?;
    rule.validate(k)
}

#[inline]
pub(crate) fn slack(gamma: f64, d: f64) -> f64 {
    (1.0 + gamma) * d
}

#[inline]
pub(crate) fn v2_threshold(gamma: f64, d1: f64, dk: f64) -> f64 {
    d1 + gamma * dk
}
