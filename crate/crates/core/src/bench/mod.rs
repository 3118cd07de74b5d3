//! Recall measurement, parameter sweeps, cost histograms and the
//! approximation-guarantee verifier.

mod report;
mod sweep;
mod theorem;
mod tune;

pub use report::{
    histogram, read_curve_csv, read_histogram_csv, write_curve_csv, write_histogram_csv, CurveRow,
    Histogram,
};
pub use sweep::{sweep, CurvePoint, Param, RuleFamily, SweepSpec, TradeoffCurve};
pub use theorem::{verify_theorem1, Theorem1Verdict};
pub use tune::{match_recall, MatchedRun, TunerOptions};

use rayon::prelude::*;

use crate::dataset::{CountedEvaluator, Dataset, GroundTruth, Metric};
use crate::error::{Error, Result};
use crate::graphs::SearchGraph;
use crate::search::{beam_search, SearchResult, SearchStats, TerminationRule};

/// Fraction of the first `k` ground-truth ids present among the returned ids.
pub fn recall(result: &SearchResult, truth: &[u32], k: usize) -> Result<f64> {
    if k == 0 {
        return Err(Error::InvalidParameter("recall needs k >= 1".into()));
    }
    if truth.len() < k {
        return Err(Error::InsufficientTruth {
            have: truth.len(),
            need: k,
        });
    }
    let expected = &truth[..k];
    let hits = result
        .ids
        .iter()
        .take(k)
        .filter(|id| expected.contains(id))
        .count();
    Ok(hits as f64 / k as f64)
}

/// A graph, its points, a query batch with ground truth, and the entry point.
#[derive(Clone, Copy, Debug)]
pub struct Workload<'a> {
    pub graph: &'a SearchGraph,
    pub dataset: &'a Dataset,
    pub queries: &'a Dataset,
    pub truth: &'a GroundTruth,
    pub start: u32,
}

impl Workload<'_> {
    fn check(&self, k: usize) -> Result<()> {
        if self.truth.len() != self.queries.len() {
            return Err(Error::TruthCountMismatch {
                have: self.truth.len(),
                need: self.queries.len(),
            });
        }
        if self.truth.depth() < k {
            return Err(Error::InsufficientTruth {
                have: self.truth.depth(),
                need: k,
            });
        }
        if self.queries.dim() != self.dataset.dim() {
            return Err(Error::DimensionMismatch {
                expected: self.dataset.dim(),
                got: self.queries.dim(),
            });
        }
        Ok(())
    }
}

/// Outcome of one query in a batch.
#[derive(Clone, Debug, PartialEq)]
pub struct QueryOutcome {
    pub stats: SearchStats,
    pub recall: f64,
}

/// Per-query outcomes in query order plus their means.
#[derive(Clone, Debug, PartialEq)]
pub struct BatchReport {
    pub rule: TerminationRule,
    pub k: usize,
    pub per_query: Vec<QueryOutcome>,
    pub mean_recall: f64,
    pub mean_distance_computations: f64,
}

impl BatchReport {
    pub fn costs(&self) -> impl Iterator<Item = u64> + '_ {
        self.per_query.iter().map(|o| o.stats.distance_computations)
    }

    /// Population variance of per-query distance computations.
    pub fn cost_variance(&self) -> f64 {
        let n = self.per_query.len();
        if n == 0 {
            return 0.0;
        }
        let mean = self.mean_distance_computations;
        self.costs().map(|c| (c as f64 - mean).powi(2)).sum::<f64>() / n as f64
    }
}

/// Runs the bounded-memory search for every query, in parallel, and merges
/// the outcomes in query order.
pub fn run_queries(work: &Workload<'_>, rule: TerminationRule, k: usize) -> Result<BatchReport> {
    work.check(k)?;
    let per_query: Vec<QueryOutcome> = (0..work.queries.len())
        .into_par_iter()
        .map(|i| {
            let mut ev = CountedEvaluator::new(Metric::Euclidean);
            let result = beam_search(
                work.graph,
                work.dataset,
                &mut ev,
                work.start,
                work.queries.row(i),
                k,
                rule,
            )?;
            let recall = recall(&result, work.truth.get(i), k)?;
            Ok(QueryOutcome {
                stats: result.stats,
                recall,
            })
        })
        .collect::<Result<_>>()?;
    let n = per_query.len().max(1) as f64;
    let mean_recall = per_query.iter().map(|o| o.recall).sum::<f64>() / n;
    let mean_distance_computations = per_query
        .iter()
        .map(|o| o.stats.distance_computations as f64)
        .sum::<f64>()
        / n;
    Ok(BatchReport {
        rule,
        k,
        per_query,
        mean_recall,
        mean_distance_computations,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::graphs::{build_navigable, counterexample_instance};

    fn result(ids: &[u32]) -> SearchResult {
        SearchResult {
            ids: ids.to_vec(),
            ..Default::default()
        }
    }

    #[test]
    fn recall_examples() {
        assert!((recall(&result(&[1, 2, 3]), &[1, 2, 4], 3).unwrap() - 2.0 / 3.0).abs() < 1e-15);
        assert_eq!(recall(&result(&[1, 2, 4]), &[1, 2, 4, 9], 3).unwrap(), 1.0);
        assert_eq!(recall(&result(&[5, 6]), &[1, 2], 2).unwrap(), 0.0);
        assert!(matches!(
            recall(&result(&[1]), &[1], 2),
            Err(Error::InsufficientTruth { have: 1, need: 2 })
        ));
    }

    #[test]
    fn exhaustive_batch_has_full_recall() {
        let ds = crate::synthetic::uniform(40, 3, 2);
        let qs = crate::synthetic::uniform(5, 3, 3);
        let truth = GroundTruth::compute(&ds, Metric::Euclidean, &qs, 10).unwrap();
        let graph = SearchGraph::complete(40);
        let work = Workload {
            graph: &graph,
            dataset: &ds,
            queries: &qs,
            truth: &truth,
            start: 0,
        };
        let r = run_queries(&work, TerminationRule::Beam { b: 40 }, 10).unwrap();
        assert_eq!(r.mean_recall, 1.0);
        assert_eq!(r.per_query.len(), 5);
        assert_eq!(r.mean_distance_computations, 40.0);
        assert_eq!(r.cost_variance(), 0.0);
    }

    #[test]
    fn counterexample_batch_misses() {
        let ce = counterexample_instance(100, 50.0, 0).unwrap();
        let qs = Dataset::from_rows(std::slice::from_ref(&ce.query)).unwrap();
        let truth = GroundTruth::compute(&ce.dataset, Metric::Euclidean, &qs, 1).unwrap();
        let work = Workload {
            graph: &ce.graph,
            dataset: &ce.dataset,
            queries: &qs,
            truth: &truth,
            start: ce.start,
        };
        assert_eq!(
            run_queries(&work, TerminationRule::Beam { b: 97 }, 1)
                .unwrap()
                .mean_recall,
            0.0
        );
        assert_eq!(
            run_queries(&work, TerminationRule::Adaptive { gamma: 2.0 }, 1)
                .unwrap()
                .mean_recall,
            1.0
        );
    }

    #[test]
    fn adaptive_gamma_two_is_exact_on_navigable_graph() {
        let ds = crate::synthetic::uniform(1000, 4, 11);
        let qs = crate::synthetic::uniform(20, 4, 12);
        let truth = GroundTruth::compute(&ds, Metric::Euclidean, &qs, 10).unwrap();
        let graph = build_navigable(&ds, 0).unwrap();
        let work = Workload {
            graph: &graph,
            dataset: &ds,
            queries: &qs,
            truth: &truth,
            start: ds.medoid(),
        };
        let r = run_queries(&work, TerminationRule::Adaptive { gamma: 2.0 }, 10).unwrap();
        assert_eq!(r.mean_recall, 1.0);
    }

    #[test]
    fn batch_preconditions() {
        let ds = crate::synthetic::uniform(10, 2, 0);
        let qs = crate::synthetic::uniform(3, 2, 1);
        let truth = GroundTruth::compute(&ds, Metric::Euclidean, &qs, 2).unwrap();
        let graph = SearchGraph::complete(10);
        let work = Workload {
            graph: &graph,
            dataset: &ds,
            queries: &qs,
            truth: &truth,
            start: 0,
        };
        assert!(matches!(
            run_queries(&work, TerminationRule::Greedy, 3),
            Err(Error::InsufficientTruth { .. })
        ));
        let fewer = crate::synthetic::uniform(2, 2, 1);
        let work = Workload {
            queries: &fewer,
            ..work
        };
        assert!(matches!(
            run_queries(&work, TerminationRule::Greedy, 1),
            Err(Error::TruthCountMismatch { .. })
        ));
    }
}
