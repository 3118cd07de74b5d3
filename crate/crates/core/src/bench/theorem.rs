use crate::dataset::{Dataset, Metric};
use crate::error::{Error, Result};
use crate::search::SearchResult;

/// Outcome of the brute-force approximation check.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Theorem1Verdict {
    pub passed: bool,
    /// `(gamma / 2) * max_{j in B} d(q, j)`.
    pub bound: f64,
    /// First (lowest id) point outside the result that is closer than `bound`.
    pub violator: Option<u32>,
}

/// Checks that every point outside the returned set `B` is at least
/// `(gamma / 2) * max_{j in B} d(q, j)` from the query. `gamma` must lie in `(0, 2]`.
pub fn verify_theorem1(
    dataset: &Dataset,
    metric: Metric,
    q: &[f64],
    gamma: f64,
    result: &SearchResult,
) -> Result<Theorem1Verdict> {
    if !(gamma > 0.0 && gamma <= 2.0) {
        return Err(Error::GammaOutOfRange(gamma));
    }
    dataset.check_query(q)?;
    let mut in_result = vec![false; dataset.len()];
    let mut farthest: f64 = 0.0;
    for &id in &result.ids {
        let row = dataset.get(id as usize)?;
        in_result[id as usize] = true;
        farthest = farthest.max(metric.eval(q, row));
    }
    let bound = gamma / 2.0 * farthest;
    let violator = (0..dataset.len())
        .find(|&v| !in_result[v] && metric.eval(q, dataset.row(v)) < bound)
        .map(|v| v as u32);
    Ok(Theorem1Verdict {
        passed: violator.is_none(),
        bound,
        violator,
    })
}
