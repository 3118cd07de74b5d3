//! Bisection on a rule's parameter until the batch's mean recall lands near a
//! target. Recall is non-decreasing in `b` and in `gamma`, so bracketing
//! followed by bisection converges.

use super::{run_queries, BatchReport, RuleFamily, Workload};
use crate::error::{Error, Result};
use crate::search::TerminationRule;

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct TunerOptions {
    pub target: f64,
    pub tolerance: f64,
    /// Cap on bisection steps once the target is bracketed.
    pub max_iterations: usize,
}

impl Default for TunerOptions {
    fn default() -> Self {
        Self {
            target: 0.9,
            tolerance: 0.005,
            max_iterations: 30,
        }
    }
}

impl TunerOptions {
    pub fn with_target(target: f64) -> Self {
        Self {
            target,
            ..Self::default()
        }
    }
}

/// The run whose recall came closest to the target.
#[derive(Clone, Debug, PartialEq)]
pub struct MatchedRun {
    pub rule: TerminationRule,
    pub report: BatchReport,
    /// Batches evaluated, bracketing included.
    pub evaluations: usize,
    pub within_tolerance: bool,
}

const MAX_GAMMA_DOUBLINGS: usize = 40;

struct Tracker<'a, 'w> {
    work: &'a Workload<'w>,
    k: usize,
    opts: TunerOptions,
    best: Option<MatchedRun>,
    evaluations: usize,
}

impl Tracker<'_, '_> {
    /// Runs the batch; returns its recall and whether it is within tolerance.
    fn eval(&mut self, rule: TerminationRule) -> Result<(f64, bool)> {
        let report = run_queries(self.work, rule, self.k)?;
        self.evaluations += 1;
        let recall = report.mean_recall;
        let gap = (recall - self.opts.target).abs();
        let hit = gap <= self.opts.tolerance;
        let closer = self
            .best
            .as_ref()
            .is_none_or(|b| gap < (b.report.mean_recall - self.opts.target).abs());
        if closer {
            self.best = Some(MatchedRun {
                rule,
                report,
                evaluations: 0,
                within_tolerance: hit,
            });
        }
        Ok((recall, hit))
    }

    fn finish(self) -> MatchedRun {
        let mut run = self.best.expect("at least one evaluation");
        run.evaluations = self.evaluations;
        run
    }
}

/// Tunes `b` (Beam) or `gamma` (Adaptive, AdaptiveV2) so the mean recall of
/// the batch is within `tolerance` of `target`. If the target is out of
/// reach, the closest run is returned with `within_tolerance = false`.
pub fn match_recall(
    work: &Workload<'_>,
    family: RuleFamily,
    k: usize,
    opts: TunerOptions,
) -> Result<MatchedRun> {
    if !(0.0..=1.0).contains(&opts.target) || opts.tolerance.is_nan() || opts.tolerance < 0.0 {
        return Err(Error::InvalidParameter(format!(
            "target recall {} with tolerance {} is not meaningful",
            opts.target, opts.tolerance
        )));
    }
    let mut t = Tracker {
        work,
        k,
        opts,
        best: None,
        evaluations: 0,
    };
    match family {
        RuleFamily::Beam => tune_width(&mut t)?,
        RuleFamily::Adaptive => tune_gamma(&mut t, |gamma| TerminationRule::Adaptive { gamma })?,
        RuleFamily::AdaptiveV2 => {
            tune_gamma(&mut t, |gamma| TerminationRule::AdaptiveV2 { gamma })?
        }
        RuleFamily::Hybrid => {
            return Err(Error::InvalidParameter(
                "recall matching tunes a single parameter; hybrid has two".into(),
            ))
        }
    }
    Ok(t.finish())
}

fn tune_width(t: &mut Tracker<'_, '_>) -> Result<()> {
    let rule = |b| TerminationRule::Beam { b };
    let n = t.work.dataset.len();
    let target = t.opts.target;
    let mut lo = t.k;
    let (r, hit) = t.eval(rule(lo))?;
    if hit || r > target {
        return Ok(());
    }
    let mut hi = lo;
    loop {
        if hi == n {
            return Ok(());
        }
        hi = (hi * 2).min(n);
        let (r, hit) = t.eval(rule(hi))?;
        if hit {
            return Ok(());
        }
        if r > target {
            break;
        }
        lo = hi;
    }
    for _ in 0..t.opts.max_iterations {
        if hi - lo <= 1 {
            break;
        }
        let mid = lo + (hi - lo) / 2;
        let (r, hit) = t.eval(rule(mid))?;
        if hit {
            break;
        }
        if r < target {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    Ok(())
}

fn tune_gamma(t: &mut Tracker<'_, '_>, rule: impl Fn(f64) -> TerminationRule) -> Result<()> {
    let target = t.opts.target;
    let mut lo = 0.0;
    let (r, hit) = t.eval(rule(lo))?;
    if hit || r > target {
        return Ok(());
    }
    let mut hi = 0.25;
    let mut bracketed = false;
    for _ in 0..MAX_GAMMA_DOUBLINGS {
        let (r, hit) = t.eval(rule(hi))?;
        if hit {
            return Ok(());
        }
        if r > target {
            bracketed = true;
            break;
        }
        lo = hi;
        hi *= 2.0;
    }
    if !bracketed {
        return Ok(());
    }
    for _ in 0..t.opts.max_iterations {
        let mid = 0.5 * (lo + hi);
        let (r, hit) = t.eval(rule(mid))?;
        if hit {
            break;
        }
        if r < target {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    Ok(())
}
