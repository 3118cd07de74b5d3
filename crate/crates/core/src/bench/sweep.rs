use std::fmt;
use std::str::FromStr;

use super::{run_queries, BatchReport, Workload};
use crate::error::{Error, Result};
use crate::search::TerminationRule;

/// Parameterized rule families that can be swept.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum RuleFamily {
    Beam,
    Adaptive,
    AdaptiveV2,
    Hybrid,
}

impl RuleFamily {
    pub fn name(self) -> &'static str {
        match self {
            RuleFamily::Beam => "beam",
            RuleFamily::Adaptive => "adaptive",
            RuleFamily::AdaptiveV2 => "adaptive-v2",
            RuleFamily::Hybrid => "hybrid",
        }
    }

    /// The rule for one grid entry; fails if the parameter kind does not fit.
    pub fn rule(self, param: Param) -> Result<TerminationRule> {
        match (self, param) {
            (RuleFamily::Beam, Param::Width(b)) => Ok(TerminationRule::Beam { b }),
            (RuleFamily::Adaptive, Param::Gamma(gamma)) => Ok(TerminationRule::Adaptive { gamma }),
            (RuleFamily::AdaptiveV2, Param::Gamma(gamma)) => {
                Ok(TerminationRule::AdaptiveV2 { gamma })
            }
            (RuleFamily::Hybrid, Param::WidthGamma(b, gamma)) => {
                Ok(TerminationRule::Hybrid { b, gamma })
            }
            _ => Err(Error::InvalidParameter(format!(
                "parameter {param} does not fit rule family {}",
                self.name()
            ))),
        }
    }

    /// Parses one grid entry in this family's notation: `b`, `gamma`, or `b:gamma`.
    pub fn parse_param(self, s: &str) -> Result<Param> {
        let bad = || {
            Error::InvalidParameter(format!("cannot parse {s:?} as a {} parameter", self.name()))
        };
        let s = s.trim();
        match self {
            RuleFamily::Beam => s.parse().map(Param::Width).map_err(|_| bad()),
            RuleFamily::Adaptive | RuleFamily::AdaptiveV2 => {
                s.parse().map(Param::Gamma).map_err(|_| bad())
            }
            RuleFamily::Hybrid => {
                let (b, g) = s.split_once(':').ok_or_else(bad)?;
                Ok(Param::WidthGamma(
                    b.trim().parse().map_err(|_| bad())?,
                    g.trim().parse().map_err(|_| bad())?,
                ))
            }
        }
    }

    /// Parses a comma-separated grid.
    pub fn parse_grid(self, s: &str) -> Result<Vec<Param>> {
        s.split(',').map(|p| self.parse_param(p)).collect()
    }
}

impl FromStr for RuleFamily {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "beam" => Ok(RuleFamily::Beam),
            "adaptive" => Ok(RuleFamily::Adaptive),
            "adaptive-v2" => Ok(RuleFamily::AdaptiveV2),
            "hybrid" => Ok(RuleFamily::Hybrid),
            other => Err(Error::InvalidParameter(format!(
                "unknown rule family {other:?}"
            ))),
        }
    }
}

/// One grid entry.
#[derive(Clone, Copy, Debug, PartialEq)]
pub enum Param {
    Width(usize),
    Gamma(f64),
    WidthGamma(usize, f64),
}

impl fmt::Display for Param {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Param::Width(b) => write!(f, "{b}"),
            Param::Gamma(g) => write!(f, "{g}"),
            Param::WidthGamma(b, g) => write!(f, "{b}:{g}"),
        }
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct SweepSpec {
    pub family: RuleFamily,
    pub grid: Vec<Param>,
    pub k: usize,
}

impl SweepSpec {
    pub fn new(family: RuleFamily, grid: Vec<Param>, k: usize) -> Result<Self> {
        if grid.is_empty() {
            return Err(Error::InvalidParameter("sweep grid is empty".into()));
        }
        for &p in &grid {
            family.rule(p)?.validate(k)?;
        }
        Ok(Self { family, grid, k })
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct CurvePoint {
    pub param: Param,
    pub recall: f64,
    pub mean_distance_computations: f64,
    pub num_queries: usize,
}

impl CurvePoint {
    fn from_report(param: Param, report: &BatchReport) -> Self {
        Self {
            param,
            recall: report.mean_recall,
            mean_distance_computations: report.mean_distance_computations,
            num_queries: report.per_query.len(),
        }
    }
}

/// Recall against cost, one point per grid entry in grid order.
#[derive(Clone, Debug, PartialEq)]
pub struct TradeoffCurve {
    pub family: RuleFamily,
    pub k: usize,
    pub points: Vec<CurvePoint>,
}

pub fn sweep(spec: &SweepSpec, work: &Workload<'_>) -> Result<TradeoffCurve> {
    let points = spec
        .grid
        .iter()
        .map(|&p| {
            let report = run_queries(work, spec.family.rule(p)?, spec.k)?;
            Ok(CurvePoint::from_report(p, &report))
        })
        .collect::<Result<_>>()?;
    Ok(TradeoffCurve {
        family: spec.family,
        k: spec.k,
        points,
    })
}
