//! Price of Fairness per instance, bound curves and sweeps.

mod bounds;
mod sweep;

pub use bounds::{
    bertsimas_bound, bertsimas_enclosure, bound_efficient, bound_ks_separate, bound_ks_shared,
    bound_mm_separate, bound_mm_shared, bound_pf_general, bound_pf_separate, bound_pf_shared,
    gap_ratio, sqrt_enclosure, BoundCurve,
};
pub use sweep::{
    analytic_limit, in_pool, resolve_workers, sweep_family, sweep_random, write_sweep_csv,
    FamilySweep, RandomSweep, SweepRow, CSV_HEADER, WORKERS_ENV,
};

use std::fmt;
use std::str::FromStr;

use serde::Serialize;

use crate::error::{Error, Result};
use crate::fairness::{analyze, FairnessReport};
use crate::frontier::{pareto, ParetoFrontier};
use crate::oracle::oracle_frontier;
use crate::instance::{alpha_of, Instance, Kind};
use crate::rational::Rational;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize)]
pub enum Criterion {
    #[serde(rename = "MM")]
    Mm,
    #[serde(rename = "KS")]
    Ks,
    #[serde(rename = "PF")]
    Pf,
}

impl Criterion {
    pub const ALL: [Criterion; 3] = [Criterion::Mm, Criterion::Ks, Criterion::Pf];

    pub fn as_str(&self) -> &'static str {
        match self {
            Criterion::Mm => "MM",
            Criterion::Ks => "KS",
            Criterion::Pf => "PF",
        }
    }
}

impl fmt::Display for Criterion {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for Criterion {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.to_ascii_lowercase().as_str() {
            "mm" => Ok(Criterion::Mm),
            "ks" => Ok(Criterion::Ks),
            "pf" => Ok(Criterion::Pf),
            _ => Err(Error::Parse(format!("unknown criterion {s:?}"))),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct PofRecord {
    pub label: String,
    pub scenario: Kind,
    pub criterion: Criterion,
    pub agents: usize,
    pub alpha: Rational,
    pub zstar: u64,
    pub zfair: u64,
    pub pof: Rational,
    pub bound_lower: Rational,
    pub bound_upper: Rational,
    pub within_bounds: bool,
}

/// `(z* - z_fair) / z*`.
pub fn pof_value(zstar: u64, zfair: u64) -> Result<Rational> {
    if zstar == 0 {
        return Err(Error::ZeroOptimum);
    }
    Ok(Rational::new(zstar as i128 - zfair as i128, zstar as i128))
}

/// Record for one criterion of an analyzed instance; `None` when the
/// criterion is PF and no proportional fair solution exists.
pub fn pof_from_report(
    inst: &Instance,
    report: &FairnessReport,
    criterion: Criterion,
) -> Result<Option<PofRecord>> {
    let zfair = match criterion {
        Criterion::Mm => report.mm.representative.total(),
        Criterion::Ks => report.ks.representative.total(),
        Criterion::Pf => match &report.pf.vector {
            Some(x) => x.total(),
            None => return Ok(None),
        },
    };
    let pof = pof_value(report.zstar, zfair)?;
    let alpha = alpha_of(inst)?;
    let (bound_lower, bound_upper) =
        BoundCurve::new(inst.kind(), criterion, inst.agent_count()).eval(alpha)?;
    Ok(Some(PofRecord {
        label: inst.label().to_string(),
        scenario: inst.kind(),
        criterion,
        agents: inst.agent_count(),
        alpha,
        zstar: report.zstar,
        zfair,
        pof,
        bound_lower,
        bound_upper,
        within_bounds: pof <= bound_upper,
    }))
}

/// Dynamic program for two agents, exhaustive enumeration beyond.
pub fn solve_frontier(inst: &Instance) -> Result<ParetoFrontier> {
    if inst.agent_count() == 2 {
        pareto(inst)
    } else {
        oracle_frontier(inst)
    }
}

/// Solves the instance and returns the PoF record for `criterion`.
pub fn pof_of(inst: &Instance, criterion: Criterion) -> Result<Option<PofRecord>> {
    let frontier = solve_frontier(inst)?;
    let report = analyze(&frontier)?;
    pof_from_report(inst, &report, criterion)
}

/// Records for every criterion that has a solution.
pub fn pof_all(inst: &Instance) -> Result<Vec<PofRecord>> {
    let frontier = solve_frontier(inst)?;
    let report = analyze(&frontier)?;
    let mut out = Vec::new();
    for c in Criterion::ALL {
        out.extend(pof_from_report(inst, &report, c)?);
    }
    Ok(out)
}
