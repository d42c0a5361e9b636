//! Family and random-batch sweeps producing PoF records.

use std::io::Write;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;

use super::{pof_all, Criterion, PofRecord};
use crate::error::{Error, Result};
use crate::instance::{gen_family, gen_random, Family, FamilyParams, Kind};
use crate::rational::Rational;

/// Environment variable overriding the default worker count.
pub const WORKERS_ENV: &str = "FAIRSUM_WORKERS";

/// Explicit count, else `FAIRSUM_WORKERS`, else available parallelism.
pub fn resolve_workers(explicit: Option<usize>) -> Result<usize> {
    if let Some(n) = explicit {
        return if n == 0 {
            Err(Error::Parse("worker count must be positive".into()))
        } else {
            Ok(n)
        };
    }
    if let Ok(v) = std::env::var(WORKERS_ENV) {
        return match v.trim().parse::<usize>() {
            Ok(n) if n > 0 => Ok(n),
            _ => Err(Error::Parse(format!("{WORKERS_ENV} must be a positive integer, got {v:?}"))),
        };
    }
    Ok(std::thread::available_parallelism().map_or(1, |n| n.get()))
}

/// Runs `f` on a dedicated pool of `workers` threads.
pub fn in_pool<T: Send>(workers: usize, f: impl FnOnce() -> T + Send) -> Result<T> {
    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(workers)
        .build()
        .map_err(|e| Error::Io(e.to_string()))?;
    Ok(pool.install(f))
}

/// One PoF record plus the sweep context that stays out of the CSV.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SweepRow {
    pub record: PofRecord,
    pub scale: u64,
    pub eps: Option<Rational>,
    /// Value the family's PoF tends to as eps shrinks, if known.
    pub limit: Option<Rational>,
}

/// Limit of the PoF of `family` for `criterion` as eps -> 0.
pub fn analytic_limit(family: Family, p: &FamilyParams, criterion: Criterion) -> Option<Rational> {
    let two = Rational::from_int(2);
    match (family, criterion) {
        (Family::SepTwoSolutions, Criterion::Mm | Criterion::Ks) => Some(Rational::ONE),
        (Family::SepLargeAlpha, Criterion::Mm | Criterion::Ks) => p.alpha.map(|a| two - a.recip()),
        (Family::SepRBlocks, Criterion::Mm | Criterion::Ks) => p.r.map(|r| Rational::new(1, r)),
        (Family::SharedLargeAlpha, Criterion::Mm | Criterion::Ks) => p.alpha.map(|a| two * a - Rational::ONE),
        (Family::SharedOddBlocks, Criterion::Mm | Criterion::Ks) => p.h.map(|h| Rational::new(1, 2 * h + 1)),
        (Family::PfTightK, Criterion::Pf) => p.k.map(|k| Rational::new(k - 1, k)),
        _ => None,
    }
}

/// Worst-case family sweep over an alpha grid, integer parameter lists and
/// an eps schedule. Each instance uses the smallest integral scale.
#[derive(Debug, Clone)]
pub struct FamilySweep {
    pub family: Family,
    pub base: FamilyParams,
    pub alpha_grid: Vec<Rational>,
    pub eps_schedule: Vec<Rational>,
    /// Integer parameters (`r`, `h`, `k`) with the values to sweep.
    pub int_lists: Vec<(String, Vec<i128>)>,
}

fn uses_alpha(f: Family) -> bool {
    matches!(f, Family::SepLargeAlpha | Family::SharedLargeAlpha)
}

impl FamilySweep {
    /// Parameter sets in sweep order: alpha, then integer lists, then eps.
    pub fn expand(&self) -> Result<Vec<FamilyParams>> {
        let alphas: Vec<Option<Rational>> = if uses_alpha(self.family) {
            if self.alpha_grid.is_empty() {
                match self.base.alpha {
                    Some(a) => vec![Some(a)],
                    None => return Err(Error::EmptyGrid),
                }
            } else {
                self.alpha_grid.iter().copied().map(Some).collect()
            }
        } else if self.alpha_grid.is_empty() {
            vec![None]
        } else {
            return Err(Error::FamilyParams(format!("{} takes no alpha", self.family.id())));
        };
        for a in self.alpha_grid.iter() {
            if !a.is_positive() || *a > Rational::ONE {
                return Err(Error::AlphaOutOfRange(a.to_string()));
            }
        }
        if self.eps_schedule.iter().any(|e| !e.is_positive()) {
            return Err(Error::FamilyParams("eps values must be positive".into()));
        }
        if self.eps_schedule.windows(2).any(|w| w[1] >= w[0]) {
            return Err(Error::FamilyParams("eps schedule must be decreasing".into()));
        }
        let eps: Vec<Option<Rational>> = if self.eps_schedule.is_empty() {
            vec![self.base.eps]
        } else {
            self.eps_schedule.iter().copied().map(Some).collect()
        };
        let mut combos: Vec<Vec<(String, i128)>> = vec![Vec::new()];
        for (name, values) in &self.int_lists {
            if values.is_empty() {
                return Err(Error::EmptyGrid);
            }
            combos = combos
                .into_iter()
                .flat_map(|c| {
                    values.iter().map(move |&v| {
                        let mut c = c.clone();
                        c.push((name.clone(), v));
                        c
                    })
                })
                .collect();
        }
        let mut out = Vec::new();
        for a in &alphas {
            for combo in &combos {
                for e in &eps {
                    let mut p = self.base.clone();
                    if a.is_some() {
                        p.alpha = *a;
                    }
                    for (name, v) in combo {
                        p.set(name, &v.to_string())?;
                    }
                    p.eps = *e;
                    if self.family == Family::SepLargeAlpha && p.eps2.is_none() && p.scale.is_none() {
                        // second small item of order eps^2, so it vanishes at the minimal scale
                        if let Some(e) = p.eps {
                            let d = self.family.min_scale(&p)?;
                            let units = (e * e * Rational::from_int(d)).round();
                            p.eps2 = Some(Rational::new(units, d));
                        }
                    }
                    out.push(p);
                }
            }
        }
        Ok(out)
    }
}

fn rows_for(family: Family, p: &FamilyParams) -> Result<Vec<SweepRow>> {
    let inst = gen_family(family.id(), p)?;
    let eps = p.eps.or_else(|| Some(Rational::new(1, inst.capacity() as i128)));
    Ok(pof_all(&inst)?
        .into_iter()
        .map(|record| SweepRow {
            limit: analytic_limit(family, p, record.criterion),
            scale: inst.capacity(),
            eps,
            record,
        })
        .collect())
}

/// Solves every instance of the sweep on `workers` threads; rows come out
/// in sweep order whatever the worker count.
pub fn sweep_family(spec: &FamilySweep, workers: usize) -> Result<Vec<SweepRow>> {
    let params = spec.expand()?;
    let family = spec.family;
    let chunks: Vec<Result<Vec<SweepRow>>> =
        in_pool(workers, || params.par_iter().map(|p| rows_for(family, p)).collect())?;
    let mut out = Vec::new();
    for c in chunks {
        out.extend(c?);
    }
    Ok(out)
}

/// Random batch: `count` instances per alpha cap.
#[derive(Debug, Clone)]
pub struct RandomSweep {
    pub alpha_caps: Vec<Rational>,
    pub count: usize,
    pub seed: u64,
    pub kind: Kind,
    pub agents: usize,
    /// Inclusive range for items per list.
    pub n_range: (usize, usize),
    /// Inclusive capacity range.
    pub c_range: (u64, u64),
}

impl RandomSweep {
    pub fn new(alpha_caps: Vec<Rational>, count: usize, seed: u64, kind: Kind) -> Self {
        RandomSweep { alpha_caps, count, seed, kind, agents: 2, n_range: (2, 12), c_range: (20, 200) }
    }

    /// `(cap, n, c, seed)` per instance, drawn up front so the result does
    /// not depend on scheduling.
    pub fn jobs(&self) -> Result<Vec<(Rational, usize, u64, u64)>> {
        if self.alpha_caps.is_empty() {
            return Err(Error::EmptyGrid);
        }
        let (nl, nh) = self.n_range;
        let (cl, ch) = self.c_range;
        if nl == 0 || nl > nh || cl == 0 || cl > ch {
            return Err(Error::InvalidInstance("empty size range".into()));
        }
        let mut rng = ChaCha8Rng::seed_from_u64(self.seed);
        let mut jobs = Vec::with_capacity(self.alpha_caps.len() * self.count);
        for &cap in &self.alpha_caps {
            for _ in 0..self.count {
                let n = rng.gen_range(nl..=nh);
                let c = rng.gen_range(cl..=ch);
                // smallest capacity with at least one positive weight
                let c = c.max(cap.recip().ceil() as u64);
                jobs.push((cap, n, c, rng.gen()));
            }
        }
        Ok(jobs)
    }
}

pub fn sweep_random(spec: &RandomSweep, workers: usize) -> Result<Vec<SweepRow>> {
    let jobs = spec.jobs()?;
    let run = |&(cap, n, c, seed): &(Rational, usize, u64, u64)| -> Result<Vec<SweepRow>> {
        let inst = gen_random(n, c, cap, spec.kind, spec.agents, seed)?;
        let label = format!("random:{}:n={n}:c={c}:cap={cap}:seed={seed}", spec.kind);
        let inst = inst.with_label(label);
        Ok(pof_all(&inst)?
            .into_iter()
            .map(|record| SweepRow { record, scale: c, eps: None, limit: None })
            .collect())
    };
    let chunks: Vec<Result<Vec<SweepRow>>> = in_pool(workers, || jobs.par_iter().map(run).collect())?;
    let mut out = Vec::new();
    for c in chunks {
        out.extend(c?);
    }
    Ok(out)
}

pub const CSV_HEADER: [&str; 14] = [
    "label", "scenario", "criterion", "alpha_num", "alpha_den", "zstar", "zfair", "pof_num",
    "pof_den", "lb_num", "lb_den", "ub_num", "ub_den", "within",
];

/// Writes the sweep CSV, header first.
pub fn write_sweep_csv<W: Write>(rows: &[SweepRow], out: W) -> Result<()> {
    let mut w = csv::Writer::from_writer(out);
    w.write_record(CSV_HEADER)?;
    for row in rows {
        let r = &row.record;
        w.write_record([
            r.label.clone(),
            r.scenario.to_string(),
            r.criterion.to_string(),
            r.alpha.numer().to_string(),
            r.alpha.denom().to_string(),
            r.zstar.to_string(),
            r.zfair.to_string(),
            r.pof.numer().to_string(),
            r.pof.denom().to_string(),
            r.bound_lower.numer().to_string(),
            r.bound_lower.denom().to_string(),
            r.bound_upper.numer().to_string(),
            r.bound_upper.denom().to_string(),
            r.within_bounds.to_string(),
        ])?;
    }
    w.flush()?;
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;

    fn r(n: i128, d: i128) -> Rational {
        Rational::new(n, d)
    }

    fn eps3() -> Vec<Rational> {
        vec![r(1, 10), r(1, 100), r(1, 1000)]
    }

    #[test]
    fn sep_large_alpha_increases_toward_limit() {
        let spec = FamilySweep {
            family: Family::SepLargeAlpha,
            base: FamilyParams::default(),
            alpha_grid: vec![r(3, 4)],
            eps_schedule: eps3(),
            int_lists: vec![],
        };
        let rows = sweep_family(&spec, 2).unwrap();
        let mm: Vec<&SweepRow> = rows.iter().filter(|x| x.record.criterion == Criterion::Mm).collect();
        assert_eq!(mm.len(), 3);
        for w in mm.windows(2) {
            assert!(w[0].record.pof < w[1].record.pof);
        }
        for row in &mm {
            assert_eq!(row.limit, Some(r(2, 3)));
            assert!(row.record.pof <= r(2, 3));
            assert!(r(2, 3) - row.record.pof <= r(10, 1) * row.eps.unwrap());
        }
    }

    #[test]
    fn shared_odd_blocks_pattern() {
        let spec = FamilySweep {
            family: Family::SharedOddBlocks,
            base: FamilyParams::default(),
            alpha_grid: vec![],
            eps_schedule: vec![r(1, 100)],
            int_lists: vec![("h".into(), vec![1, 2, 3])],
        };
        let rows = sweep_family(&spec, 1).unwrap();
        let mm: Vec<&SweepRow> = rows.iter().filter(|x| x.record.criterion == Criterion::Mm).collect();
        let limits: Vec<Rational> = mm.iter().map(|x| x.limit.unwrap()).collect();
        assert_eq!(limits, vec![r(1, 3), r(1, 5), r(1, 7)]);
        for row in mm {
            assert!(row.record.within_bounds);
            assert!(row.limit.unwrap() - row.record.pof <= r(10, 1) * row.eps.unwrap());
        }
    }

    #[test]
    fn identical_across_worker_counts() {
        let spec = RandomSweep::new(vec![r(1, 2), Rational::ONE], 40, 9, Kind::Separate);
        let a = sweep_random(&spec, 1).unwrap();
        let b = sweep_random(&spec, 4).unwrap();
        assert_eq!(a, b);
        assert!(a.iter().all(|x| x.record.within_bounds));
        let mut x = Vec::new();
        let mut y = Vec::new();
        write_sweep_csv(&a, &mut x).unwrap();
        write_sweep_csv(&b, &mut y).unwrap();
        assert_eq!(x, y);
        let text = String::from_utf8(x).unwrap();
        assert!(text.starts_with("label,scenario,criterion,alpha_num,alpha_den,zstar,zfair,pof_num,pof_den,lb_num,lb_den,ub_num,ub_den,within\n"));
    }

    #[test]
    fn grid_errors() {
        let mut spec = FamilySweep {
            family: Family::SepLargeAlpha,
            base: FamilyParams::default(),
            alpha_grid: vec![],
            eps_schedule: eps3(),
            int_lists: vec![],
        };
        assert_eq!(spec.expand().unwrap_err(), Error::EmptyGrid);
        spec.alpha_grid = vec![r(3, 4)];
        spec.eps_schedule = vec![r(1, 100), r(1, 10)];
        assert!(spec.expand().is_err());
        let spec = RandomSweep::new(vec![], 3, 0, Kind::Shared);
        assert_eq!(spec.jobs().unwrap_err(), Error::EmptyGrid);
    }

    #[test]
    fn worker_resolution() {
        assert_eq!(resolve_workers(Some(3)).unwrap(), 3);
        assert!(resolve_workers(Some(0)).is_err());
    }
}
