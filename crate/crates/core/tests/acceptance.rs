//! Acceptance suite. Prints one PASS/FAIL line per criterion; tolerances and
//! time budgets are pinned below.

use std::collections::BTreeSet;
use std::time::{Duration, Instant};

use rayon::prelude::*;

use fairsum::cli::random_check_instances;
use fairsum::fairness::{analyze, is_proportional_fair, proportional_fair};
use fairsum::frontier::{pareto, UtilityVector};
use fairsum::instance::{gen_family, Family, FamilyParams};
use fairsum::oracle::{check_theorems, enumerate_all, oracle_frontier};
use fairsum::pof::{sweep_family, sweep_random, Criterion, FamilySweep, RandomSweep, SweepRow};
use fairsum::{gen_random, Instance, Kind, Rational};

const TABLE_BUDGET: Duration = Duration::from_millis(10);
const ORACLE_BUDGET: Duration = Duration::from_secs(60);
const SOUNDNESS_BUDGET: Duration = Duration::from_secs(300);
const TIGHTNESS_BUDGET: Duration = Duration::from_secs(30);
const THEOREM_BUDGET: Duration = Duration::from_secs(60);
const SEPARATE_DP_BUDGET: Duration = Duration::from_secs(1);
const SHARED_DP_BUDGET: Duration = Duration::from_secs(10);

const ORACLE_INSTANCES_PER_KIND: usize = 1000;
const SOUNDNESS_PER_CAP: usize = 1700;
const THEOREM_SEEDS: usize = 500;
/// Tightness tolerance is this many units of 1/D with D = 1/eps.
const TIGHTNESS_UNITS: i128 = 10;

/// Lines that fail for reasons recorded in the project notes; they are
/// printed as FAIL but do not change the exit status.
const KNOWN_UNATTAINABLE: [&str; 1] = ["5b"];

struct Outcome {
    id: &'static str,
    name: &'static str,
    pass: bool,
    detail: String,
}

fn uv(v: &[u64]) -> UtilityVector {
    UtilityVector(v.to_vec())
}

fn sep(c: u64, a: &[u64], b: &[u64]) -> Instance {
    Instance::new(Kind::Separate, c, 2, vec![a.to_vec(), b.to_vec()], "").unwrap()
}

fn within(elapsed: Duration, budget: Duration) -> bool {
    elapsed < budget
}

fn example_tables() -> Outcome {
    let mut pass = true;
    let mut notes = Vec::new();
    let cases = [
        (
            sep(400, &[400, 102, 100, 100], &[388, 100, 100, 96]),
            vec![uv(&[0, 388]), uv(&[102, 296]), uv(&[200, 200]), uv(&[202, 196]), uv(&[302, 96]), uv(&[400, 0])],
            uv(&[200, 200]),
            uv(&[202, 196]),
        ),
        (
            sep(100, &[100, 75, 52], &[23, 21, 0]),
            vec![uv(&[52, 44]), uv(&[75, 23]), uv(&[100, 0])],
            uv(&[52, 44]),
            uv(&[75, 23]),
        ),
    ];
    for (inst, rows, mm_pf, ks) in cases {
        let start = Instant::now();
        let f = pareto(&inst).unwrap();
        let r = analyze(&f).unwrap();
        let elapsed = start.elapsed();
        let ok = f.vector_list() == rows
            && r.mm.set == vec![mm_pf.clone()]
            && r.pf.vector.as_ref() == Some(&mm_pf)
            && r.ks.set == vec![ks.clone()]
            && within(elapsed, TABLE_BUDGET);
        pass &= ok;
        notes.push(format!("{} rows, MM=PF={mm_pf}, KS={ks} in {elapsed:?}", rows.len()));
    }
    Outcome { id: "1", name: "example table reproduction", pass, detail: notes.join("; ") }
}

fn oracle_equivalence() -> Outcome {
    let start = Instant::now();
    let mut mismatches = 0usize;
    let mut total = 0usize;
    for (kind, seed) in [(Kind::Separate, 11u64), (Kind::Shared, 12)] {
        let insts = random_check_instances(ORACLE_INSTANCES_PER_KIND, seed, 2, Some(kind), 12, 60).unwrap();
        total += insts.len();
        mismatches += insts
            .par_iter()
            .filter(|inst| {
                let dp: BTreeSet<UtilityVector> = pareto(inst).unwrap().vectors().cloned().collect();
                let oracle: BTreeSet<UtilityVector> = oracle_frontier(inst).unwrap().vectors().cloned().collect();
                let all = enumerate_all(inst).unwrap();
                let pf_all: Vec<&UtilityVector> = all.iter().filter(|x| is_proportional_fair(x, &all)).collect();
                let pf_front = proportional_fair(&pareto(inst).unwrap());
                dp != oracle || pf_all.len() > 1 || pf_front.as_ref() != pf_all.first().copied()
            })
            .count();
    }
    let elapsed = start.elapsed();
    Outcome {
        id: "2",
        name: "DP/oracle equivalence",
        pass: mismatches == 0 && within(elapsed, ORACLE_BUDGET),
        detail: format!("{total} instances (n <= 12, c <= 60), {mismatches} mismatches in {elapsed:?}"),
    }
}

fn bound_soundness() -> Outcome {
    let start = Instant::now();
    let caps: Vec<Rational> = [(1, 5), (1, 3), (1, 2), (2, 3), (9, 10), (1, 1)]
        .iter()
        .map(|&(n, d)| Rational::new(n, d))
        .collect();
    let workers = std::thread::available_parallelism().map_or(1, |n| n.get());
    let mut notes = Vec::new();
    let mut violations = 0;
    for (kind, seed) in [(Kind::Separate, 21u64), (Kind::Shared, 22)] {
        let spec = RandomSweep::new(caps.clone(), SOUNDNESS_PER_CAP, seed, kind);
        let rows = sweep_random(&spec, workers).unwrap();
        let bad = rows.iter().filter(|r| !r.record.within_bounds).count();
        violations += bad;
        let count = |c: Criterion| rows.iter().filter(|r| r.record.criterion == c).count();
        notes.push(format!(
            "{kind}: {} instances, MM {} / KS {} / PF {} records, {bad} violations",
            caps.len() * SOUNDNESS_PER_CAP,
            count(Criterion::Mm),
            count(Criterion::Ks),
            count(Criterion::Pf)
        ));
    }
    let elapsed = start.elapsed();
    Outcome {
        id: "3",
        name: "bound soundness",
        pass: violations == 0 && within(elapsed, SOUNDNESS_BUDGET),
        detail: format!("{} in {elapsed:?}", notes.join("; ")),
    }
}

fn eps_schedule() -> Vec<Rational> {
    vec![Rational::new(1, 10), Rational::new(1, 100), Rational::new(1, 1000)]
}

fn tightness() -> Outcome {
    let start = Instant::now();
    let r = Rational::new;
    let cases: Vec<(FamilySweep, Vec<Criterion>)> = vec![
        (
            FamilySweep {
                family: Family::SepLargeAlpha,
                base: FamilyParams::default(),
                alpha_grid: vec![r(3, 4), r(9, 10)],
                eps_schedule: eps_schedule(),
                int_lists: vec![],
            },
            vec![Criterion::Mm, Criterion::Ks],
        ),
        (
            FamilySweep {
                family: Family::SepRBlocks,
                base: FamilyParams::default(),
                alpha_grid: vec![],
                eps_schedule: vec![r(1, 10), r(1, 100), r(1, 1000)]
                    .into_iter()
                    .filter(|e| *e <= r(1, 4))
                    .collect(),
                int_lists: vec![("r".into(), vec![2])],
            },
            vec![Criterion::Mm, Criterion::Ks],
        ),
        (
            FamilySweep {
                family: Family::SharedLargeAlpha,
                base: FamilyParams::default(),
                alpha_grid: vec![r(3, 4)],
                eps_schedule: eps_schedule(),
                int_lists: vec![],
            },
            vec![Criterion::Mm],
        ),
        (
            FamilySweep {
                family: Family::SharedOddBlocks,
                base: FamilyParams::default(),
                alpha_grid: vec![],
                eps_schedule: eps_schedule(),
                int_lists: vec![("h".into(), vec![1, 2, 3])],
            },
            vec![Criterion::Mm],
        ),
        (
            FamilySweep {
                family: Family::PfTightK,
                base: FamilyParams::default(),
                alpha_grid: vec![],
                eps_schedule: eps_schedule(),
                int_lists: vec![("k".into(), vec![2, 3, 4])],
            },
            vec![Criterion::Pf],
        ),
    ];
    let workers = std::thread::available_parallelism().map_or(1, |n| n.get());
    let mut checked = 0;
    let mut failures = Vec::new();
    let mut worst: Option<(Rational, String)> = None;
    for (spec, criteria) in cases {
        let rows: Vec<SweepRow> = sweep_family(&spec, workers).unwrap();
        for c in criteria {
            let expected = spec.expand().unwrap().len();
            let selected: Vec<&SweepRow> = rows.iter().filter(|x| x.record.criterion == c).collect();
            if selected.len() != expected {
                failures.push(format!("{} {c}: {} of {expected} records", spec.family.id(), selected.len()));
            }
            for row in selected {
                checked += 1;
                let limit = row.limit.expect("family has a limit");
                let eps = row.eps.expect("sweep sets eps");
                let gap = (limit - row.record.pof).abs();
                let tol = Rational::from_int(TIGHTNESS_UNITS) * eps;
                if gap > tol {
                    failures.push(format!("{} {c}: pof {} limit {limit} gap {gap} > {tol}", row.record.label, row.record.pof));
                }
                // relative to the tolerance, so records from different eps compare
                let share = gap / tol;
                if worst.as_ref().is_none_or(|(w, _)| share > *w) {
                    worst = Some((share, format!("{} {c} gap {gap}", row.record.label)));
                }
            }
        }
    }
    let elapsed = start.elapsed();
    let (share, at) = worst.unwrap();
    Outcome {
        id: "4",
        name: "tightness limits",
        pass: failures.is_empty() && within(elapsed, TIGHTNESS_BUDGET),
        detail: format!(
            "{checked} records within {TIGHTNESS_UNITS}*eps of their limits, largest gap {} of tolerance ({at}) in {elapsed:?}{}",
            share,
            if failures.is_empty() { String::new() } else { format!("; failures: {}", failures.join("; ")) }
        ),
    }
}

fn theorem_suite() -> Outcome {
    let start = Instant::now();
    let mut notes = Vec::new();
    let mut failures = 0;
    let mut pf_found = 0;
    for (k, seed, n_max) in [(2usize, 31u64, 10usize), (3, 32, 7)] {
        let insts = random_check_instances(THEOREM_SEEDS, seed, k, None, n_max, 60).unwrap();
        let reports: Vec<_> = insts.par_iter().map(|i| check_theorems(i).unwrap()).collect();
        failures += reports.iter().filter(|r| !r.all_hold()).count();
        let with_pf = reports.iter().filter(|r| r.pf.is_some()).count();
        pf_found += with_pf;
        notes.push(format!("k={k}: {} instances, {with_pf} with PF", reports.len()));
    }
    let elapsed = start.elapsed();
    Outcome {
        id: "5",
        name: "general theorem properties",
        pass: failures == 0 && pf_found > 0 && within(elapsed, THEOREM_BUDGET),
        detail: format!("{}; {failures} violations in {elapsed:?}", notes.join(", ")),
    }
}

fn k3_published_example() -> Outcome {
    let p = FamilyParams::parse("D=1000,eps=3/1000").unwrap();
    let inst = gen_family("k3-mm-beats-pf", &p).unwrap();
    let r = check_theorems(&inst).unwrap();
    let pass = r.pf_total == Some(989) && r.mm_total == 992;
    let detail = format!(
        "expected total(PF)=989 < total(MM)=992; got PF {} and MM total {}; (203,503,283) is dominated by feasible (206,503,283)",
        match &r.pf {
            Some(x) => format!("{x} total {}", x.total()),
            None => "absent".to_string(),
        },
        r.mm_total
    );
    Outcome { id: "5b", name: "published k=3 example totals", pass, detail }
}

fn k3_dominance_failure() -> Outcome {
    let inst = Instance::new(Kind::Separate, 98, 3, vec![vec![7, 20], vec![2, 17], vec![6, 53]], "k3").unwrap();
    let r = check_theorems(&inst).unwrap();
    let pass = r.all_hold()
        && r.pf.as_ref() == Some(&uv(&[27, 17, 53]))
        && r.pf_total == Some(97)
        && r.mm_total == 98
        && r.mm.iter().all(|m| m.total() > 97);
    Outcome {
        id: "5c",
        name: "k=3 instance with total(PF) < total(MM)",
        pass,
        detail: format!("PF {:?} total {:?}, MM {:?} total {}", r.pf, r.pf_total, r.mm, r.mm_total),
    }
}

fn performance() -> Outcome {
    let sep = gen_random(1000, 100_000, Rational::ONE, Kind::Separate, 2, 61).unwrap();
    let start = Instant::now();
    let f = pareto(&sep).unwrap();
    let t_sep = start.elapsed();
    let shared = gen_random(200, 2000, Rational::ONE, Kind::Shared, 2, 62).unwrap();
    let start = Instant::now();
    let g = pareto(&shared).unwrap();
    let t_shared = start.elapsed();
    // both frontiers are non-empty and witnesses check out
    let sound = [&f, &g].iter().all(|fr| {
        !fr.is_empty() && fr.entries().iter().all(|e| e.witness.utilities(fr.instance()).unwrap() == e.utilities)
    });
    Outcome {
        id: "6",
        name: "DP performance",
        pass: sound && within(t_sep, SEPARATE_DP_BUDGET) && within(t_shared, SHARED_DP_BUDGET),
        detail: format!(
            "separate n=1000 c=100000: {t_sep:?} ({} entries); shared n=200 c=2000: {t_shared:?} ({} entries)",
            f.len(),
            g.len()
        ),
    }
}

fn main() {
    let outcomes = vec![
        example_tables(),
        oracle_equivalence(),
        bound_soundness(),
        tightness(),
        theorem_suite(),
        k3_published_example(),
        k3_dominance_failure(),
        performance(),
    ];
    let mut unexpected = 0;
    for o in &outcomes {
        let status = if o.pass { "PASS" } else { "FAIL" };
        let known = !o.pass && KNOWN_UNATTAINABLE.contains(&o.id);
        if !o.pass && !known {
            unexpected += 1;
        }
        let tag = if known { " (known unattainable)" } else { "" };
        println!("{status} [{}] {}{tag}: {}", o.id, o.name, o.detail);
    }
    let passed = outcomes.iter().filter(|o| o.pass).count();
    println!("acceptance: {passed}/{} passed, {unexpected} unexpected failures", outcomes.len());
    if unexpected > 0 {
        std::process::exit(1);
    }
}
