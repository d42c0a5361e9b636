//! Brute-force enumeration of every feasible utility vector for small
//! instances with any number of agents, and executable checks of the
//! general proportional fairness results against that ground truth.

use std::collections::{BTreeSet, HashMap};
use std::sync::Arc;

use serde::Serialize;

use crate::error::{Error, Result};
use crate::fairness::{
    is_proportional_fair, maximin_of, nash_max_of, pf_condition, proportional_fair_exhaustive_of,
    proportional_fair_of, system_optimum_of,
};
use crate::frontier::{Allocation, FrontierEntry, ParetoFrontier, UtilityVector};
use crate::instance::{emit_instance, Instance, Kind};
use crate::pof::{bound_pf_general, pof_value};
use crate::rational::Rational;

/// Assignment states allowed per enumeration.
pub const SIZE_GUARD: u128 = 1 << 24;

/// Separate instances are also capped on the number of combined vectors.
const PRODUCT_GUARD: u128 = 1 << 26;

fn enumeration_size(inst: &Instance) -> u128 {
    match inst.kind() {
        Kind::Separate => inst
            .items()
            .iter()
            .map(|l| if l.len() >= 100 { u128::MAX } else { 1u128 << l.len() })
            .fold(0u128, u128::saturating_add),
        Kind::Shared => {
            let base = inst.agent_count() as u128 + 1;
            (0..inst.item_count()).fold(1u128, |acc, _| acc.saturating_mul(base))
        }
    }
}

fn guard(inst: &Instance) -> Result<()> {
    let size = enumeration_size(inst);
    if size > SIZE_GUARD {
        return Err(Error::SizeGuard(size));
    }
    Ok(())
}

/// Distinct feasible vectors, each with the first allocation found.
fn enumerate_with_witness(inst: &Instance) -> Result<HashMap<UtilityVector, Allocation>> {
    guard(inst)?;
    match inst.kind() {
        Kind::Separate => enumerate_separate(inst),
        Kind::Shared => Ok(enumerate_shared(inst)),
    }
}

fn enumerate_separate(inst: &Instance) -> Result<HashMap<UtilityVector, Allocation>> {
    let c = inst.capacity();
    // per agent: distinct subset sums <= c, each with one subset
    let per_agent: Vec<Vec<(u64, Vec<usize>)>> = inst
        .items()
        .iter()
        .map(|list| {
            let mut seen: HashMap<u64, u64> = HashMap::new();
            for mask in 0u64..(1u64 << list.len()) {
                let sum: u64 = (0..list.len()).filter(|i| mask >> i & 1 == 1).map(|i| list[i]).sum();
                if sum <= c {
                    seen.entry(sum).or_insert(mask);
                }
            }
            let mut sums: Vec<(u64, Vec<usize>)> = seen
                .into_iter()
                .map(|(s, m)| (s, (0..list.len()).filter(|i| m >> i & 1 == 1).collect()))
                .collect();
            sums.sort();
            sums
        })
        .collect();
    let combos = per_agent.iter().fold(1u128, |a, s| a.saturating_mul(s.len() as u128));
    if combos > PRODUCT_GUARD {
        return Err(Error::SizeGuard(combos));
    }
    let mut out = HashMap::new();
    let k = per_agent.len();
    let mut pick = vec![0usize; k];
    let mut load = 0u64;
    fn rec(
        j: usize,
        per_agent: &[Vec<(u64, Vec<usize>)>],
        pick: &mut Vec<usize>,
        load: &mut u64,
        c: u64,
        out: &mut HashMap<UtilityVector, Allocation>,
    ) {
        if j == per_agent.len() {
            let u = UtilityVector(pick.iter().zip(per_agent).map(|(&p, s)| s[p].0).collect());
            let w = Allocation(pick.iter().zip(per_agent).map(|(&p, s)| s[p].1.clone()).collect());
            out.entry(u).or_insert(w);
            return;
        }
        for (p, (s, _)) in per_agent[j].iter().enumerate() {
            // sums are ascending, so nothing further fits
            if *load + s > c {
                break;
            }
            pick[j] = p;
            *load += s;
            rec(j + 1, per_agent, pick, load, c, out);
            *load -= s;
        }
    }
    rec(0, &per_agent, &mut pick, &mut load, c, &mut out);
    Ok(out)
}

fn enumerate_shared(inst: &Instance) -> HashMap<UtilityVector, Allocation> {
    let weights = &inst.items()[0];
    let k = inst.agent_count();
    let c = inst.capacity();
    let mut out = HashMap::new();
    let mut owner: Vec<Option<usize>> = vec![None; weights.len()];
    let mut util = vec![0u64; k];
    fn rec(
        i: usize,
        weights: &[u64],
        c: u64,
        load: u64,
        owner: &mut Vec<Option<usize>>,
        util: &mut Vec<u64>,
        out: &mut HashMap<UtilityVector, Allocation>,
    ) {
        if i == weights.len() {
            let u = UtilityVector(util.clone());
            out.entry(u).or_insert_with(|| {
                let mut sets = vec![Vec::new(); util.len()];
                for (item, o) in owner.iter().enumerate() {
                    if let Some(j) = o {
                        sets[*j].push(item);
                    }
                }
                Allocation(sets)
            });
            return;
        }
        owner[i] = None;
        rec(i + 1, weights, c, load, owner, util, out);
        if load + weights[i] <= c {
            for j in 0..util.len() {
                owner[i] = Some(j);
                util[j] += weights[i];
                rec(i + 1, weights, c, load + weights[i], owner, util, out);
                util[j] -= weights[i];
            }
            owner[i] = None;
        }
    }
    rec(0, weights, c, 0, &mut owner, &mut util, &mut out);
    out
}

/// Every distinct feasible utility vector, sorted ascending.
pub fn enumerate_all(inst: &Instance) -> Result<Vec<UtilityVector>> {
    let mut v: Vec<UtilityVector> = enumerate_with_witness(inst)?.into_keys().collect();
    v.sort();
    Ok(v)
}

/// Non-dominated vectors of a set, sorted ascending.
pub fn pareto_filter(vectors: &[UtilityVector]) -> Vec<UtilityVector> {
    let mut sorted: Vec<&UtilityVector> = vectors.iter().collect();
    sorted.sort_by(|a, b| b.cmp(a));
    sorted.dedup();
    // any dominator is lexicographically greater, so it comes first; if it
    // was itself dropped, whatever dropped it dominates this one too
    let mut kept: Vec<UtilityVector> = Vec::new();
    for v in sorted {
        if !kept.iter().any(|k| k.dominates(v)) {
            kept.push(v.clone());
        }
    }
    kept.reverse();
    kept
}

/// Ground-truth frontier with witnesses, for any agent count.
pub fn oracle_frontier(inst: &Instance) -> Result<ParetoFrontier> {
    let mut all = enumerate_with_witness(inst)?;
    let keys: Vec<UtilityVector> = all.keys().cloned().collect();
    let entries = pareto_filter(&keys)
        .into_iter()
        .map(|u| {
            let witness = all.remove(&u).expect("vector came from the map");
            FrontierEntry { utilities: u, witness }
        })
        .collect();
    Ok(ParetoFrontier::from_entries(Arc::new(inst.clone()), entries))
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Counterexample {
    /// Canonical instance document, replayable through `fairsum check`.
    pub instance: serde_json::Value,
    pub vectors: Vec<UtilityVector>,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Verdict {
    pub name: &'static str,
    pub applicable: bool,
    pub holds: bool,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub detail: Option<String>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub counterexample: Option<Counterexample>,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct OracleReport {
    pub label: String,
    pub kind: Kind,
    pub agents: usize,
    pub feasible_count: usize,
    pub frontier: Vec<UtilityVector>,
    pub zstar: u64,
    pub bests: Vec<u64>,
    pub mm: Vec<UtilityVector>,
    pub mm_total: u64,
    pub pf: Option<UtilityVector>,
    pub pf_total: Option<u64>,
    pub pof_pf: Option<Rational>,
    pub verdicts: Vec<Verdict>,
}

impl OracleReport {
    pub fn all_hold(&self) -> bool {
        self.verdicts.iter().all(|v| v.holds)
    }

    pub fn failures(&self) -> impl Iterator<Item = &Verdict> {
        self.verdicts.iter().filter(|v| !v.holds)
    }

    pub fn verdict(&self, name: &str) -> Option<&Verdict> {
        self.verdicts.iter().find(|v| v.name == name)
    }
}

/// Frontier computation under test; swapped out to exercise failure paths.
pub type FrontierFn = fn(&Instance) -> Result<ParetoFrontier>;

/// Checks every applicable result on the full feasible set, comparing the
/// two-agent frontier against [`crate::frontier::pareto`].
pub fn check_theorems(inst: &Instance) -> Result<OracleReport> {
    check_theorems_with(inst, crate::frontier::pareto)
}

pub fn check_theorems_with(inst: &Instance, dp: FrontierFn) -> Result<OracleReport> {
    let all = enumerate_all(inst)?;
    let frontier = pareto_filter(&all);
    let k = inst.agent_count();
    let doc: serde_json::Value =
        serde_json::from_str(&emit_instance(inst)).expect("canonical document is JSON");
    let cex = |vectors: Vec<UtilityVector>| Some(Counterexample { instance: doc.clone(), vectors });

    let (_, zstar) = system_optimum_of(&frontier)?;
    let bests: Vec<u64> = (0..k).map(|j| all.iter().map(|u| u[j]).max().unwrap_or(0)).collect();
    let mm = maximin_of(&frontier)?;
    let mm_total = mm.iter().map(UtilityVector::total).max().unwrap_or(0);
    let mut verdicts = Vec::new();

    // DP frontier equals the enumerated one
    if k == 2 {
        let (holds, detail, ce) = match dp(inst) {
            Ok(f) => {
                let got: BTreeSet<UtilityVector> = f.vector_list().into_iter().collect();
                let want: BTreeSet<UtilityVector> = frontier.iter().cloned().collect();
                let diff: Vec<UtilityVector> = got.symmetric_difference(&want).cloned().collect();
                if diff.is_empty() {
                    (true, None, None)
                } else {
                    (false, Some("frontier vectors in exactly one of dp and oracle".into()), cex(diff))
                }
            }
            Err(e) => (false, Some(format!("dp failed: {e}")), cex(Vec::new())),
        };
        verdicts.push(Verdict { name: "dp_matches_oracle", applicable: true, holds, detail, counterexample: ce });
    } else {
        verdicts.push(not_applicable("dp_matches_oracle", "dynamic programs cover two agents"));
    }

    // PF candidates must be Pareto efficient (a dominator y gives a sum
    // above k), so testing frontier candidates against every feasible
    // vector finds all PF solutions of the full feasible set
    let pf_all: Vec<UtilityVector> =
        frontier.iter().filter(|x| is_proportional_fair(x, &all)).cloned().collect();
    let pf_front = proportional_fair_exhaustive_of(&frontier);
    verdicts.push(compare(
        "pf_frontier_matches_feasible",
        pf_all == pf_front,
        || pf_all.iter().chain(&pf_front).cloned().collect(),
        &cex,
    ));
    verdicts.push(compare("pf_unique", pf_front.len() <= 1, || pf_front.clone(), &cex));

    let pf = proportional_fair_of(&frontier);
    verdicts.push(compare(
        "pf_nash_first_matches_exhaustive",
        pf_front.len() > 1 || pf.as_ref() == pf_front.first(),
        || pf.iter().chain(&pf_front).cloned().collect(),
        &cex,
    ));

    let pf_total = pf.as_ref().map(UtilityVector::total);
    let pof_pf = match &pf {
        Some(x) if zstar > 0 => Some(pof_value(zstar, x.total())?),
        _ => None,
    };

    match &pf {
        Some(x) => {
            let (nash, _) = nash_max_of(&frontier)?;
            verdicts.push(compare("pf_in_nash_max", nash.contains(x), || {
                std::iter::once(x.clone()).chain(nash.iter().cloned()).collect()
            }, &cex));
            let bound = bound_pf_general(k)?;
            let p = pof_pf.unwrap_or(Rational::ZERO);
            let mut v = compare("pof_pf_within_general_bound", p <= bound, || vec![x.clone()], &cex);
            v.detail = Some(format!("pof {p} vs bound {bound}"));
            verdicts.push(v);
        }
        None => {
            verdicts.push(not_applicable("pf_in_nash_max", "no proportional fair solution"));
            verdicts.push(not_applicable("pof_pf_within_general_bound", "no proportional fair solution"));
        }
    }

    match (&pf, k) {
        (Some(x), 2) => {
            let holds = mm.iter().all(|m| x.total() >= m.total());
            verdicts.push(compare("pf_total_at_least_mm", holds, || {
                std::iter::once(x.clone()).chain(mm.iter().cloned()).collect()
            }, &cex));
        }
        (Some(x), _) => verdicts.push(not_applicable(
            "pf_total_at_least_mm",
            &format!("only claimed for two agents; total(pf) = {}, total(mm) = {}", x.total(), mm_total),
        )),
        (None, _) => verdicts.push(not_applicable("pf_total_at_least_mm", "no proportional fair solution")),
    }

    match (&pf, inst.kind()) {
        (Some(x), Kind::Shared) => {
            let equal = x.0.iter().all(|&u| u == x[0]);
            verdicts.push(compare("shared_pf_equal_and_optimal", equal && x.total() == zstar, || vec![x.clone()], &cex));
        }
        (None, Kind::Shared) => {
            verdicts.push(not_applicable("shared_pf_equal_and_optimal", "no proportional fair solution"))
        }
        (_, Kind::Separate) => verdicts.push(not_applicable("shared_pf_equal_and_optimal", "separate items")),
    }

    if bests.iter().all(|&b| b == bests[0]) && bests[0] > 0 {
        let ks = crate::fairness::kalai_smorodinski_of(&frontier, &bests)?;
        verdicts.push(compare("ks_equals_mm_when_bests_equal", ks == mm, || {
            ks.iter().chain(&mm).cloned().collect()
        }, &cex));
    } else {
        verdicts.push(not_applicable("ks_equals_mm_when_bests_equal", "standalone bests differ"));
    }

    // unused items remain, so every efficient vector leaves less room
    // than the heaviest item
    if inst.is_trivial() {
        verdicts.push(not_applicable("efficient_load_exceeds_c_minus_max_weight", "trivial instance"));
    } else {
        let slack = inst.capacity() - inst.max_weight().unwrap_or(0);
        let low: Vec<UtilityVector> = frontier.iter().filter(|u| u.total() <= slack).cloned().collect();
        verdicts.push(compare("efficient_load_exceeds_c_minus_max_weight", low.is_empty(), || low.clone(), &cex));
    }

    // two vectors that are each PF relative to the other must coincide
    let positive: Vec<&UtilityVector> = frontier.iter().filter(|u| u.all_positive()).collect();
    let mut pair = None;
    'outer: for (i, x) in positive.iter().enumerate() {
        for y in &positive[i + 1..] {
            if pf_condition(x, y) && pf_condition(y, x) {
                pair = Some(vec![(*x).clone(), (*y).clone()]);
                break 'outer;
            }
        }
    }
    verdicts.push(compare("mutual_pf_pairs_coincide", pair.is_none(), || pair.clone().unwrap_or_default(), &cex));

    Ok(OracleReport {
        label: inst.label().to_string(),
        kind: inst.kind(),
        agents: k,
        feasible_count: all.len(),
        frontier,
        zstar,
        bests,
        mm,
        mm_total,
        pf,
        pf_total,
        pof_pf,
        verdicts,
    })
}

fn not_applicable(name: &'static str, why: &str) -> Verdict {
    Verdict { name, applicable: false, holds: true, detail: Some(why.to_string()), counterexample: None }
}

fn compare(
    name: &'static str,
    holds: bool,
    vectors: impl FnOnce() -> Vec<UtilityVector>,
    cex: &dyn Fn(Vec<UtilityVector>) -> Option<Counterexample>,
) -> Verdict {
    Verdict {
        name,
        applicable: true,
        holds,
        detail: None,
        counterexample: if holds { None } else { cex(vectors()) },
    }
}
