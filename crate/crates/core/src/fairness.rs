//! System optimum, maximin, Kalai-Smorodinski and proportional fair
//! solutions over a set of Pareto-efficient utility vectors.
//!
//! The slice-based functions (`*_of`) take any list of utility vectors so
//! the exhaustive oracle can run them over the full feasible set; the
//! frontier wrappers restrict to Pareto-efficient vectors.

use num_bigint::BigUint;
use serde::{Serialize, Serializer};

use crate::error::{Error, Result};
use crate::frontier::{reachable_sums, ParetoFrontier, UtilityVector};
use crate::instance::Instance;
use crate::rational::Rational;

/// Max total utility. Among optimal vectors the one with the largest
/// smallest utility wins, then the lexicographically greatest.
pub fn system_optimum_of(vectors: &[UtilityVector]) -> Result<(UtilityVector, u64)> {
    let best = vectors
        .iter()
        .max_by(|a, b| {
            a.total()
                .cmp(&b.total())
                .then_with(|| a.min_utility().cmp(&b.min_utility()))
                .then_with(|| a.cmp(b))
        })
        .ok_or(Error::EmptyFrontier)?;
    Ok((best.clone(), best.total()))
}

pub fn system_optimum(frontier: &ParetoFrontier) -> Result<(UtilityVector, u64)> {
    system_optimum_of(&frontier.vector_list())
}

/// Single-agent subset-sum optimum over the items agent `j` can access.
pub fn best_alone(inst: &Instance, agent: usize) -> u64 {
    reachable_sums(inst.accessible(agent), inst.capacity()).max()
}

pub fn bests(inst: &Instance) -> Vec<u64> {
    (0..inst.agent_count()).map(|j| best_alone(inst, j)).collect()
}

fn argmax_set<K: Ord>(vectors: &[UtilityVector], key: impl Fn(&UtilityVector) -> K) -> Vec<UtilityVector> {
    let Some(best) = vectors.iter().map(&key).max() else {
        return Vec::new();
    };
    let mut set: Vec<UtilityVector> = vectors.iter().filter(|v| key(v) == best).cloned().collect();
    set.sort();
    set.dedup();
    set
}

pub fn maximin_of(vectors: &[UtilityVector]) -> Result<Vec<UtilityVector>> {
    if vectors.is_empty() {
        return Err(Error::EmptyFrontier);
    }
    Ok(argmax_set(vectors, UtilityVector::min_utility))
}

/// Entries maximizing the smallest utility.
pub fn maximin(frontier: &ParetoFrontier) -> Result<Vec<UtilityVector>> {
    maximin_of(&frontier.vector_list())
}

/// `min_j u_j / best_j`, skipping agents whose best is zero.
pub fn ks_value(u: &UtilityVector, bests: &[u64]) -> Result<Rational> {
    u.0.iter()
        .zip(bests)
        .filter(|(_, &b)| b > 0)
        .map(|(&x, &b)| Rational::new(x as i128, b as i128))
        .min()
        .ok_or(Error::AllBestsZero)
}

pub fn kalai_smorodinski_of(vectors: &[UtilityVector], bests: &[u64]) -> Result<Vec<UtilityVector>> {
    if vectors.is_empty() {
        return Err(Error::EmptyFrontier);
    }
    if bests.iter().all(|&b| b == 0) {
        return Err(Error::AllBestsZero);
    }
    Ok(argmax_set(vectors, |u| ks_value(u, bests).expect("some best is positive")))
}

/// Entries maximizing the smallest utility relative to each agent's
/// standalone best.
pub fn kalai_smorodinski(frontier: &ParetoFrontier, bests: &[u64]) -> Result<Vec<UtilityVector>> {
    kalai_smorodinski_of(&frontier.vector_list(), bests)
}

pub fn nash_product(u: &UtilityVector) -> BigUint {
    u.0.iter().fold(BigUint::from(1u32), |acc, &x| acc * x)
}

pub fn nash_max_of(vectors: &[UtilityVector]) -> Result<(Vec<UtilityVector>, BigUint)> {
    if vectors.is_empty() {
        return Err(Error::EmptyFrontier);
    }
    let set = argmax_set(vectors, nash_product);
    let product = nash_product(&set[0]);
    Ok((set, product))
}

/// Entries maximizing the product of utilities.
pub fn nash_max(frontier: &ParetoFrontier) -> Result<(Vec<UtilityVector>, BigUint)> {
    nash_max_of(&frontier.vector_list())
}

/// True when `sum_j y_j / x_j <= k`, evaluated without division:
/// `sum_j y_j * prod_{i != j} x_i <= k * prod_i x_i`.
pub fn pf_condition(x: &UtilityVector, y: &UtilityVector) -> bool {
    debug_assert!(x.all_positive());
    let k = x.agents();
    if let Some(r) = pf_condition_u128(x, y) {
        return r;
    }
    let prod: BigUint = nash_product(x);
    let mut lhs = BigUint::from(0u32);
    for j in 0..k {
        lhs += &prod / x[j] * y[j];
    }
    lhs <= prod * k
}

fn pf_condition_u128(x: &UtilityVector, y: &UtilityVector) -> Option<bool> {
    let k = x.agents();
    let mut prod: u128 = 1;
    for &v in &x.0 {
        prod = prod.checked_mul(v as u128)?;
    }
    let mut lhs: u128 = 0;
    for j in 0..k {
        lhs = lhs.checked_add((prod / x[j] as u128).checked_mul(y[j] as u128)?)?;
    }
    Some(lhs <= prod.checked_mul(k as u128)?)
}

/// First vector among `others` that violates the proportional fairness
/// condition for `x`.
pub fn pf_violator<'a>(x: &UtilityVector, others: &'a [UtilityVector]) -> Option<&'a UtilityVector> {
    others.iter().find(|y| !pf_condition(x, y))
}

pub fn is_proportional_fair(x: &UtilityVector, others: &[UtilityVector]) -> bool {
    x.all_positive() && pf_violator(x, others).is_none()
}

/// The proportional fair vector among `vectors`, tested against all of
/// `vectors`. Only Nash maximizers are candidates.
pub fn proportional_fair_of(vectors: &[UtilityVector]) -> Option<UtilityVector> {
    let (nash, _) = nash_max_of(vectors).ok()?;
    nash.into_iter().find(|x| is_proportional_fair(x, vectors))
}

/// Proportional fair entry of a frontier, if one exists.
///
/// Checking against frontier entries is enough: the condition is monotone
/// in every `u_j(y)`, so a dominated violator implies a frontier violator.
pub fn proportional_fair(frontier: &ParetoFrontier) -> Option<UtilityVector> {
    proportional_fair_of(&frontier.vector_list())
}

/// Every vector passing the condition, with each entry tried as candidate.
pub fn proportional_fair_exhaustive_of(vectors: &[UtilityVector]) -> Vec<UtilityVector> {
    let mut out: Vec<UtilityVector> = vectors
        .iter()
        .filter(|x| is_proportional_fair(x, vectors))
        .cloned()
        .collect();
    out.sort();
    out.dedup();
    out
}

pub fn proportional_fair_exhaustive(frontier: &ParetoFrontier) -> Vec<UtilityVector> {
    proportional_fair_exhaustive_of(&frontier.vector_list())
}

/// Max total; ties go to the lexicographically greatest vector.
pub fn representative(set: &[UtilityVector]) -> Option<UtilityVector> {
    set.iter()
        .max_by(|a, b| a.total().cmp(&b.total()).then_with(|| a.cmp(b)))
        .cloned()
}

fn min_total(set: &[UtilityVector]) -> Option<UtilityVector> {
    set.iter()
        .min_by(|a, b| a.total().cmp(&b.total()).then_with(|| b.cmp(a)))
        .cloned()
}

fn as_decimal<S: Serializer>(v: &BigUint, s: S) -> std::result::Result<S::Ok, S::Error> {
    s.serialize_str(&v.to_string())
}

fn as_decimal_opt<S: Serializer>(v: &Option<BigUint>, s: S) -> std::result::Result<S::Ok, S::Error> {
    match v {
        Some(v) => s.serialize_str(&v.to_string()),
        None => s.serialize_none(),
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct CriterionSolutions {
    pub set: Vec<UtilityVector>,
    pub representative: UtilityVector,
    pub min_total: UtilityVector,
    /// Optimal criterion value (smallest utility, or smallest ratio for KS).
    pub value: Rational,
}

impl CriterionSolutions {
    fn new(set: Vec<UtilityVector>, value: Rational) -> Self {
        CriterionSolutions {
            representative: representative(&set).expect("non-empty"),
            min_total: min_total(&set).expect("non-empty"),
            set,
            value,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct NashSolutions {
    pub set: Vec<UtilityVector>,
    #[serde(serialize_with = "as_decimal")]
    pub product: BigUint,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct PfOutcome {
    pub exists: bool,
    pub vector: Option<UtilityVector>,
    #[serde(serialize_with = "as_decimal_opt")]
    pub nash_product: Option<BigUint>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct FairnessReport {
    pub label: String,
    pub agents: usize,
    pub frontier_size: usize,
    pub system_optimum: UtilityVector,
    pub zstar: u64,
    pub bests: Vec<u64>,
    pub mm: CriterionSolutions,
    pub ks: CriterionSolutions,
    pub nash: NashSolutions,
    pub pf: PfOutcome,
}

/// All criteria over a frontier, with standalone bests from its instance.
pub fn analyze(frontier: &ParetoFrontier) -> Result<FairnessReport> {
    let bests = bests(frontier.instance());
    analyze_vectors(frontier.instance(), &frontier.vector_list(), bests)
}

/// Same as [`analyze`] for an explicit list of Pareto-efficient vectors.
pub fn analyze_vectors(
    inst: &Instance,
    vectors: &[UtilityVector],
    bests: Vec<u64>,
) -> Result<FairnessReport> {
    let (opt, zstar) = system_optimum_of(vectors)?;
    let mm_set = maximin_of(vectors)?;
    let mm_value = Rational::from_int(mm_set[0].min_utility() as i128);
    let (ks, ks_value) = if bests.iter().all(|&b| b == 0) {
        // nothing to share: every vector is (0, ..., 0)
        (vectors.to_vec(), Rational::ONE)
    } else {
        let set = kalai_smorodinski_of(vectors, &bests)?;
        let v = ks_value(&set[0], &bests)?;
        (set, v)
    };
    let (nash_set, product) = nash_max_of(vectors)?;
    let pf = proportional_fair_of(vectors);
    Ok(FairnessReport {
        label: inst.label().to_string(),
        agents: inst.agent_count(),
        frontier_size: vectors.len(),
        system_optimum: opt,
        zstar,
        bests,
        mm: CriterionSolutions::new(mm_set, mm_value),
        ks: CriterionSolutions::new(ks, ks_value),
        nash: NashSolutions { set: nash_set, product },
        pf: PfOutcome {
            exists: pf.is_some(),
            nash_product: pf.as_ref().map(nash_product),
            vector: pf,
        },
    })
}
