//! Pseudopolynomial dynamic programs enumerating every Pareto-efficient
//! utility vector of a two-agent instance, each with a witness allocation.
//!
//! Separate items use one reachability bitset per agent, O(n c). Shared
//! items use a two-dimensional table over (agent A, agent B) loads, stored
//! as one bitset row per A-load, O(n c^2 / 64). Each newly reached state
//! records the item that reached it, so witnesses are rebuilt by walking
//! predecessors.

use std::fmt;
use std::io::Write;
use std::sync::Arc;

use serde::Serialize;

use crate::error::{Error, Result};
use crate::instance::{Instance, Kind};

#[derive(Clone, PartialEq, Eq, Hash, PartialOrd, Ord, Default, Serialize)]
#[serde(transparent)]
pub struct UtilityVector(pub Vec<u64>);

impl UtilityVector {
    pub fn new(u: Vec<u64>) -> Self {
        UtilityVector(u)
    }

    pub fn agents(&self) -> usize {
        self.0.len()
    }

    pub fn total(&self) -> u64 {
        self.0.iter().sum()
    }

    pub fn min_utility(&self) -> u64 {
        self.0.iter().copied().min().unwrap_or(0)
    }

    pub fn all_positive(&self) -> bool {
        self.0.iter().all(|&u| u > 0)
    }

    /// Weakly better everywhere and strictly better somewhere.
    pub fn dominates(&self, other: &UtilityVector) -> bool {
        debug_assert_eq!(self.0.len(), other.0.len());
        let mut strict = false;
        for (a, b) in self.0.iter().zip(&other.0) {
            if a < b {
                return false;
            }
            strict |= a > b;
        }
        strict
    }
}

impl std::ops::Index<usize> for UtilityVector {
    type Output = u64;
    fn index(&self, j: usize) -> &u64 {
        &self.0[j]
    }
}

impl fmt::Display for UtilityVector {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "(")?;
        for (j, u) in self.0.iter().enumerate() {
            if j > 0 {
                write!(f, ",")?;
            }
            write!(f, "{u}")?;
        }
        write!(f, ")")
    }
}

impl fmt::Debug for UtilityVector {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fmt::Display::fmt(self, f)
    }
}

impl From<Vec<u64>> for UtilityVector {
    fn from(v: Vec<u64>) -> Self {
        UtilityVector(v)
    }
}

/// Item indices per agent. For separate instances set `j` indexes list `j`;
/// for shared instances every set indexes the common list.
#[derive(Debug, Clone, PartialEq, Eq, Hash, Default, Serialize)]
#[serde(transparent)]
pub struct Allocation(pub Vec<Vec<usize>>);

impl Allocation {
    pub fn sets(&self) -> &[Vec<usize>] {
        &self.0
    }

    /// Re-sums the allocation, checking indices, disjointness and capacity.
    pub fn utilities(&self, inst: &Instance) -> Result<UtilityVector> {
        if self.0.len() != inst.agent_count() {
            return Err(Error::InvalidInstance(format!(
                "allocation has {} sets for {} agents",
                self.0.len(),
                inst.agent_count()
            )));
        }
        let mut used = vec![false; inst.items().iter().map(Vec::len).max().unwrap_or(0)];
        let mut u = Vec::with_capacity(self.0.len());
        for (j, set) in self.0.iter().enumerate() {
            let items = inst.accessible(j);
            let mut sum = 0u64;
            for &i in set {
                let w = *items.get(i).ok_or_else(|| {
                    Error::InvalidInstance(format!("agent {j} has no item {i}"))
                })?;
                if inst.kind() == Kind::Shared {
                    if used[i] {
                        return Err(Error::InvalidInstance(format!(
                            "shared item {i} assigned twice"
                        )));
                    }
                    used[i] = true;
                } else if set.iter().filter(|&&x| x == i).count() > 1 {
                    return Err(Error::InvalidInstance(format!(
                        "item {i} of agent {j} listed twice"
                    )));
                }
                sum += w;
            }
            u.push(sum);
        }
        let u = UtilityVector(u);
        if u.total() > inst.capacity() {
            return Err(Error::InvalidInstance(format!(
                "allocation weight {} exceeds capacity {}",
                u.total(),
                inst.capacity()
            )));
        }
        Ok(u)
    }

    fn joined(set: &[usize]) -> String {
        set.iter().map(usize::to_string).collect::<Vec<_>>().join(";")
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct FrontierEntry {
    pub utilities: UtilityVector,
    pub witness: Allocation,
}

/// Mutually non-dominated utility vectors with witnesses, sorted
/// lexicographically ascending.
#[derive(Debug, Clone)]
pub struct ParetoFrontier {
    instance: Arc<Instance>,
    entries: Vec<FrontierEntry>,
}

impl ParetoFrontier {
    /// Wraps already non-dominated entries; sorts them.
    pub fn from_entries(instance: Arc<Instance>, mut entries: Vec<FrontierEntry>) -> Self {
        entries.sort_by(|a, b| a.utilities.cmp(&b.utilities));
        ParetoFrontier { instance, entries }
    }

    pub fn instance(&self) -> &Instance {
        &self.instance
    }

    pub fn entries(&self) -> &[FrontierEntry] {
        &self.entries
    }

    pub fn len(&self) -> usize {
        self.entries.len()
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }

    pub fn vectors(&self) -> impl Iterator<Item = &UtilityVector> {
        self.entries.iter().map(|e| &e.utilities)
    }

    pub fn vector_list(&self) -> Vec<UtilityVector> {
        self.vectors().cloned().collect()
    }

    /// Witness for a utility vector of this frontier.
    pub fn reconstruct(&self, utilities: &UtilityVector) -> Result<Allocation> {
        self.entries
            .binary_search_by(|e| e.utilities.cmp(utilities))
            .map(|i| self.entries[i].witness.clone())
            .map_err(|_| Error::StaleEntry(utilities.to_string()))
    }

    /// Writes `uA,uB,witnessA,witnessB` rows (one u/witness column per agent).
    pub fn write_csv<W: Write>(&self, out: W) -> Result<()> {
        let k = self.instance.agent_count();
        let mut w = csv::Writer::from_writer(out);
        let mut header: Vec<String> = (0..k).map(|j| format!("u{}", agent_letter(j))).collect();
        header.extend((0..k).map(|j| format!("witness{}", agent_letter(j))));
        w.write_record(&header)?;
        for e in &self.entries {
            let mut row: Vec<String> = e.utilities.0.iter().map(u64::to_string).collect();
            row.extend(e.witness.0.iter().map(|s| Allocation::joined(s)));
            w.write_record(&row)?;
        }
        w.flush()?;
        Ok(())
    }
}

pub fn agent_letter(j: usize) -> char {
    if j < 26 {
        (b'A' + j as u8) as char
    } else {
        '?'
    }
}

/// Fixed-length bitset over `0..len`.
#[derive(Debug, Clone, PartialEq, Eq)]
struct Bits {
    words: Vec<u64>,
    len: usize,
}

impl Bits {
    fn new(len: usize) -> Self {
        Bits { words: vec![0; len.div_ceil(64)], len }
    }

    fn get(&self, i: usize) -> bool {
        i < self.len && self.words[i / 64] >> (i % 64) & 1 == 1
    }

    fn set(&mut self, i: usize) {
        self.words[i / 64] |= 1 << (i % 64);
    }

    fn highest(&self) -> Option<usize> {
        self.words
            .iter()
            .enumerate()
            .rev()
            .find(|(_, &w)| w != 0)
            .map(|(i, w)| i * 64 + 63 - w.leading_zeros() as usize)
    }

    /// Word `j` of `self << shift`.
    #[inline]
    fn shifted_word(&self, j: usize, shift: usize) -> u64 {
        let (q, r) = (shift / 64, shift % 64);
        if j < q {
            return 0;
        }
        let hi = self.words[j - q] << r;
        if r == 0 || j == q {
            hi
        } else {
            hi | self.words[j - q - 1] >> (64 - r)
        }
    }

    /// Mask keeping bits `0..limit` of word `j`.
    #[inline]
    fn limit_mask(j: usize, limit: usize) -> u64 {
        let lo = j * 64;
        if limit >= lo + 64 {
            u64::MAX
        } else if limit <= lo {
            0
        } else {
            (1u64 << (limit - lo)) - 1
        }
    }

    fn iter_ones(&self) -> impl Iterator<Item = usize> + '_ {
        self.words.iter().enumerate().flat_map(|(j, &w)| ones(w).map(move |b| j * 64 + b))
    }
}

fn ones(mut w: u64) -> impl Iterator<Item = usize> {
    std::iter::from_fn(move || {
        (w != 0).then(|| {
            let b = w.trailing_zeros() as usize;
            w &= w - 1;
            b
        })
    })
}

const NO_PRED: u32 = u32::MAX;

/// Subset sums of one weight list up to a capacity, with one predecessor
/// item per reachable sum.
#[derive(Debug, Clone)]
pub struct SubsetSums {
    weights: Vec<u64>,
    bits: Bits,
    pred: Vec<u32>,
}

impl SubsetSums {
    pub fn capacity(&self) -> u64 {
        (self.bits.len - 1) as u64
    }

    pub fn contains(&self, w: u64) -> bool {
        self.bits.get(w as usize)
    }

    /// Reachable sums in ascending order.
    pub fn sums(&self) -> Vec<u64> {
        self.bits.iter_ones().map(|s| s as u64).collect()
    }

    pub fn max(&self) -> u64 {
        self.bits.highest().unwrap_or(0) as u64
    }

    /// Ascending item indices summing to `w`.
    pub fn witness(&self, w: u64) -> Option<Vec<usize>> {
        if !self.contains(w) {
            return None;
        }
        let mut set = Vec::new();
        let mut s = w as usize;
        while s != 0 {
            let item = self.pred[s];
            debug_assert_ne!(item, NO_PRED);
            set.push(item as usize);
            s -= self.weights[item as usize] as usize;
        }
        set.reverse();
        Some(set)
    }
}

/// All subset sums of `weights` in `[0, c]`.
pub fn reachable_sums(weights: &[u64], c: u64) -> SubsetSums {
    let len = c as usize + 1;
    let mut bits = Bits::new(len);
    let mut pred = vec![NO_PRED; len];
    bits.set(0);
    for (i, &w) in weights.iter().enumerate() {
        let w = w as usize;
        if w == 0 || w > c as usize {
            continue;
        }
        // descending word order keeps reads on the pre-item layer
        for j in (0..bits.words.len()).rev() {
            let fresh = bits.shifted_word(j, w) & !bits.words[j] & Bits::limit_mask(j, len);
            if fresh != 0 {
                for b in ones(fresh) {
                    pred[j * 64 + b] = i as u32;
                }
                bits.words[j] |= fresh;
            }
        }
    }
    SubsetSums { weights: weights.to_vec(), bits, pred }
}

fn require_pair(inst: &Instance, kind: Kind) -> Result<()> {
    if inst.kind() != kind {
        return Err(Error::KindMismatch { expected: kind.as_str(), actual: inst.kind().as_str() });
    }
    if inst.agent_count() != 2 {
        return Err(Error::UnsupportedAgentCount(inst.agent_count()));
    }
    Ok(())
}

/// Pareto frontier for separate item lists: merge the two subset-sum
/// arrays walking them in opposite directions.
pub fn pareto_separate(inst: &Instance) -> Result<ParetoFrontier> {
    require_pair(inst, Kind::Separate)?;
    let c = inst.capacity();
    let sums_a = reachable_sums(inst.accessible(0), c);
    let sums_b = reachable_sums(inst.accessible(1), c);
    let list_a = sums_a.sums();
    let list_b = sums_b.sums();

    let mut entries = Vec::new();
    let mut jb = 0usize; // list_b[jb] is the largest sum <= c - a
    let mut best_b: Option<u64> = None;
    for &a in list_a.iter().rev() {
        let room = c - a;
        while jb + 1 < list_b.len() && list_b[jb + 1] <= room {
            jb += 1;
        }
        let b = list_b[jb];
        if best_b.is_none_or(|prev| b > prev) {
            best_b = Some(b);
            entries.push(FrontierEntry {
                utilities: UtilityVector(vec![a, b]),
                witness: Allocation(vec![
                    sums_a.witness(a).expect("reachable"),
                    sums_b.witness(b).expect("reachable"),
                ]),
            });
        }
    }
    entries.reverse();
    Ok(ParetoFrontier { instance: Arc::new(inst.clone()), entries })
}

/// Predecessor codes `item << 1 | agent`, 16-bit when the item count allows.
enum PredStore {
    Narrow(Vec<u16>),
    Wide(Vec<u32>),
}

impl PredStore {
    fn new(items: usize, len: usize) -> Self {
        if items < (u16::MAX as usize) >> 1 {
            PredStore::Narrow(vec![u16::MAX; len])
        } else {
            PredStore::Wide(vec![NO_PRED; len])
        }
    }

    fn set(&mut self, idx: usize, code: u32) {
        match self {
            PredStore::Narrow(v) => v[idx] = code as u16,
            PredStore::Wide(v) => v[idx] = code,
        }
    }

    fn get(&self, idx: usize) -> u32 {
        match self {
            PredStore::Narrow(v) if v[idx] == u16::MAX => NO_PRED,
            PredStore::Narrow(v) => v[idx] as u32,
            PredStore::Wide(v) => v[idx],
        }
    }
}

/// Reachable (A-load, B-load) pairs for a shared list.
struct SharedTable {
    rows: Vec<Bits>,
    /// One code per state with `a + b <= c`, row `a` holding `b = 0..=c-a`.
    pred: PredStore,
    width: usize,
}

impl SharedTable {
    fn index(&self, a: usize, b: usize) -> usize {
        triangle_offset(self.width, a) + b
    }

    fn build(weights: &[u64], c: u64) -> Self {
        let width = c as usize + 1;
        let mut rows: Vec<Bits> = (0..width).map(|_| Bits::new(width)).collect();
        let mut pred = PredStore::new(weights.len(), triangle_offset(width, width));
        rows[0].set(0);
        for (i, &w) in weights.iter().enumerate() {
            let w = w as usize;
            if w == 0 || w > c as usize {
                continue;
            }
            // old layer read, new layer written: an item reaches each agent at most once
            let old = rows.clone();
            for a in 0..width {
                let limit = width - a; // b <= c - a
                let row_words = old[a].words.len();
                let offset = triangle_offset(width, a);
                for j in 0..row_words {
                    let mask = Bits::limit_mask(j, limit);
                    if mask == 0 {
                        break;
                    }
                    let via_a = if a >= w { old[a - w].words[j] } else { 0 };
                    let via_b = old[a].shifted_word(j, w);
                    let fresh = (via_a | via_b) & !old[a].words[j] & mask;
                    if fresh == 0 {
                        continue;
                    }
                    for bit in ones(fresh) {
                        let b = j * 64 + bit;
                        let agent = if via_a >> bit & 1 == 1 { 0 } else { 1 };
                        pred.set(offset + b, (i as u32) << 1 | agent);
                    }
                    rows[a].words[j] |= fresh;
                }
            }
        }
        SharedTable { rows, pred, width }
    }

    fn witness(&self, weights: &[u64], a: u64, b: u64) -> Allocation {
        let (mut a, mut b) = (a as usize, b as usize);
        let mut sets = vec![Vec::new(), Vec::new()];
        while a != 0 || b != 0 {
            let p = self.pred.get(self.index(a, b));
            debug_assert_ne!(p, NO_PRED);
            let item = (p >> 1) as usize;
            let w = weights[item] as usize;
            if p & 1 == 0 {
                sets[0].push(item);
                a -= w;
            } else {
                sets[1].push(item);
                b -= w;
            }
        }
        sets.iter_mut().for_each(|s| s.reverse());
        Allocation(sets)
    }
}

/// Start of row `a` in a triangular table whose row `a` has `width - a` cells.
fn triangle_offset(width: usize, a: usize) -> usize {
    a * width - a * a.saturating_sub(1) / 2
}

/// Pareto frontier for a shared item list; every witness is a disjoint
/// pair of item sets.
pub fn pareto_shared(inst: &Instance) -> Result<ParetoFrontier> {
    require_pair(inst, Kind::Shared)?;
    let c = inst.capacity();
    let weights = inst.accessible(0);
    let table = SharedTable::build(weights, c);

    let mut entries = Vec::new();
    let mut best_b: Option<usize> = None;
    for a in (0..table.width).rev() {
        let Some(b) = table.rows[a].highest() else { continue };
        if best_b.is_none_or(|prev| b > prev) {
            best_b = Some(b);
            entries.push(FrontierEntry {
                utilities: UtilityVector(vec![a as u64, b as u64]),
                witness: table.witness(weights, a as u64, b as u64),
            });
        }
    }
    entries.reverse();
    Ok(ParetoFrontier { instance: Arc::new(inst.clone()), entries })
}

/// Dispatches on the instance kind.
pub fn pareto(inst: &Instance) -> Result<ParetoFrontier> {
    match inst.kind() {
        Kind::Separate => pareto_separate(inst),
        Kind::Shared => pareto_shared(inst),
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn sep(c: u64, a: &[u64], b: &[u64]) -> Instance {
        Instance::new(Kind::Separate, c, 2, vec![a.to_vec(), b.to_vec()], "t").unwrap()
    }

    fn shared(c: u64, w: &[u64]) -> Instance {
        Instance::new(Kind::Shared, c, 2, vec![w.to_vec()], "t").unwrap()
    }

    fn vectors(f: &ParetoFrontier) -> Vec<(u64, u64)> {
        f.vectors().map(|u| (u[0], u[1])).collect()
    }

    /// Exhaustive subset enumeration.
    fn brute_sums(weights: &[u64], c: u64) -> Vec<u64> {
        let mut out: Vec<u64> = (0u32..1 << weights.len())
            .map(|m| (0..weights.len()).filter(|i| m >> i & 1 == 1).map(|i| weights[i]).sum())
            .filter(|&s| s <= c)
            .collect();
        out.sort_unstable();
        out.dedup();
        out
    }

    #[test]
    fn reachable_small() {
        assert_eq!(reachable_sums(&[100, 1], 100).sums(), vec![0, 1, 100]);
        assert_eq!(reachable_sums(&[], 5).sums(), vec![0]);
        let w = [33, 33, 33, 1, 1];
        let got = reachable_sums(&w, 99).sums();
        assert_eq!(got, brute_sums(&w, 99));
        assert_eq!(got, vec![0, 1, 2, 33, 34, 35, 66, 67, 68, 99]);
    }

    #[test]
    fn reachable_witnesses_resum() {
        let w = [7, 64, 65, 129, 3, 0, 200];
        let s = reachable_sums(&w, 300);
        assert_eq!(s.sums(), brute_sums(&w, 300));
        for sum in s.sums() {
            let set = s.witness(sum).unwrap();
            assert_eq!(set.iter().map(|&i| w[i]).sum::<u64>(), sum);
            let mut dedup = set.clone();
            dedup.dedup();
            assert_eq!(dedup, set);
        }
        assert_eq!(s.witness(299), None);
    }

    #[test]
    fn separate_two_solutions() {
        let f = pareto_separate(&sep(100, &[100, 1], &[1, 1])).unwrap();
        assert_eq!(vectors(&f), vec![(1, 2), (100, 0)]);
    }

    #[test]
    fn separate_six_solutions() {
        let f = pareto_separate(&sep(400, &[400, 102, 100, 100], &[388, 100, 100, 96])).unwrap();
        assert_eq!(
            vectors(&f),
            vec![(0, 388), (102, 296), (200, 200), (202, 196), (302, 96), (400, 0)]
        );
        let w = f.reconstruct(&UtilityVector(vec![200, 200])).unwrap();
        assert_eq!(w.utilities(f.instance()).unwrap(), UtilityVector(vec![200, 200]));
        assert_eq!(f.reconstruct(&UtilityVector(vec![0, 388])).unwrap().0[0], Vec::<usize>::new());
    }

    #[test]
    fn separate_three_solutions() {
        let f = pareto_separate(&sep(100, &[100, 75, 52], &[23, 21, 0])).unwrap();
        assert_eq!(vectors(&f), vec![(52, 44), (75, 23), (100, 0)]);
    }

    #[test]
    fn shared_examples() {
        let f = pareto_shared(&shared(100, &[75, 26, 25, 1])).unwrap();
        let v = vectors(&f);
        assert!(v.contains(&(75, 25)) && v.contains(&(26, 26)));
        let f = pareto_shared(&shared(99, &[33, 33, 33, 1, 1])).unwrap();
        let v = vectors(&f);
        assert!(v.contains(&(66, 33)) && v.contains(&(34, 34)));
        let w = f.reconstruct(&UtilityVector(vec![34, 34])).unwrap();
        assert_eq!(w.utilities(f.instance()).unwrap(), UtilityVector(vec![34, 34]));
        let f = pareto_shared(&shared(10, &[5])).unwrap();
        assert_eq!(vectors(&f), vec![(0, 5), (5, 0)]);
    }

    #[test]
    fn kind_and_count_errors() {
        assert!(matches!(pareto_separate(&shared(10, &[5])), Err(Error::KindMismatch { .. })));
        assert!(matches!(
            pareto_shared(&sep(10, &[5], &[5])),
            Err(Error::KindMismatch { .. })
        ));
        let k3 = Instance::new(Kind::Separate, 10, 3, vec![vec![1], vec![1], vec![1]], "").unwrap();
        assert_eq!(pareto_separate(&k3).unwrap_err(), Error::UnsupportedAgentCount(3));
    }

    #[test]
    fn stale_entry() {
        let f = pareto_shared(&shared(10, &[5])).unwrap();
        assert!(matches!(
            f.reconstruct(&UtilityVector(vec![1, 1])),
            Err(Error::StaleEntry(_))
        ));
    }

    #[test]
    fn csv_export() {
        let f = pareto_separate(&sep(100, &[100, 1], &[1, 1])).unwrap();
        let mut buf = Vec::new();
        f.write_csv(&mut buf).unwrap();
        assert_eq!(
            String::from_utf8(buf).unwrap(),
            "uA,uB,witnessA,witnessB\n1,2,1,0;1\n100,0,0,\n"
        );
    }

    #[test]
    fn bits_shift_across_words() {
        let mut b = Bits::new(200);
        b.set(3);
        b.set(63);
        for shift in [0usize, 1, 61, 64, 65, 130] {
            let words: Vec<u64> = (0..b.words.len()).map(|j| b.shifted_word(j, shift)).collect();
            let shifted = Bits { words, len: 400 };
            let ones: Vec<usize> = shifted.iter_ones().collect();
            assert_eq!(ones, vec![3 + shift, 63 + shift].into_iter().filter(|&x| x < 256).collect::<Vec<_>>());
        }
    }
}
