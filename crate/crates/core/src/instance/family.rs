//! Worst-case and counterexample families, scaled to integer weights.
//!
//! Every family is first described with weights relative to a unit
//! capacity; the scale `D` then turns it into an integer instance with
//! capacity `D`. Without an explicit `D` the smallest scale that makes all
//! weights integral is used.

use std::collections::BTreeMap;
use std::fmt;
use std::str::FromStr;

use super::{Instance, Kind};
use crate::error::{Error, Result};
use crate::rational::{lcm, Rational};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Family {
    /// Two nondominated solutions; maximin loses everything as eps -> 0.
    SepTwoSolutions,
    /// Separate items, alpha in [2/3, 1): PoF tends to 2 - 1/alpha.
    SepLargeAlpha,
    /// `r` blocks of 1/r against `r` tiny items: PoF tends to 1/r.
    SepRBlocks,
    /// Shared items, alpha in [2/3, 1): PoF tends to 2 alpha - 1.
    SharedLargeAlpha,
    /// 2h+1 blocks plus two tiny items: PoF tends to 1/(2h+1).
    SharedOddBlocks,
    /// Three agents where maximin has larger total than proportional fairness.
    K3MmBeatsPf,
    /// Six Pareto points; KS total below MM/PF total.
    KsBelow,
    /// Three Pareto points; KS total above MM/PF total.
    KsAbove,
    /// k agents; PF loses (k-1)/k as eps -> 0.
    PfTightK,
}

impl Family {
    pub const ALL: [Family; 9] = [
        Family::SepTwoSolutions,
        Family::SepLargeAlpha,
        Family::SepRBlocks,
        Family::SharedLargeAlpha,
        Family::SharedOddBlocks,
        Family::K3MmBeatsPf,
        Family::KsBelow,
        Family::KsAbove,
        Family::PfTightK,
    ];

    pub fn id(&self) -> &'static str {
        match self {
            Family::SepTwoSolutions => "sep-two-solutions",
            Family::SepLargeAlpha => "sep-large-alpha",
            Family::SepRBlocks => "sep-r-blocks",
            Family::SharedLargeAlpha => "shared-large-alpha",
            Family::SharedOddBlocks => "shared-odd-blocks",
            Family::K3MmBeatsPf => "k3-mm-beats-pf",
            Family::KsBelow => "ks-below",
            Family::KsAbove => "ks-above",
            Family::PfTightK => "pf-tight-k",
        }
    }

    pub fn kind(&self) -> Kind {
        match self {
            Family::SharedLargeAlpha | Family::SharedOddBlocks => Kind::Shared,
            _ => Kind::Separate,
        }
    }

    /// Upper bound on the largest relative weight the family promises.
    pub fn declared_alpha(&self, p: &FamilyParams) -> Result<Rational> {
        Ok(match self {
            Family::SepLargeAlpha | Family::SharedLargeAlpha => p.require_alpha()?,
            Family::SepRBlocks => Rational::new(1, p.require_int("r", p.r)?),
            Family::SharedOddBlocks => Rational::new(1, 2 * p.require_int("h", p.h)? + 1),
            Family::K3MmBeatsPf => {
                Rational::new(1, 2) + Rational::from_int(5) * p.eps.unwrap_or_else(k3_default_eps)
            }
            _ => Rational::ONE,
        })
    }

    pub fn agent_count(&self, p: &FamilyParams) -> Result<usize> {
        Ok(match self {
            Family::K3MmBeatsPf => 3,
            Family::PfTightK => p.require_int("k", p.k)? as usize,
            _ => 2,
        })
    }

    /// Smallest `D` making every weight integral for these parameters.
    pub fn min_scale(&self, p: &FamilyParams) -> Result<i128> {
        let lists = self.unit_weights(p, None)?;
        Ok(lists
            .iter()
            .flatten()
            .fold(1i128, |acc, w| lcm(acc, w.denom())))
    }

    /// Item lists relative to a unit capacity. When `scale` is `None`, a
    /// defaulted one-unit eps2 item is left out; it is integral for any `D`.
    fn unit_weights(&self, p: &FamilyParams, scale: Option<i128>) -> Result<Vec<Vec<Rational>>> {
        let r = Rational::new;
        let one = Rational::ONE;
        let eps = || -> Result<Rational> {
            match (p.eps, scale) {
                (Some(e), _) => Ok(e),
                (None, Some(d)) => Ok(Rational::new(1, d)),
                (None, None) => Err(Error::FamilyParams(
                    "either D or eps must be given".into(),
                )),
            }
        };
        let int = |n: i128| Rational::from_int(n);
        let lists = match self {
            Family::SepTwoSolutions => {
                let e = eps()?;
                check_range(e, Rational::ZERO, r(1, 3), "eps")?;
                vec![vec![one, e], vec![e, e]]
            }
            Family::SepLargeAlpha => {
                let a = p.require_alpha()?;
                if a < r(2, 3) || a >= one {
                    return Err(Error::FamilyParams(format!(
                        "sep-large-alpha needs alpha in [2/3, 1), got {a}"
                    )));
                }
                let e = eps()?;
                check_range(e, Rational::ZERO, int(2) * a - one, "eps")?;
                let e2 = match (p.eps2, scale) {
                    (Some(e2), _) => Some(e2),
                    (None, Some(d)) => Some(Rational::new(1, d)),
                    (None, None) => None,
                };
                let mut b = vec![one - a + e];
                if let Some(e2) = e2 {
                    if e2 < Rational::ZERO || e2 > e {
                        return Err(Error::FamilyParams(format!(
                            "eps2 must lie in [0, eps], got {e2}"
                        )));
                    }
                    b.push(e2);
                }
                vec![vec![a, int(2) * e], b]
            }
            Family::SepRBlocks => {
                let rr = p.require_int("r", p.r)?;
                if rr < 2 {
                    return Err(Error::FamilyParams(format!("r must be >= 2, got {rr}")));
                }
                let e = eps()?;
                check_range(e, Rational::ZERO, r(1, rr * rr), "eps")?;
                let block = r(1, rr);
                vec![vec![block; rr as usize], vec![e; rr as usize]]
            }
            Family::SharedLargeAlpha => {
                let a = p.require_alpha()?;
                if a < r(2, 3) || a >= one {
                    return Err(Error::FamilyParams(format!(
                        "shared-large-alpha needs alpha in [2/3, 1), got {a}"
                    )));
                }
                let e = eps()?;
                check_range(e, Rational::ZERO, int(2) * a - one, "eps")?;
                vec![vec![a, one - a + e, one - a, e]]
            }
            Family::SharedOddBlocks => {
                let h = p.require_int("h", p.h)?;
                if h < 1 {
                    return Err(Error::FamilyParams(format!("h must be >= 1, got {h}")));
                }
                let e = eps()?;
                let block = r(1, 2 * h + 1);
                check_range(e, Rational::ZERO, block, "eps")?;
                let mut w = vec![block; (2 * h + 1) as usize];
                w.extend([e, e]);
                vec![w]
            }
            Family::K3MmBeatsPf => {
                let e = p.eps.unwrap_or_else(k3_default_eps);
                check_range(e, Rational::ZERO, r(1, 10), "eps")?;
                let fifth = r(1, 5);
                let half = r(1, 2);
                let quarter = r(1, 4);
                vec![
                    vec![fifth + int(2) * e, fifth + e],
                    vec![half + int(5) * e, half + e],
                    vec![quarter + int(7) * e, quarter + int(11) * e],
                ]
            }
            Family::KsBelow => {
                let e = eps()?;
                check_range(e, Rational::ZERO, r(1, 12), "eps")?;
                let e2 = p.eps2.unwrap_or(e / int(2));
                check_range(e2, Rational::ZERO, e, "eps2")?;
                let q = r(1, 4);
                vec![vec![one, q + e2, q, q], vec![one - int(3) * e, q, q, q - e]]
            }
            Family::KsAbove => {
                let e = eps()?;
                if e <= Rational::ZERO || e >= r(1, 10) {
                    return Err(Error::FamilyParams(format!("eps = {e} outside (0, 1/10)")));
                }
                let q = r(1, 4);
                vec![
                    vec![one, r(3, 4), r(1, 2) + e],
                    vec![q - e, q - int(2) * e, Rational::ZERO],
                ]
            }
            Family::PfTightK => {
                let k = p.require_int("k", p.k)?;
                if k < 2 {
                    return Err(Error::FamilyParams(format!("k must be >= 2, got {k}")));
                }
                let e = eps()?;
                // x2 = (1/k, eps, ..., eps) must fit
                check_range(e, Rational::ZERO, r(1, k), "eps")?;
                let mut lists = vec![vec![one, r(1, k)]];
                lists.extend(std::iter::repeat_n(vec![e], (k - 1) as usize));
                lists
            }
        };
        Ok(lists)
    }
}

fn k3_default_eps() -> Rational {
    Rational::new(3, 1000)
}

/// `lo < v <= hi`
fn check_range(v: Rational, lo: Rational, hi: Rational, name: &str) -> Result<()> {
    if v <= lo || v > hi {
        return Err(Error::FamilyParams(format!(
            "{name} = {v} outside ({lo}, {hi}]"
        )));
    }
    Ok(())
}

impl fmt::Display for Family {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.id())
    }
}

impl FromStr for Family {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        Family::ALL
            .into_iter()
            .find(|f| f.id() == s)
            .ok_or_else(|| Error::UnknownFamily(s.to_string()))
    }
}

/// Family parameters. Rational values are relative to a unit capacity.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct FamilyParams {
    /// Scale `D`: the generated capacity.
    pub scale: Option<i128>,
    pub alpha: Option<Rational>,
    pub eps: Option<Rational>,
    pub eps2: Option<Rational>,
    pub r: Option<i128>,
    pub h: Option<i128>,
    pub k: Option<i128>,
}

impl FamilyParams {
    /// Parses `key=value` pairs separated by commas, e.g.
    /// `D=400,alpha=3/4,eps=1/100`.
    pub fn parse(text: &str) -> Result<Self> {
        let mut p = FamilyParams::default();
        for part in text.split(',').map(str::trim).filter(|s| !s.is_empty()) {
            let (key, value) = part
                .split_once('=')
                .ok_or_else(|| Error::Parse(format!("expected key=value, got {part:?}")))?;
            p.set(key.trim(), value.trim())?;
        }
        Ok(p)
    }

    pub fn set(&mut self, key: &str, value: &str) -> Result<()> {
        let int = |v: &str| -> Result<i128> {
            v.parse::<i128>()
                .map_err(|_| Error::Parse(format!("{key} must be an integer, got {v:?}")))
        };
        match key {
            "D" | "d" | "scale" => self.scale = Some(int(value)?),
            "alpha" => self.alpha = Some(value.parse()?),
            "eps" => self.eps = Some(value.parse()?),
            "eps2" => self.eps2 = Some(value.parse()?),
            "r" => self.r = Some(int(value)?),
            "h" => self.h = Some(int(value)?),
            "k" => self.k = Some(int(value)?),
            other => return Err(Error::FamilyParams(format!("unknown parameter {other:?}"))),
        }
        Ok(())
    }

    fn require_alpha(&self) -> Result<Rational> {
        self.alpha
            .ok_or_else(|| Error::FamilyParams("alpha is required".into()))
    }

    fn require_int(&self, name: &str, v: Option<i128>) -> Result<i128> {
        v.ok_or_else(|| Error::FamilyParams(format!("{name} is required")))
    }

    fn describe(&self, family: Family, scale: i128, eps: Option<Rational>, eps2: Option<Rational>) -> String {
        let mut kv: BTreeMap<&str, String> = BTreeMap::new();
        kv.insert("D", scale.to_string());
        if let Some(a) = self.alpha {
            kv.insert("alpha", a.to_string());
        }
        if let Some(e) = eps {
            kv.insert("eps", e.to_string());
        }
        if let Some(e) = eps2 {
            kv.insert("eps2", e.to_string());
        }
        for (name, v) in [("r", self.r), ("h", self.h), ("k", self.k)] {
            if let Some(v) = v {
                kv.insert(name, v.to_string());
            }
        }
        let body: Vec<String> = kv.into_iter().map(|(k, v)| format!("{k}={v}")).collect();
        format!("{}:{}", family.id(), body.join(","))
    }
}

/// Builds the named family instance, scaled to capacity `D`.
pub fn gen_family(name: &str, params: &FamilyParams) -> Result<Instance> {
    let family: Family = name.parse()?;
    let mut p = params.clone();
    if family == Family::K3MmBeatsPf && p.eps.is_none() {
        p.eps = Some(k3_default_eps());
    }
    let scale = match p.scale {
        Some(d) if d <= 0 => {
            return Err(Error::FamilyParams(format!("D must be positive, got {d}")))
        }
        Some(d) => d,
        None => family.min_scale(&p)?,
    };
    let lists = family.unit_weights(&p, Some(scale))?;
    let mut items = Vec::with_capacity(lists.len());
    for list in &lists {
        let mut scaled = Vec::with_capacity(list.len());
        for w in list {
            let v = w.scaled(scale).ok_or_else(|| {
                Error::FamilyParams(format!("weight {w} times D = {scale} is not an integer"))
            })?;
            if v < 0 {
                return Err(Error::FamilyParams(format!("weight {w} is negative")));
            }
            scaled.push(v as u64);
        }
        items.push(scaled);
    }
    let eps = match family {
        Family::K3MmBeatsPf => p.eps,
        _ => Some(p.eps.unwrap_or(Rational::new(1, scale))),
    };
    let eps2 = match family {
        Family::SepLargeAlpha => Some(p.eps2.unwrap_or(Rational::new(1, scale))),
        Family::KsBelow => Some(p.eps2.unwrap_or(eps.unwrap() / Rational::from_int(2))),
        _ => None,
    };
    let label = p.describe(family, scale, eps, eps2);
    let inst = Instance::new(
        family.kind(),
        scale as u64,
        family.agent_count(&p)?,
        items,
        label,
    )?;
    let declared = family.declared_alpha(&p)?;
    if let Some(w) = inst.max_weight() {
        if Rational::new(w as i128, scale) > declared {
            return Err(Error::FamilyParams(format!(
                "largest weight {w}/{scale} exceeds the family's alpha {declared}"
            )));
        }
    }
    Ok(inst)
}
