//! Closed-form Price of Fairness curves in the largest relative item
//! weight `alpha`.
//!
//! Piece boundaries: separate curves use [2/3, 1], [1/2, 2/3), (0, 1/2);
//! shared curves use (2/3, 1], (1/3, 2/3], (0, 1/3]. Adjacent upper pieces
//! agree at every breakpoint, so the choice never changes an upper bound.

use num_integer::Roots;

use crate::error::{Error, Result};
use crate::instance::Kind;
use crate::rational::Rational;

use super::Criterion;

fn r(n: i128, d: i128) -> Rational {
    Rational::new(n, d)
}

fn check_alpha(alpha: Rational) -> Result<()> {
    if !alpha.is_positive() || alpha > Rational::ONE {
        return Err(Error::AlphaOutOfRange(alpha.to_string()));
    }
    Ok(())
}

/// `1 / ceil(1 / alpha)`.
fn block_lower(alpha: Rational) -> Rational {
    r(1, alpha.recip().ceil())
}

/// `2 ceil(1 / (2 alpha)) + 1`.
fn odd_blocks(alpha: Rational) -> i128 {
    2 * (alpha * Rational::from_int(2)).recip().ceil() + 1
}

/// `(lower, upper)` for maximin with separate items.
pub fn bound_mm_separate(alpha: Rational) -> Result<(Rational, Rational)> {
    check_alpha(alpha)?;
    Ok(if alpha >= r(2, 3) {
        let v = Rational::from_int(2) - alpha.recip();
        (v, v)
    } else if alpha >= r(1, 2) {
        (r(1, 2), r(1, 2))
    } else {
        (block_lower(alpha), alpha)
    })
}

/// Same curve as maximin.
pub fn bound_ks_separate(alpha: Rational) -> Result<(Rational, Rational)> {
    bound_mm_separate(alpha)
}

pub fn bound_pf_separate(alpha: Rational) -> Result<(Rational, Rational)> {
    check_alpha(alpha)?;
    Ok(if alpha >= r(1, 2) {
        (r(1, 2), r(1, 2))
    } else {
        (block_lower(alpha), alpha)
    })
}

/// `(lower, upper)` for maximin with shared items.
pub fn bound_mm_shared(alpha: Rational) -> Result<(Rational, Rational)> {
    check_alpha(alpha)?;
    Ok(if alpha > r(2, 3) {
        let v = Rational::from_int(2) * alpha - Rational::ONE;
        (v, v)
    } else if alpha > r(1, 3) {
        (r(1, 3), r(1, 3))
    } else {
        (r(1, odd_blocks(alpha)), alpha)
    })
}

/// Both agents reach the same best alone, so KS coincides with maximin.
pub fn bound_ks_shared(alpha: Rational) -> Result<(Rational, Rational)> {
    bound_mm_shared(alpha)
}

/// A proportional fair solution with shared items is system optimal.
pub fn bound_pf_shared(alpha: Rational) -> Result<(Rational, Rational)> {
    check_alpha(alpha)?;
    Ok((Rational::ZERO, Rational::ZERO))
}

/// `(k - 1) / k`, valid for any agent count.
pub fn bound_pf_general(k: usize) -> Result<Rational> {
    if k < 2 {
        return Err(Error::UnsupportedAgentCount(k));
    }
    Ok(r(k as i128 - 1, k as i128))
}

/// Bound for any criterion returning Pareto-efficient solutions and any
/// agent count: an efficient load exceeds `c - max weight`, so the loss
/// stays below `alpha`.
pub fn bound_efficient(alpha: Rational) -> Result<(Rational, Rational)> {
    check_alpha(alpha)?;
    Ok((Rational::ZERO, alpha))
}

/// Bound curve for a scenario, criterion and agent count.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct BoundCurve {
    pub scenario: Kind,
    pub criterion: Criterion,
    pub agents: usize,
}

impl BoundCurve {
    pub fn new(scenario: Kind, criterion: Criterion, agents: usize) -> Self {
        BoundCurve { scenario, criterion, agents }
    }

    /// `(lower, upper)` at `alpha`. Beyond two agents only the general
    /// upper bounds are known, and the lower end is reported as 0.
    pub fn eval(&self, alpha: Rational) -> Result<(Rational, Rational)> {
        if self.agents < 2 {
            return Err(Error::UnsupportedAgentCount(self.agents));
        }
        if self.agents == 2 {
            return match (self.scenario, self.criterion) {
                (Kind::Separate, Criterion::Mm) => bound_mm_separate(alpha),
                (Kind::Separate, Criterion::Ks) => bound_ks_separate(alpha),
                (Kind::Separate, Criterion::Pf) => bound_pf_separate(alpha),
                (Kind::Shared, Criterion::Mm) => bound_mm_shared(alpha),
                (Kind::Shared, Criterion::Ks) => bound_ks_shared(alpha),
                (Kind::Shared, Criterion::Pf) => bound_pf_shared(alpha),
            };
        }
        match (self.scenario, self.criterion) {
            (Kind::Shared, Criterion::Pf) => bound_pf_shared(alpha),
            (_, Criterion::Pf) => {
                let (_, up) = bound_efficient(alpha)?;
                Ok((Rational::ZERO, up.min(bound_pf_general(self.agents)?)))
            }
            _ => bound_efficient(alpha),
        }
    }
}

/// Rational enclosure `[lo, hi]` of `sqrt(k)` with denominator `den`.
pub fn sqrt_enclosure(k: u64, den: u64) -> (Rational, Rational) {
    let scaled = k as u128 * den as u128 * den as u128;
    let s = scaled.sqrt();
    let lo = r(s as i128, den as i128);
    let hi = if s * s == scaled { lo } else { r(s as i128 + 1, den as i128) };
    (lo, hi)
}

const SQRT_DEN: u64 = 1_000_000_000;

/// Enclosure of `(k-1)/k + F - G` with `F = min b / sum b` and
/// `G = ((2 sqrt(k) - 1) / k) (min b / max b)`.
pub fn bertsimas_enclosure(bests: &[u64]) -> Result<(Rational, Rational)> {
    let k = bests.len();
    let base = bound_pf_general(k)?;
    let max = *bests.iter().max().expect("k >= 2");
    if max == 0 {
        return Err(Error::AllBestsZero);
    }
    let min = *bests.iter().min().expect("k >= 2") as i128;
    let sum: i128 = bests.iter().map(|&b| b as i128).sum();
    let f = r(min, sum);
    let ratio = r(min, max as i128);
    let (s_lo, s_hi) = sqrt_enclosure(k as u64, SQRT_DEN);
    let kk = Rational::from_int(k as i128);
    let g = |s: Rational| (Rational::from_int(2) * s - Rational::ONE) / kk * ratio;
    Ok((base + f - g(s_hi), base + f - g(s_lo)))
}

/// Upper end of [`bertsimas_enclosure`].
pub fn bertsimas_bound(bests: &[u64]) -> Result<Rational> {
    Ok(bertsimas_enclosure(bests)?.1)
}

/// Ratio of upper to lower bound where the two differ: `alpha ceil(1/alpha)`
/// for separate items (alpha < 1/2), `alpha (2 ceil(1/(2 alpha)) + 1)` for
/// shared items (alpha <= 1/3).
pub fn gap_ratio(alpha: Rational, scenario: Kind) -> Result<Rational> {
    check_alpha(alpha)?;
    match scenario {
        Kind::Separate if alpha < r(1, 2) => Ok(alpha * Rational::from_int(alpha.recip().ceil())),
        Kind::Shared if alpha <= r(1, 3) => Ok(alpha * Rational::from_int(odd_blocks(alpha))),
        _ => Err(Error::OutOfRegime(format!(
            "alpha = {alpha} has coinciding {scenario} bounds"
        ))),
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn separate_table_rows() {
        assert_eq!(bound_mm_separate(r(3, 4)).unwrap(), (r(2, 3), r(2, 3)));
        assert_eq!(bound_mm_separate(r(1, 2)).unwrap(), (r(1, 2), r(1, 2)));
        assert_eq!(bound_mm_separate(r(1, 5)).unwrap(), (r(1, 5), r(1, 5)));
        assert_eq!(bound_mm_separate(r(2, 5)).unwrap(), (r(1, 3), r(2, 5)));
        assert_eq!(bound_ks_separate(Rational::ONE).unwrap(), (Rational::ONE, Rational::ONE));
        assert_eq!(bound_ks_separate(r(2, 3)).unwrap(), (r(1, 2), r(1, 2)));
        assert_eq!(bound_ks_separate(r(1, 4)).unwrap(), (r(1, 4), r(1, 4)));
    }

    #[test]
    fn pf_rows() {
        assert_eq!(bound_pf_separate(Rational::ONE).unwrap(), (r(1, 2), r(1, 2)));
        assert_eq!(bound_pf_separate(r(9, 10)).unwrap(), (r(1, 2), r(1, 2)));
        assert_eq!(bound_pf_separate(r(3, 10)).unwrap(), (r(1, 4), r(3, 10)));
        assert_eq!(bound_pf_general(2).unwrap(), r(1, 2));
        assert_eq!(bound_pf_general(3).unwrap(), r(2, 3));
        assert_eq!(bound_pf_general(10).unwrap(), r(9, 10));
        assert!(bound_pf_general(1).is_err());
    }

    #[test]
    fn shared_rows() {
        assert_eq!(bound_mm_shared(r(3, 4)).unwrap(), (r(1, 2), r(1, 2)));
        assert_eq!(bound_mm_shared(r(1, 2)).unwrap(), (r(1, 3), r(1, 3)));
        assert_eq!(bound_mm_shared(r(1, 4)).unwrap(), (r(1, 5), r(1, 4)));
        assert_eq!(bound_mm_shared(r(2, 3)).unwrap(), (r(1, 3), r(1, 3)));
    }

    #[test]
    fn out_of_range() {
        for a in [Rational::ZERO, r(-1, 2), r(3, 2)] {
            assert!(matches!(bound_mm_separate(a), Err(Error::AlphaOutOfRange(_))));
            assert!(matches!(bound_mm_shared(a), Err(Error::AlphaOutOfRange(_))));
        }
    }

    #[test]
    fn breakpoints_agree() {
        let two = Rational::from_int(2);
        assert_eq!(two - r(2, 3).recip(), r(1, 2));
        assert_eq!(two * r(2, 3) - Rational::ONE, r(1, 3));
        // upper pieces meet at the lower breakpoints
        assert_eq!(bound_mm_separate(r(1, 2)).unwrap().1, bound_mm_separate(r(49, 100)).unwrap().1 + r(1, 100));
        assert_eq!(bound_mm_shared(r(1, 3)).unwrap().1, r(1, 3));
        assert_eq!(block_lower(r(1, 2)), r(1, 2));
    }

    #[test]
    fn monotone_on_dense_grid() {
        let grid: Vec<Rational> = (1..=600).map(|i| r(i, 600)).collect();
        type Curve = fn(Rational) -> Result<(Rational, Rational)>;
        let curves: [Curve; 4] = [bound_mm_separate, bound_pf_separate, bound_mm_shared, bound_pf_shared];
        for f in curves {
            let vals: Vec<_> = grid.iter().map(|&a| f(a).unwrap()).collect();
            for w in vals.windows(2) {
                assert!(w[0].0 <= w[1].0 && w[0].1 <= w[1].1);
            }
            assert!(vals.iter().all(|(lo, up)| lo <= up));
        }
    }

    #[test]
    fn sqrt_enclosures() {
        let (lo, hi) = sqrt_enclosure(2, 1000);
        assert_eq!((lo, hi), (r(1414, 1000), r(1415, 1000)));
        assert_eq!(sqrt_enclosure(4, 7), (Rational::from_int(2), Rational::from_int(2)));
    }

    #[test]
    fn bertsimas_values() {
        // equal bests: 3/2 - sqrt(2)
        let (lo, hi) = bertsimas_enclosure(&[5, 5]).unwrap();
        let target = 1.5 - std::f64::consts::SQRT_2;
        assert!(lo <= hi);
        assert!(lo.to_f64() <= target + 1e-12 && target - 1e-12 <= hi.to_f64());
        assert!(hi - lo <= r(1, 1_000_000_000));
        let b = bertsimas_bound(&[100, 1]).unwrap();
        let expect = 0.5 + 1.0 / 101.0 - (2.0 * std::f64::consts::SQRT_2 - 1.0) / 2.0 / 100.0;
        assert!((b.to_f64() - expect).abs() < 1e-9);
        // F - G < 0 for the six-solution bests
        assert!(bertsimas_bound(&[400, 388]).unwrap() < r(1, 2));
        assert!(bertsimas_bound(&[0, 0]).is_err());
    }

    #[test]
    fn gap_ratios() {
        assert_eq!(gap_ratio(r(2, 5), Kind::Separate).unwrap(), r(6, 5));
        assert_eq!(gap_ratio(r(1, 4), Kind::Shared).unwrap(), r(5, 4));
        assert_eq!(gap_ratio(r(1, 7), Kind::Separate).unwrap(), Rational::ONE);
        assert!(gap_ratio(r(1, 2), Kind::Separate).is_err());
        assert!(gap_ratio(r(1, 2), Kind::Shared).is_err());
        for i in 3..400 {
            let a = r(10, 10 * i - 7);
            let h = a.recip().ceil();
            assert!(gap_ratio(a, Kind::Separate).unwrap() <= r(h, h - 1));
        }
    }

    #[test]
    fn shared_gap_ratio_stays_below_loose_bound() {
        for i in 3..400 {
            let a = r(10, 10 * i + 3);
            let h = (a * Rational::from_int(2)).recip().ceil();
            let g = gap_ratio(a, Kind::Shared).unwrap();
            assert!(g >= Rational::ONE);
            assert!(g < r(2 * h + 1, 2 * h - 2), "alpha {a}");
        }
    }

    #[test]
    fn curve_dispatch() {
        let c = BoundCurve::new(Kind::Separate, Criterion::Mm, 3);
        assert_eq!(c.eval(r(3, 4)).unwrap(), (Rational::ZERO, r(3, 4)));
        let c = BoundCurve::new(Kind::Separate, Criterion::Pf, 3);
        assert_eq!(c.eval(Rational::ONE).unwrap(), (Rational::ZERO, r(2, 3)));
        let c = BoundCurve::new(Kind::Shared, Criterion::Ks, 2);
        assert_eq!(c.eval(r(3, 4)).unwrap(), (r(1, 2), r(1, 2)));
    }
}
