use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use super::{Instance, Kind};
use crate::error::{Error, Result};
use crate::rational::Rational;

const MAX_RESAMPLES: usize = 10_000;

/// Random instance with `n` items per list and weights uniform in
/// `[1, floor(alpha_cap * c)]`.
///
/// Lists are redrawn until the total weight exceeds `c`. When even the
/// heaviest possible draw fits, the instance is returned flagged trivial.
pub fn gen_random(
    n: usize,
    c: u64,
    alpha_cap: Rational,
    kind: Kind,
    k: usize,
    seed: u64,
) -> Result<Instance> {
    if !alpha_cap.is_positive() || alpha_cap > Rational::ONE {
        return Err(Error::AlphaOutOfRange(alpha_cap.to_string()));
    }
    if n == 0 {
        return Err(Error::InvalidInstance("item count must be at least 1".into()));
    }
    let wmax = (alpha_cap * Rational::from_int(c as i128)).floor();
    if wmax < 1 {
        return Err(Error::InvalidInstance(format!(
            "alpha_cap {alpha_cap} times c = {c} leaves no positive integer weight"
        )));
    }
    let wmax = wmax as u64;
    let lists = match kind {
        Kind::Separate => k,
        Kind::Shared => 1,
    };
    let reachable_total = (lists * n) as u128 * wmax as u128;
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let draw = |rng: &mut ChaCha8Rng| -> Vec<Vec<u64>> {
        (0..lists)
            .map(|_| (0..n).map(|_| rng.gen_range(1..=wmax)).collect())
            .collect()
    };
    let mut items = draw(&mut rng);
    if reachable_total > c as u128 {
        let mut attempts = 1;
        while total(&items) <= c as u128 {
            if attempts == MAX_RESAMPLES {
                items = vec![vec![wmax; n]; lists];
                break;
            }
            items = draw(&mut rng);
            attempts += 1;
        }
    }
    Instance::new(kind, c, k, items, format!("random:{seed}"))
}

fn total(items: &[Vec<u64>]) -> u128 {
    items.iter().flatten().map(|&w| w as u128).sum()
}
