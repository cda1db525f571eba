//! Seeded generators of small spaces, maps and bundles.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::bits::BitSet;
use crate::bundle::Bundle;
use crate::fintop::{FiniteSpace, Space, SpaceMap};

pub const DEFAULT_SEED: u64 = 0x5eed_2024;

/// Decimal or `0x` hex.
pub fn parse_seed(s: &str) -> Option<u64> {
    let s = s.trim().replace('_', "");
    match s.strip_prefix("0x").or_else(|| s.strip_prefix("0X")) {
        Some(h) => u64::from_str_radix(h, 16).ok(),
        None => s.parse().ok(),
    }
}

/// `RLSHEAF_SEED` when set and parseable, else [`DEFAULT_SEED`].
pub fn seed() -> u64 {
    std::env::var("RLSHEAF_SEED")
        .ok()
        .and_then(|s| parse_seed(&s))
        .unwrap_or(DEFAULT_SEED)
}

pub fn rng() -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed())
}

/// Zero-padded so that byte order matches numeric order.
fn names(prefix: &str, n: usize) -> Vec<String> {
    let w = n.saturating_sub(1).to_string().len();
    (0..n).map(|i| format!("{prefix}{i:0w$}")).collect()
}

/// Reflexive-transitive closure; `below[y]` holds the `x` with `x ≤ y`.
fn closure(mut below: Vec<BitSet>) -> Vec<BitSet> {
    let n = below.len();
    for (y, b) in below.iter_mut().enumerate() {
        b.insert(y);
    }
    for k in 0..n {
        for y in 0..n {
            if below[y].contains(k) {
                let add = below[k];
                below[y] = below[y].union(&add);
            }
        }
    }
    below
}

/// A space on `n` points `{prefix}i` from a random preorder with edge probability `p`.
pub fn space(rng: &mut impl Rng, prefix: &str, n: usize, p: f64) -> Space {
    let below = (0..n)
        .map(|y| (0..n).filter(|&x| x != y && rng.gen_bool(p)).collect())
        .collect();
    FiniteSpace::from_neighbourhoods(names(prefix, n), closure(below))
        .expect("closed preorder")
        .into_shared()
}

/// An arbitrary table between two spaces, continuous or not.
pub fn map(rng: &mut impl Rng, dom: &Space, cod: &Space) -> SpaceMap {
    let table = (0..dom.len()).map(|_| rng.gen_range(0..cod.len())).collect();
    SpaceMap::new(dom.clone(), cod.clone(), table).expect("table fits")
}

/// A map between random spaces with `1..=max` points each.
pub fn space_map(rng: &mut impl Rng, max: usize) -> SpaceMap {
    let n = rng.gen_range(1..=max);
    let m = rng.gen_range(1..=max);
    let p = rng.gen_range(0.0..0.6);
    let dom = space(rng, "x", n, p);
    let cod = space(rng, "y", m, p);
    map(rng, &dom, &cod)
}

/// A bundle with at most `max_total` total points over a random base. Every
/// base point gets a non-empty stalk and total edges are kept only where
/// they respect the base order, so the projection is continuous.
pub fn bundle(rng: &mut impl Rng, max_total: usize) -> Bundle {
    let base_n = rng.gen_range(1..=max_total.clamp(1, 3));
    let base = space(rng, "b", base_n, 0.5);
    let total_n = rng.gen_range(base_n..=max_total.max(base_n));
    let mut over: Vec<usize> = (0..base_n).collect();
    over.extend((base_n..total_n).map(|_| rng.gen_range(0..base_n)));
    let below = (0..total_n)
        .map(|y| {
            (0..total_n)
                .filter(|&x| x != y && base.nbhd(over[y]).contains(over[x]) && rng.gen_bool(0.45))
                .collect()
        })
        .collect();
    let total = FiniteSpace::from_neighbourhoods(names("t", total_n), closure(below))
        .expect("closed preorder")
        .into_shared();
    let proj = SpaceMap::new(total, base, over).expect("table fits");
    Bundle::new(proj).expect("order-preserving projection")
}

/// Like [`bundle`], retried until the projection is not a local homeomorphism.
pub fn non_etale_bundle(rng: &mut impl Rng, max_total: usize) -> Bundle {
    loop {
        let b = bundle(rng, max_total);
        if !b.is_etale() {
            return b;
        }
    }
}

/// A random base and, over it, `copies` disjoint sheets, each a copy of an
/// open of the base.
pub fn etale(rng: &mut impl Rng, max_base: usize, copies: usize) -> Bundle {
    let n = rng.gen_range(1..=max_base);
    let base = space(rng, "b", n, 0.5);
    etale_over(rng, &base, copies)
}

/// `copies` sheets over random non-empty opens of `base`.
pub fn etale_over(rng: &mut impl Rng, base: &Space, copies: usize) -> Bundle {
    let opens: Vec<BitSet> = base.listed_opens().iter().copied().filter(|u| !u.is_empty()).collect();
    let mut over = Vec::new();
    let mut nbhd = Vec::new();
    for _ in 0..copies.max(1) {
        let u = opens[rng.gen_range(0..opens.len())];
        let offset = over.len();
        let members: Vec<usize> = u.iter().collect();
        for &b in &members {
            let local: BitSet = base
                .nbhd(b)
                .iter()
                .map(|c| offset + members.iter().position(|&m| m == c).expect("open is a down-set"))
                .collect();
            nbhd.push(local);
            over.push(b);
        }
    }
    let total = FiniteSpace::from_neighbourhoods(names("s", over.len()), nbhd)
        .expect("sheets are open copies")
        .into_shared();
    let proj = SpaceMap::new(total, base.clone(), over).expect("table fits");
    Bundle::new(proj).expect("sheets project continuously")
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn generators_are_deterministic() {
        let a = bundle(&mut ChaCha8Rng::seed_from_u64(7), 6);
        let b = bundle(&mut ChaCha8Rng::seed_from_u64(7), 6);
        assert_eq!(a, b);
        assert!(a.total().len() <= 6);
    }

    #[test]
    fn sheets_are_etale() {
        let mut r = ChaCha8Rng::seed_from_u64(3);
        for _ in 0..20 {
            assert!(etale(&mut r, 3, 2).is_etale());
        }
    }

    #[test]
    fn seeds_parse_in_both_bases() {
        assert_eq!(parse_seed("0x5eed_2024"), Some(DEFAULT_SEED));
        assert_eq!(parse_seed("1592598564"), Some(DEFAULT_SEED));
        assert_eq!(parse_seed("seven"), None);
    }
}
