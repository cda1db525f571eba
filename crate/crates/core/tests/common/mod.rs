//! Brute-force oracles. Nothing here calls the library's algorithms; only
//! raw tables, orders and open families are read.

#![allow(dead_code)]

use std::collections::BTreeSet;

use rlsheaf_core::fintop::{FiniteSpace, SpaceMap};
use rlsheaf_core::rlcore::ResiduatedLattice;
use rlsheaf_core::BitSet;

pub fn mask(s: &BitSet) -> u64 {
    s.iter().fold(0, |m, i| m | 1 << i)
}

pub fn members(m: u64, n: usize) -> impl Iterator<Item = usize> {
    (0..n).filter(move |i| m >> i & 1 == 1)
}

pub fn named(l: &ResiduatedLattice, m: u64) -> BTreeSet<String> {
    members(m, l.len()).map(|i| l.name(i).to_string()).collect()
}

pub fn set(names: &[&str]) -> BTreeSet<String> {
    names.iter().map(|s| s.to_string()).collect()
}

/// Non-empty, upward closed, closed under `⊙`.
pub fn is_filter(l: &ResiduatedLattice, m: u64) -> bool {
    let n = l.len();
    m != 0
        && members(m, n).all(|x| (0..n).all(|y| !l.leq(x, y) || m >> y & 1 == 1))
        && members(m, n).all(|x| members(m, n).all(|y| m >> l.mul(x, y) & 1 == 1))
}

pub fn filters(l: &ResiduatedLattice) -> Vec<u64> {
    (1..1u64 << l.len()).filter(|&m| is_filter(l, m)).collect()
}

pub fn is_proper(l: &ResiduatedLattice, m: u64) -> bool {
    m >> l.bot() & 1 == 0
}

pub fn is_prime(l: &ResiduatedLattice, m: u64) -> bool {
    let n = l.len();
    is_proper(l, m) && (0..n).all(|x| (0..n).all(|y| m >> l.join(x, y) & 1 == 0 || m >> x & 1 == 1 || m >> y & 1 == 1))
}

pub fn maximal(l: &ResiduatedLattice) -> Vec<u64> {
    let proper: Vec<u64> = filters(l).into_iter().filter(|&m| is_proper(l, m)).collect();
    proper
        .iter()
        .copied()
        .filter(|&m| !proper.iter().any(|&o| o != m && o & m == m))
        .collect()
}

pub fn minimal_prime(l: &ResiduatedLattice) -> Vec<u64> {
    let primes: Vec<u64> = filters(l).into_iter().filter(|&m| is_prime(l, m)).collect();
    primes
        .iter()
        .copied()
        .filter(|&m| !primes.iter().any(|&o| o != m && o & m == o))
        .collect()
}

/// The greatest `z` with `x⊙z ≤ y`, found by scanning.
pub fn residual(l: &ResiduatedLattice, x: usize, y: usize) -> Option<usize> {
    let n = l.len();
    let cands: Vec<usize> = (0..n).filter(|&z| l.leq(l.mul(x, z), y)).collect();
    cands.iter().copied().find(|&z| cands.iter().all(|&w| l.leq(w, z)))
}

pub fn permutations(n: usize) -> Vec<Vec<usize>> {
    if n == 0 {
        return vec![vec![]];
    }
    let mut out = Vec::new();
    for p in permutations(n - 1) {
        for k in 0..n {
            let mut q = p.clone();
            q.insert(k, n - 1);
            out.push(q);
        }
    }
    out
}

/// A bijection preserving order and all four operations, by trying every permutation.
pub fn isomorphism(a: &ResiduatedLattice, b: &ResiduatedLattice) -> Option<Vec<usize>> {
    if a.len() != b.len() {
        return None;
    }
    let n = a.len();
    permutations(n).into_iter().find(|p| {
        (0..n).all(|x| {
            (0..n).all(|y| {
                a.leq(x, y) == b.leq(p[x], p[y])
                    && p[a.mul(x, y)] == b.mul(p[x], p[y])
                    && p[a.imp(x, y)] == b.imp(p[x], p[y])
                    && p[a.join(x, y)] == b.join(p[x], p[y])
                    && p[a.meet(x, y)] == b.meet(p[x], p[y])
            })
        })
    })
}

/// Every map `dom → cod` of residuated lattices, by enumerating all tables.
pub fn rl_morphisms(a: &ResiduatedLattice, b: &ResiduatedLattice) -> Vec<Vec<usize>> {
    let (n, m) = (a.len(), b.len());
    let total = (m as u64).pow(n as u32);
    let mut out = Vec::new();
    for code in 0..total {
        let mut c = code;
        let t: Vec<usize> = (0..n)
            .map(|_| {
                let v = (c % m as u64) as usize;
                c /= m as u64;
                v
            })
            .collect();
        let ok = t[a.bot()] == b.bot()
            && t[a.top()] == b.top()
            && (0..n).all(|x| {
                (0..n).all(|y| {
                    t[a.mul(x, y)] == b.mul(t[x], t[y])
                        && t[a.imp(x, y)] == b.imp(t[x], t[y])
                        && t[a.join(x, y)] == b.join(t[x], t[y])
                        && t[a.meet(x, y)] == b.meet(t[x], t[y])
                })
            });
        if ok {
            out.push(t);
        }
    }
    out
}

pub fn opens(s: &FiniteSpace) -> BTreeSet<u64> {
    s.listed_opens().iter().map(mask).collect()
}

/// Smallest family containing `family`, `∅` and the carrier, closed under
/// pairwise intersection and union.
pub fn topology_from_subbasis(n: usize, family: &[u64]) -> BTreeSet<u64> {
    let full = if n == 64 { u64::MAX } else { (1u64 << n) - 1 };
    let mut t: BTreeSet<u64> = family.iter().copied().collect();
    t.insert(0);
    t.insert(full);
    loop {
        let cur: Vec<u64> = t.iter().copied().collect();
        let before = t.len();
        for &a in &cur {
            for &b in &cur {
                t.insert(a & b);
                t.insert(a | b);
            }
        }
        if t.len() == before {
            return t;
        }
    }
}

/// Sets whose preimage under every member of the family is open in its domain.
pub fn final_topology(n: usize, family: &[(BTreeSet<u64>, Vec<usize>)]) -> BTreeSet<u64> {
    (0..1u64 << n)
        .filter(|&v| {
            family.iter().all(|(opens, table)| {
                let pre = table
                    .iter()
                    .enumerate()
                    .filter(|(_, &t)| v >> t & 1 == 1)
                    .fold(0u64, |m, (i, _)| m | 1 << i);
                opens.contains(&pre)
            })
        })
        .collect()
}

/// Continuity by preimages of every open, from the raw open families.
pub fn continuous(f: &SpaceMap) -> bool {
    let dom = opens(f.dom());
    opens(f.cod()).iter().all(|&v| {
        let pre = f
            .table()
            .iter()
            .enumerate()
            .filter(|(_, &t)| v >> t & 1 == 1)
            .fold(0u64, |m, (i, _)| m | 1 << i);
        dom.contains(&pre)
    })
}

fn image(f: &SpaceMap, u: u64) -> u64 {
    members(u, f.dom().len()).fold(0, |m, x| m | 1 << f.apply(x))
}

/// The definition: every point has an open neighbourhood mapped injectively
/// onto an open set, with open subsets going to open subsets and back.
pub fn local_homeomorphism(f: &SpaceMap) -> bool {
    if !continuous(f) {
        return false;
    }
    let dom = opens(f.dom());
    let cod = opens(f.cod());
    let n = f.dom().len();
    (0..n).all(|x| {
        dom.iter().any(|&v| {
            if v >> x & 1 == 0 {
                return false;
            }
            let img = image(f, v);
            let injective = members(v, n).count() == members(img, f.cod().len()).count();
            injective && cod.contains(&img) && dom.iter().filter(|&&w| w & v == w).all(|&w| cod.contains(&image(f, w)))
        })
    })
}
