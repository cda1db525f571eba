//! Fixed-capacity bitsets over dense indices.
//!
//! Every finite object in this crate (spaces, lattice carriers, filter
//! families) is addressed by position in a sorted id list, so subsets are
//! stored as bitsets over those positions.

use std::fmt;

/// Maximum number of indices a [`BitSet`] can hold.
pub const CAPACITY: usize = 256;

const WORDS: usize = CAPACITY / 64;

/// A subset of `0..CAPACITY`.
#[derive(Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Default)]
pub struct BitSet([u64; WORDS]);

impl BitSet {
    pub const fn empty() -> Self {
        BitSet([0; WORDS])
    }

    /// The set `{0, .., n-1}`.
    pub fn full(n: usize) -> Self {
        assert!(n <= CAPACITY, "bitset capacity exceeded: {n}");
        let mut words = [0u64; WORDS];
        for (w, word) in words.iter_mut().enumerate() {
            let lo = w * 64;
            if n >= lo + 64 {
                *word = u64::MAX;
            } else if n > lo {
                *word = (1u64 << (n - lo)) - 1;
            }
        }
        BitSet(words)
    }

    pub fn singleton(i: usize) -> Self {
        let mut s = Self::empty();
        s.insert(i);
        s
    }

    #[inline]
    pub fn insert(&mut self, i: usize) {
        assert!(i < CAPACITY, "bitset index out of range: {i}");
        self.0[i / 64] |= 1u64 << (i % 64);
    }

    #[inline]
    pub fn remove(&mut self, i: usize) {
        if i < CAPACITY {
            self.0[i / 64] &= !(1u64 << (i % 64));
        }
    }

    #[inline]
    pub fn contains(&self, i: usize) -> bool {
        i < CAPACITY && self.0[i / 64] & (1u64 << (i % 64)) != 0
    }

    #[inline]
    pub fn union(&self, other: &Self) -> Self {
        let mut out = *self;
        for w in 0..WORDS {
            out.0[w] |= other.0[w];
        }
        out
    }

    #[inline]
    pub fn intersection(&self, other: &Self) -> Self {
        let mut out = *self;
        for w in 0..WORDS {
            out.0[w] &= other.0[w];
        }
        out
    }

    #[inline]
    pub fn difference(&self, other: &Self) -> Self {
        let mut out = *self;
        for w in 0..WORDS {
            out.0[w] &= !other.0[w];
        }
        out
    }

    #[inline]
    pub fn is_subset(&self, other: &Self) -> bool {
        (0..WORDS).all(|w| self.0[w] & !other.0[w] == 0)
    }

    #[inline]
    pub fn is_disjoint(&self, other: &Self) -> bool {
        (0..WORDS).all(|w| self.0[w] & other.0[w] == 0)
    }

    #[inline]
    pub fn is_empty(&self) -> bool {
        self.0.iter().all(|&w| w == 0)
    }

    #[inline]
    pub fn len(&self) -> usize {
        self.0.iter().map(|w| w.count_ones() as usize).sum()
    }

    /// Smallest member, if any.
    pub fn first(&self) -> Option<usize> {
        self.iter().next()
    }

    /// Members in increasing order.
    pub fn iter(&self) -> Iter {
        Iter { words: self.0, word: 0 }
    }
}

impl FromIterator<usize> for BitSet {
    fn from_iter<I: IntoIterator<Item = usize>>(iter: I) -> Self {
        let mut s = BitSet::empty();
        for i in iter {
            s.insert(i);
        }
        s
    }
}

impl Extend<usize> for BitSet {
    fn extend<I: IntoIterator<Item = usize>>(&mut self, iter: I) {
        for i in iter {
            self.insert(i);
        }
    }
}

impl IntoIterator for &BitSet {
    type Item = usize;
    type IntoIter = Iter;
    fn into_iter(self) -> Iter {
        self.iter()
    }
}

pub struct Iter {
    words: [u64; WORDS],
    word: usize,
}

impl Iterator for Iter {
    type Item = usize;

    fn next(&mut self) -> Option<usize> {
        while self.word < WORDS {
            let w = self.words[self.word];
            if w != 0 {
                let bit = w.trailing_zeros() as usize;
                self.words[self.word] &= w - 1;
                return Some(self.word * 64 + bit);
            }
            self.word += 1;
        }
        None
    }
}

impl fmt::Debug for BitSet {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_set().entries(self.iter()).finish()
    }
}

/// All subsets of `universe`, smallest first by the binary counter order.
pub fn subsets(universe: BitSet) -> impl Iterator<Item = BitSet> {
    let members: Vec<usize> = universe.iter().collect();
    assert!(members.len() < 32, "refusing to enumerate 2^{} subsets", members.len());
    (0u64..(1u64 << members.len())).map(move |mask| {
        members
            .iter()
            .enumerate()
            .filter(|(k, _)| mask & (1 << k) != 0)
            .map(|(_, &i)| i)
            .collect()
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn full_and_len() {
        assert_eq!(BitSet::full(0).len(), 0);
        assert_eq!(BitSet::full(64).len(), 64);
        assert_eq!(BitSet::full(65).len(), 65);
        assert_eq!(BitSet::full(CAPACITY).len(), CAPACITY);
        assert!(BitSet::full(70).contains(69));
        assert!(!BitSet::full(70).contains(70));
    }

    #[test]
    fn iteration_is_ascending() {
        let s: BitSet = [130, 3, 64, 0].into_iter().collect();
        assert_eq!(s.iter().collect::<Vec<_>>(), vec![0, 3, 64, 130]);
        assert_eq!(s.first(), Some(0));
    }

    #[test]
    fn subset_enumeration_counts() {
        let u: BitSet = [1, 5, 9].into_iter().collect();
        let all: Vec<_> = subsets(u).collect();
        assert_eq!(all.len(), 8);
        assert!(all.iter().all(|s| s.is_subset(&u)));
    }
}
