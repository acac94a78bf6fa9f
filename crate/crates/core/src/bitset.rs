//! Fixed-capacity bit sets used for shapes and truth tables.

use alloc::vec;
use alloc::vec::Vec;

/// A growable set of small integers stored as 64-bit words.
///
/// Trailing zero words are never stored, so two sets with the same members
/// compare and hash equal regardless of the capacity they were built with.
#[derive(Debug, Clone, Default, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct BitSet {
    words: Vec<u64>,
}

impl BitSet {
    pub fn new() -> Self {
        BitSet { words: Vec::new() }
    }

    pub fn from_indices(indices: impl IntoIterator<Item = usize>) -> Self {
        let mut s = BitSet::new();
        for i in indices {
            s.insert(i);
        }
        s
    }

    pub fn insert(&mut self, i: usize) {
        let w = i / 64;
        if w >= self.words.len() {
            self.words.resize(w + 1, 0);
        }
        self.words[w] |= 1 << (i % 64);
    }

    pub fn contains(&self, i: usize) -> bool {
        self.words
            .get(i / 64)
            .is_some_and(|w| w & (1 << (i % 64)) != 0)
    }

    pub fn is_empty(&self) -> bool {
        self.words.is_empty()
    }

    pub fn len(&self) -> usize {
        self.words.iter().map(|w| w.count_ones() as usize).sum()
    }

    pub fn iter(&self) -> impl Iterator<Item = usize> + '_ {
        self.words.iter().enumerate().flat_map(|(wi, &w)| {
            let mut rest = w;
            core::iter::from_fn(move || {
                if rest == 0 {
                    return None;
                }
                let b = rest.trailing_zeros() as usize;
                rest &= rest - 1;
                Some(wi * 64 + b)
            })
        })
    }
}

/// A truth table over `2^n` assignments, bit `a` describing the assignment in
/// which variable `v` takes the value of bit `v - 1` of `a`.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct TruthTable {
    num_vars: u32,
    words: Vec<u64>,
}

impl TruthTable {
    pub fn zeros(num_vars: u32) -> Self {
        TruthTable {
            num_vars,
            words: vec![0; Self::word_count(num_vars)],
        }
    }

    pub fn ones(num_vars: u32) -> Self {
        let mut t = TruthTable {
            num_vars,
            words: vec![!0; Self::word_count(num_vars)],
        };
        t.mask_tail();
        t
    }

    /// Table of the positive literal on `var`.
    pub fn literal(num_vars: u32, var: u32, positive: bool) -> Self {
        let mut t = TruthTable::zeros(num_vars);
        for a in 0..t.len() {
            if ((a >> (var - 1)) & 1 == 1) == positive {
                t.set(a, true);
            }
        }
        t
    }

    pub(crate) fn word_count(num_vars: u32) -> usize {
        (1usize << num_vars).div_ceil(64)
    }

    fn mask_tail(&mut self) {
        let bits = 1usize << self.num_vars;
        if bits < 64 {
            self.words[0] &= (1u64 << bits) - 1;
        }
    }

    pub fn num_vars(&self) -> u32 {
        self.num_vars
    }

    /// Number of assignments, `2^n`.
    pub fn len(&self) -> usize {
        1 << self.num_vars
    }

    pub fn is_empty(&self) -> bool {
        false
    }

    pub fn get(&self, a: usize) -> bool {
        self.words[a / 64] & (1 << (a % 64)) != 0
    }

    pub fn set(&mut self, a: usize, value: bool) {
        if value {
            self.words[a / 64] |= 1 << (a % 64);
        } else {
            self.words[a / 64] &= !(1 << (a % 64));
        }
    }

    pub fn count_ones(&self) -> u64 {
        self.words.iter().map(|w| u64::from(w.count_ones())).sum()
    }

    pub fn words(&self) -> &[u64] {
        &self.words
    }

    pub(crate) fn words_mut(&mut self) -> &mut [u64] {
        &mut self.words
    }

    pub fn and(&self, other: &TruthTable) -> TruthTable {
        self.zip(other, |a, b| a & b)
    }

    pub fn or(&self, other: &TruthTable) -> TruthTable {
        self.zip(other, |a, b| a | b)
    }

    pub fn not(&self) -> TruthTable {
        let mut t = TruthTable {
            num_vars: self.num_vars,
            words: self.words.iter().map(|w| !w).collect(),
        };
        t.mask_tail();
        t
    }

    pub fn intersects(&self, other: &TruthTable) -> bool {
        self.words
            .iter()
            .zip(&other.words)
            .any(|(a, b)| a & b != 0)
    }

    fn zip(&self, other: &TruthTable, f: impl Fn(u64, u64) -> u64) -> TruthTable {
        assert_eq!(self.num_vars, other.num_vars);
        TruthTable {
            num_vars: self.num_vars,
            words: self
                .words
                .iter()
                .zip(&other.words)
                .map(|(&a, &b)| f(a, b))
                .collect(),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn bitset_equality_ignores_capacity() {
        let mut a = BitSet::from_indices([3, 70]);
        let b = BitSet::from_indices([70, 3]);
        assert_eq!(a, b);
        a.insert(3);
        assert_eq!(a.len(), 2);
        assert_eq!(a.iter().collect::<Vec<_>>(), vec![3, 70]);
        assert!(!a.contains(4));
        assert!(BitSet::new().is_empty());
    }

    #[test]
    fn literal_tables() {
        let x1 = TruthTable::literal(2, 1, true);
        assert_eq!(
            (0..4).map(|a| x1.get(a)).collect::<Vec<_>>(),
            vec![false, true, false, true]
        );
        let nx2 = TruthTable::literal(2, 2, false);
        assert_eq!(nx2.count_ones(), 2);
        assert_eq!(x1.or(&x1.not()), TruthTable::ones(2));
        assert_eq!(TruthTable::ones(0).count_ones(), 1);
    }
}
