//! Fixed-capacity bitset over verifier ids. Version spaces, memo keys and
//! per-instance acceptance columns are all `VerifierSet`s.

use std::fmt;

#[derive(Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct VerifierSet {
    words: Box<[u64]>,
    capacity: usize,
}

impl VerifierSet {
    pub fn empty(capacity: usize) -> Self {
        VerifierSet {
            words: vec![0; capacity.div_ceil(64)].into_boxed_slice(),
            capacity,
        }
    }

    pub fn full(capacity: usize) -> Self {
        let mut s = Self::empty(capacity);
        for w in s.words.iter_mut() {
            *w = u64::MAX;
        }
        s.trim();
        s
    }

    pub fn from_ids(capacity: usize, ids: impl IntoIterator<Item = usize>) -> Self {
        let mut s = Self::empty(capacity);
        for id in ids {
            s.insert(id);
        }
        s
    }

    fn trim(&mut self) {
        let rem = self.capacity % 64;
        if rem != 0 {
            if let Some(last) = self.words.last_mut() {
                *last &= (1u64 << rem) - 1;
            }
        }
    }

    pub fn capacity(&self) -> usize {
        self.capacity
    }

    pub fn contains(&self, id: usize) -> bool {
        id < self.capacity && self.words[id / 64] >> (id % 64) & 1 == 1
    }

    pub fn insert(&mut self, id: usize) {
        assert!(id < self.capacity, "verifier id {id} out of range");
        self.words[id / 64] |= 1 << (id % 64);
    }

    pub fn remove(&mut self, id: usize) {
        if id < self.capacity {
            self.words[id / 64] &= !(1 << (id % 64));
        }
    }

    pub fn len(&self) -> usize {
        self.words.iter().map(|w| w.count_ones() as usize).sum()
    }

    pub fn is_empty(&self) -> bool {
        self.words.iter().all(|&w| w == 0)
    }

    pub fn intersection(&self, other: &Self) -> Self {
        self.zip(other, |a, b| a & b)
    }

    pub fn difference(&self, other: &Self) -> Self {
        self.zip(other, |a, b| a & !b)
    }

    pub fn union(&self, other: &Self) -> Self {
        self.zip(other, |a, b| a | b)
    }

    pub fn is_subset(&self, other: &Self) -> bool {
        self.words
            .iter()
            .zip(other.words.iter())
            .all(|(a, b)| a & !b == 0)
    }

    pub fn is_disjoint(&self, other: &Self) -> bool {
        self.words
            .iter()
            .zip(other.words.iter())
            .all(|(a, b)| a & b == 0)
    }

    /// True when `self ∩ other` is nonempty and differs from `self`.
    pub fn splits(&self, other: &Self) -> bool {
        let mut some_in = false;
        let mut some_out = false;
        for (a, b) in self.words.iter().zip(other.words.iter()) {
            some_in |= a & b != 0;
            some_out |= a & !b != 0;
        }
        some_in && some_out
    }

    pub fn first(&self) -> Option<usize> {
        self.iter().next()
    }

    pub fn iter(&self) -> impl Iterator<Item = usize> + '_ {
        self.words.iter().enumerate().flat_map(|(i, &w)| {
            let mut w = w;
            std::iter::from_fn(move || {
                if w == 0 {
                    None
                } else {
                    let bit = w.trailing_zeros() as usize;
                    w &= w - 1;
                    Some(i * 64 + bit)
                }
            })
        })
    }

    fn zip(&self, other: &Self, f: impl Fn(u64, u64) -> u64) -> Self {
        debug_assert_eq!(self.capacity, other.capacity);
        VerifierSet {
            words: self
                .words
                .iter()
                .zip(other.words.iter())
                .map(|(&a, &b)| f(a, b))
                .collect(),
            capacity: self.capacity,
        }
    }
}

impl fmt::Debug for VerifierSet {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_set().entries(self.iter()).finish()
    }
}
