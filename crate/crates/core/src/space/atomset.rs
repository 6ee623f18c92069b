use std::fmt;

use super::AtomId;

const WORD: usize = 64;

/// Dense membership record over a fixed universe of atoms.
///
/// Bits beyond `universe` are always zero, so derived equality is set equality.
#[derive(Clone, PartialEq, Eq, Hash)]
pub struct AtomSet {
    words: Vec<u64>,
    universe: usize,
}

impl AtomSet {
    pub fn empty(universe: usize) -> Self {
        AtomSet {
            words: vec![0; universe.div_ceil(WORD)],
            universe,
        }
    }

    pub fn full(universe: usize) -> Self {
        let mut set = Self::empty(universe);
        for w in set.words.iter_mut() {
            *w = u64::MAX;
        }
        set.trim();
        set
    }

    pub fn from_atoms<I: IntoIterator<Item = AtomId>>(universe: usize, atoms: I) -> Self {
        let mut set = Self::empty(universe);
        for a in atoms {
            set.insert(a);
        }
        set
    }

    fn trim(&mut self) {
        let rem = self.universe % WORD;
        if rem != 0 {
            if let Some(last) = self.words.last_mut() {
                *last &= (1u64 << rem) - 1;
            }
        }
    }

    pub fn universe(&self) -> usize {
        self.universe
    }

    #[inline]
    pub fn contains(&self, a: AtomId) -> bool {
        let i = a.index();
        i < self.universe && self.words[i / WORD] & (1 << (i % WORD)) != 0
    }

    /// Inserts `a`; returns whether it was newly added.
    ///
    /// Panics if `a` lies outside the universe.
    #[inline]
    pub fn insert(&mut self, a: AtomId) -> bool {
        let i = a.index();
        assert!(i < self.universe, "atom {a} outside universe of {}", self.universe);
        let mask = 1 << (i % WORD);
        let fresh = self.words[i / WORD] & mask == 0;
        self.words[i / WORD] |= mask;
        fresh
    }

    pub fn remove(&mut self, a: AtomId) {
        let i = a.index();
        if i < self.universe {
            self.words[i / WORD] &= !(1 << (i % WORD));
        }
    }

    pub fn len(&self) -> usize {
        self.words.iter().map(|w| w.count_ones() as usize).sum()
    }

    pub fn is_empty(&self) -> bool {
        self.words.iter().all(|&w| w == 0)
    }

    pub fn is_subset(&self, other: &AtomSet) -> bool {
        self.words
            .iter()
            .zip(other.words.iter().chain(std::iter::repeat(&0)))
            .all(|(a, b)| a & !b == 0)
    }

    pub fn is_disjoint(&self, other: &AtomSet) -> bool {
        self.words.iter().zip(&other.words).all(|(a, b)| a & b == 0)
    }

    pub fn union_with(&mut self, other: &AtomSet) {
        for (a, b) in self.words.iter_mut().zip(&other.words) {
            *a |= b;
        }
    }

    pub fn intersect_with(&mut self, other: &AtomSet) {
        for (a, b) in self.words.iter_mut().zip(other.words.iter().chain(std::iter::repeat(&0))) {
            *a &= b;
        }
    }

    pub fn subtract(&mut self, other: &AtomSet) {
        for (a, b) in self.words.iter_mut().zip(&other.words) {
            *a &= !b;
        }
    }

    pub fn union(&self, other: &AtomSet) -> AtomSet {
        let mut out = self.clone();
        out.union_with(other);
        out
    }

    pub fn intersection(&self, other: &AtomSet) -> AtomSet {
        let mut out = self.clone();
        out.intersect_with(other);
        out
    }

    pub fn difference(&self, other: &AtomSet) -> AtomSet {
        let mut out = self.clone();
        out.subtract(other);
        out
    }

    pub fn complement(&self) -> AtomSet {
        let mut out = self.clone();
        for w in out.words.iter_mut() {
            *w = !*w;
        }
        out.trim();
        out
    }

    /// Least member in atom order.
    pub fn first(&self) -> Option<AtomId> {
        self.iter().next()
    }

    pub fn iter(&self) -> Iter<'_> {
        Iter {
            words: &self.words,
            word_idx: 0,
            current: self.words.first().copied().unwrap_or(0),
        }
    }
}

impl fmt::Debug for AtomSet {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_set().entries(self.iter().map(|a| a.0)).finish()
    }
}

pub struct Iter<'a> {
    words: &'a [u64],
    word_idx: usize,
    current: u64,
}

impl Iterator for Iter<'_> {
    type Item = AtomId;

    fn next(&mut self) -> Option<AtomId> {
        loop {
            if self.current != 0 {
                let bit = self.current.trailing_zeros() as usize;
                self.current &= self.current - 1;
                return Some(AtomId((self.word_idx * WORD + bit) as u32));
            }
            self.word_idx += 1;
            if self.word_idx >= self.words.len() {
                return None;
            }
            self.current = self.words[self.word_idx];
        }
    }
}

impl<'a> IntoIterator for &'a AtomSet {
    type Item = AtomId;
    type IntoIter = Iter<'a>;

    fn into_iter(self) -> Iter<'a> {
        self.iter()
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn set(n: usize, xs: &[u32]) -> AtomSet {
        AtomSet::from_atoms(n, xs.iter().map(|&x| AtomId(x)))
    }

    #[test]
    fn word_boundaries() {
        let s = set(130, &[0, 63, 64, 129]);
        assert_eq!(s.len(), 4);
        assert_eq!(s.iter().map(|a| a.0).collect::<Vec<_>>(), vec![0, 63, 64, 129]);
        let c = s.complement();
        assert_eq!(c.len(), 126);
        assert!(!c.contains(AtomId(129)));
        assert_eq!(AtomSet::full(130), s.union(&c));
    }

    #[test]
    fn algebra() {
        let a = set(10, &[1, 2, 3]);
        let b = set(10, &[3, 4]);
        assert_eq!(a.intersection(&b), set(10, &[3]));
        assert_eq!(a.difference(&b), set(10, &[1, 2]));
        assert!(set(10, &[2]).is_subset(&a));
        assert!(!a.is_subset(&b));
        assert!(set(10, &[1]).is_disjoint(&b));
        assert_eq!(AtomSet::empty(0).first(), None);
    }
}
