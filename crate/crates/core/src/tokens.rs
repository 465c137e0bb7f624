//! Token index sets (phrase and edge coverage).

use alloc::vec::Vec;
use core::fmt;

/// A set of token indices stored as a bit vector.
#[derive(Clone, Default, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct TokenSet {
    words: Vec<u64>,
}

impl TokenSet {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn singleton(index: u32) -> Self {
        let mut s = Self::new();
        s.insert(index);
        s
    }

    pub fn insert(&mut self, index: u32) {
        let (w, b) = (index as usize / 64, index % 64);
        if self.words.len() <= w {
            self.words.resize(w + 1, 0);
        }
        self.words[w] |= 1 << b;
    }

    pub fn remove(&mut self, index: u32) {
        let (w, b) = (index as usize / 64, index % 64);
        if let Some(word) = self.words.get_mut(w) {
            *word &= !(1 << b);
        }
        self.trim();
    }

    pub fn contains(&self, index: u32) -> bool {
        let (w, b) = (index as usize / 64, index % 64);
        self.words.get(w).is_some_and(|word| word & (1 << b) != 0)
    }

    pub fn len(&self) -> usize {
        self.words.iter().map(|w| w.count_ones() as usize).sum()
    }

    pub fn is_empty(&self) -> bool {
        self.words.iter().all(|w| *w == 0)
    }

    pub fn first(&self) -> Option<u32> {
        self.words
            .iter()
            .enumerate()
            .find(|(_, w)| **w != 0)
            .map(|(i, w)| i as u32 * 64 + w.trailing_zeros())
    }

    pub fn last(&self) -> Option<u32> {
        self.words
            .iter()
            .enumerate()
            .rev()
            .find(|(_, w)| **w != 0)
            .map(|(i, w)| i as u32 * 64 + 63 - w.leading_zeros())
    }

    pub fn union(&self, other: &TokenSet) -> TokenSet {
        let n = self.words.len().max(other.words.len());
        let words = (0..n)
            .map(|i| self.words.get(i).copied().unwrap_or(0) | other.words.get(i).copied().unwrap_or(0))
            .collect();
        TokenSet { words }
    }

    pub fn difference(&self, other: &TokenSet) -> TokenSet {
        let words = self
            .words
            .iter()
            .enumerate()
            .map(|(i, w)| w & !other.words.get(i).copied().unwrap_or(0))
            .collect();
        let mut out = TokenSet { words };
        out.trim();
        out
    }

    pub fn is_disjoint(&self, other: &TokenSet) -> bool {
        self.words.iter().zip(&other.words).all(|(a, b)| a & b == 0)
    }

    pub fn is_subset(&self, other: &TokenSet) -> bool {
        self.words
            .iter()
            .enumerate()
            .all(|(i, w)| w & !other.words.get(i).copied().unwrap_or(0) == 0)
    }

    /// Number of maximal runs of missing indices strictly between min and max.
    pub fn gap_count(&self) -> usize {
        let mut gaps = 0;
        let mut prev: Option<u32> = None;
        for i in self.iter() {
            if let Some(p) = prev {
                if i > p + 1 {
                    gaps += 1;
                }
            }
            prev = Some(i);
        }
        gaps
    }

    pub fn is_contiguous(&self) -> bool {
        self.gap_count() == 0
    }

    /// Indices inside `[min, max]` that are not members.
    pub fn holes(&self) -> TokenSet {
        let mut out = TokenSet::new();
        if let (Some(lo), Some(hi)) = (self.first(), self.last()) {
            for i in lo..=hi {
                if !self.contains(i) {
                    out.insert(i);
                }
            }
        }
        out
    }

    pub fn iter(&self) -> impl Iterator<Item = u32> + '_ {
        self.words.iter().enumerate().flat_map(|(i, &w)| {
            (0..64u32)
                .filter(move |b| w & (1 << b) != 0)
                .map(move |b| i as u32 * 64 + b)
        })
    }

    fn trim(&mut self) {
        while self.words.last() == Some(&0) {
            self.words.pop();
        }
    }
}

impl FromIterator<u32> for TokenSet {
    fn from_iter<I: IntoIterator<Item = u32>>(iter: I) -> Self {
        let mut s = TokenSet::new();
        for i in iter {
            s.insert(i);
        }
        s
    }
}

impl fmt::Debug for TokenSet {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_set().entries(self.iter()).finish()
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn gaps_and_holes() {
        let s: TokenSet = [0, 1, 3, 6, 7].into_iter().collect();
        assert_eq!(s.gap_count(), 2);
        assert_eq!(s.holes().iter().collect::<Vec<_>>(), [2, 4, 5]);
        assert_eq!(s.first(), Some(0));
        assert_eq!(s.last(), Some(7));
        assert!(!s.is_contiguous());
    }

    #[test]
    fn set_algebra_across_words() {
        let a: TokenSet = [1, 70].into_iter().collect();
        let b: TokenSet = [2, 130].into_iter().collect();
        assert!(a.is_disjoint(&b));
        let u = a.union(&b);
        assert_eq!(u.len(), 4);
        assert_eq!(u.last(), Some(130));
        assert_eq!(u.difference(&b), a);
        assert!(a.is_subset(&u));
        let mut c = u.clone();
        c.remove(130);
        assert_eq!(c.last(), Some(70));
    }
}
