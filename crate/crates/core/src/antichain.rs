//! Finite antichains of words, read as unions of cones: clopen subsets of
//! Cantor space.

use std::collections::BTreeSet;
use std::fmt;

use crate::error::{Error, Result};
use crate::word::{check_word, comparable, fmt_word, Letter, Word};

/// A clopen set `⋃ [w]` in canonical form: pairwise incomparable words, sorted,
/// with every complete sibling set `u0, .., u(n-1)` merged into `u`.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct ConeAntichain {
    n: usize,
    words: Vec<Word>,
}

impl ConeAntichain {
    /// Builds a canonical antichain; fails if two words are comparable.
    pub fn new(n: usize, words: Vec<Word>) -> Result<Self> {
        for w in &words {
            check_word(w, n)?;
        }
        let set: BTreeSet<Word> = words.into_iter().collect();
        let list: Vec<&Word> = set.iter().collect();
        for (i, a) in list.iter().enumerate() {
            // sorted order puts a prefix immediately before its extensions
            if let Some(b) = list.get(i + 1) {
                if comparable(a, b) {
                    return Err(Error::ComparableWords(fmt_word(a), fmt_word(b)));
                }
            }
        }
        Ok(Self::from_set(n, set))
    }

    /// Builds from any family of words, dropping words covered by a shorter one.
    pub fn from_cover(n: usize, words: impl IntoIterator<Item = Word>) -> Self {
        let mut set: BTreeSet<Word> = words.into_iter().collect();
        let all: Vec<Word> = set.iter().cloned().collect();
        for w in &all {
            if (0..w.len()).any(|k| set.contains(&w[..k])) {
                set.remove(w);
            }
        }
        Self::from_set(n, set)
    }

    fn from_set(n: usize, mut set: BTreeSet<Word>) -> Self {
        loop {
            let mut merged = None;
            for w in &set {
                if let Some((_, parent)) = w.split_last() {
                    let complete = (0..n as Letter).all(|x| {
                        let mut c = parent.to_vec();
                        c.push(x);
                        set.contains(&c)
                    });
                    if complete {
                        merged = Some(parent.to_vec());
                        break;
                    }
                }
            }
            match merged {
                Some(parent) => {
                    for x in 0..n as Letter {
                        let mut c = parent.clone();
                        c.push(x);
                        set.remove(&c);
                    }
                    set.insert(parent);
                }
                None => break,
            }
        }
        ConeAntichain { n, words: set.into_iter().collect() }
    }

    pub fn empty(n: usize) -> Self {
        ConeAntichain { n, words: Vec::new() }
    }

    pub fn full(n: usize) -> Self {
        ConeAntichain { n, words: vec![Vec::new()] }
    }

    pub fn cone(n: usize, w: Word) -> Self {
        Self::from_set(n, std::iter::once(w).collect())
    }

    pub fn alphabet_size(&self) -> usize {
        self.n
    }

    pub fn words(&self) -> &[Word] {
        &self.words
    }

    pub fn len(&self) -> usize {
        self.words.len()
    }

    pub fn is_empty(&self) -> bool {
        self.words.is_empty()
    }

    pub fn is_full(&self) -> bool {
        self.words.len() == 1 && self.words[0].is_empty()
    }

    /// `[u] ⊆ self`.
    pub fn contains_cone(&self, u: &[Letter]) -> bool {
        self.words.iter().any(|w| u.starts_with(w))
    }

    /// `[u] ∩ self ≠ ∅`.
    pub fn meets_cone(&self, u: &[Letter]) -> bool {
        self.words.iter().any(|w| comparable(w, u))
    }

    pub fn union(&self, other: &Self) -> Self {
        Self::from_cover(self.n, self.words.iter().chain(&other.words).cloned())
    }

    pub fn intersection(&self, other: &Self) -> Self {
        let mut out = BTreeSet::new();
        for a in &self.words {
            for b in &other.words {
                if b.starts_with(a) {
                    out.insert(b.clone());
                } else if a.starts_with(b) {
                    out.insert(a.clone());
                }
            }
        }
        Self::from_set(self.n, out)
    }

    pub fn complement(&self) -> Self {
        let mut out = Vec::new();
        complement_into(self.n, &self.words, &mut Vec::new(), &mut out);
        Self::from_set(self.n, out.into_iter().collect())
    }

    pub fn is_disjoint(&self, other: &Self) -> bool {
        self.intersection(other).is_empty()
    }

    pub fn is_subset(&self, other: &Self) -> bool {
        self.words.iter().all(|w| other.contains_cone(w))
    }

    /// `ρ · self`.
    pub fn prefixed(&self, rho: &[Letter]) -> Self {
        let words = self
            .words
            .iter()
            .map(|w| {
                let mut v = rho.to_vec();
                v.extend_from_slice(w);
                v
            })
            .collect();
        Self::from_set(self.n, words)
    }
}

fn complement_into(n: usize, words: &[Word], prefix: &mut Word, out: &mut Vec<Word>) {
    if words.iter().any(|w| w.is_empty()) {
        return;
    }
    if words.is_empty() {
        out.push(prefix.clone());
        return;
    }
    for x in 0..n as Letter {
        let sub: Vec<Word> = words
            .iter()
            .filter(|w| w[0] == x)
            .map(|w| w[1..].to_vec())
            .collect();
        prefix.push(x);
        complement_into(n, &sub, prefix, out);
        prefix.pop();
    }
}

impl fmt::Display for ConeAntichain {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let parts: Vec<String> = self.words.iter().map(|w| fmt_word(w)).collect();
        write!(f, "{{{}}}", parts.join(", "))
    }
}

/// Checks that `words` is a complete prefix code (maximal antichain) over `X_n`.
pub fn check_complete_code(n: usize, words: &[Word]) -> Result<()> {
    if words.is_empty() {
        return Err(Error::NotMaximalAntichain("empty".into()));
    }
    let set: BTreeSet<&[Letter]> = words.iter().map(|w| w.as_slice()).collect();
    if set.len() != words.len() {
        return Err(Error::NotMaximalAntichain("duplicate word".into()));
    }
    let mut inner: BTreeSet<&[Letter]> = BTreeSet::new();
    for w in words {
        check_word(w, n)?;
        for k in 0..w.len() {
            inner.insert(&w[..k]);
        }
    }
    for w in words {
        if inner.contains(w.as_slice()) {
            let longer = words.iter().find(|v| v.len() > w.len() && v.starts_with(w)).unwrap();
            return Err(Error::ComparableWords(fmt_word(w), fmt_word(longer)));
        }
    }
    for p in &inner {
        for x in 0..n as Letter {
            let mut c = p.to_vec();
            c.push(x);
            if !set.contains(c.as_slice()) && !inner.contains(c.as_slice()) {
                return Err(Error::NotMaximalAntichain(format!("cone {} uncovered", fmt_word(&c))));
            }
        }
    }
    Ok(())
}
