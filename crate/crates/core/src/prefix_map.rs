//! Elements of `V_n` as prefix-exchange maps `α_i χ ↦ β_i χ`.

use std::collections::BTreeMap;
use std::fmt;

use rand::seq::SliceRandom;
use rand::Rng;

use crate::antichain::{check_complete_code, ConeAntichain};
use crate::error::{Error, Result};
use crate::machine::{InitialTransducer, Row, StateId, Transducer};
use crate::sync::PrefixRelation;
use crate::word::{check_alphabet, comparable, concat, fmt_word, EpWord, Letter, Word};

/// A prefix-exchange map in canonical form: pairs sorted by domain word, no
/// sibling block `u·i ↦ v·i` left unmerged.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct PrefixExchangeMap {
    n: usize,
    pairs: Vec<(Word, Word)>,
}

impl PrefixExchangeMap {
    pub fn new(n: usize, pairs: Vec<(Word, Word)>) -> Result<Self> {
        check_alphabet(n)?;
        let (dom, ran): (Vec<Word>, Vec<Word>) = pairs.iter().cloned().unzip();
        check_complete_code(n, &dom)?;
        check_complete_code(n, &ran)?;
        Ok(Self::canonical(n, pairs))
    }

    fn canonical(n: usize, pairs: Vec<(Word, Word)>) -> Self {
        let mut table: BTreeMap<Word, Word> = pairs.into_iter().collect();
        loop {
            let mut merge = None;
            for (a, b) in &table {
                let (Some((&0, pa)), Some((&0, pb))) = (a.split_last(), b.split_last()) else { continue };
                let block = (1..n as Letter).all(|x| {
                    table.get(&concat(pa, &[x])).is_some_and(|r| r.split_last() == Some((&x, pb)))
                });
                if block {
                    merge = Some((pa.to_vec(), pb.to_vec()));
                    break;
                }
            }
            let Some((pa, pb)) = merge else { break };
            for x in 0..n as Letter {
                table.remove(&concat(&pa, &[x]));
            }
            table.insert(pa, pb);
        }
        PrefixExchangeMap { n, pairs: table.into_iter().collect() }
    }

    pub fn identity(n: usize) -> Self {
        PrefixExchangeMap { n, pairs: vec![(Vec::new(), Vec::new())] }
    }

    /// The order-2 element exchanging `[α]` and `[β]`.
    pub fn small_swap(n: usize, alpha: &[Letter], beta: &[Letter]) -> Result<Self> {
        check_alphabet(n)?;
        if comparable(alpha, beta) {
            return Err(Error::ComparableWords(fmt_word(alpha), fmt_word(beta)));
        }
        let moved = ConeAntichain::new(n, vec![alpha.to_vec(), beta.to_vec()])?;
        let mut pairs = vec![(alpha.to_vec(), beta.to_vec()), (beta.to_vec(), alpha.to_vec())];
        pairs.extend(moved.complement().words().iter().map(|w| (w.clone(), w.clone())));
        Self::new(n, pairs)
    }

    pub fn alphabet_size(&self) -> usize {
        self.n
    }

    pub fn pairs(&self) -> &[(Word, Word)] {
        &self.pairs
    }

    pub fn is_identity(&self) -> bool {
        self.pairs.len() == 1 && self.pairs[0].0.is_empty()
    }

    /// `(x)v` for an eventually periodic point.
    pub fn apply(&self, x: &EpWord) -> Result<EpWord> {
        x.check(self.n)?;
        let (a, b) = self
            .pairs
            .iter()
            .find(|(a, _)| x.starts_with(a))
            .expect("domain is a complete prefix code");
        Ok(x.drop(a.len()).prepend(b))
    }

    /// `x ↦ ((x)self)other`.
    pub fn compose(&self, other: &PrefixExchangeMap) -> Result<Self> {
        if self.n != other.n {
            return Err(Error::AlphabetMismatch { left: self.n, right: other.n });
        }
        let mut pairs = Vec::new();
        for (a, b) in &self.pairs {
            for (c, d) in &other.pairs {
                if b.starts_with(c) {
                    pairs.push((a.clone(), concat(d, &b[c.len()..])));
                } else if c.starts_with(b) {
                    pairs.push((concat(a, &c[b.len()..]), d.clone()));
                }
            }
        }
        Ok(Self::canonical(self.n, pairs))
    }

    pub fn inverse(&self) -> Self {
        Self::canonical(self.n, self.pairs.iter().map(|(a, b)| (b.clone(), a.clone())).collect())
    }

    /// Image of a clopen set.
    pub fn image_of_clopen(&self, e: &ConeAntichain) -> ConeAntichain {
        let mut out = Vec::new();
        for w in e.words() {
            for (a, b) in &self.pairs {
                if w.starts_with(a) {
                    out.push(concat(b, &w[a.len()..]));
                } else if a.starts_with(w) {
                    out.push(b.clone());
                }
            }
        }
        ConeAntichain::from_cover(self.n, out)
    }

    /// Replaces every pair `(α, β)` by `(α·i, β·i)`: same map, longer table.
    pub fn refined_pairs(&self) -> Vec<(Word, Word)> {
        self.pairs
            .iter()
            .flat_map(|(a, b)| (0..self.n as Letter).map(move |x| (concat(a, &[x]), concat(b, &[x]))))
            .collect()
    }

    /// The minimal transducer: a domain tree emitting range words at the
    /// leaves, then the identity.
    pub fn to_transducer(&self) -> InitialTransducer {
        let n = self.n;
        let leaves: BTreeMap<&[Letter], &[Letter]> =
            self.pairs.iter().map(|(a, b)| (a.as_slice(), b.as_slice())).collect();
        let mut nodes: Vec<Word> = vec![Vec::new()];
        let mut rows: Vec<Row> = Vec::new();
        let id_row: Row = (0..n as Letter).map(|x| (0, vec![x])).collect();
        if self.is_identity() {
            return InitialTransducer::identity(n);
        }
        // state 0 is the identity, tree nodes follow in discovery order
        let mut head = 0;
        while head < nodes.len() {
            let u = nodes[head].clone();
            head += 1;
            let mut row = Vec::with_capacity(n);
            for x in 0..n as Letter {
                let ux = concat(&u, &[x]);
                match leaves.get(ux.as_slice()) {
                    Some(b) => row.push((0, b.to_vec())),
                    None => {
                        nodes.push(ux);
                        row.push((nodes.len(), Vec::new()));
                    }
                }
            }
            rows.push(row);
        }
        let mut names = vec!["id".to_string()];
        names.extend(nodes.iter().map(|u| format!("[{}]", fmt_word(u))));
        let mut all_rows = vec![id_row];
        all_rows.extend(rows);
        let t = Transducer::new(n, names, all_rows).expect("tree machine");
        let m = InitialTransducer { machine: t, initial: 1 }.minimize().expect("prefix maps are productive");
        debug_assert!(m.preamble.is_empty());
        m.machine
    }

    /// Reads a prefix-exchange table off a transducer whose minimal form
    /// reaches the identity on every path within `kmax` letters. `None` if the
    /// map is not an element of `V_n`.
    pub fn from_transducer(t: &InitialTransducer, kmax: usize) -> Option<Self> {
        let m = t.minimize().ok()?;
        if !m.preamble.is_empty() {
            return None;
        }
        let mach = &m.machine.machine;
        let id = mach.states().find(|&q| mach.is_identity_state(q))?;
        let mut pairs = Vec::new();
        let mut stack: Vec<(Word, Word, StateId)> = vec![(Vec::new(), Vec::new(), m.machine.initial)];
        while let Some((u, o, q)) = stack.pop() {
            if q == id {
                pairs.push((u, o));
                continue;
            }
            if u.len() >= kmax.max(mach.num_states()) {
                return None;
            }
            for x in 0..mach.alphabet_size() as Letter {
                stack.push((concat(&u, &[x]), concat(&o, mach.output(q, x)), mach.next(q, x)));
            }
        }
        PrefixExchangeMap::new(mach.alphabet_size(), pairs).ok()
    }

    /// Does every table pair relate its domain and range word?
    pub fn preserves_relation(&self, rel: &impl PrefixRelation) -> Result<MembershipVerdict> {
        if rel.alphabet_size() != self.n {
            return Err(Error::AlphabetMismatch { left: self.n, right: rel.alphabet_size() });
        }
        let mut witnesses = Vec::new();
        for (a, b) in &self.pairs {
            let classes = if a.is_empty() && b.is_empty() {
                None
            } else {
                Some((rel.classify(a)?, rel.classify(b)?))
            };
            witnesses.push(PairWitness { domain: a.clone(), range: b.clone(), classes });
        }
        let member = witnesses.iter().all(PairWitness::preserved);
        Ok(MembershipVerdict { member, witnesses })
    }
}

impl fmt::Display for PrefixExchangeMap {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let parts: Vec<String> =
            self.pairs.iter().map(|(a, b)| format!("{}→{}", fmt_word(a), fmt_word(b))).collect();
        write!(f, "{{{}}}", parts.join(", "))
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct PairWitness {
    pub domain: Word,
    pub range: Word,
    /// Relation classes of domain and range; `None` for the trivial pair `ε ↦ ε`.
    pub classes: Option<(usize, usize)>,
}

impl PairWitness {
    pub fn preserved(&self) -> bool {
        self.classes.is_none_or(|(a, b)| a == b)
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct MembershipVerdict {
    pub member: bool,
    pub witnesses: Vec<PairWitness>,
}

/// Random elements for property tests.
pub mod random {
    use super::*;

    /// A complete prefix code obtained by `splits` random leaf splits, never
    /// splitting a leaf of length `max_len`.
    pub fn complete_code(rng: &mut impl Rng, n: usize, splits: usize, max_len: usize) -> Vec<Word> {
        let mut leaves: Vec<Word> = vec![Vec::new()];
        for _ in 0..splits {
            let open: Vec<usize> = (0..leaves.len()).filter(|&i| leaves[i].len() < max_len).collect();
            let Some(&i) = open.choose(rng) else { break };
            let u = leaves.swap_remove(i);
            leaves.extend((0..n as Letter).map(|x| concat(&u, &[x])));
        }
        leaves
    }

    /// A random element whose table words have length at most `max_len`.
    pub fn element(rng: &mut impl Rng, n: usize, max_len: usize) -> PrefixExchangeMap {
        loop {
            let splits = rng.gen_range(0..=max_len.min(6));
            let dom = complete_code(rng, n, splits, max_len);
            let mut ran = complete_code(rng, n, splits, max_len);
            if dom.len() != ran.len() {
                continue;
            }
            ran.shuffle(rng);
            return PrefixExchangeMap::new(n, dom.into_iter().zip(ran).collect()).expect("codes are complete");
        }
    }

    pub fn word(rng: &mut impl Rng, n: usize, min_len: usize, max_len: usize) -> Word {
        let len = rng.gen_range(min_len..=max_len);
        (0..len).map(|_| rng.gen_range(0..n) as Letter).collect()
    }

    pub fn small_swap(rng: &mut impl Rng, n: usize, max_len: usize) -> PrefixExchangeMap {
        loop {
            let a = word(rng, n, 1, max_len);
            let b = word(rng, n, 1, max_len);
            if let Ok(v) = PrefixExchangeMap::small_swap(n, &a, &b) {
                return v;
            }
        }
    }

    /// A product of 1 to 3 small swaps of related words: an element of the
    /// subgroup of maps preserving `rel`.
    pub fn relation_preserving(
        rng: &mut impl Rng,
        rel: &impl PrefixRelation,
        max_len: usize,
    ) -> PrefixExchangeMap {
        let n = rel.alphabet_size();
        let mut v = PrefixExchangeMap::identity(n);
        for _ in 0..rng.gen_range(1..=3) {
            let swap = loop {
                let a = word(rng, n, 1, max_len);
                let b = word(rng, n, 1, max_len);
                if !comparable(&a, &b) && rel.related(&a, &b).unwrap_or(false) {
                    break PrefixExchangeMap::small_swap(n, &a, &b).unwrap();
                }
            };
            v = v.compose(&swap).unwrap();
        }
        v
    }
}
