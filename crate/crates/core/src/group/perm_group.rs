//! The finite group generated by the states of `TS` for a synchronous
//! synchronizing `T`, realized as permutations of blocks `X_n^k`.

use std::collections::{BTreeSet, HashSet};

use crate::error::{Error, Result};
use crate::image::Budget;
use crate::inversion::invert;
use crate::machine::{CanonicalKey, InitialTransducer, Transducer};
use crate::sync::synchronizing_level;
use crate::word::{words_of_len, Letter};

/// A permutation of `X_n^k`; entry `i` is the image of the `i`-th block in
/// lexicographic order.
pub type Perm = Vec<usize>;

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct BlockPermutationGroup {
    pub n: usize,
    pub block_length: usize,
    pub generators: Vec<Perm>,
    pub elements: BTreeSet<Perm>,
    pub order: usize,
}

fn block_index(n: usize, w: &[Letter]) -> usize {
    w.iter().fold(0, |acc, &x| acc * n + x as usize)
}

/// `g` then `h`.
pub fn compose(g: &Perm, h: &Perm) -> Perm {
    g.iter().map(|&i| h[i]).collect()
}

pub fn inverse(g: &Perm) -> Perm {
    let mut inv = vec![0; g.len()];
    for (i, &j) in g.iter().enumerate() {
        inv[j] = i;
    }
    inv
}

/// The action of each state on the first block of length `k`.
pub fn block_permutations(t: &Transducer, k: usize) -> Result<Vec<Perm>> {
    let n = t.alphabet_size();
    let blocks = words_of_len(n, k);
    t.states()
        .map(|q| {
            let perm: Perm = blocks
                .iter()
                .map(|w| {
                    let (o, _) = t.evaluate_prefix(q, w)?;
                    if o.len() != k {
                        return Err(Error::InvalidMachine("block permutations need a synchronous machine".into()));
                    }
                    Ok(block_index(n, &o))
                })
                .collect::<Result<_>>()?;
            if perm.iter().collect::<HashSet<_>>().len() != perm.len() {
                return Err(Error::InvalidMachine(format!("state `{}` is not bijective on blocks", t.name(q))));
            }
            Ok(perm)
        })
        .collect()
}

/// Closure of `generators` under composition.
pub fn close(n: usize, k: usize, generators: Vec<Perm>, max_order: usize) -> Result<BlockPermutationGroup> {
    let size = n.pow(k as u32);
    let identity: Perm = (0..size).collect();
    let mut elements: BTreeSet<Perm> = BTreeSet::new();
    elements.insert(identity.clone());
    let mut frontier = vec![identity];
    while let Some(g) = frontier.pop() {
        for s in &generators {
            let h = compose(&g, s);
            if elements.insert(h.clone()) {
                if elements.len() > max_order {
                    return Err(Error::OrderBudgetExceeded(max_order));
                }
                frontier.push(h);
            }
        }
    }
    let order = elements.len();
    Ok(BlockPermutationGroup { n, block_length: k, generators, elements, order })
}

/// The group of block permutations of the states of `machine`.
pub fn group_of_states(machine: &Transducer, k: usize, max_order: usize) -> Result<BlockPermutationGroup> {
    let generators: BTreeSet<Perm> = block_permutations(machine, k)?.into_iter().collect();
    close(machine.alphabet_size(), k, generators.into_iter().collect(), max_order)
}

/// `T`, its inverse and the level `k`, checking the preconditions.
fn ts_parts(t: &InitialTransducer, kmax: usize, budget: Budget) -> Result<(Transducer, Transducer, usize)> {
    let acc = t.accessible_part();
    if !acc.machine.is_synchronous() {
        return Err(Error::InvalidMachine("expected a synchronous machine".into()));
    }
    let k = synchronizing_level(&acc.machine, kmax).ok_or(Error::NotSynchronizing)?;
    let s = invert(&acc, budget)?;
    Ok((acc.machine, s.machine, k))
}

/// `G(TS)` acting on blocks of the synchronizing length.
pub fn automaton_group_ts(
    t: &InitialTransducer,
    max_order: usize,
    kmax: usize,
    budget: Budget,
) -> Result<BlockPermutationGroup> {
    let (tm, sm, k) = ts_parts(t, kmax, budget)?;
    group_of_states(&tm.product(&sm)?, k.max(1), max_order)
}

/// `G(ST)` on the same blocks.
pub fn automaton_group_st(
    t: &InitialTransducer,
    max_order: usize,
    kmax: usize,
    budget: Budget,
) -> Result<BlockPermutationGroup> {
    let (tm, sm, k) = ts_parts(t, kmax, budget)?;
    group_of_states(&sm.product(&tm)?, k.max(1), max_order)
}

/// Number of distinct maps (ω-classes) among products of `TS` states of
/// length at most `max_len`, stopping early once no new map appears.
pub fn count_state_products(ts: &Transducer, max_len: usize, cap: usize) -> Result<usize> {
    let gens: Vec<InitialTransducer> =
        ts.states().map(|q| InitialTransducer::new(ts.clone(), q)).collect::<Result<_>>()?;
    let mut seen: HashSet<CanonicalKey> = HashSet::new();
    seen.insert(InitialTransducer::identity(ts.alphabet_size()).canonical_key()?);
    let mut frontier: Vec<InitialTransducer> = Vec::new();
    for g in &gens {
        let m = g.minimize()?;
        if seen.insert(m.key()) {
            frontier.push(m.machine);
        }
    }
    for _ in 1..max_len {
        let mut next = Vec::new();
        for p in &frontier {
            for g in &gens {
                let m = p.then(g)?.minimize()?;
                if seen.insert(m.key()) {
                    if seen.len() > cap {
                        return Err(Error::OrderBudgetExceeded(cap));
                    }
                    next.push(m.machine);
                }
            }
        }
        if next.is_empty() {
            break;
        }
        frontier = next;
    }
    Ok(seen.len())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::corpus;

    #[test]
    fn parity_group_has_order_two() {
        let g = automaton_group_ts(&corpus::parity_at("a"), 1000, 16, Budget::default()).unwrap();
        assert_eq!(g.block_length, 1);
        assert_eq!(g.order, 2);
        assert_eq!(g.generators, vec![vec![0, 1], vec![1, 0]]);
    }

    #[test]
    fn identity_group_is_trivial() {
        let g = automaton_group_ts(&corpus::identity1(), 1000, 16, Budget::default()).unwrap();
        assert_eq!(g.order, 1);
    }

    /// Oracle: closure by repeated squaring of the element set.
    fn brute_closure(gens: &[Perm]) -> usize {
        let mut set: BTreeSet<Perm> = gens.iter().cloned().collect();
        loop {
            let before = set.len();
            let items: Vec<Perm> = set.iter().cloned().collect();
            for a in &items {
                for b in &items {
                    set.insert(compose(a, b));
                }
                set.insert(inverse(a));
            }
            if set.len() == before {
                return set.len();
            }
        }
    }

    #[test]
    fn level_two_group_matches_oracle() {
        let t = corpus::level2();
        let g = automaton_group_ts(&t, 100_000, 16, Budget::default()).unwrap();
        assert_eq!(g.block_length, 2);
        assert_eq!(g.order, brute_closure(&g.generators));
        let st = automaton_group_st(&t, 100_000, 16, Budget::default()).unwrap();
        assert_eq!(g.order, st.order);
    }

    #[test]
    fn order_budget() {
        let t = corpus::level2();
        let g = automaton_group_ts(&t, 100_000, 16, Budget::default()).unwrap();
        if g.order > 1 {
            assert_eq!(
                automaton_group_ts(&t, g.order - 1, 16, Budget::default()),
                Err(Error::OrderBudgetExceeded(g.order - 1))
            );
        }
    }

    #[test]
    fn faithful_on_parity() {
        let s = invert(&corpus::parity_at("a"), Budget::default()).unwrap();
        let ts = corpus::parity().product(&s.machine).unwrap();
        assert_eq!(count_state_products(&ts, 4, 1000).unwrap(), 2);
    }
}
