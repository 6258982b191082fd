//! The collapsing procedure, synchronizing levels, cores, bi-/one-way
//! classification and the prefix relation `∼_A` induced by an automaton.

use std::collections::{BTreeSet, HashMap};

use crate::error::{Error, Result};
use crate::image::Budget;
use crate::inversion::{invert, invert_synchronous};
use crate::machine::{InitialTransducer, StateId, Transducer};
use crate::word::{check_alphabet, check_word, Letter};

pub const DEFAULT_KMAX: usize = 16;

/// A transducer with its outputs forgotten.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Automaton {
    n: usize,
    names: Vec<String>,
    next: Vec<StateId>,
    pub initial: StateId,
}

impl Automaton {
    pub fn new(n: usize, names: Vec<String>, rows: Vec<Vec<StateId>>, initial: StateId) -> Result<Self> {
        check_alphabet(n)?;
        let m = names.len();
        if m == 0 || rows.len() != m {
            return Err(Error::InvalidMachine("one row per state required".into()));
        }
        let mut seen = std::collections::HashSet::new();
        for nm in &names {
            if !seen.insert(nm) {
                return Err(Error::DuplicateName(nm.clone()));
            }
        }
        if initial >= m {
            return Err(Error::UnknownState(format!("#{initial}")));
        }
        let mut next = Vec::with_capacity(m * n);
        for row in rows {
            if row.len() != n || row.iter().any(|&t| t >= m) {
                return Err(Error::InvalidMachine("bad transition row".into()));
            }
            next.extend(row);
        }
        Ok(Automaton { n, names, next, initial })
    }

    pub fn of(t: &Transducer, initial: StateId) -> Self {
        let rows = t.states().map(|q| (0..t.alphabet_size() as Letter).map(|x| t.next(q, x)).collect()).collect();
        Automaton::new(t.alphabet_size(), t.names().to_vec(), rows, initial).expect("transducer is total")
    }

    pub fn alphabet_size(&self) -> usize {
        self.n
    }

    pub fn num_states(&self) -> usize {
        self.names.len()
    }

    pub fn name(&self, q: StateId) -> &str {
        &self.names[q]
    }

    pub fn names(&self) -> &[String] {
        &self.names
    }

    pub fn state(&self, name: &str) -> Result<StateId> {
        self.names.iter().position(|s| s == name).ok_or_else(|| Error::UnknownState(name.into()))
    }

    #[inline]
    pub fn next(&self, q: StateId, x: Letter) -> StateId {
        self.next[q * self.n + x as usize]
    }

    pub fn row(&self, q: StateId) -> Vec<StateId> {
        self.next[q * self.n..(q + 1) * self.n].to_vec()
    }

    pub fn run(&self, q: StateId, w: &[Letter]) -> StateId {
        w.iter().fold(q, |s, &x| self.next(s, x))
    }
}

/// Result of the collapsing procedure.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct CollapsedAutomaton {
    pub original: Automaton,
    pub class_of: Vec<usize>,
    pub steps: usize,
    pub quotient: Automaton,
    /// `history[i]` is the class map after `i` steps.
    pub history: Vec<Vec<usize>>,
}

/// Repeatedly merges states with identical transition tuples until distinct
/// states have distinct tuples.
pub fn collapse(a: &Automaton) -> CollapsedAutomaton {
    let m = a.num_states();
    let mut class_of: Vec<usize> = (0..m).collect();
    let mut history = vec![class_of.clone()];
    loop {
        let count = class_of.iter().max().unwrap() + 1;
        let mut rep = vec![usize::MAX; count];
        for q in (0..m).rev() {
            rep[class_of[q]] = q;
        }
        // class ids follow the least original state they contain
        let mut ids: HashMap<Vec<usize>, usize> = HashMap::new();
        let mut merged = vec![0; count];
        for c in 0..count {
            let tuple: Vec<usize> = (0..a.n as Letter).map(|x| class_of[a.next(rep[c], x)]).collect();
            let fresh = ids.len();
            merged[c] = *ids.entry(tuple).or_insert(fresh);
        }
        if ids.len() == count {
            break;
        }
        class_of = class_of.iter().map(|&c| merged[c]).collect();
        history.push(class_of.clone());
    }
    let count = class_of.iter().max().unwrap() + 1;
    let mut rep = vec![usize::MAX; count];
    for q in (0..m).rev() {
        rep[class_of[q]] = q;
    }
    let names = rep
        .iter()
        .map(|&r| {
            let members: Vec<&str> = (0..m).filter(|&q| class_of[q] == class_of[r]).map(|q| a.name(q)).collect();
            if members.len() == 1 {
                members[0].to_string()
            } else {
                format!("{{{}}}", members.join(","))
            }
        })
        .collect();
    let rows = rep.iter().map(|&r| (0..a.n as Letter).map(|x| class_of[a.next(r, x)]).collect()).collect();
    let quotient = Automaton::new(a.n, names, rows, class_of[a.initial]).expect("well-defined quotient");
    CollapsedAutomaton { original: a.clone(), steps: history.len() - 1, class_of, quotient, history }
}

/// A prefix relation on nonempty words, given by a class label per word.
pub trait PrefixRelation {
    fn alphabet_size(&self) -> usize;
    fn classify(&self, word: &[Letter]) -> Result<usize>;

    fn related(&self, a: &[Letter], b: &[Letter]) -> Result<bool> {
        Ok(self.classify(a)? == self.classify(b)?)
    }
}

impl CollapsedAutomaton {
    pub fn satisfies_condition1(&self) -> bool {
        let q = &self.quotient;
        let tuples: BTreeSet<Vec<StateId>> = (0..q.num_states()).map(|s| q.row(s)).collect();
        tuples.len() == q.num_states()
    }

    pub fn relation_classify(&self, word: &[Letter]) -> Result<usize> {
        if word.is_empty() {
            return Err(Error::EmptyWord);
        }
        check_word(word, self.original.n)?;
        Ok(self.class_of[self.original.run(self.original.initial, word)])
    }
}

impl PrefixRelation for CollapsedAutomaton {
    fn alphabet_size(&self) -> usize {
        self.original.n
    }

    fn classify(&self, word: &[Letter]) -> Result<usize> {
        self.relation_classify(word)
    }
}

/// Least `k ≤ kmax` such that the state after any length-`k` word does not
/// depend on the start state.
pub fn synchronizing_level(t: &Transducer, kmax: usize) -> Option<usize> {
    let c = collapse(&Automaton::of(t, 0));
    (c.quotient.num_states() == 1 && c.steps <= kmax).then_some(c.steps)
}

/// The states reachable after reading words of the synchronizing length.
pub fn core(t: &Transducer, kmax: usize) -> Result<Transducer> {
    let k = synchronizing_level(t, kmax).ok_or(Error::NotSynchronizing)?;
    let mut set: BTreeSet<StateId> = t.states().collect();
    for _ in 0..k {
        set = set.iter().flat_map(|&q| (0..t.alphabet_size() as Letter).map(move |x| t.next(q, x))).collect();
    }
    let keep: Vec<StateId> = set.into_iter().collect();
    let (c, _) = t.restrict(&keep)?;
    if c.states().any(|q| c.reachable_from(&[q]).len() != c.num_states()) {
        return Err(Error::InternalInvariantViolation("core is not strongly connected".into()));
    }
    Ok(c)
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Synchronicity {
    BiSynchronizing,
    OneWay,
    NotSynchronizing,
}

impl Synchronicity {
    pub fn as_str(self) -> &'static str {
        match self {
            Synchronicity::BiSynchronizing => "bi_synchronizing",
            Synchronicity::OneWay => "one_way",
            Synchronicity::NotSynchronizing => "not_synchronizing",
        }
    }
}

impl std::fmt::Display for Synchronicity {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(self.as_str())
    }
}

pub fn classify_synchronicity(t: &InitialTransducer, kmax: usize, budget: Budget) -> Result<Synchronicity> {
    let acc = t.accessible_part();
    let s = invert(&acc, budget)?;
    let forward = synchronizing_level(&acc.machine, kmax).is_some();
    let backward = synchronizing_level(&s.machine, kmax).is_some();
    Ok(match (forward, backward) {
        (true, true) => Synchronicity::BiSynchronizing,
        (true, false) => Synchronicity::OneWay,
        _ => Synchronicity::NotSynchronizing,
    })
}

/// For a machine with trivial core: the least depth after which every input
/// has led to the identity state. `None` if the minimized machine does not
/// reach a trivial core within `kmax` letters.
pub fn identity_depth(t: &InitialTransducer, kmax: usize) -> Result<Option<usize>> {
    let m = t.minimize()?;
    if !m.preamble.is_empty() {
        return Ok(None);
    }
    let mach = &m.machine.machine;
    let mut level: BTreeSet<StateId> = [m.machine.initial].into();
    for d in 0..=kmax {
        if level.len() == 1 && mach.is_identity_state(*level.iter().next().unwrap()) {
            return Ok(Some(d));
        }
        level = level
            .iter()
            .flat_map(|&q| (0..mach.alphabet_size() as Letter).map(move |x| mach.next(q, x)))
            .collect();
    }
    Ok(None)
}

/// Synchronizing level of a minimal synchronous homeomorphism transducer read
/// off the products `S_{p⁻¹} T_q` for a fixed `p` and every `q`: the largest
/// identity depth, or `None` if some product is not in `V_n`.
pub fn level_via_inverse_products(t: &Transducer, kmax: usize) -> Result<Option<usize>> {
    let p = 0;
    let inv = invert_synchronous(&InitialTransducer::new(t.clone(), p)?)
        .ok_or_else(|| Error::InvalidMachine("expected a synchronous machine permuting letters".into()))?;
    let s = inv.as_initial();
    let mut worst = 0;
    for q in t.states() {
        let prod = s.then(&InitialTransducer::new(t.clone(), q)?)?;
        match identity_depth(&prod, kmax)? {
            Some(d) => worst = worst.max(d),
            None => return Ok(None),
        }
    }
    Ok(Some(worst))
}
