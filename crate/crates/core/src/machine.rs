//! Finite transducers over `X_n`: construction, evaluation, products,
//! removal of incomplete response and ω-minimization.

use std::collections::{HashMap, VecDeque};
use std::fmt;

use crate::error::{Error, Result};
use crate::word::{check_alphabet, check_word, concat, fmt_word, lcp_len, EpWord, Letter, Word};

pub type StateId = usize;

/// A transducer `⟨X_n, Q, π, λ⟩` with total transition and output functions.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Transducer {
    n: usize,
    names: Vec<String>,
    next: Vec<StateId>,
    out: Vec<Word>,
}

/// Row of a transition table: for each letter, `(target, output)`.
pub type Row = Vec<(StateId, Word)>;

impl Transducer {
    pub fn new(n: usize, names: Vec<String>, rows: Vec<Row>) -> Result<Self> {
        check_alphabet(n)?;
        if names.is_empty() {
            return Err(Error::InvalidMachine("no states".into()));
        }
        if names.len() != rows.len() {
            return Err(Error::InvalidMachine("one row per state required".into()));
        }
        let mut seen = std::collections::HashSet::new();
        for name in &names {
            if !seen.insert(name.as_str()) {
                return Err(Error::DuplicateName(name.clone()));
            }
        }
        let m = names.len();
        let mut next = Vec::with_capacity(m * n);
        let mut out = Vec::with_capacity(m * n);
        for (q, row) in rows.into_iter().enumerate() {
            if row.len() != n {
                return Err(Error::InvalidMachine(format!(
                    "state `{}` has {} transitions, expected {n}",
                    names[q],
                    row.len()
                )));
            }
            for (target, word) in row {
                if target >= m {
                    return Err(Error::UnknownState(format!("#{target}")));
                }
                check_word(&word, n)?;
                next.push(target);
                out.push(word);
            }
        }
        Ok(Transducer { n, names, next, out })
    }

    /// The one-state identity machine over `X_n`.
    pub fn identity(n: usize) -> Self {
        let row = (0..n as Letter).map(|x| (0, vec![x])).collect();
        Transducer::new(n, vec!["id".into()], vec![row]).expect("valid identity")
    }

    pub fn alphabet_size(&self) -> usize {
        self.n
    }

    pub fn num_states(&self) -> usize {
        self.names.len()
    }

    pub fn states(&self) -> std::ops::Range<StateId> {
        0..self.names.len()
    }

    pub fn name(&self, q: StateId) -> &str {
        &self.names[q]
    }

    pub fn names(&self) -> &[String] {
        &self.names
    }

    pub fn state(&self, name: &str) -> Result<StateId> {
        self.names
            .iter()
            .position(|s| s == name)
            .ok_or_else(|| Error::UnknownState(name.to_string()))
    }

    #[inline]
    pub fn next(&self, q: StateId, x: Letter) -> StateId {
        self.next[q * self.n + x as usize]
    }

    #[inline]
    pub fn output(&self, q: StateId, x: Letter) -> &[Letter] {
        &self.out[q * self.n + x as usize]
    }

    pub fn row(&self, q: StateId) -> Row {
        (0..self.n as Letter).map(|x| (self.next(q, x), self.output(q, x).to_vec())).collect()
    }

    pub fn rows(&self) -> Vec<Row> {
        self.states().map(|q| self.row(q)).collect()
    }

    pub fn with_names(mut self, names: Vec<String>) -> Result<Self> {
        if names.len() != self.names.len() {
            return Err(Error::InvalidMachine("name count mismatch".into()));
        }
        let rows = self.rows();
        self = Transducer::new(self.n, names, rows)?;
        Ok(self)
    }

    pub fn max_output_len(&self) -> usize {
        self.out.iter().map(Vec::len).max().unwrap_or(0)
    }

    pub fn is_synchronous(&self) -> bool {
        self.out.iter().all(|w| w.len() == 1)
    }

    /// `λ(·, q)` is the identity on letters and `π(·, q) = q`.
    pub fn is_identity_state(&self, q: StateId) -> bool {
        (0..self.n as Letter).all(|x| self.next(q, x) == q && self.output(q, x) == [x])
    }

    /// `(λ(w, q), π(w, q))`.
    pub fn evaluate_prefix(&self, q: StateId, w: &[Letter]) -> Result<(Word, StateId)> {
        check_word(w, self.n)?;
        let mut state = q;
        let mut output = Vec::new();
        for &x in w {
            output.extend_from_slice(self.output(state, x));
            state = self.next(state, x);
        }
        Ok((output, state))
    }

    /// Image of an eventually periodic word under `T_q`.
    pub fn evaluate_ep(&self, q: StateId, x: &EpWord) -> Result<EpWord> {
        x.check(self.n)?;
        let (mut prefix, mut state) = self.evaluate_prefix(q, x.preperiod())?;
        let mut seen: HashMap<StateId, usize> = HashMap::new();
        let mut chunks: Vec<Word> = Vec::new();
        loop {
            if let Some(&start) = seen.get(&state) {
                let period: Word = chunks[start..].concat();
                if period.is_empty() {
                    return Err(Error::NonProductiveCycle { state: self.names[state].clone() });
                }
                for c in &chunks[..start] {
                    prefix.extend_from_slice(c);
                }
                return EpWord::new(prefix, period);
            }
            seen.insert(state, chunks.len());
            let (chunk, s) = self.evaluate_prefix(state, x.period())?;
            chunks.push(chunk);
            state = s;
        }
    }

    /// The product `TR` (apply `T`, then `R`); state `(t, r)` has index
    /// `t * |Q_R| + r` and is named `t·r`.
    pub fn product(&self, other: &Transducer) -> Result<Transducer> {
        if self.n != other.n {
            return Err(Error::AlphabetMismatch { left: self.n, right: other.n });
        }
        let m = other.num_states();
        let mut names = Vec::with_capacity(self.num_states() * m);
        let mut rows = Vec::with_capacity(self.num_states() * m);
        for t in self.states() {
            for r in other.states() {
                names.push(format!("{}·{}", self.names[t], other.names[r]));
                let row = (0..self.n as Letter)
                    .map(|x| {
                        let mid = self.output(t, x);
                        let (o, r2) = other.evaluate_prefix(r, mid).expect("letters in range");
                        (self.next(t, x) * m + r2, o)
                    })
                    .collect();
                rows.push(row);
            }
        }
        Transducer::new(self.n, names, rows)
    }

    /// Disjoint union; the states of `other` are shifted by `self.num_states()`.
    pub fn disjoint_union(&self, other: &Transducer) -> Result<Transducer> {
        if self.n != other.n {
            return Err(Error::AlphabetMismatch { left: self.n, right: other.n });
        }
        let shift = self.num_states();
        let mut names: Vec<String> = self.names.clone();
        for nm in &other.names {
            let mut candidate = nm.clone();
            while names.contains(&candidate) {
                candidate.push('\'');
            }
            names.push(candidate);
        }
        let mut rows = self.rows();
        for q in other.states() {
            rows.push(other.row(q).into_iter().map(|(t, w)| (t + shift, w)).collect());
        }
        Transducer::new(self.n, names, rows)
    }

    /// States reachable from `starts`, in breadth-first discovery order.
    pub fn reachable_from(&self, starts: &[StateId]) -> Vec<StateId> {
        let mut seen = vec![false; self.num_states()];
        let mut order = Vec::new();
        let mut queue: VecDeque<StateId> = VecDeque::new();
        for &s in starts {
            if !seen[s] {
                seen[s] = true;
                queue.push_back(s);
            }
        }
        while let Some(q) = queue.pop_front() {
            order.push(q);
            for x in 0..self.n as Letter {
                let t = self.next(q, x);
                if !seen[t] {
                    seen[t] = true;
                    queue.push_back(t);
                }
            }
        }
        order
    }

    /// Restricts to `keep`, which must be closed under transitions. Returns the
    /// sub-machine (states in the order given) and the old→new index map.
    pub fn restrict(&self, keep: &[StateId]) -> Result<(Transducer, Vec<Option<StateId>>)> {
        let mut map = vec![None; self.num_states()];
        for (i, &q) in keep.iter().enumerate() {
            map[q] = Some(i);
        }
        let mut rows = Vec::with_capacity(keep.len());
        for &q in keep {
            let row = self
                .row(q)
                .into_iter()
                .map(|(t, w)| {
                    map[t]
                        .map(|t2| (t2, w))
                        .ok_or_else(|| Error::InvalidMachine("restriction not closed".into()))
                })
                .collect::<Result<Row>>()?;
            rows.push(row);
        }
        let names = keep.iter().map(|&q| self.names[q].clone()).collect();
        Ok((Transducer::new(self.n, names, rows)?, map))
    }

    /// States lying on a cycle whose outputs are all empty.
    pub fn degenerate_states(&self) -> Vec<StateId> {
        let m = self.num_states();
        let empty_succ = |q: StateId| {
            (0..self.n as Letter)
                .filter(move |&x| self.output(q, x).is_empty())
                .map(move |x| self.next(q, x))
        };
        (0..m)
            .filter(|&start| {
                let mut seen = vec![false; m];
                let mut stack: Vec<StateId> = empty_succ(start).collect();
                while let Some(q) = stack.pop() {
                    if q == start {
                        return true;
                    }
                    if !seen[q] {
                        seen[q] = true;
                        stack.extend(empty_succ(q));
                    }
                }
                false
            })
            .collect()
    }
}

impl Transducer {
    /// `c(q)` for every state: the longest common prefix of all outputs from
    /// `q`, by monotone iteration from `ε`.
    pub fn forced_prefixes(&self) -> Result<Vec<Word>> {
        if let Some(&q) = self.degenerate_states().first() {
            return Err(Error::NonProductiveCycle { state: self.name(q).to_string() });
        }
        let bound = self.num_states() * (1 + self.max_output_len());
        let mut forced: Vec<Word> = vec![Vec::new(); self.num_states()];
        loop {
            let mut changed = false;
            let mut next_forced = Vec::with_capacity(forced.len());
            for q in self.states() {
                let mut c = concat(self.output(q, 0), &forced[self.next(q, 0)]);
                for x in 1..self.n as Letter {
                    let cand = concat(self.output(q, x), &forced[self.next(q, x)]);
                    c.truncate(lcp_len(&c, &cand));
                }
                if c.len() > bound {
                    return Err(Error::FixpointDivergence { state: self.name(q).to_string() });
                }
                changed |= c != forced[q];
                next_forced.push(c);
            }
            forced = next_forced;
            if !changed {
                return Ok(forced);
            }
        }
    }

    /// Returns `c(q)` per state and the machine with `λ̂(x,q) = c(q)⁻¹·λ(x,q)·c(π(x,q))`.
    pub fn without_incomplete_response(&self) -> Result<(Vec<Word>, Transducer)> {
        let forced = self.forced_prefixes()?;
        let rows = self
            .states()
            .map(|q| {
                (0..self.n as Letter)
                    .map(|x| {
                        let target = self.next(q, x);
                        let full = concat(self.output(q, x), &forced[target]);
                        (target, full[forced[q].len()..].to_vec())
                    })
                    .collect()
            })
            .collect();
        let machine = Transducer::new(self.n, self.names.clone(), rows)?;
        Ok((forced, machine))
    }

    /// Coarsest partition compatible with one-letter outputs and successors
    /// (Moore refinement). Class ids are assigned in order of first member.
    pub fn refine_classes(&self) -> Vec<usize> {
        let m = self.num_states();
        let mut class = vec![0usize; m];
        let mut count = 1;
        loop {
            let mut ids: HashMap<(Vec<&[Letter]>, Vec<usize>), usize> = HashMap::new();
            let mut next_class = vec![0usize; m];
            for q in 0..m {
                let outs: Vec<&[Letter]> = (0..self.n as Letter).map(|x| self.output(q, x)).collect();
                let succ: Vec<usize> = (0..self.n as Letter).map(|x| class[self.next(q, x)]).collect();
                let fresh = ids.len();
                next_class[q] = *ids.entry((outs, succ)).or_insert(fresh);
            }
            let new_count = ids.len();
            class = next_class;
            if new_count == count {
                return class;
            }
            count = new_count;
        }
    }

    /// Labels such that two states get the same label iff they induce the same
    /// map on Cantor space.
    pub fn omega_classes(&self) -> Result<Vec<usize>> {
        let (forced, hat) = self.without_incomplete_response()?;
        let classes = hat.refine_classes();
        let mut ids: HashMap<(&[Letter], usize), usize> = HashMap::new();
        Ok(self
            .states()
            .map(|q| {
                let fresh = ids.len();
                *ids.entry((&forced[q], classes[q])).or_insert(fresh)
            })
            .collect())
    }
}

/// A transducer with an active state.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct InitialTransducer {
    pub machine: Transducer,
    pub initial: StateId,
}

/// Result of [`InitialTransducer::validate`].
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ValidationReport {
    pub accessible: bool,
    pub unreachable_states: Vec<String>,
    pub degenerate_states: Vec<String>,
    pub notes: Vec<String>,
}

impl ValidationReport {
    pub fn passes(&self) -> bool {
        self.degenerate_states.is_empty()
    }
}

/// Minimal form: the induced map equals "prepend `preamble`, then apply `machine`".
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Minimized {
    pub preamble: Word,
    pub machine: InitialTransducer,
}

/// Name-free key of a minimized transducer; equal keys iff ω-equivalent.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct CanonicalKey {
    pub preamble: Word,
    pub n: usize,
    pub next: Vec<StateId>,
    pub out: Vec<Word>,
}

impl Minimized {
    pub fn key(&self) -> CanonicalKey {
        let m = &self.machine.machine;
        debug_assert_eq!(self.machine.initial, 0);
        CanonicalKey {
            preamble: self.preamble.clone(),
            n: m.n,
            next: m.next.clone(),
            out: m.out.clone(),
        }
    }

    /// The one-state identity with empty preamble.
    pub fn is_identity(&self) -> bool {
        self.preamble.is_empty()
            && self.machine.machine.num_states() == 1
            && self.machine.machine.is_identity_state(0)
    }
}

impl InitialTransducer {
    pub fn new(machine: Transducer, initial: StateId) -> Result<Self> {
        if initial >= machine.num_states() {
            return Err(Error::UnknownState(format!("#{initial}")));
        }
        Ok(InitialTransducer { machine, initial })
    }

    pub fn at(machine: &Transducer, initial: &str) -> Result<Self> {
        let q = machine.state(initial)?;
        Ok(InitialTransducer { machine: machine.clone(), initial: q })
    }

    pub fn identity(n: usize) -> Self {
        InitialTransducer { machine: Transducer::identity(n), initial: 0 }
    }

    pub fn alphabet_size(&self) -> usize {
        self.machine.alphabet_size()
    }

    pub fn initial_name(&self) -> &str {
        self.machine.name(self.initial)
    }

    pub fn validate(&self) -> ValidationReport {
        let reach = self.machine.reachable_from(&[self.initial]);
        let mut reachable = vec![false; self.machine.num_states()];
        for &q in &reach {
            reachable[q] = true;
        }
        let unreachable_states: Vec<String> = self
            .machine
            .states()
            .filter(|&q| !reachable[q])
            .map(|q| self.machine.name(q).to_string())
            .collect();
        let degenerate = self.machine.degenerate_states();
        let mut notes = Vec::new();
        if !degenerate.is_empty() {
            notes.push("empty-output cycle: induced map leaves Cantor space".to_string());
        }
        if !unreachable_states.is_empty() {
            notes.push(format!("{} state(s) unreachable from initial", unreachable_states.len()));
        }
        ValidationReport {
            accessible: unreachable_states.is_empty(),
            unreachable_states,
            degenerate_states: degenerate.iter().map(|&q| self.machine.name(q).to_string()).collect(),
            notes,
        }
    }

    pub fn evaluate_prefix(&self, w: &[Letter]) -> Result<(Word, StateId)> {
        self.machine.evaluate_prefix(self.initial, w)
    }

    pub fn evaluate_ep(&self, x: &EpWord) -> Result<EpWord> {
        self.machine.evaluate_ep(self.initial, x)
    }

    /// Restriction to the states accessible from the initial state, in
    /// breadth-first order (the initial state becomes index 0).
    pub fn accessible_part(&self) -> InitialTransducer {
        let keep = self.machine.reachable_from(&[self.initial]);
        let (machine, _) = self.machine.restrict(&keep).expect("reachable set is closed");
        InitialTransducer { machine, initial: 0 }
    }

    /// Splits the map into "prepend a preamble, then apply a transducer with
    /// no state of incomplete response". Works on the accessible part.
    pub fn remove_incomplete_response(&self) -> Result<(Word, InitialTransducer)> {
        let acc = self.accessible_part();
        let (forced, machine) = acc.machine.without_incomplete_response()?;
        Ok((forced[0].clone(), InitialTransducer { machine, initial: 0 }))
    }

    /// The unique minimal transducer ω-equivalent to `self`, with states
    /// numbered breadth-first from the initial state.
    pub fn minimize(&self) -> Result<Minimized> {
        let (preamble, t) = self.remove_incomplete_response()?;
        let machine = &t.machine;
        let n = machine.n;
        let m = machine.num_states();
        let class = machine.refine_classes();
        let count = class.iter().max().map_or(0, |c| c + 1);
        // breadth-first renumbering of classes from the initial state's class
        let mut rep = vec![usize::MAX; count];
        for q in (0..m).rev() {
            rep[class[q]] = q;
        }
        let mut order: Vec<usize> = Vec::with_capacity(count);
        let mut index = vec![usize::MAX; count];
        index[class[t.initial]] = 0;
        order.push(class[t.initial]);
        let mut head = 0;
        while head < order.len() {
            let c = order[head];
            head += 1;
            for x in 0..n as Letter {
                let d = class[machine.next(rep[c], x)];
                if index[d] == usize::MAX {
                    index[d] = order.len();
                    order.push(d);
                }
            }
        }
        let names = order.iter().map(|&c| machine.name(rep[c]).to_string()).collect();
        let rows = order
            .iter()
            .map(|&c| {
                (0..n as Letter)
                    .map(|x| (index[class[machine.next(rep[c], x)]], machine.output(rep[c], x).to_vec()))
                    .collect()
            })
            .collect();
        Ok(Minimized {
            preamble,
            machine: InitialTransducer { machine: Transducer::new(n, names, rows)?, initial: 0 },
        })
    }

    pub fn canonical_key(&self) -> Result<CanonicalKey> {
        Ok(self.minimize()?.key())
    }

    /// Do the two initial transducers induce the same map on Cantor space?
    pub fn omega_equal(&self, other: &InitialTransducer) -> Result<bool> {
        if self.alphabet_size() != other.alphabet_size() {
            return Err(Error::AlphabetMismatch { left: self.alphabet_size(), right: other.alphabet_size() });
        }
        Ok(self.canonical_key()? == other.canonical_key()?)
    }

    /// Product of initial transducers, active at `(q, r)`.
    pub fn then(&self, other: &InitialTransducer) -> Result<InitialTransducer> {
        let machine = self.machine.product(&other.machine)?;
        let initial = self.initial * other.machine.num_states() + other.initial;
        Ok(InitialTransducer { machine, initial }.accessible_part())
    }
}

impl fmt::Display for Transducer {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for q in self.states() {
            for x in 0..self.n as Letter {
                writeln!(
                    f,
                    "{} {}|{} -> {}",
                    self.names[q],
                    crate::word::letter_char(x),
                    fmt_word(self.output(q, x)),
                    self.names[self.next(q, x)]
                )?;
            }
        }
        Ok(())
    }
}
