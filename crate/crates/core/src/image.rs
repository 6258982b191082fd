//! Images of states: the prefix function `L_q`, cone membership, clopen
//! image antichains and the partial-invertibility check.
//!
//! A set `⋃ w·im(p)` is represented by a finite *configuration* of pairs
//! `(w, p)`. Reading a letter `y` keeps the pairs whose pending word starts
//! with `y` (expanding `(ε, p)` through one transition first). Such a set is
//! closed, so it is all of Cantor space iff every configuration reachable from
//! it is nonempty.

use std::collections::{HashMap, HashSet, VecDeque};

use crate::antichain::ConeAntichain;
use crate::error::{Error, Result};
use crate::machine::{StateId, Transducer};
use crate::word::{check_word, Letter, Word};

/// Bounds for the semi-decision procedures.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct Budget {
    pub max_configurations: usize,
    pub max_depth: usize,
}

impl Budget {
    pub fn new(max_configurations: usize, max_depth: usize) -> Result<Self> {
        if max_configurations == 0 || max_depth == 0 {
            return Err(Error::BudgetExceeded("budget bounds must be positive".into()));
        }
        Ok(Budget { max_configurations, max_depth })
    }
}

impl Default for Budget {
    fn default() -> Self {
        Budget { max_configurations: 100_000, max_depth: 24 }
    }
}

type Config = Vec<(Word, StateId)>;

/// A pair of states together with the lag of one output behind the other.
type LagNode = (StateId, StateId, Word);

/// Image queries on one transducer, sharing memo tables between calls.
pub struct ImageAnalyzer<'a> {
    t: &'a Transducer,
    budget: Budget,
    full_memo: HashMap<Config, bool>,
    work: usize,
}

impl<'a> ImageAnalyzer<'a> {
    pub fn new(t: &'a Transducer, budget: Budget) -> Result<Self> {
        if let Some(&q) = t.degenerate_states().first() {
            return Err(Error::NonProductiveCycle { state: t.name(q).to_string() });
        }
        Ok(ImageAnalyzer { t, budget, full_memo: HashMap::new(), work: 0 })
    }

    fn tick(&mut self) -> Result<()> {
        self.work += 1;
        if self.work > self.budget.max_configurations {
            return Err(Error::BudgetExceeded(format!(
                "more than {} configurations explored",
                self.budget.max_configurations
            )));
        }
        Ok(())
    }

    /// Replaces every `(ε, p)` by the one-letter continuations of `p`.
    fn expand(&self, config: &Config) -> Config {
        let mut out = Vec::new();
        let mut visited = HashSet::new();
        let mut stack: Vec<(Word, StateId)> = config.clone();
        while let Some((w, p)) = stack.pop() {
            if !w.is_empty() {
                out.push((w, p));
            } else if visited.insert(p) {
                for x in 0..self.t.alphabet_size() as Letter {
                    stack.push((self.t.output(p, x).to_vec(), self.t.next(p, x)));
                }
            }
        }
        out
    }

    fn descend(&self, config: &Config, y: Letter) -> Result<Config> {
        let mut out: Config = self
            .expand(config)
            .into_iter()
            .filter(|(w, _)| w[0] == y)
            .map(|(w, p)| (w[1..].to_vec(), p))
            .collect();
        out.sort();
        out.dedup();
        if let Some((w, _)) = out.iter().find(|(w, _)| w.len() > self.budget.max_depth) {
            return Err(Error::BudgetExceeded(format!("pending word of length {}", w.len())));
        }
        Ok(out)
    }

    fn descend_word(&self, config: &Config, u: &[Letter]) -> Result<Config> {
        let mut c = config.clone();
        for &y in u {
            if c.is_empty() {
                break;
            }
            c = self.descend(&c, y)?;
        }
        Ok(c)
    }

    fn full(&mut self, config: &Config) -> Result<bool> {
        if let Some(&v) = self.full_memo.get(config) {
            return Ok(v);
        }
        let mut seen: HashSet<Config> = HashSet::new();
        let mut queue = VecDeque::new();
        seen.insert(config.clone());
        queue.push_back(config.clone());
        let mut verdict = true;
        while let Some(c) = queue.pop_front() {
            self.tick()?;
            if c.is_empty() || self.full_memo.get(&c) == Some(&false) {
                verdict = false;
                break;
            }
            if self.full_memo.get(&c) == Some(&true) {
                continue;
            }
            for y in 0..self.t.alphabet_size() as Letter {
                let d = self.descend(&c, y)?;
                if seen.insert(d.clone()) {
                    queue.push_back(d);
                }
            }
        }
        if verdict {
            for c in seen {
                self.full_memo.insert(c, true);
            }
        } else {
            self.full_memo.insert(config.clone(), false);
        }
        Ok(verdict)
    }

    fn root(q: StateId) -> Config {
        vec![(Vec::new(), q)]
    }

    /// `[u] ⊆ im(q)`.
    pub fn cone_in_image(&mut self, q: StateId, u: &[Letter]) -> Result<bool> {
        check_word(u, self.t.alphabet_size())?;
        let c = self.descend_word(&Self::root(q), u)?;
        self.full(&c)
    }

    /// `[u] ∩ im(q) ≠ ∅`.
    pub fn meets(&mut self, q: StateId, u: &[Letter]) -> Result<bool> {
        check_word(u, self.t.alphabet_size())?;
        Ok(!self.descend_word(&Self::root(q), u)?.is_empty())
    }

    /// The canonical antichain `W` with `im(q) = ⋃ [w]`.
    pub fn image_antichain(&mut self, q: StateId) -> Result<ConeAntichain> {
        let mut words = Vec::new();
        self.classify(&mut Vec::new(), Self::root(q), &mut words)?;
        Ok(ConeAntichain::from_cover(self.t.alphabet_size(), words))
    }

    fn classify(&mut self, u: &mut Word, config: Config, out: &mut Vec<Word>) -> Result<()> {
        if config.is_empty() {
            return Ok(());
        }
        if self.full(&config)? {
            out.push(u.clone());
            return Ok(());
        }
        if u.len() >= self.budget.max_depth {
            return Err(Error::BudgetExceeded(format!(
                "image not resolved into cones at depth {}",
                self.budget.max_depth
            )));
        }
        for y in 0..self.t.alphabet_size() as Letter {
            let child = self.descend(&config, y)?;
            u.push(y);
            self.classify(u, child, out)?;
            u.pop();
        }
        Ok(())
    }

    /// `L_q(α)`: longest common prefix of the inputs whose image lies in `[α]`.
    pub fn lq(&mut self, q: StateId, alpha: &[Letter]) -> Result<Word> {
        check_word(alpha, self.t.alphabet_size())?;
        let mut memo = HashMap::new();
        self.lq_rec(alpha, 0, q, &mut memo, 0)?.ok_or(Error::EmptyPreimage)
    }

    fn lq_rec(
        &mut self,
        alpha: &[Letter],
        offset: usize,
        p: StateId,
        memo: &mut HashMap<(usize, StateId), Option<Word>>,
        silent: usize,
    ) -> Result<Option<Word>> {
        let rest = &alpha[offset..];
        if rest.is_empty() {
            return Ok(Some(Vec::new()));
        }
        if let Some(v) = memo.get(&(offset, p)) {
            return Ok(v.clone());
        }
        if silent > self.t.num_states() {
            return Err(Error::NonProductiveCycle { state: self.t.name(p).to_string() });
        }
        self.tick()?;
        let mut found: Vec<(Letter, Word)> = Vec::new();
        for x in 0..self.t.alphabet_size() as Letter {
            let o = self.t.output(p, x);
            if o.starts_with(rest) {
                found.push((x, Vec::new()));
            } else if rest.starts_with(o) {
                let s = if o.is_empty() { silent + 1 } else { 0 };
                if let Some(tail) = self.lq_rec(alpha, offset + o.len(), self.t.next(p, x), memo, s)? {
                    found.push((x, tail));
                }
            }
            if found.len() > 1 {
                break;
            }
        }
        let v = match found.len() {
            0 => None,
            1 => {
                let (x, tail) = found.pop().unwrap();
                let mut w = vec![x];
                w.extend(tail);
                Some(w)
            }
            _ => Some(Vec::new()),
        };
        memo.insert((offset, p), v.clone());
        Ok(v)
    }

    /// Decides injectivity of `T_q` by searching the lag graph of pairs of
    /// diverged inputs with comparable outputs: `T_q` is injective iff that
    /// graph has no cycle.
    pub fn is_injective(&mut self, q: StateId) -> Result<bool> {
        let t = self.t;
        let n = t.alphabet_size() as Letter;
        let mut seen: HashSet<LagNode> = HashSet::new();
        let mut edges: HashMap<LagNode, Vec<LagNode>> = HashMap::new();
        let mut queue = VecDeque::new();
        for p in t.reachable_from(&[q]) {
            for x in 0..n {
                for y in (x + 1)..n {
                    if let Some(c) = self.lag(t.next(p, x), t.output(p, x), t.next(p, y), t.output(p, y))? {
                        if seen.insert(c.clone()) {
                            queue.push_back(c);
                        }
                    }
                }
            }
        }
        while let Some(c) = queue.pop_front() {
            self.tick()?;
            let (a, b, w) = c.clone();
            let mut succ = Vec::new();
            for x in 0..n {
                for y in 0..n {
                    let ahead = crate::word::concat(&w, t.output(a, x));
                    if let Some(d) = self.lag(t.next(a, x), &ahead, t.next(b, y), t.output(b, y))? {
                        if seen.insert(d.clone()) {
                            queue.push_back(d.clone());
                        }
                        succ.push(d);
                    }
                }
            }
            edges.insert(c, succ);
        }
        Ok(!has_cycle(&edges))
    }

    fn lag(&self, a: StateId, oa: &[Letter], b: StateId, ob: &[Letter]) -> Result<Option<(StateId, StateId, Word)>> {
        let (a, oa, b, ob) = if oa.len() >= ob.len() { (a, oa, b, ob) } else { (b, ob, a, oa) };
        if !oa.starts_with(ob) {
            return Ok(None);
        }
        let w = oa[ob.len()..].to_vec();
        if w.len() > self.budget.max_depth {
            return Err(Error::BudgetExceeded(format!("output lag exceeds {}", self.budget.max_depth)));
        }
        if w.is_empty() && a > b {
            return Ok(Some((b, a, w)));
        }
        Ok(Some((a, b, w)))
    }
}

fn has_cycle<K: std::hash::Hash + Eq + Clone>(edges: &HashMap<K, Vec<K>>) -> bool {
    // Kahn's algorithm: a cycle remains iff some node is never freed.
    let mut indeg: HashMap<&K, usize> = edges.keys().map(|k| (k, 0)).collect();
    for succ in edges.values() {
        for s in succ {
            *indeg.entry(s).or_default() += 1;
        }
    }
    let mut ready: Vec<&K> = indeg.iter().filter(|(_, &d)| d == 0).map(|(k, _)| *k).collect();
    let mut removed = 0;
    while let Some(k) = ready.pop() {
        removed += 1;
        if let Some(succ) = edges.get(k) {
            for s in succ {
                let d = indeg.get_mut(s).unwrap();
                *d -= 1;
                if *d == 0 {
                    ready.push(s);
                }
            }
        }
    }
    removed < indeg.len()
}

pub fn lq(t: &Transducer, q: StateId, alpha: &[Letter], budget: Budget) -> Result<Word> {
    ImageAnalyzer::new(t, budget)?.lq(q, alpha)
}

pub fn cone_in_image(t: &Transducer, q: StateId, u: &[Letter], budget: Budget) -> Result<bool> {
    ImageAnalyzer::new(t, budget)?.cone_in_image(q, u)
}

pub fn image_antichain(t: &Transducer, q: StateId, budget: Budget) -> Result<ConeAntichain> {
    ImageAnalyzer::new(t, budget)?.image_antichain(q)
}

pub fn is_injective(t: &Transducer, q: StateId, budget: Budget) -> Result<bool> {
    ImageAnalyzer::new(t, budget)?.is_injective(q)
}

/// Per-state outcome of [`is_partially_invertible`].
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct StateReport {
    pub state: String,
    pub image: Result<ConeAntichain>,
    pub injective: Result<bool>,
}

impl StateReport {
    pub fn passes(&self) -> bool {
        self.image.is_ok() && self.injective == Ok(true)
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct PartialInvertibility {
    pub states: Vec<StateReport>,
}

impl PartialInvertibility {
    pub fn passes(&self) -> bool {
        self.states.iter().all(StateReport::passes)
    }

    /// The first budget failure, if any state ran out of budget.
    pub fn budget_failure(&self) -> Option<&Error> {
        self.states.iter().find_map(|s| match (&s.image, &s.injective) {
            (Err(e), _) if e.is_budget() => Some(e),
            (_, Err(e)) if e.is_budget() => Some(e),
            _ => None,
        })
    }
}

/// Every state injective with clopen image.
pub fn is_partially_invertible(t: &Transducer, budget: Budget) -> Result<PartialInvertibility> {
    let states = t
        .states()
        .map(|q| {
            // fresh analyzers so one state's budget does not starve the next
            let image = ImageAnalyzer::new(t, budget).and_then(|mut a| a.image_antichain(q));
            let injective = ImageAnalyzer::new(t, budget).and_then(|mut a| a.is_injective(q));
            StateReport { state: t.name(q).to_string(), image, injective }
        })
        .collect();
    Ok(PartialInvertibility { states })
}
