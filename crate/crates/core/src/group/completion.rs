//! Completions: homeomorphisms `η_i χ ↦ ρ_i · (χ)U_{p_i}` built from a viable
//! combination of states of a transducer `U`.

use std::fmt;

use crate::antichain::{check_complete_code, ConeAntichain};
use crate::error::{Error, Result};
use crate::image::{Budget, ImageAnalyzer};
use crate::inversion::{invert_general, partial_inverse, InverseState};
use crate::machine::{InitialTransducer, Row, StateId, Transducer};
use crate::map::CantorMap;
use crate::word::{concat, fmt_word, EpWord, Letter, Word};

#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Leaf {
    pub eta: Word,
    pub rho: Word,
    pub state: StateId,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct CompletionMap {
    machine: Transducer,
    leaves: Vec<Leaf>,
}

/// Outcome of [`validate_viable`].
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Viability {
    pub valid: bool,
    pub effective: bool,
    pub reason: Option<String>,
}

/// Are the sets `ρ_i · im(p_i)` a partition of Cantor space? Effective when
/// the number of parts is `1 mod (n-1)`.
pub fn validate_viable(u: &Transducer, targets: &[(Word, StateId)], budget: Budget) -> Result<Viability> {
    let n = u.alphabet_size();
    let effective = !targets.is_empty() && (targets.len() - 1).is_multiple_of(n - 1);
    let mut analyzer = ImageAnalyzer::new(u, budget)?;
    let mut parts: Vec<ConeAntichain> = Vec::with_capacity(targets.len());
    for (rho, p) in targets {
        if *p >= u.num_states() {
            return Err(Error::UnknownState(format!("#{p}")));
        }
        parts.push(analyzer.image_antichain(*p)?.prefixed(rho));
    }
    let invalid = |reason: String| Ok(Viability { valid: false, effective, reason: Some(reason) });
    for i in 0..parts.len() {
        for j in (i + 1)..parts.len() {
            if !parts[i].is_disjoint(&parts[j]) {
                return invalid(format!("parts {i} and {j} overlap"));
            }
        }
    }
    let union = parts.iter().fold(ConeAntichain::empty(n), |acc, p| acc.union(p));
    if !union.is_full() {
        return invalid(format!("uncovered: {}", union.complement()));
    }
    Ok(Viability { valid: true, effective, reason: None })
}

impl CompletionMap {
    /// Checks that the domain words form a complete prefix code and the
    /// states exist; viability is checked separately by [`Self::validate`].
    pub fn new(machine: Transducer, mut leaves: Vec<Leaf>) -> Result<Self> {
        let etas: Vec<Word> = leaves.iter().map(|l| l.eta.clone()).collect();
        check_complete_code(machine.alphabet_size(), &etas)?;
        for l in &leaves {
            if l.state >= machine.num_states() {
                return Err(Error::UnknownState(format!("#{}", l.state)));
            }
            crate::word::check_word(&l.rho, machine.alphabet_size())?;
        }
        leaves.sort();
        Ok(CompletionMap { machine, leaves })
    }

    /// The completion with a single leaf `ε ↦ U_p`.
    pub fn single(machine: Transducer, state: StateId) -> Result<Self> {
        Self::new(machine, vec![Leaf { eta: Vec::new(), rho: Vec::new(), state }])
    }

    pub fn machine(&self) -> &Transducer {
        &self.machine
    }

    pub fn leaves(&self) -> &[Leaf] {
        &self.leaves
    }

    pub fn targets(&self) -> Vec<(Word, StateId)> {
        self.leaves.iter().map(|l| (l.rho.clone(), l.state)).collect()
    }

    pub fn validate(&self, budget: Budget) -> Result<Viability> {
        validate_viable(&self.machine, &self.targets(), budget)
    }

    pub fn evaluate(&self, x: &EpWord) -> Result<EpWord> {
        x.check(self.machine.alphabet_size())?;
        let leaf = self.leaves.iter().find(|l| x.starts_with(&l.eta)).expect("complete prefix code");
        Ok(self.machine.evaluate_ep(leaf.state, &x.drop(leaf.eta.len()))?.prepend(&leaf.rho))
    }

    /// `x ↦ ((x)self)g`, a completion over `U·W`. Each leaf is refined until
    /// its emitted prefix determines the leaf of `g` it lands in.
    pub fn compose(&self, g: &CompletionMap, budget: Budget) -> Result<CompletionMap> {
        let (u, w) = (&self.machine, &g.machine);
        let product = u.product(w)?;
        let mut leaves = Vec::new();
        for leaf in &self.leaves {
            let mut stack: Vec<(Word, Word, StateId)> = vec![(Vec::new(), leaf.rho.clone(), leaf.state)];
            while let Some((y, acc, p)) = stack.pop() {
                if let Some(gl) = g.leaves.iter().find(|gl| acc.starts_with(&gl.eta)) {
                    let (out, r) = w.evaluate_prefix(gl.state, &acc[gl.eta.len()..])?;
                    leaves.push(Leaf {
                        eta: concat(&leaf.eta, &y),
                        rho: concat(&gl.rho, &out),
                        state: p * w.num_states() + r,
                    });
                    continue;
                }
                if y.len() >= budget.max_depth {
                    return Err(Error::BudgetExceeded("completion composition too deep".into()));
                }
                for x in 0..u.alphabet_size() as Letter {
                    stack.push((concat(&y, &[x]), concat(&acc, u.output(p, x)), u.next(p, x)));
                }
            }
        }
        CompletionMap::new(product, leaves)
    }

    /// The machine form of `self`: domain-tree states above the states of `U`.
    /// `U`'s states keep their indices; returns the machine and its root.
    fn machine_form(&self) -> Result<(Transducer, StateId)> {
        let u = &self.machine;
        let n = u.alphabet_size();
        let m = u.num_states();
        let mut names: Vec<String> = u.names().to_vec();
        let mut rows: Vec<Row> = u.rows();
        if let [Leaf { eta, rho, state }] = self.leaves.as_slice() {
            debug_assert!(eta.is_empty());
            if rho.is_empty() {
                return Ok((u.clone(), *state));
            }
            names.push(format!("{}·{}", fmt_word(rho), u.name(*state)));
            rows.push(u.row(*state).into_iter().map(|(t, o)| (t, concat(rho, &o))).collect());
            return Ok((Transducer::new(n, names, rows)?, m));
        }
        let mut nodes: Vec<Word> = vec![Vec::new()];
        let mut head = 0;
        while head < nodes.len() {
            let node = nodes[head].clone();
            head += 1;
            let mut row = Vec::with_capacity(n);
            for x in 0..n as Letter {
                let child = concat(&node, &[x]);
                match self.leaves.iter().find(|l| l.eta == child) {
                    Some(l) => row.push((l.state, l.rho.clone())),
                    None => {
                        nodes.push(child);
                        row.push((m + nodes.len() - 1, Vec::new()));
                    }
                }
            }
            rows.push(row);
        }
        names.extend(nodes.iter().map(|v| format!("[{}]", fmt_word(v))));
        Ok((Transducer::new(n, names, rows)?, m))
    }

    /// The inverse as a completion over the partial inverse `U'`.
    pub fn invert(&self, budget: Budget) -> Result<CompletionMap> {
        let m = self.machine.num_states();
        let (form, root) = self.machine_form()?;
        let inv = invert_general(&InitialTransducer::new(form, root)?, budget)?;
        let target = partial_inverse(&self.machine, budget)?;
        let mut leaves = Vec::new();
        let mut stack: Vec<(Word, Word, StateId)> = vec![(Vec::new(), Vec::new(), inv.initial)];
        while let Some((y, out, s)) = stack.pop() {
            let InverseState { residual, base } = &inv.states[s];
            if *base < m {
                let key = InverseState { residual: residual.clone(), base: *base };
                if let Some(idx) = target.state_of(&key) {
                    leaves.push(Leaf { eta: y, rho: out, state: idx });
                    continue;
                }
            }
            if y.len() >= budget.max_depth {
                return Err(Error::BudgetExceeded("inverse leaf not reached".into()));
            }
            for x in 0..inv.machine.alphabet_size() as Letter {
                stack.push((concat(&y, &[x]), concat(&out, inv.machine.output(s, x)), inv.machine.next(s, x)));
            }
        }
        CompletionMap::new(target.machine, leaves)
    }

    /// Merges sibling leaves `u·x ↦ (ρ·λ(x,p), π(x,p))` into `u ↦ (ρ, p)`.
    pub fn simplify(&self) -> CompletionMap {
        let u = &self.machine;
        let n = u.alphabet_size();
        let mut leaves = self.leaves.clone();
        'outer: loop {
            for i in 0..leaves.len() {
                let Some((&0, parent)) = leaves[i].eta.split_last() else { continue };
                let parent = parent.to_vec();
                let parent = parent.as_slice();
                let kids: Option<Vec<Leaf>> = (0..n as Letter)
                    .map(|x| leaves.iter().find(|l| l.eta.split_last() == Some((&x, parent))).cloned())
                    .collect();
                let Some(kids) = kids else { continue };
                for p in u.states() {
                    let mut rho: Option<&[Letter]> = None;
                    let fits = kids.iter().enumerate().all(|(x, k)| {
                        let o = u.output(p, x as Letter);
                        if u.next(p, x as Letter) != k.state || !k.rho.ends_with(o) {
                            return false;
                        }
                        let r = &k.rho[..k.rho.len() - o.len()];
                        *rho.get_or_insert(r) == r
                    });
                    if fits {
                        let merged = Leaf { eta: parent.to_vec(), rho: rho.unwrap().to_vec(), state: p };
                        leaves.retain(|l| l.eta.split_last().map(|(_, a)| a) != Some(parent));
                        leaves.push(merged);
                        leaves.sort();
                        continue 'outer;
                    }
                }
            }
            break;
        }
        CompletionMap { machine: self.machine.clone(), leaves }
    }

    /// The transducer `η_i χ ↦ ρ_i (χ)U_{p_i}` as an initial transducer.
    pub fn to_transducer(&self) -> Result<InitialTransducer> {
        let (form, root) = self.machine_form()?;
        InitialTransducer::new(form, root)
    }
}

impl CantorMap for CompletionMap {
    fn alphabet_size(&self) -> usize {
        self.machine.alphabet_size()
    }

    fn apply(&self, x: &EpWord) -> Result<EpWord> {
        self.evaluate(x)
    }
}

impl fmt::Display for CompletionMap {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let parts: Vec<String> = self
            .leaves
            .iter()
            .map(|l| format!("{}→{}·{}", fmt_word(&l.eta), fmt_word(&l.rho), self.machine.name(l.state)))
            .collect();
        write!(f, "{{{}}}", parts.join(", "))
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::corpus;
    use crate::inversion::invert;
    use crate::word::parse_word;

    fn w(s: &str) -> Word {
        parse_word(s, 2).unwrap()
    }

    fn ts() -> Transducer {
        let s = invert(&corpus::parity_at("a"), Budget::default()).unwrap();
        corpus::parity().product(&s.machine).unwrap()
    }

    fn flip_swap() -> CompletionMap {
        let u = ts();
        let ab = u.state("a·b⁻¹").unwrap();
        let ba = u.state("b·a⁻¹").unwrap();
        CompletionMap::new(
            u,
            vec![Leaf { eta: w("0"), rho: w("1"), state: ab }, Leaf { eta: w("1"), rho: w("0"), state: ba }],
        )
        .unwrap()
    }

    #[test]
    fn viability_examples() {
        let b = Budget::default();
        let u = ts();
        let aa = u.state("a·a⁻¹").unwrap();
        let v = validate_viable(&u, &[(w(""), aa)], b).unwrap();
        assert!(v.valid && v.effective);
        let v = flip_swap().validate(b).unwrap();
        assert!(v.valid && v.effective);
        let xb = corpus::xb().machine;
        let v = validate_viable(&xb, &[(w("0"), xb.state("p1").unwrap())], b).unwrap();
        assert!(!v.valid);
        let p1 = xb.state("p1").unwrap();
        let id = xb.state("id").unwrap();
        let v = validate_viable(&xb, &[(w(""), p1), (w("00"), id)], b).unwrap();
        assert!(v.valid && v.effective);
    }

    #[test]
    fn evaluation() {
        let h = flip_swap();
        assert_eq!(h.evaluate(&"0(01)".parse().unwrap()).unwrap(), "1(10)".parse().unwrap());
    }

    #[test]
    fn inverse_round_trip() {
        let b = Budget::default();
        let h = flip_swap();
        let hi = h.invert(b).unwrap();
        assert!(hi.validate(b).unwrap().valid);
        let round = h.compose(&hi, b).unwrap();
        for x in EpWord::enumerate(2, 6) {
            assert_eq!(round.evaluate(&x).unwrap(), x);
            assert_eq!(hi.evaluate(&h.evaluate(&x).unwrap()).unwrap(), x);
        }
        // an asynchronous completion over XB
        let xb = corpus::xb().machine;
        let g = CompletionMap::new(
            xb.clone(),
            vec![
                Leaf { eta: w("0"), rho: w(""), state: xb.state("p1").unwrap() },
                Leaf { eta: w("1"), rho: w("00"), state: xb.state("id").unwrap() },
            ],
        )
        .unwrap();
        assert!(g.validate(b).unwrap().valid);
        let gi = g.invert(b).unwrap();
        for x in EpWord::enumerate(2, 6) {
            assert_eq!(gi.evaluate(&g.evaluate(&x).unwrap()).unwrap(), x);
            assert_eq!(g.evaluate(&gi.evaluate(&x).unwrap()).unwrap(), x);
        }
    }

    #[test]
    fn identity_is_neutral() {
        let b = Budget::default();
        let h = flip_swap();
        let u = h.machine().clone();
        let id = CompletionMap::single(u.clone(), u.state("a·a⁻¹").unwrap()).unwrap();
        let c = id.compose(&h, b).unwrap();
        assert_eq!(
            c.leaves().iter().map(|l| (&l.eta, &l.rho)).collect::<Vec<_>>(),
            h.leaves().iter().map(|l| (&l.eta, &l.rho)).collect::<Vec<_>>()
        );
        for x in EpWord::enumerate(2, 6) {
            assert_eq!(c.evaluate(&x).unwrap(), h.evaluate(&x).unwrap());
        }
    }

    #[test]
    fn simplify_merges_siblings() {
        let xb = corpus::xb().machine;
        let id = xb.state("id").unwrap();
        let h = CompletionMap::new(
            xb.clone(),
            vec![
                Leaf { eta: w("0"), rho: w("0"), state: id },
                Leaf { eta: w("1"), rho: w("1"), state: id },
            ],
        )
        .unwrap();
        assert_eq!(h.simplify().leaves(), &[Leaf { eta: vec![], rho: vec![], state: id }]);
    }
}
