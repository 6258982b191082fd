//! Inverses of homeomorphism transducers, the partial inverse of a partially
//! invertible transducer, and round-trip certificates.

use std::collections::HashMap;

use crate::error::{Error, Result};
use crate::image::{Budget, ImageAnalyzer};
use crate::machine::{InitialTransducer, Row, StateId, Transducer};
use crate::word::{fmt_word, Letter, Word};

/// The inverse state `(w, p)`: reading `δ` outputs the preimage of `w·δ`
/// under `T_p`.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct InverseState {
    pub residual: Word,
    pub base: StateId,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct InverseMachine {
    pub machine: Transducer,
    pub initial: StateId,
    pub states: Vec<InverseState>,
}

impl InverseMachine {
    pub fn as_initial(&self) -> InitialTransducer {
        InitialTransducer { machine: self.machine.clone(), initial: self.initial }
    }

    pub fn state_of(&self, s: &InverseState) -> Option<StateId> {
        self.states.iter().position(|x| x == s)
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct InverseCertificate {
    pub forward_then_back_identity: bool,
    pub back_then_forward_identity: bool,
    pub budgets_used: Budget,
}

impl InverseCertificate {
    pub fn valid(&self) -> bool {
        self.forward_then_back_identity && self.back_then_forward_identity
    }
}

fn is_identity_map(t: &InitialTransducer) -> bool {
    t.minimize().map(|m| m.is_identity()).unwrap_or(false)
}

/// Checks that `TS` and `ST` both minimize to the one-state identity.
pub fn verify_inverse(t: &InitialTransducer, s: &InitialTransducer) -> InverseCertificate {
    let fwd = t.then(s).map(|p| is_identity_map(&p)).unwrap_or(false);
    let back = s.then(t).map(|p| is_identity_map(&p)).unwrap_or(false);
    InverseCertificate {
        forward_then_back_identity: fwd,
        back_then_forward_identity: back,
        budgets_used: Budget::default(),
    }
}

/// Inverse of a homeomorphism state, restricted to the states accessible from
/// the initial one. Uses the letter-permutation shortcut when every accessible
/// state is synchronous and bijective on letters.
pub fn invert(t: &InitialTransducer, budget: Budget) -> Result<InverseMachine> {
    let acc = t.accessible_part();
    let inv = match invert_synchronous(&acc) {
        Some(inv) => inv,
        None => invert_general(&acc, budget)?,
    };
    let cert = verify_inverse(&acc, &inv.as_initial());
    if !cert.valid() {
        return Err(Error::NotInjective);
    }
    Ok(inv)
}

/// The general construction, without the synchronous shortcut and without
/// the round-trip certificate.
pub fn invert_general(t: &InitialTransducer, budget: Budget) -> Result<InverseMachine> {
    let mut analyzer = ImageAnalyzer::new(&t.machine, budget)?;
    if !analyzer.image_antichain(t.initial)?.is_full() {
        return Err(Error::NotSurjective);
    }
    let seed = InverseState { residual: Vec::new(), base: t.initial };
    build(&t.machine, &mut analyzer, vec![seed], budget)
}

/// The letter-permutation inverse: states `q⁻¹` with `λ'(·, q⁻¹) = λ(·, q)⁻¹`.
/// `None` unless every state is synchronous and bijective on letters.
pub fn invert_synchronous(t: &InitialTransducer) -> Option<InverseMachine> {
    let m = &t.machine;
    let n = m.alphabet_size();
    if !m.is_synchronous() {
        return None;
    }
    let mut rows: Vec<Row> = Vec::with_capacity(m.num_states());
    for q in m.states() {
        let mut row: Vec<Option<(StateId, Word)>> = vec![None; n];
        for x in 0..n as Letter {
            let y = m.output(q, x)[0] as usize;
            if row[y].is_some() {
                return None;
            }
            row[y] = Some((m.next(q, x), vec![x]));
        }
        rows.push(row.into_iter().map(Option::unwrap).collect());
    }
    let names = m.states().map(|q| format!("{}⁻¹", m.name(q))).collect();
    let full = Transducer::new(n, names, rows).ok()?;
    let keep = full.reachable_from(&[t.initial]);
    let (machine, _) = full.restrict(&keep).ok()?;
    let states = keep.iter().map(|&q| InverseState { residual: Vec::new(), base: q }).collect();
    Some(InverseMachine { machine, initial: 0, states })
}

/// The partial inverse `T'`: seeded with one state per cone of each state's
/// canonical image antichain, closed under one-letter transitions. State
/// `(w, p)` maps `δ` to the preimage of `w·δ` under `T_p`.
pub fn partial_inverse(t: &Transducer, budget: Budget) -> Result<InverseMachine> {
    let mut analyzer = ImageAnalyzer::new(t, budget)?;
    let mut seeds = Vec::new();
    for q in t.states() {
        let image = analyzer.image_antichain(q)?;
        for eta in image.words() {
            let nu = analyzer.lq(q, eta)?;
            let (out, p) = t.evaluate_prefix(q, &nu)?;
            if !eta.starts_with(&out) {
                return Err(Error::InternalInvariantViolation(format!(
                    "image cone {} of `{}` overshot",
                    fmt_word(eta),
                    t.name(q)
                )));
            }
            let s = InverseState { residual: eta[out.len()..].to_vec(), base: p };
            if !seeds.contains(&s) {
                seeds.push(s);
            }
        }
    }
    build(t, &mut analyzer, seeds, budget)
}

fn build(
    t: &Transducer,
    analyzer: &mut ImageAnalyzer<'_>,
    seeds: Vec<InverseState>,
    budget: Budget,
) -> Result<InverseMachine> {
    let n = t.alphabet_size();
    let mut index: HashMap<InverseState, StateId> = HashMap::new();
    let mut states: Vec<InverseState> = Vec::new();
    for s in seeds {
        index.insert(s.clone(), states.len());
        states.push(s);
    }
    let mut rows: Vec<Row> = Vec::new();
    let mut head = 0;
    while head < states.len() {
        let InverseState { residual, base } = states[head].clone();
        head += 1;
        let mut row = Vec::with_capacity(n);
        for beta in 0..n as Letter {
            let mut target = residual.clone();
            target.push(beta);
            let l = analyzer.lq(base, &target)?;
            let (out, p) = t.evaluate_prefix(base, &l)?;
            if !target.starts_with(&out) {
                return Err(Error::NotSurjective);
            }
            let next = InverseState { residual: target[out.len()..].to_vec(), base: p };
            if next.residual.len() > budget.max_depth {
                return Err(Error::BudgetExceeded(format!(
                    "inverse residual longer than {}",
                    budget.max_depth
                )));
            }
            let id = match index.get(&next) {
                Some(&id) => id,
                None => {
                    if states.len() >= budget.max_configurations {
                        return Err(Error::BudgetExceeded("too many inverse states".into()));
                    }
                    index.insert(next.clone(), states.len());
                    states.push(next);
                    states.len() - 1
                }
            };
            row.push((id, l));
        }
        rows.push(row);
    }
    let names = states
        .iter()
        .map(|s| format!("({},{})", fmt_word(&s.residual), t.name(s.base)))
        .collect();
    let machine = Transducer::new(n, names, rows)?;
    Ok(InverseMachine { machine, initial: 0, states })
}
