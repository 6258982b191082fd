//! Conjugating prefix-exchange maps by synchronizing homeomorphisms.

use crate::error::{Error, Result};
use crate::group::completion::{CompletionMap, Leaf};
use crate::image::Budget;
use crate::inversion::invert;
use crate::machine::{InitialTransducer, StateId};
use crate::prefix_map::PrefixExchangeMap;
use crate::sync::{classify_synchronicity, Synchronicity};
use crate::word::{concat, Letter, Word};

/// The machine `x ↦ (((x)A)v)B`.
pub fn conjugate_machine(
    v: &PrefixExchangeMap,
    a: &InitialTransducer,
    b: &InitialTransducer,
) -> Result<InitialTransducer> {
    a.then(&v.to_transducer())?.then(b)
}

fn require_synchronizing(t: &InitialTransducer, kmax: usize, budget: Budget) -> Result<()> {
    match classify_synchronicity(t, kmax, budget)? {
        Synchronicity::NotSynchronizing => Err(Error::NotSynchronizing),
        _ => Ok(()),
    }
}

/// `v^T = T⁻¹ v T` read back as a prefix-exchange map.
pub fn conjugate_subgroup(
    v: &PrefixExchangeMap,
    t: &InitialTransducer,
    kmax: usize,
    budget: Budget,
) -> Result<PrefixExchangeMap> {
    require_synchronizing(t, kmax, budget)?;
    let s = invert(t, budget)?.as_initial();
    let conj = conjugate_machine(v, &s, t)?;
    PrefixExchangeMap::from_transducer(&conj, kmax.max(budget.max_depth)).ok_or_else(|| {
        Error::InternalInvariantViolation("conjugate by a synchronizing map is not in V_n".into())
    })
}

/// `v^{T⁻¹} = T v T⁻¹` as a completion over `U = T·T⁻¹`: each leaf records
/// the input read until `v`'s tree is exhausted, the output emitted so far and
/// the active `(t, s)` pair, indexed `t·|S| + s`.
pub fn conjugate_overgroup(
    v: &PrefixExchangeMap,
    t: &InitialTransducer,
    kmax: usize,
    budget: Budget,
) -> Result<CompletionMap> {
    require_synchronizing(t, kmax, budget)?;
    let t = t.accessible_part();
    let inv = invert(&t, budget)?;
    let (tm, sm) = (&t.machine, &inv.machine);
    let u = tm.product(sm)?;
    let bv = v.to_transducer();
    let bm = &bv.machine;
    let id = bm
        .states()
        .find(|&q| bm.is_identity_state(q))
        .ok_or_else(|| Error::InternalInvariantViolation("prefix map without identity state".into()))?;
    let mut leaves = Vec::new();
    let mut stack: Vec<(Word, Word, StateId, StateId, StateId)> =
        vec![(Vec::new(), Vec::new(), t.initial, bv.initial, inv.initial)];
    while let Some((y, out, tq, bq, sq)) = stack.pop() {
        if bq == id {
            leaves.push(Leaf { eta: y, rho: out, state: tq * sm.num_states() + sq });
            continue;
        }
        if y.len() >= budget.max_depth {
            return Err(Error::BudgetExceeded("conjugate leaf deeper than budget".into()));
        }
        for x in 0..tm.alphabet_size() as Letter {
            let (o2, b2) = bm.evaluate_prefix(bq, tm.output(tq, x))?;
            let (o3, s2) = sm.evaluate_prefix(sq, &o2)?;
            stack.push((concat(&y, &[x]), concat(&out, &o3), tm.next(tq, x), b2, s2));
        }
    }
    CompletionMap::new(u, leaves)
}
