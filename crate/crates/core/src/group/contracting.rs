//! Bounded check that products of states of `T` and its partial inverse act,
//! after a bounded read, as states of `T`.

use std::collections::BTreeSet;

use crate::error::Result;
use crate::image::Budget;
use crate::inversion::partial_inverse;
use crate::machine::{StateId, Transducer};
use crate::word::Letter;

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum ContractingVerdict {
    /// Every product of length at most `len` reaches states of `T` within
    /// `depth` letters.
    ContractingToDepth { len: usize, depth: usize, products: usize },
    Counterexample { product: String, reached: String },
    Inconclusive(String),
}

impl ContractingVerdict {
    pub fn label(&self) -> &'static str {
        match self {
            ContractingVerdict::ContractingToDepth { .. } => "contracting_to_depth",
            ContractingVerdict::Counterexample { .. } => "counterexample",
            ContractingVerdict::Inconclusive(_) => "inconclusive",
        }
    }
}

pub fn contracting_check(t: &Transducer, len: usize, depth: usize, budget: Budget) -> Result<ContractingVerdict> {
    let tp = match partial_inverse(t, budget) {
        Ok(tp) => tp.machine,
        Err(e) if e.is_budget() => return Ok(ContractingVerdict::Inconclusive(e.to_string())),
        Err(e) => return Err(e),
    };
    let d = t.disjoint_union(&tp)?;
    let mut power = d.clone();
    let mut products = 0;
    for l in 1..=len {
        if l > 1 {
            if power.num_states() * d.num_states() > budget.max_configurations {
                return Ok(ContractingVerdict::Inconclusive(format!("products of length {l} exceed the budget")));
            }
            power = power.product(&d)?;
        }
        let all = t.disjoint_union(&power)?;
        let classes = all.omega_classes()?;
        let offset = t.num_states();
        let target: BTreeSet<usize> = classes[..offset].iter().copied().collect();
        let settled = |set: &BTreeSet<StateId>| set.iter().all(|&q| target.contains(&classes[q]));
        for x in 0..power.num_states() {
            products += 1;
            let mut level: BTreeSet<StateId> = [offset + x].into();
            let mut ok = settled(&level);
            for _ in 0..depth {
                if ok {
                    break;
                }
                level = level
                    .iter()
                    .flat_map(|&q| {
                        let all = &all;
                        (0..all.alphabet_size() as Letter).map(move |y| all.next(q, y))
                    })
                    .collect();
                ok = settled(&level);
            }
            if !ok {
                let bad = level.iter().find(|&&q| !target.contains(&classes[q])).unwrap();
                return Ok(ContractingVerdict::Counterexample {
                    product: power.name(x).to_string(),
                    reached: all.name(*bad).to_string(),
                });
            }
        }
    }
    Ok(ContractingVerdict::ContractingToDepth { len, depth, products })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::corpus;
    use crate::inversion::invert;

    fn parity_pair() -> (Transducer, Transducer) {
        let s = invert(&corpus::parity_at("a"), Budget::default()).unwrap().machine;
        let t = corpus::parity();
        (t.product(&s).unwrap(), s.product(&t).unwrap())
    }

    #[test]
    fn parity_products_contract() {
        let (ts, st) = parity_pair();
        for m in [ts, st] {
            let v = contracting_check(&m, 3, 4, Budget::default()).unwrap();
            assert_eq!(v.label(), "contracting_to_depth", "{v:?}");
        }
        let v = contracting_check(&Transducer::identity(2), 3, 4, Budget::default()).unwrap();
        assert_eq!(v.label(), "contracting_to_depth");
    }

    #[test]
    fn parity_alone_does_not_contract() {
        // T = PARITY with T' its inverse: a·a⁻¹-type products are the identity,
        // which PARITY does not contain.
        let v = contracting_check(&corpus::parity(), 2, 4, Budget::default()).unwrap();
        assert_eq!(v.label(), "counterexample");
    }
}
