//! The built-in reproduction suite behind `tx paper-check`: one routine per
//! reference example or theorem instance, each with a fixed seed.

use rand::rngs::StdRng;
use rand::SeedableRng;

use crate::corpus;
use crate::error::{Error, Result};
use crate::group::completion::{CompletionMap, Leaf};
use crate::group::conjugation::{conjugate_machine, conjugate_overgroup, conjugate_subgroup};
use crate::group::contracting::{contracting_check, ContractingVerdict};
use crate::group::perm_group::automaton_group_ts;
use crate::image::{is_partially_invertible, Budget};
use crate::inversion::{invert, partial_inverse, verify_inverse};
use crate::machine::{InitialTransducer, StateId, Transducer};
use crate::map::CantorMap;
use crate::prefix_map::{random, PrefixExchangeMap};
use crate::sync::{
    classify_synchronicity, collapse, level_via_inverse_products, synchronizing_level, Automaton,
    CollapsedAutomaton, PrefixRelation, Synchronicity, DEFAULT_KMAX,
};
use crate::word::{parse_word, words_up_to, EpWord, Letter, Word};

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct CheckOutcome {
    pub name: &'static str,
    pub pass: bool,
    pub detail: String,
}

/// Sample depth for pointwise comparisons: preperiod plus period.
pub const POINT_DEPTH: usize = 10;

type Check = fn(Budget) -> std::result::Result<String, String>;

pub const CHECKS: &[(&str, Check)] = &[
    ("parity_example", parity_example),
    ("parity_products", parity_products),
    ("inversion_soundness", inversion_soundness),
    ("subgroup_conjugates", subgroup_conjugates),
    ("overgroup_conjugates", overgroup_conjugates),
    ("level_cross_check", level_cross_check),
    ("contracting_products", contracting_products),
    ("partial_inverse", partial_inverse_checks),
    ("relation_membership", relation_membership),
    ("negative_controls", negative_controls),
];

pub fn run_all(budget: Budget) -> Vec<CheckOutcome> {
    CHECKS
        .iter()
        .map(|&(name, check)| match check(budget) {
            Ok(detail) => CheckOutcome { name, pass: true, detail },
            Err(detail) => CheckOutcome { name, pass: false, detail },
        })
        .collect()
}

fn ensure(cond: bool, msg: impl FnOnce() -> String) -> std::result::Result<(), String> {
    if cond {
        Ok(())
    } else {
        Err(msg())
    }
}

fn lift<T>(r: Result<T>) -> std::result::Result<T, String> {
    r.map_err(|e| e.to_string())
}

fn w(s: &str) -> Word {
    parse_word(s, 2).expect("binary literal")
}

fn parity_inverse(budget: Budget) -> Result<InitialTransducer> {
    Ok(invert(&corpus::parity_at("a"), budget)?.as_initial())
}

fn parity_relation(budget: Budget) -> Result<CollapsedAutomaton> {
    let s = parity_inverse(budget)?;
    Ok(collapse(&Automaton::of(&s.machine, s.initial)))
}

fn ones_parity(word: &[Letter]) -> usize {
    word.iter().filter(|&&x| x == 1).count() % 2
}

fn parity_example(budget: Budget) -> std::result::Result<String, String> {
    let t = corpus::parity_at("a");
    let level = synchronizing_level(&t.machine, DEFAULT_KMAX);
    ensure(level == Some(1), || format!("synchronizing level {level:?}"))?;
    let class = lift(classify_synchronicity(&t, DEFAULT_KMAX, budget))?;
    ensure(class == Synchronicity::OneWay, || format!("classified {class}"))?;
    let s = lift(parity_inverse(budget))?;
    let m = &s.machine;
    ensure(m.num_states() == 2, || format!("inverse has {} states", m.num_states()))?;
    ensure(m.states().all(|q| m.next(q, 0) == q && m.next(q, 1) != q), || "inverse transitions".into())?;
    let rel = lift(parity_relation(budget))?;
    let mut label = [None; 2];
    for u in words_up_to(2, 10).iter().filter(|u| !u.is_empty()) {
        let c = lift(rel.classify(u))?;
        let slot = label[ones_parity(u)].get_or_insert(c);
        ensure(*slot == c, || format!("word {u:?} misclassified"))?;
    }
    ensure(label[0] != label[1], || "parities share a class".into())?;
    Ok("level 1, one_way, inverse 2 states, relation = parity of ones on words ≤ 10".into())
}

fn parity_products(budget: Budget) -> std::result::Result<String, String> {
    let s = lift(parity_inverse(budget))?;
    let ts = lift(corpus::parity().product(&s.machine))?;
    ensure(ts.num_states() == 4, || format!("TS has {} states", ts.num_states()))?;
    let at = |name: &str| lift(InitialTransducer::at(&ts, name));
    for name in ["a·a⁻¹", "b·b⁻¹"] {
        ensure(lift(at(name)?.minimize())?.is_identity(), || format!("{name} is not the identity"))?;
    }
    let flip = lift(Transducer::new(2, vec!["f".into()], vec![vec![(0, vec![1]), (0, vec![0])]]))?;
    let flip = lift(InitialTransducer::new(flip, 0))?;
    let (ab, ba) = (at("a·b⁻¹")?, at("b·a⁻¹")?);
    ensure(lift(ab.omega_equal(&ba))?, || "a·b⁻¹ and b·a⁻¹ differ".into())?;
    ensure(lift(ab.omega_equal(&flip))?, || "a·b⁻¹ is not the complement map".into())?;
    let g = lift(automaton_group_ts(&corpus::parity_at("a"), 64, DEFAULT_KMAX, budget))?;
    ensure(g.order == 2, || format!("G(TS) has order {}", g.order))?;
    Ok("TS has 4 states, G(TS) has order 2".into())
}

fn round_trips(t: &InitialTransducer, s: &InitialTransducer) -> Result<bool> {
    for x in EpWord::enumerate(t.alphabet_size(), POINT_DEPTH) {
        if s.apply(&t.apply(&x)?)? != x || t.apply(&s.apply(&x)?)? != x {
            return Ok(false);
        }
    }
    Ok(true)
}

fn inversion_soundness(budget: Budget) -> std::result::Result<String, String> {
    let mut rng = StdRng::seed_from_u64(0x5eed);
    let mut machines = vec![("PARITY".to_string(), corpus::parity_at("a")), ("XB".to_string(), corpus::xb())];
    for i in 0..25 {
        machines.push((format!("random #{i}"), random::element(&mut rng, 2, 4).to_transducer()));
    }
    for (name, t) in &machines {
        let s = lift(invert(t, budget))?.as_initial();
        ensure(verify_inverse(t, &s).valid(), || format!("{name}: certificate failed"))?;
        ensure(lift(round_trips(t, &s))?, || format!("{name}: pointwise round trip failed"))?;
    }
    Ok(format!("{} machines inverted and certified", machines.len()))
}

fn subgroup_conjugates(budget: Budget) -> std::result::Result<String, String> {
    let t = corpus::parity_at("a");
    let s = lift(parity_inverse(budget))?;
    let rel = lift(parity_relation(budget))?;
    let swap = lift(PrefixExchangeMap::small_swap(2, &w("0"), &w("1")))?;
    let expected = lift(PrefixExchangeMap::new(
        2,
        vec![(w("00"), w("11")), (w("01"), w("10")), (w("10"), w("01")), (w("11"), w("00"))],
    ))?;
    let got = lift(conjugate_subgroup(&swap, &t, DEFAULT_KMAX, budget))?;
    ensure(got == expected, || format!("(0,1)^T = {got}"))?;
    let mut rng = StdRng::seed_from_u64(42);
    for _ in 0..100 {
        let v = random::small_swap(&mut rng, 2, 4);
        let c = lift(conjugate_subgroup(&v, &t, DEFAULT_KMAX, budget))?;
        ensure(lift(c.preserves_relation(&rel))?.member, || format!("{v}^T = {c} breaks the relation"))?;
    }
    for _ in 0..50 {
        let v = random::relation_preserving(&mut rng, &rel, 4);
        let c = lift(conjugate_machine(&v, &t, &s))?;
        ensure(PrefixExchangeMap::from_transducer(&c, DEFAULT_KMAX).is_some(), || format!("{v}^(T⁻¹) not in V"))?;
    }
    Ok("100 swap conjugates preserve the relation; 50 preserving maps conjugate back into V".into())
}

/// `(0,1)^{T⁻¹}` for PARITY: swap the first letter, complement the rest.
fn swap_then_complement(x: &EpWord) -> EpWord {
    let flip = |w: &[Letter]| w.iter().map(|&a| 1 - a).collect::<Word>();
    let first = x.letter(0);
    let rest = x.drop(1);
    EpWord::new(flip(rest.preperiod()), flip(rest.period())).expect("nonempty period").prepend(&[1 - first])
}

fn overgroup_conjugates(budget: Budget) -> std::result::Result<String, String> {
    let t = corpus::parity_at("a");
    let s = lift(parity_inverse(budget))?;
    let swap = lift(PrefixExchangeMap::small_swap(2, &w("0"), &w("1")))?;
    let h = lift(conjugate_overgroup(&swap, &t, DEFAULT_KMAX, budget))?;
    for x in EpWord::enumerate(2, POINT_DEPTH) {
        ensure(lift(h.apply(&x))? == swap_then_complement(&x), || format!("(0,1)^(T⁻¹) at {x}"))?;
    }
    let mut outside = usize::from(PrefixExchangeMap::from_transducer(&lift(h.to_transducer())?, DEFAULT_KMAX).is_none());
    let mut rng = StdRng::seed_from_u64(43);
    for _ in 0..50 {
        let v = random::small_swap(&mut rng, 2, 3);
        let h = lift(conjugate_overgroup(&v, &t, DEFAULT_KMAX, budget))?;
        for x in EpWord::enumerate(2, POINT_DEPTH) {
            let direct = lift(s.apply(&lift(v.apply(&lift(t.apply(&x))?))?))?;
            ensure(lift(h.apply(&x))? == direct, || format!("{v}: completion differs from T∘v∘S at {x}"))?;
        }
        if PrefixExchangeMap::from_transducer(&lift(h.to_transducer())?, DEFAULT_KMAX).is_none() {
            outside += 1;
        }
    }
    ensure(outside > 0, || "every conjugate lies in V".into())?;
    Ok(format!("51 completions agree with T∘v∘S; {outside} lie outside V"))
}

fn level_cross_check(_: Budget) -> std::result::Result<String, String> {
    let mut lines = Vec::new();
    for (name, t) in [("PARITY", corpus::parity_at("a")), ("LEVEL2", corpus::level2()), ("NONSYNC", corpus::nonsync())] {
        let direct = synchronizing_level(&t.machine, DEFAULT_KMAX);
        let via = lift(level_via_inverse_products(&t.machine, DEFAULT_KMAX))?;
        ensure(direct == via, || format!("{name}: collapse {direct:?} vs products {via:?}"))?;
        lines.push(format!("{name}={direct:?}"));
    }
    Ok(lines.join(" "))
}

fn contracting_products(budget: Budget) -> std::result::Result<String, String> {
    let s = lift(parity_inverse(budget))?.machine;
    let t = corpus::parity();
    let mut counted = 0;
    for (name, m) in [("TS", lift(t.product(&s))?), ("ST", lift(s.product(&t))?)] {
        match lift(contracting_check(&m, 3, 4, budget))? {
            ContractingVerdict::ContractingToDepth { products, .. } => counted += products,
            other => return Err(format!("{name}: {other:?}")),
        }
    }
    Ok(format!("{counted} products of length ≤ 3 settle within depth 4"))
}

/// Every state of `sub` is ω-equal to some state of `sup` after `depth` letters.
fn settles_into(sub: &Transducer, sup: &Transducer, depth: usize) -> Result<bool> {
    let all = sup.disjoint_union(sub)?;
    let classes = all.omega_classes()?;
    let target: Vec<usize> = classes[..sup.num_states()].to_vec();
    for q in 0..sub.num_states() {
        let mut level: Vec<StateId> = vec![sup.num_states() + q];
        for _ in 0..depth {
            level = level
                .iter()
                .flat_map(|&p| (0..all.alphabet_size() as Letter).map(|x| all.next(p, x)).collect::<Vec<_>>())
                .collect();
        }
        if !level.iter().all(|&p| target.contains(&classes[p])) {
            return Ok(false);
        }
    }
    Ok(true)
}

fn partial_inverse_checks(budget: Budget) -> std::result::Result<String, String> {
    let s = lift(parity_inverse(budget))?.machine;
    let t = corpus::parity();
    let pinv = lift(partial_inverse(&t, budget))?.machine;
    ensure(lift(settles_into(&pinv, &s, 0))?, || "partial inverse of PARITY has a foreign state".into())?;
    let ts = lift(t.product(&s))?;
    let pts = lift(partial_inverse(&ts, budget))?.machine;
    ensure(lift(settles_into(&pts, &ts, 2))?, || "partial inverse of TS does not settle into TS".into())?;
    let (ab, ba) = (lift(ts.state("a·b⁻¹"))?, lift(ts.state("b·a⁻¹"))?);
    let h = lift(CompletionMap::new(
        ts.clone(),
        vec![Leaf { eta: w("0"), rho: w("1"), state: ab }, Leaf { eta: w("1"), rho: w("0"), state: ba }],
    ))?;
    let hi = lift(h.invert(budget))?;
    for x in EpWord::enumerate(2, POINT_DEPTH) {
        ensure(lift(hi.apply(&lift(h.apply(&x))?))? == x, || format!("completion inverse fails at {x}"))?;
    }
    Ok(format!("partial inverses: PARITY {} states, TS {} states", pinv.num_states(), pts.num_states()))
}

/// Word pairs of a map as blocks over `X_2` from a map over `X_4`.
fn embed_level2(v: &PrefixExchangeMap) -> Result<PrefixExchangeMap> {
    let spread = |u: &[Letter]| u.iter().flat_map(|&d| [d / 2, d % 2]).collect::<Word>();
    PrefixExchangeMap::new(2, v.pairs().iter().map(|(a, b)| (spread(a), spread(b))).collect())
}

fn relation_membership(_: Budget) -> std::result::Result<String, String> {
    let b = collapse(&corpus::automaton_b());
    let c = collapse(&corpus::automaton_c());
    let zeros = |u: &[Letter]| !u.is_empty() && u.iter().all(|&x| x == 0);
    let mut rng = StdRng::seed_from_u64(44);
    let mut rejected = (0, 0);
    for _ in 0..200 {
        let v = random::element(&mut rng, 2, 4);
        let moves_zeros = v.pairs().iter().any(|(a, b)| zeros(a) != zeros(b));
        let member_b = lift(v.preserves_relation(&b))?.member;
        ensure(member_b != moves_zeros, || format!("B verdict wrong for {v}"))?;
        let breaks_parity = v.pairs().iter().any(|(a, b)| a.len() % 2 != b.len() % 2);
        let member_c = lift(v.preserves_relation(&c))?.member;
        ensure(member_c != breaks_parity, || format!("C verdict wrong for {v}"))?;
        rejected.0 += usize::from(!member_b);
        rejected.1 += usize::from(!member_c);
    }
    for _ in 0..50 {
        let v = lift(embed_level2(&random::element(&mut rng, 4, 3)))?;
        ensure(lift(v.preserves_relation(&c))?.member, || format!("level-2 block map {v} rejected by C"))?;
    }
    Ok(format!("200 random maps: B rejects {}, C rejects {}; 50 level-2 block maps accepted by C", rejected.0, rejected.1))
}

fn negative_controls(budget: Budget) -> std::result::Result<String, String> {
    let report = lift(is_partially_invertible(&corpus::dbl().machine, budget))?;
    ensure(
        matches!(report.budget_failure(), Some(Error::BudgetExceeded(_))),
        || "DBL did not exhaust the budget".into(),
    )?;
    let t = corpus::nonsync();
    let class = lift(classify_synchronicity(&t, DEFAULT_KMAX, budget))?;
    ensure(class == Synchronicity::NotSynchronizing, || format!("NONSYNC classified {class}"))?;
    let swap = lift(PrefixExchangeMap::small_swap(2, &w("0"), &w("1")))?;
    ensure(
        conjugate_subgroup(&swap, &t, DEFAULT_KMAX, budget) == Err(Error::NotSynchronizing),
        || "conjugation by NONSYNC was not refused".into(),
    )?;
    Ok("DBL exceeds the budget; NONSYNC is not synchronizing and conjugation is refused".into())
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn swap_then_complement_oracle() {
        let x: EpWord = "0(01)".parse().unwrap();
        assert_eq!(swap_then_complement(&x), "1(10)".parse().unwrap());
    }

    #[test]
    fn all_checks_pass() {
        for c in run_all(Budget::default()) {
            assert!(c.pass, "{}: {}", c.name, c.detail);
        }
    }

    #[test]
    fn level2_embedding() {
        let v = PrefixExchangeMap::small_swap(4, &[0], &[3]).unwrap();
        let e = embed_level2(&v).unwrap();
        assert!(e.pairs().iter().all(|(a, b)| a.len() % 2 == 0 && b.len() % 2 == 0));
    }
}
