use std::collections::VecDeque;

use proptest::prelude::*;
use rand::rngs::StdRng;
use rand::SeedableRng;

use tx_core::corpus;
use tx_core::dot::emit_dot;
use tx_core::group::completion::CompletionMap;
use tx_core::group::conjugation::conjugate_overgroup;
use tx_core::group::perm_group::{automaton_group_st, automaton_group_ts, count_state_products};
use tx_core::image::{image_antichain, is_partially_invertible};
use tx_core::inversion::{invert, verify_inverse};
use tx_core::map::CantorMap;
use tx_core::prefix_map::random;
use tx_core::text::{parse, serialize, Document, Item};
use tx_core::{Budget, ConeAntichain, EpWord, InitialTransducer, Letter, PrefixExchangeMap, Transducer, Word};

fn machine_from(n: usize, table: Vec<Vec<(usize, Word)>>) -> Transducer {
    let names = (0..table.len()).map(|i| format!("q{i}")).collect();
    Transducer::new(n, names, table).unwrap()
}

/// Arbitrary binary transducers with outputs of length at most 2.
fn arb_transducer(max_states: usize) -> impl Strategy<Value = Transducer> {
    (1..=max_states).prop_flat_map(|m| {
        let cell = (0..m, prop::collection::vec(0..2 as Letter, 0..=2));
        prop::collection::vec(prop::collection::vec(cell, 2), m).prop_map(|t| machine_from(2, t))
    })
}

/// Synchronous binary transducers whose states each permute the letters.
fn arb_sync_homeo(max_states: usize) -> impl Strategy<Value = Transducer> {
    (1..=max_states).prop_flat_map(|m| {
        prop::collection::vec((0..m, 0..m, any::<bool>()), m).prop_map(|rows| {
            let table = rows
                .into_iter()
                .map(|(a, b, flip)| {
                    let f = Letter::from(flip);
                    vec![(a, vec![f]), (b, vec![1 - f])]
                })
                .collect();
            machine_from(2, table)
        })
    })
}

fn arb_vmap() -> impl Strategy<Value = PrefixExchangeMap> {
    any::<u64>().prop_map(|seed| random::element(&mut StdRng::seed_from_u64(seed), 2, 4))
}

fn arb_word(max: usize) -> impl Strategy<Value = Word> {
    prop::collection::vec(0..2 as Letter, 0..=max)
}

/// The cones of `a` seen from inside the cone `[o]`.
fn residual(a: &ConeAntichain, o: &[Letter]) -> ConeAntichain {
    if a.words().iter().any(|c| o.starts_with(c)) {
        return ConeAntichain::full(a.alphabet_size());
    }
    ConeAntichain::from_cover(
        a.alphabet_size(),
        a.words().iter().filter(|c| c.starts_with(o)).map(|c| c[o.len()..].to_vec()),
    )
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn product_law(t in arb_transducer(3), u in arb_transducer(3), w in arb_word(8)) {
        let p = t.product(&u).unwrap();
        for a in t.states() {
            for b in u.states() {
                let (mid, _) = t.evaluate_prefix(a, &w).unwrap();
                let (direct, _) = u.evaluate_prefix(b, &mid).unwrap();
                let (via, _) = p.evaluate_prefix(a * u.num_states() + b, &w).unwrap();
                prop_assert_eq!(via, direct);
            }
        }
    }

    #[test]
    fn product_is_associative(a in arb_sync_homeo(3), b in arb_sync_homeo(3), c in arb_sync_homeo(2)) {
        let (a, b, c) = (
            InitialTransducer::new(a, 0).unwrap(),
            InitialTransducer::new(b, 0).unwrap(),
            InitialTransducer::new(c, 0).unwrap(),
        );
        let left = a.then(&b).unwrap().then(&c).unwrap();
        let right = a.then(&b.then(&c).unwrap()).unwrap();
        prop_assert_eq!(left.canonical_key().unwrap(), right.canonical_key().unwrap());
    }

    #[test]
    fn minimize_is_idempotent_and_preserves_maps(t in arb_sync_homeo(4), v in arb_vmap()) {
        for t in [InitialTransducer::new(t, 0).unwrap(), v.to_transducer()] {
            let m = t.minimize().unwrap();
            let again = m.machine.minimize().unwrap();
            prop_assert!(again.preamble.is_empty());
            prop_assert_eq!(&again.machine, &m.machine);
            for x in EpWord::enumerate(2, 5) {
                let direct = t.apply(&x).unwrap();
                let via = m.machine.apply(&x).unwrap().prepend(&m.preamble);
                prop_assert_eq!(direct, via);
            }
        }
    }

    #[test]
    fn inverse_round_trip(v in arb_vmap(), t in arb_sync_homeo(3)) {
        for t in [v.to_transducer(), InitialTransducer::new(t, 0).unwrap()] {
            let s = invert(&t, Budget::default()).unwrap().as_initial();
            prop_assert!(verify_inverse(&t, &s).valid());
            for x in EpWord::enumerate(2, 6) {
                prop_assert_eq!(s.apply(&t.apply(&x).unwrap()).unwrap(), x.clone());
                prop_assert_eq!(t.apply(&s.apply(&x).unwrap()).unwrap(), x);
            }
        }
    }

    #[test]
    fn image_antichains_match_the_table(v in arb_vmap()) {
        let t = v.to_transducer();
        let m = &t.machine;
        // reach every state by a shortest input word, tracking the output
        let mut seen = vec![None; m.num_states()];
        let mut queue = VecDeque::from([(t.initial, Word::new(), Word::new())]);
        while let Some((q, u, o)) = queue.pop_front() {
            if seen[q].is_some() {
                continue;
            }
            seen[q] = Some((u.clone(), o.clone()));
            for x in 0..2 as Letter {
                let mut u2 = u.clone();
                u2.push(x);
                let mut o2 = o.clone();
                o2.extend_from_slice(m.output(q, x));
                queue.push_back((m.next(q, x), u2, o2));
            }
        }
        for (q, entry) in seen.iter().enumerate() {
            let (u, o) = entry.as_ref().unwrap();
            let expected = residual(&v.image_of_clopen(&ConeAntichain::cone(2, u.clone())), o);
            prop_assert_eq!(image_antichain(m, q, Budget::default()).unwrap(), expected);
        }
    }

    #[test]
    fn partial_invertibility_is_closed_under_products(a in arb_vmap(), b in arb_vmap()) {
        let (ta, tb) = (a.to_transducer().machine, b.to_transducer().machine);
        let budget = Budget::default();
        prop_assert!(is_partially_invertible(&ta, budget).unwrap().passes());
        prop_assert!(is_partially_invertible(&tb, budget).unwrap().passes());
        prop_assert!(is_partially_invertible(&ta.product(&tb).unwrap(), budget).unwrap().passes());
    }

    #[test]
    fn completions_are_bijections(seed in any::<u64>()) {
        let budget = Budget::default();
        let v = random::small_swap(&mut StdRng::seed_from_u64(seed), 2, 3);
        let h: CompletionMap = conjugate_overgroup(&v, &corpus::parity_at("a"), 16, budget).unwrap();
        prop_assert!(h.validate(budget).unwrap().valid);
        let hi = h.invert(budget).unwrap();
        prop_assert!(hi.validate(budget).unwrap().valid);
        for x in EpWord::enumerate(2, 6) {
            prop_assert_eq!(hi.apply(&h.apply(&x).unwrap()).unwrap(), x.clone());
            prop_assert_eq!(h.apply(&hi.apply(&x).unwrap()).unwrap(), x);
        }
    }

    #[test]
    fn text_round_trip(t in arb_sync_homeo(4), u in arb_transducer(3), v in arb_vmap()) {
        let mut doc = Document::default();
        doc.insert("T", Item::Transducer(InitialTransducer::new(t, 0).unwrap())).unwrap();
        doc.insert("U", Item::Transducer(InitialTransducer::new(u, 0).unwrap())).unwrap();
        doc.insert("V", Item::VMap(v)).unwrap();
        let text = serialize(&doc);
        let back = parse(&text).unwrap();
        prop_assert_eq!(&back, &doc);
        prop_assert_eq!(serialize(&back), text);
    }
}

#[test]
fn level2_group_is_faithful() {
    let budget = Budget::default();
    let t = corpus::level2();
    let ts = automaton_group_ts(&t, 10_000, 16, budget).unwrap();
    let st = automaton_group_st(&t, 10_000, 16, budget).unwrap();
    assert_eq!(ts.order, st.order);
    let s = invert(&t, budget).unwrap().machine;
    let product = t.machine.product(&s).unwrap();
    assert_eq!(count_state_products(&product, 12, 10_000).unwrap(), ts.order);
}

#[test]
fn dot_is_deterministic() {
    for name in corpus::MACHINE_NAMES {
        let t = corpus::machine(name).unwrap();
        assert_eq!(emit_dot(&t), emit_dot(&t.clone()));
    }
    let id = emit_dot(&corpus::identity1());
    assert_eq!(id.matches("[shape=circle]").count(), 1);
    assert!(id.contains("[label=\"0|0\"]") && id.contains("[label=\"1|1\"]"));
}
