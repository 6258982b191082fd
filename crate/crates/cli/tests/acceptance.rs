//! Acceptance suite: one PASS/FAIL line per criterion. Every comparison is
//! exact; pointwise checks use all eventually periodic words with preperiod
//! plus period at most `POINT_DEPTH`.

use std::collections::BTreeSet;
use std::path::PathBuf;
use std::process::{Command, ExitCode};

use rand::rngs::StdRng;
use rand::{Rng, SeedableRng};

use tx_core::corpus;
use tx_core::group::completion::{CompletionMap, Leaf};
use tx_core::group::conjugation::{conjugate_machine, conjugate_overgroup, conjugate_subgroup};
use tx_core::group::contracting::{contracting_check, ContractingVerdict};
use tx_core::image::is_partially_invertible;
use tx_core::inversion::{invert, partial_inverse, verify_inverse};
use tx_core::machine::CanonicalKey;
use tx_core::map::CantorMap;
use tx_core::prefix_map::random;
use tx_core::sync::{
    classify_synchronicity, collapse, level_via_inverse_products, synchronizing_level, Automaton, PrefixRelation,
    Synchronicity,
};
use tx_core::word::{comparable, parse_word, words_of_len, words_up_to};
use tx_core::{Budget, EpWord, Error, InitialTransducer, Letter, PrefixExchangeMap, Transducer, Word};

const POINT_DEPTH: usize = 10;
const KMAX: usize = 16;

type Verdict = Result<String, String>;
type Criterion = (&'static str, fn() -> Verdict);

fn ensure(cond: bool, msg: impl FnOnce() -> String) -> Result<(), String> {
    if cond {
        Ok(())
    } else {
        Err(msg())
    }
}

fn ok<T>(r: tx_core::Result<T>) -> Result<T, String> {
    r.map_err(|e| e.to_string())
}

fn w(s: &str) -> Word {
    parse_word(s, 2).unwrap()
}

fn budget() -> Budget {
    Budget::default()
}

/// Runs the `tx` binary; returns stdout and the exit code.
fn tx(args: &[&str]) -> (String, i32) {
    let out = Command::new(env!("CARGO_BIN_EXE_tx")).args(args).output().expect("run tx");
    (String::from_utf8_lossy(&out.stdout).into_owned(), out.status.code().unwrap_or(-1))
}

fn temp_file(name: &str, text: &str) -> PathBuf {
    let path = std::env::temp_dir().join(format!("tx-acceptance-{}-{name}", std::process::id()));
    std::fs::write(&path, text).unwrap();
    path
}

fn parity() -> InitialTransducer {
    corpus::parity_at("a")
}

fn parity_inverse() -> InitialTransducer {
    invert(&parity(), budget()).unwrap().as_initial()
}

fn ones(u: &[Letter]) -> usize {
    u.iter().filter(|&&x| x == 1).count() % 2
}

fn complement_map() -> InitialTransducer {
    let m = Transducer::new(2, vec!["c".into()], vec![vec![(0, vec![1]), (0, vec![0])]]).unwrap();
    InitialTransducer::new(m, 0).unwrap()
}

fn flip(u: &[Letter]) -> Word {
    u.iter().map(|&x| 1 - x).collect()
}

fn points() -> Vec<EpWord> {
    EpWord::enumerate(2, POINT_DEPTH)
}

fn criterion_1() -> Verdict {
    let (out, code) = tx(&["sync-level", "builtin", "PARITY"]);
    ensure(code == 0 && out.trim() == "level 1", || format!("sync-level printed {out:?}"))?;
    ensure(synchronizing_level(&parity().machine, KMAX) == Some(1), || "library level".into())?;
    let (out, _) = tx(&["classify", "builtin", "PARITY"]);
    ensure(out.trim() == "one_way", || format!("classify printed {out:?}"))?;
    let s = parity_inverse();
    let m = &s.machine;
    ensure(m.num_states() == 2, || format!("inverse has {} states", m.num_states()))?;
    for q in m.states() {
        ensure(m.next(q, 0) == q && m.next(q, 1) != q, || format!("inverse transitions at {}", m.name(q)))?;
    }
    let rel = collapse(&Automaton::of(m, s.initial));
    let words: Vec<Word> = words_up_to(2, 10).into_iter().filter(|u| !u.is_empty()).collect();
    let classes: Vec<usize> = words.iter().map(|u| rel.classify(u).unwrap()).collect();
    let even = classes[words.iter().position(|u| ones(u) == 0).unwrap()];
    for (u, c) in words.iter().zip(&classes) {
        ensure((*c == even) == (ones(u) == 0), || format!("word {u:?} classified {c}"))?;
    }
    let (out, code) = tx(&["relation", "builtin", "PARITY", "--inverse", "1", "0100", "111"]);
    ensure(code == 0 && out.ends_with("related yes\n"), || format!("relation printed {out:?}"))?;
    let (_, code) = tx(&["relation", "builtin", "PARITY", "--inverse", "1", "11"]);
    ensure(code == 1, || "odd and even words related".into())?;
    Ok(format!("level 1, one_way, 2-state inverse, {} words classified by parity", words.len()))
}

fn criterion_2() -> Verdict {
    let ts = ok(parity().machine.product(&parity_inverse().machine))?;
    ensure(ts.num_states() == 4, || format!("TS has {} states", ts.num_states()))?;
    let at = |name: &str| InitialTransducer::at(&ts, name).unwrap();
    for name in ["a·a⁻¹", "b·b⁻¹"] {
        ensure(ok(at(name).minimize())?.is_identity(), || format!("{name} not the identity"))?;
    }
    let (ab, ba) = (at("a·b⁻¹"), at("b·a⁻¹"));
    ensure(ok(ab.omega_equal(&ba))?, || "a·b⁻¹ ≠ b·a⁻¹".into())?;
    for x in points() {
        let expected = EpWord::new(flip(x.preperiod()), flip(x.period())).unwrap();
        ensure(ok(ab.apply(&x))? == expected, || format!("a·b⁻¹ at {x}"))?;
    }
    ensure(ok(ba.omega_equal(&complement_map()))?, || "b·a⁻¹ is not the complement".into())?;
    let (out, code) = tx(&["group-ts", "builtin", "PARITY"]);
    ensure(code == 0 && out.lines().any(|l| l == "order 2"), || format!("group-ts printed {out:?}"))?;
    Ok("TS has 4 states; G(TS) has order 2".into())
}

fn criterion_3() -> Verdict {
    let mut rng = StdRng::seed_from_u64(2024);
    let mut machines = vec![parity(), corpus::xb()];
    machines.extend((0..25).map(|_| random::element(&mut rng, 2, 4).to_transducer()));
    let pts = points();
    for (i, t) in machines.iter().enumerate() {
        let s = ok(invert(t, budget()))?.as_initial();
        ensure(verify_inverse(t, &s).valid(), || format!("machine {i}: certificate"))?;
        for x in &pts {
            ensure(ok(s.apply(&ok(t.apply(x))?))? == *x, || format!("machine {i}: S(T({x}))"))?;
            ensure(ok(t.apply(&ok(s.apply(x))?))? == *x, || format!("machine {i}: T(S({x}))"))?;
        }
    }
    Ok(format!("{} machines, {} points each", machines.len(), pts.len()))
}

/// Products of small swaps between words with the same parity of ones.
fn parity_preserving(rng: &mut StdRng) -> PrefixExchangeMap {
    let mut v = PrefixExchangeMap::identity(2);
    for _ in 0..rng.gen_range(1..=3) {
        loop {
            let a = random::word(rng, 2, 1, 4);
            let b = random::word(rng, 2, 1, 4);
            if ones(&a) == ones(&b) && !comparable(&a, &b) {
                v = v.compose(&PrefixExchangeMap::small_swap(2, &a, &b).unwrap()).unwrap();
                break;
            }
        }
    }
    v
}

fn criterion_4() -> Verdict {
    let t = parity();
    let s = parity_inverse();
    let rel = collapse(&Automaton::of(&s.machine, s.initial));
    let swap = ok(PrefixExchangeMap::small_swap(2, &w("0"), &w("1")))?;
    let hand = ok(PrefixExchangeMap::new(
        2,
        vec![(w("00"), w("11")), (w("01"), w("10")), (w("10"), w("01")), (w("11"), w("00"))],
    ))?;
    let got = ok(conjugate_subgroup(&swap, &t, KMAX, budget()))?;
    ensure(got == hand, || format!("(0,1)^T = {got}"))?;
    let mut rng = StdRng::seed_from_u64(4);
    let sample = EpWord::enumerate(2, 6);
    for _ in 0..100 {
        let v = random::small_swap(&mut rng, 2, 4);
        let c = ok(conjugate_subgroup(&v, &t, KMAX, budget()))?;
        ensure(ok(c.preserves_relation(&rel))?.member, || format!("{c} rejected"))?;
        ensure(c.pairs().iter().all(|(a, b)| ones(a) == ones(b)), || format!("{c} moves parity"))?;
        for x in &sample {
            let direct = ok(t.apply(&ok(v.apply(&ok(s.apply(x))?))?))?;
            ensure(ok(c.apply(x))? == direct, || format!("{v}^T at {x}"))?;
        }
    }
    for _ in 0..50 {
        let v = parity_preserving(&mut rng);
        let c = ok(conjugate_machine(&v, &t, &s))?;
        ensure(PrefixExchangeMap::from_transducer(&c, KMAX).is_some(), || format!("{v}^(T⁻¹) not in V_2"))?;
    }
    Ok("hand instance matches; 100 swap conjugates and 50 inverse conjugates in V_2".into())
}

fn criterion_5() -> Verdict {
    let t = parity();
    let s = parity_inverse();
    let pts = points();
    let swap = ok(PrefixExchangeMap::small_swap(2, &w("0"), &w("1")))?;
    let h = ok(conjugate_overgroup(&swap, &t, KMAX, budget()))?;
    for x in &pts {
        let rest = x.drop(1);
        let expected = EpWord::new(flip(rest.preperiod()), flip(rest.period())).unwrap().prepend(&[1 - x.letter(0)]);
        ensure(ok(h.apply(x))? == expected, || format!("(0,1)^(T⁻¹) at {x}"))?;
    }
    let mut rng = StdRng::seed_from_u64(5);
    let mut outside = 0;
    for _ in 0..50 {
        let v = random::small_swap(&mut rng, 2, 3);
        let h = ok(conjugate_overgroup(&v, &t, KMAX, budget()))?;
        for x in &pts {
            let direct = ok(s.apply(&ok(v.apply(&ok(t.apply(x))?))?))?;
            ensure(ok(h.apply(x))? == direct, || format!("{v}: completion at {x}"))?;
        }
        outside += usize::from(PrefixExchangeMap::from_transducer(&ok(h.to_transducer())?, KMAX).is_none());
    }
    ensure(outside > 0, || "no conjugate outside V_2".into())?;
    Ok(format!("50 completions agree with T∘v∘S; {outside} outside V_2"))
}

/// Least `k` such that every length-`k` word leads all states to one state.
fn brute_level(m: &Transducer, kmax: usize) -> Option<usize> {
    (0..=kmax.min(8)).find(|&k| {
        words_of_len(m.alphabet_size(), k).iter().all(|u| {
            let ends: BTreeSet<usize> = m.states().map(|q| m.evaluate_prefix(q, u).unwrap().1).collect();
            ends.len() == 1
        })
    })
}

fn criterion_6() -> Verdict {
    let mut report = Vec::new();
    for (name, t) in [("PARITY", parity()), ("LEVEL2", corpus::level2()), ("NONSYNC", corpus::nonsync())] {
        let m = &t.machine;
        let s = invert(&InitialTransducer::new(m.clone(), 0).unwrap(), budget()).unwrap().as_initial();
        let all_in_v = m.states().all(|q| {
            let prod = s.then(&InitialTransducer::new(m.clone(), q).unwrap()).unwrap();
            PrefixExchangeMap::from_transducer(&prod, KMAX).is_some()
        });
        let level = synchronizing_level(m, KMAX);
        ensure(level.is_some() == all_in_v, || format!("{name}: synchronizing ⇎ products in V"))?;
        ensure(level == brute_level(m, KMAX), || format!("{name}: collapse count vs brute force"))?;
        let via = ok(level_via_inverse_products(m, KMAX))?;
        ensure(via == level, || format!("{name}: product depth {via:?} vs collapse {level:?}"))?;
        report.push(format!("{name}={}", level.map_or("none".into(), |k| k.to_string())));
    }
    ensure(report[..2] == ["PARITY=1".to_string(), "LEVEL2=2".to_string()], || report.join(" "))?;
    Ok(report.join(" "))
}

fn criterion_7() -> Verdict {
    let t = parity().machine;
    let s = parity_inverse().machine;
    let mut total = 0;
    for (name, m) in [("TS", ok(t.product(&s))?), ("ST", ok(s.product(&t))?)] {
        match ok(contracting_check(&m, 3, 4, budget()))? {
            ContractingVerdict::ContractingToDepth { len: 3, depth: 4, products } => total += products,
            other => return Err(format!("{name}: {other:?}")),
        }
    }
    Ok(format!("{total} products, 0 counterexamples"))
}

fn keys(m: &Transducer) -> BTreeSet<CanonicalKey> {
    m.states().map(|q| InitialTransducer::new(m.clone(), q).unwrap().canonical_key().unwrap()).collect()
}

fn after(m: &Transducer, q: usize, depth: usize) -> BTreeSet<usize> {
    words_of_len(m.alphabet_size(), depth).iter().map(|u| m.evaluate_prefix(q, u).unwrap().1).collect()
}

fn criterion_8() -> Verdict {
    let t = parity().machine;
    let s = parity_inverse().machine;
    let pinv = ok(partial_inverse(&t, budget()))?.machine;
    let inv_keys = keys(&s);
    for q in pinv.states() {
        let k = ok(InitialTransducer::new(pinv.clone(), q).unwrap().canonical_key())?;
        ensure(inv_keys.contains(&k), || format!("partial inverse state {} is new", pinv.name(q)))?;
    }
    let ts = ok(t.product(&s))?;
    let ts_keys = keys(&ts);
    let pts = ok(partial_inverse(&ts, budget()))?.machine;
    for q in pts.states() {
        for r in after(&pts, q, 2) {
            let k = ok(InitialTransducer::new(pts.clone(), r).unwrap().canonical_key())?;
            ensure(ts_keys.contains(&k), || format!("{} reaches a non-TS map", pts.name(q)))?;
        }
    }
    let state = |n: &str| ts.state(n).unwrap();
    let mut maps = vec![ok(CompletionMap::new(
        ts.clone(),
        vec![
            Leaf { eta: w("0"), rho: w("1"), state: state("a·b⁻¹") },
            Leaf { eta: w("1"), rho: w("0"), state: state("b·a⁻¹") },
        ],
    ))?];
    let mut rng = StdRng::seed_from_u64(8);
    for _ in 0..5 {
        let v = random::small_swap(&mut rng, 2, 3);
        maps.push(ok(conjugate_overgroup(&v, &parity(), KMAX, budget()))?);
    }
    let pts_eval = points();
    for h in &maps {
        let hi = ok(h.invert(budget()))?;
        for x in &pts_eval {
            ensure(ok(hi.apply(&ok(h.apply(x))?))? == *x, || format!("{h}: inverse fails at {x}"))?;
        }
    }
    Ok(format!("PARITY' {} states, (TS)' {} states, {} completions inverted", pinv.num_states(), pts.num_states(), maps.len()))
}

fn spread(u: &[Letter]) -> Word {
    u.iter().flat_map(|&d| [d / 2, d % 2]).collect()
}

fn criterion_9() -> Verdict {
    let b = collapse(&corpus::automaton_b());
    let c = collapse(&corpus::automaton_c());
    let zeros = |u: &[Letter]| !u.is_empty() && u.iter().all(|&x| x == 0);
    let mut rng = StdRng::seed_from_u64(9);
    let (mut rejected_b, mut rejected_c) = (0, 0);
    for _ in 0..300 {
        let v = random::element(&mut rng, 2, 4);
        let moves = v.pairs().iter().any(|(x, y)| zeros(x) != zeros(y));
        let mixes = v.pairs().iter().any(|(x, y)| x.len() % 2 != y.len() % 2);
        let in_b = ok(v.preserves_relation(&b))?.member;
        let in_c = ok(v.preserves_relation(&c))?.member;
        ensure(!(moves && in_b), || format!("B accepts {v}"))?;
        ensure(!(mixes && in_c), || format!("C accepts {v}"))?;
        ensure(in_b || moves, || format!("B rejects {v}"))?;
        ensure(in_c || mixes, || format!("C rejects {v}"))?;
        rejected_b += usize::from(!in_b);
        rejected_c += usize::from(!in_c);
    }
    // generators of V_4 on two-letter blocks: small swaps of base-4 words
    let mut accepted = 0;
    for a in words_up_to(4, 2).into_iter().filter(|u| !u.is_empty()) {
        for b4 in words_up_to(4, 2).into_iter().filter(|u| !u.is_empty()) {
            if comparable(&a, &b4) {
                continue;
            }
            let g = ok(PrefixExchangeMap::small_swap(4, &a, &b4))?;
            let pairs = g.pairs().iter().map(|(x, y)| (spread(x), spread(y))).collect();
            let v = ok(PrefixExchangeMap::new(2, pairs))?;
            ensure(ok(v.preserves_relation(&c))?.member, || format!("C rejects block map {v}"))?;
            accepted += 1;
        }
    }
    let file = temp_file(
        "member.tx",
        "alphabet 2\nvmap GOOD\n  pair 00 01\n  pair 01 00\n  pair 1 1\nend\nvmap BAD\n  pair 0 10\n  pair 10 0\n  pair 11 11\nend\n",
    );
    let f = file.to_str().unwrap();
    let (good, code_good) = tx(&["member", f, "C", "GOOD"]);
    let (_, code_bad) = tx(&["member", f, "C", "BAD"]);
    let (_, code_b) = tx(&["member", f, "B", "BAD"]);
    std::fs::remove_file(&file).ok();
    ensure(code_good == 0 && good.ends_with("member yes\n"), || format!("member GOOD printed {good:?}"))?;
    ensure(code_bad == 1 && code_b == 1, || "BAD accepted".into())?;
    Ok(format!("B rejects {rejected_b}/300, C rejects {rejected_c}/300; {accepted} level-2 block swaps accepted by C"))
}

fn criterion_10() -> Verdict {
    let report = ok(is_partially_invertible(&corpus::dbl().machine, budget()))?;
    ensure(matches!(report.budget_failure(), Some(Error::BudgetExceeded(_))), || format!("{report:?}"))?;
    let (_, code) = tx(&["validate", "builtin", "DBL"]);
    ensure(code == 3, || format!("validate DBL exited {code}"))?;
    let class = ok(classify_synchronicity(&corpus::nonsync(), KMAX, budget()))?;
    ensure(class == Synchronicity::NotSynchronizing, || format!("NONSYNC is {class}"))?;
    let (out, code) = tx(&["classify", "builtin", "NONSYNC"]);
    ensure(code == 1 && out.trim() == "not_synchronizing", || format!("classify printed {out:?}"))?;
    let file = temp_file("conj.tx", "alphabet 2\nvmap SWAP\n  pair 0 1\n  pair 1 0\nend\n");
    let f = file.to_str().unwrap();
    let (_, refused) = tx(&["conj", f, "NONSYNC", "SWAP"]);
    let (_, refused_inv) = tx(&["conj", f, "NONSYNC", "SWAP", "--inverse"]);
    let (_, accepted) = tx(&["conj", f, "PARITY", "SWAP"]);
    std::fs::remove_file(&file).ok();
    ensure(refused == 1 && refused_inv == 1, || format!("conj exited {refused}/{refused_inv}"))?;
    ensure(accepted == 0, || "conj by PARITY failed".into())?;
    Ok("DBL exceeds the budget (exit 3); NONSYNC not synchronizing, conj exits 1".into())
}

fn main() -> ExitCode {
    let criteria: [Criterion; 10] = [
        ("parity example", criterion_1),
        ("TS products and G(TS)", criterion_2),
        ("inversion soundness", criterion_3),
        ("subgroup conjugates", criterion_4),
        ("overgroup conjugates", criterion_5),
        ("synchronizing level cross-check", criterion_6),
        ("contracting products", criterion_7),
        ("partial inverses", criterion_8),
        ("relation membership", criterion_9),
        ("negative controls", criterion_10),
    ];
    let mut failed = 0;
    for (i, (name, check)) in criteria.iter().enumerate() {
        match check() {
            Ok(detail) => println!("PASS criterion {}: {name}: {detail}", i + 1),
            Err(detail) => {
                failed += 1;
                println!("FAIL criterion {}: {name}: {detail}", i + 1);
            }
        }
    }
    let (out, code) = tx(&["paper-check"]);
    let lines = out.lines().filter(|l| l.starts_with("PASS")).count();
    if code != 0 || lines != 10 {
        failed += 1;
        println!("FAIL paper-check command: exit {code}\n{out}");
    }
    println!("{} of {} criteria passed", criteria.len() - failed.min(criteria.len()), criteria.len());
    if failed == 0 {
        ExitCode::SUCCESS
    } else {
        ExitCode::FAILURE
    }
}
