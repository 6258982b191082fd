//! Built-in reference machines.

use crate::machine::{InitialTransducer, Transducer};
use crate::sync::Automaton;
use crate::word::Word;

fn build(names: &[&str], rows: &[&[(usize, &[u8])]]) -> Transducer {
    let rows = rows
        .iter()
        .map(|r| r.iter().map(|&(t, w)| (t, w.to_vec() as Word)).collect())
        .collect();
    Transducer::new(2, names.iter().map(|s| s.to_string()).collect(), rows).expect("corpus machine")
}

/// Two states tracking the parity of ones read so far; at odd parity every
/// letter is flipped. Synchronizing at level 1, inverse not synchronizing.
pub fn parity() -> Transducer {
    build(&["a", "b"], &[&[(0, &[0]), (1, &[1])], &[(0, &[1]), (1, &[0])]])
}

pub fn parity_at(state: &str) -> InitialTransducer {
    InitialTransducer::at(&parity(), state).expect("corpus state")
}

/// The asynchronous element `0→00, 10→01, 11→1` of `V_2`, active at `p0`.
pub fn xb() -> InitialTransducer {
    let m = build(
        &["p0", "p1", "id"],
        &[&[(2, &[0, 0]), (1, &[])], &[(2, &[0, 1]), (2, &[1])], &[(2, &[0]), (2, &[1])]],
    );
    InitialTransducer::new(m, 0).unwrap()
}

/// Doubles every 0. Injective, but the image is not clopen.
pub fn dbl() -> InitialTransducer {
    InitialTransducer::new(build(&["d"], &[&[(0, &[0, 0]), (0, &[1])]]), 0).unwrap()
}

pub fn identity1() -> InitialTransducer {
    InitialTransducer::identity(2)
}

/// Synchronous, minimal, synchronizing at level 2, inverse not synchronizing:
/// `0` always leads to `A`, `1` leads `A→B`, `B→C`, `C→C`; `B` flips letters.
pub fn level2() -> InitialTransducer {
    let m = build(
        &["A", "B", "C"],
        &[&[(0, &[0]), (1, &[1])], &[(0, &[1]), (2, &[0])], &[(0, &[0]), (2, &[1])]],
    );
    InitialTransducer::new(m, 0).unwrap()
}

/// A homeomorphism whose own automaton is not synchronizing (its inverse is).
pub fn nonsync() -> InitialTransducer {
    InitialTransducer::new(build(&["a", "b"], &[&[(0, &[0]), (1, &[1])], &[(1, &[1]), (0, &[0])]]), 0)
        .unwrap()
}

/// `π(0,a)=a`, otherwise `b`: relates exactly the words in `0*` to each other.
pub fn automaton_b() -> Automaton {
    Automaton::new(2, vec!["a".into(), "b".into()], vec![vec![0, 1], vec![1, 1]], 0).unwrap()
}

/// `π(i,a)=b`, `π(i,b)=a`: relates words of equal length parity.
pub fn automaton_c() -> Automaton {
    Automaton::new(2, vec!["a".into(), "b".into()], vec![vec![1, 1], vec![0, 0]], 0).unwrap()
}

/// Built-in machine by name.
pub fn machine(name: &str) -> Option<InitialTransducer> {
    match name {
        "PARITY" => Some(parity_at("a")),
        "XB" => Some(xb()),
        "DBL" => Some(dbl()),
        "IDENTITY1" => Some(identity1()),
        "LEVEL2" => Some(level2()),
        "NONSYNC" => Some(nonsync()),
        _ => None,
    }
}

pub fn automaton(name: &str) -> Option<Automaton> {
    match name {
        "B" => Some(automaton_b()),
        "C" => Some(automaton_c()),
        _ => None,
    }
}

pub const MACHINE_NAMES: &[&str] = &["PARITY", "XB", "DBL", "IDENTITY1", "LEVEL2", "NONSYNC"];
