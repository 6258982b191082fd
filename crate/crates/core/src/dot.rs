//! Graphviz export.

use std::fmt::Write as _;

use crate::machine::InitialTransducer;
use crate::word::{fmt_word, letter_char, Letter};

fn quote(s: &str) -> String {
    format!("\"{}\"", s.replace('\\', "\\\\").replace('"', "\\\""))
}

/// A `digraph` with one edge per transition labelled `x|output`. The initial
/// state is marked by an edge from an invisible point node.
pub fn emit_dot(t: &InitialTransducer) -> String {
    let m = &t.machine;
    let mut out = String::from("digraph T {\n  rankdir=LR;\n  __start [shape=point];\n");
    for q in m.states() {
        writeln!(out, "  {} [shape=circle];", quote(m.name(q))).unwrap();
    }
    writeln!(out, "  __start -> {};", quote(m.name(t.initial))).unwrap();
    for q in m.states() {
        for x in 0..m.alphabet_size() as Letter {
            let label = format!("{}|{}", letter_char(x), fmt_word(m.output(q, x)));
            writeln!(out, "  {} -> {} [label={}];", quote(m.name(q)), quote(m.name(m.next(q, x))), quote(&label))
                .unwrap();
        }
    }
    out.push_str("}\n");
    out
}
