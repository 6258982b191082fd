//! Line-based text format for transducers, automata, prefix-exchange maps and
//! completions.
//!
//! ```text
//! alphabet 2
//! transducer PARITY
//!   state a b
//!   initial a
//!   trans a 0 a 0
//!   trans a 1 b 1
//!   trans b 0 a 1
//!   trans b 1 b 0
//! end
//! ```
//!
//! `automaton NAME` blocks use `trans p x q` without outputs, `vmap NAME`
//! blocks list `pair α β`, and `comp NAME over MACHINE` blocks list
//! `leaf η ρ state`. `#` starts a comment; `ε` or `-` is the empty word.

use std::fmt::Write as _;

use indexmap::IndexMap;

use crate::corpus;
use crate::error::{Error, Result};
use crate::group::completion::{CompletionMap, Leaf};
use crate::machine::{InitialTransducer, Transducer};
use crate::prefix_map::PrefixExchangeMap;
use crate::sync::Automaton;
use crate::word::{check_alphabet, fmt_word, letter_char, parse_word, Letter, Word};

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Item {
    Transducer(InitialTransducer),
    Automaton(Automaton),
    VMap(PrefixExchangeMap),
    Comp { over: String, map: CompletionMap },
}

impl Item {
    fn alphabet_size(&self) -> usize {
        match self {
            Item::Transducer(t) => t.alphabet_size(),
            Item::Automaton(a) => a.alphabet_size(),
            Item::VMap(v) => v.alphabet_size(),
            Item::Comp { map, .. } => map.machine().alphabet_size(),
        }
    }

    pub fn kind(&self) -> &'static str {
        match self {
            Item::Transducer(_) => "transducer",
            Item::Automaton(_) => "automaton",
            Item::VMap(_) => "vmap",
            Item::Comp { .. } => "comp",
        }
    }
}

/// Named items in file order.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct Document {
    pub items: IndexMap<String, Item>,
}

impl Document {
    /// The built-in corpus.
    pub fn builtin() -> Self {
        let mut items = IndexMap::new();
        for name in corpus::MACHINE_NAMES {
            items.insert(name.to_string(), Item::Transducer(corpus::machine(name).unwrap()));
        }
        items.insert("B".into(), Item::Automaton(corpus::automaton_b()));
        items.insert("C".into(), Item::Automaton(corpus::automaton_c()));
        Document { items }
    }

    pub fn get(&self, name: &str) -> Result<&Item> {
        self.items.get(name).ok_or_else(|| Error::UnknownState(format!("no item named `{name}`")))
    }

    pub fn transducer(&self, name: &str) -> Result<&InitialTransducer> {
        match self.get(name)? {
            Item::Transducer(t) => Ok(t),
            other => Err(Error::InvalidMachine(format!("`{name}` is a {}, not a transducer", other.kind()))),
        }
    }

    /// An automaton block, or the automaton of a transducer block.
    pub fn automaton(&self, name: &str) -> Result<Automaton> {
        match self.get(name)? {
            Item::Automaton(a) => Ok(a.clone()),
            Item::Transducer(t) => Ok(Automaton::of(&t.machine, t.initial)),
            other => Err(Error::InvalidMachine(format!("`{name}` is a {}, not an automaton", other.kind()))),
        }
    }

    pub fn vmap(&self, name: &str) -> Result<&PrefixExchangeMap> {
        match self.get(name)? {
            Item::VMap(v) => Ok(v),
            other => Err(Error::InvalidMachine(format!("`{name}` is a {}, not a vmap", other.kind()))),
        }
    }

    pub fn comp(&self, name: &str) -> Result<&CompletionMap> {
        match self.get(name)? {
            Item::Comp { map, .. } => Ok(map),
            other => Err(Error::InvalidMachine(format!("`{name}` is a {}, not a comp", other.kind()))),
        }
    }

    pub fn insert(&mut self, name: &str, item: Item) -> Result<()> {
        if self.items.contains_key(name) {
            return Err(Error::DuplicateName(name.to_string()));
        }
        self.items.insert(name.to_string(), item);
        Ok(())
    }
}

struct Token<'a> {
    text: &'a str,
    col: usize,
}

fn tokenize(line: &str) -> Vec<Token<'_>> {
    let line = line.split('#').next().unwrap_or("");
    let mut out = Vec::new();
    let mut start = None;
    for (i, c) in line.char_indices() {
        match (c.is_whitespace(), start) {
            (true, Some(s)) => {
                out.push(Token { text: &line[s..i], col: line[..s].chars().count() + 1 });
                start = None;
            }
            (false, None) => start = Some(i),
            _ => {}
        }
    }
    if let Some(s) = start {
        out.push(Token { text: &line[s..], col: line[..s].chars().count() + 1 });
    }
    out
}

fn err(line: usize, col: usize, msg: impl Into<String>) -> Error {
    Error::Parse { line, col, msg: msg.into() }
}

/// Wraps a semantic error with a source position.
fn at(line: usize, col: usize) -> impl Fn(Error) -> Error {
    move |e| match e {
        Error::Parse { msg, .. } => err(line, col, msg),
        other => err(line, col, other.to_string()),
    }
}

struct Block<'a> {
    kind: &'a str,
    name: String,
    over: Option<(String, usize, usize)>,
    line: usize,
    body: Vec<(usize, Vec<Token<'a>>)>,
}

pub fn parse(text: &str) -> Result<Document> {
    let mut doc = Document::default();
    let mut n: Option<usize> = None;
    let mut block: Option<Block<'_>> = None;
    for (idx, raw) in text.lines().enumerate() {
        let line = idx + 1;
        let toks = tokenize(raw);
        let Some(first) = toks.first() else { continue };
        if let Some(b) = block.as_mut() {
            if first.text == "end" {
                let b = block.take().unwrap();
                let alphabet = n.ok_or_else(|| err(b.line, 1, "missing `alphabet` line"))?;
                let name = b.name.clone();
                let item = build_block(&doc, b, alphabet)?;
                doc.insert(&name, item).map_err(at(line, 1))?;
            } else {
                b.body.push((line, toks));
            }
            continue;
        }
        match first.text {
            "alphabet" => {
                let t = toks.get(1).ok_or_else(|| err(line, first.col, "expected alphabet size"))?;
                let v: usize = t.text.parse().map_err(|_| err(line, t.col, "alphabet size must be a number"))?;
                check_alphabet(v).map_err(at(line, t.col))?;
                n = Some(v);
            }
            kind @ ("transducer" | "automaton" | "vmap" | "comp") => {
                let t = toks.get(1).ok_or_else(|| err(line, first.col, format!("expected a name after `{kind}`")))?;
                let over = if kind == "comp" {
                    match (toks.get(2), toks.get(3)) {
                        (Some(o), Some(m)) if o.text == "over" => Some((m.text.to_string(), line, m.col)),
                        _ => return Err(err(line, first.col, "expected `comp NAME over MACHINE`")),
                    }
                } else {
                    None
                };
                block = Some(Block { kind, name: t.text.to_string(), over, line, body: Vec::new() });
            }
            other => return Err(err(line, first.col, format!("unexpected `{other}`"))),
        }
    }
    if let Some(b) = block {
        return Err(err(b.line, 1, format!("block `{}` not closed with `end`", b.name)));
    }
    Ok(doc)
}

fn word_at(tok: &Token<'_>, line: usize, n: usize) -> Result<Word> {
    parse_word(tok.text, n).map_err(at(line, tok.col))
}

fn letter_at(tok: &Token<'_>, line: usize, n: usize) -> Result<Letter> {
    let w = word_at(tok, line, n)?;
    match w.as_slice() {
        [x] => Ok(*x),
        _ => Err(err(line, tok.col, format!("expected a single letter, got `{}`", tok.text))),
    }
}

fn expect_len(toks: &[Token<'_>], line: usize, len: usize, usage: &str) -> Result<()> {
    if toks.len() != len {
        let col = toks.get(len.min(toks.len()).saturating_sub(1)).map_or(1, |t| t.col);
        return Err(err(line, col, format!("expected `{usage}`")));
    }
    Ok(())
}

/// State names, initial state and transitions shared by machines and automata.
struct StateTable {
    names: Vec<String>,
    initial: usize,
    trans: Vec<Vec<Option<(usize, Word)>>>,
}

fn state_table(b: &Block<'_>, n: usize, with_output: bool) -> Result<StateTable> {
    let mut names: Vec<String> = Vec::new();
    let mut initial_tok: Option<(String, usize, usize)> = None;
    let mut raw_trans = Vec::new();
    for (line, toks) in &b.body {
        let line = *line;
        match toks[0].text {
            "state" => {
                for t in &toks[1..] {
                    if names.iter().any(|s| s == t.text) {
                        return Err(err(line, t.col, format!("duplicate state `{}`", t.text)));
                    }
                    names.push(t.text.to_string());
                }
            }
            "initial" => {
                expect_len(toks, line, 2, "initial STATE")?;
                initial_tok = Some((toks[1].text.to_string(), line, toks[1].col));
            }
            "trans" => {
                let usage = if with_output { "trans STATE LETTER TARGET OUTPUT" } else { "trans STATE LETTER TARGET" };
                expect_len(toks, line, if with_output { 5 } else { 4 }, usage)?;
                raw_trans.push((line, toks));
            }
            other => return Err(err(line, toks[0].col, format!("unexpected `{other}` in {} block", b.kind))),
        }
    }
    if names.is_empty() {
        return Err(err(b.line, 1, format!("{} `{}` declares no states", b.kind, b.name)));
    }
    let lookup = |name: &str, line: usize, col: usize| {
        names.iter().position(|s| s == name).ok_or_else(|| err(line, col, format!("unknown state `{name}`")))
    };
    let mut trans = vec![vec![None; n]; names.len()];
    for (line, toks) in raw_trans {
        let from = lookup(toks[1].text, line, toks[1].col)?;
        let x = letter_at(&toks[2], line, n)?;
        let to = lookup(toks[3].text, line, toks[3].col)?;
        let out = if with_output { word_at(&toks[4], line, n)? } else { Vec::new() };
        if trans[from][x as usize].replace((to, out)).is_some() {
            return Err(err(line, toks[0].col, format!("duplicate transition for `{}` on {}", toks[1].text, x)));
        }
    }
    for (q, row) in trans.iter().enumerate() {
        if let Some(x) = row.iter().position(Option::is_none) {
            return Err(err(b.line, 1, format!("state `{}` has no transition on {}", names[q], x)));
        }
    }
    let initial = match initial_tok {
        Some((s, line, col)) => lookup(&s, line, col)?,
        None => 0,
    };
    Ok(StateTable { names, initial, trans })
}

fn build_block(doc: &Document, b: Block<'_>, n: usize) -> Result<Item> {
    let here = at(b.line, 1);
    match b.kind {
        "transducer" => {
            let st = state_table(&b, n, true)?;
            let rows = st.trans.into_iter().map(|r| r.into_iter().map(Option::unwrap).collect()).collect();
            let m = Transducer::new(n, st.names, rows).map_err(&here)?;
            Ok(Item::Transducer(InitialTransducer::new(m, st.initial).map_err(&here)?))
        }
        "automaton" => {
            let st = state_table(&b, n, false)?;
            let rows = st.trans.into_iter().map(|r| r.into_iter().map(|t| t.unwrap().0).collect()).collect();
            Ok(Item::Automaton(Automaton::new(n, st.names, rows, st.initial).map_err(&here)?))
        }
        "vmap" => {
            let mut pairs = Vec::new();
            for (line, toks) in &b.body {
                if toks[0].text != "pair" {
                    return Err(err(*line, toks[0].col, format!("unexpected `{}` in vmap block", toks[0].text)));
                }
                expect_len(toks, *line, 3, "pair DOMAIN RANGE")?;
                pairs.push((word_at(&toks[1], *line, n)?, word_at(&toks[2], *line, n)?));
            }
            Ok(Item::VMap(PrefixExchangeMap::new(n, pairs).map_err(&here)?))
        }
        "comp" => {
            let (over, oline, ocol) = b.over.clone().unwrap();
            let machine = match doc.items.get(&over) {
                Some(Item::Transducer(t)) => t.machine.clone(),
                _ => match corpus::machine(&over) {
                    Some(t) => t.machine,
                    None => return Err(err(oline, ocol, format!("unknown machine `{over}`"))),
                },
            };
            if machine.alphabet_size() != n {
                return Err(err(oline, ocol, "machine alphabet differs from block alphabet"));
            }
            let mut leaves = Vec::new();
            for (line, toks) in &b.body {
                if toks[0].text != "leaf" {
                    return Err(err(*line, toks[0].col, format!("unexpected `{}` in comp block", toks[0].text)));
                }
                expect_len(toks, *line, 4, "leaf DOMAIN PREFIX STATE")?;
                let state = machine.state(toks[3].text).map_err(at(*line, toks[3].col))?;
                leaves.push(Leaf { eta: word_at(&toks[1], *line, n)?, rho: word_at(&toks[2], *line, n)?, state });
            }
            Ok(Item::Comp { over, map: CompletionMap::new(machine, leaves).map_err(&here)? })
        }
        _ => unreachable!("block kinds are filtered by the parser"),
    }
}

fn write_machine(out: &mut String, kind: &str, name: &str, names: &[String], initial: usize, rows: Vec<Vec<String>>) {
    writeln!(out, "{kind} {name}").unwrap();
    writeln!(out, "  state {}", names.join(" ")).unwrap();
    writeln!(out, "  initial {}", names[initial]).unwrap();
    for (q, row) in rows.into_iter().enumerate() {
        for (x, rest) in row.into_iter().enumerate() {
            writeln!(out, "  trans {} {} {}", names[q], letter_char(x as Letter), rest).unwrap();
        }
    }
    writeln!(out, "end").unwrap();
}

/// Canonical text for a document; `parse` inverts it.
pub fn serialize(doc: &Document) -> String {
    let mut out = String::new();
    let mut current = None;
    for (name, item) in &doc.items {
        let n = item.alphabet_size();
        if current != Some(n) {
            if current.is_some() {
                out.push('\n');
            }
            writeln!(out, "alphabet {n}").unwrap();
            current = Some(n);
        }
        match item {
            Item::Transducer(t) => {
                let m = &t.machine;
                let rows = m
                    .states()
                    .map(|q| {
                        (0..n as Letter)
                            .map(|x| format!("{} {}", m.name(m.next(q, x)), fmt_word(m.output(q, x))))
                            .collect()
                    })
                    .collect();
                write_machine(&mut out, "transducer", name, m.names(), t.initial, rows);
            }
            Item::Automaton(a) => {
                let rows = (0..a.num_states())
                    .map(|q| (0..n as Letter).map(|x| a.name(a.next(q, x)).to_string()).collect())
                    .collect();
                write_machine(&mut out, "automaton", name, a.names(), a.initial, rows);
            }
            Item::VMap(v) => {
                writeln!(out, "vmap {name}").unwrap();
                for (a, b) in v.pairs() {
                    writeln!(out, "  pair {} {}", fmt_word(a), fmt_word(b)).unwrap();
                }
                writeln!(out, "end").unwrap();
            }
            Item::Comp { over, map } => {
                writeln!(out, "comp {name} over {over}").unwrap();
                for l in map.leaves() {
                    writeln!(
                        out,
                        "  leaf {} {} {}",
                        fmt_word(&l.eta),
                        fmt_word(&l.rho),
                        map.machine().name(l.state)
                    )
                    .unwrap();
                }
                writeln!(out, "end").unwrap();
            }
        }
    }
    out
}

/// Text for a single transducer.
pub fn serialize_transducer(name: &str, t: &InitialTransducer) -> String {
    let mut doc = Document::default();
    doc.items.insert(name.to_string(), Item::Transducer(t.clone()));
    serialize(&doc)
}

#[cfg(test)]
mod tests {
    use super::*;

    const PARITY_TEXT: &str = "alphabet 2
transducer PARITY
  state a b
  initial a
  trans a 0 a 0
  trans a 1 b 1
  trans b 0 a 1
  trans b 1 b 0
end
";

    #[test]
    fn parses_parity() {
        let doc = parse(PARITY_TEXT).unwrap();
        let t = doc.transducer("PARITY").unwrap();
        assert_eq!(t.machine.num_states(), 2);
        assert_eq!(t, &corpus::parity_at("a"));
        assert_eq!(serialize(&doc), PARITY_TEXT);
    }

    #[test]
    fn letter_out_of_range() {
        let text = PARITY_TEXT.replace("trans a 1 b 1", "trans a 2 a 0");
        match parse(&text) {
            Err(Error::Parse { line, col, msg }) => {
                assert_eq!((line, col), (6, 11));
                assert!(msg.contains("out of range"), "{msg}");
            }
            other => panic!("{other:?}"),
        }
    }

    #[test]
    fn comparable_vmap_rejected() {
        let text = "alphabet 2\nvmap V\n  pair 0 0\n  pair 01 1\nend\n";
        match parse(text) {
            Err(Error::Parse { msg, .. }) => assert!(msg.contains("prefix-comparable"), "{msg}"),
            other => panic!("{other:?}"),
        }
    }

    #[test]
    fn diagnostics() {
        assert!(matches!(parse("transducer T\nend\n"), Err(Error::Parse { line: 1, .. })));
        assert!(matches!(
            parse("alphabet 2\ntransducer T\n  state a\n  trans a 0 z 0\n  trans a 1 a 1\nend\n"),
            Err(Error::Parse { line: 4, col: 13, .. })
        ));
        assert!(matches!(
            parse("alphabet 2\ntransducer T\n  state a\n  trans a 0 a 0\nend\n"),
            Err(Error::Parse { .. })
        ));
        let dup = format!("{PARITY_TEXT}{}", PARITY_TEXT.replace("alphabet 2\n", ""));
        assert!(matches!(parse(&dup), Err(Error::Parse { .. })));
        assert!(matches!(parse("alphabet 2\nbogus\n"), Err(Error::Parse { line: 2, col: 1, .. })));
    }

    #[test]
    fn round_trip_all_kinds() {
        let text = "# corpus
alphabet 2
transducer XB
  state p0 p1 id
  initial p0
  trans p0 0 id 00
  trans p0 1 p1 -   # empty output
  trans p1 0 id 01
  trans p1 1 id 1
  trans id 0 id 0
  trans id 1 id 1
end
automaton C
  state a b
  trans a 0 b
  trans a 1 b
  trans b 0 a
  trans b 1 a
end
vmap V
  pair 0 00
  pair 10 01
  pair 11 1
end
comp H over XB
  leaf 0 ε p1
  leaf 1 00 id
end

alphabet 3
vmap W
  pair 0 1
  pair 1 0
  pair 2 2
end
";
        let doc = parse(text).unwrap();
        assert_eq!(doc.items.len(), 5);
        let canon = serialize(&doc);
        assert_eq!(parse(&canon).unwrap(), doc);
        assert_eq!(serialize(&parse(&canon).unwrap()), canon);
        assert!(canon.contains("trans p0 1 p1 ε"));
    }

    #[test]
    fn builtin_round_trip() {
        let doc = Document::builtin();
        assert_eq!(parse(&serialize(&doc)).unwrap(), doc);
    }
}
