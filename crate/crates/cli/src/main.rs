//! `tx`: command-line driver for the transducer algebra.
//!
//! Exit codes: 0 success, 1 negative verdict, 2 input or parse error,
//! 3 budget exceeded.

use std::fmt::Write as _;
use std::process::ExitCode;

use clap::{Parser, Subcommand};

use tx_core::checks;
use tx_core::dot::emit_dot;
use tx_core::group::completion::validate_viable;
use tx_core::group::conjugation::{conjugate_overgroup, conjugate_subgroup};
use tx_core::group::contracting::{contracting_check, ContractingVerdict};
use tx_core::group::perm_group::automaton_group_ts;
use tx_core::inversion::{invert, partial_inverse, verify_inverse};
use tx_core::sync::{classify_synchronicity, collapse, core, synchronizing_level, Automaton, Synchronicity, DEFAULT_KMAX};
use tx_core::text::{parse, serialize, serialize_transducer, Document, Item};
use tx_core::word::{fmt_word, parse_word};
use tx_core::{Budget, EpWord, Error, InitialTransducer};

#[derive(Parser)]
#[command(name = "tx", version, about = "Transducers, V_n elements and their conjugates")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Accessibility, degenerate states and partial invertibility.
    Validate { file: String, machine: String },
    /// Minimal form, printed as a transducer block.
    Minimize { file: String, machine: String },
    /// Certified inverse.
    Invert { file: String, machine: String },
    /// `x ↦ ((x)M1)M2`, restricted to accessible states.
    Product { file: String, first: String, second: String },
    SyncLevel {
        file: String,
        machine: String,
        #[arg(long = "max", default_value_t = DEFAULT_KMAX)]
        max: usize,
    },
    /// bi_synchronizing, one_way or not_synchronizing.
    Classify { file: String, machine: String },
    Core { file: String, machine: String },
    /// Collapsing procedure on a transducer's automaton or an automaton block.
    Collapse { file: String, machine: String },
    /// Relation classes of words under the collapsed automaton.
    Relation {
        file: String,
        machine: String,
        words: Vec<String>,
        /// Use the automaton of the inverse machine.
        #[arg(long)]
        inverse: bool,
    },
    /// Does a prefix-exchange map preserve an automaton's relation?
    Member { file: String, automaton: String, vmap: String },
    /// `v^T`, or with `--inverse` the completion `v^(T⁻¹)`.
    Conj {
        file: String,
        machine: String,
        vmap: String,
        #[arg(long)]
        inverse: bool,
    },
    GroupTs {
        file: String,
        machine: String,
        #[arg(long, default_value_t = 100_000)]
        max_order: usize,
    },
    /// Viability of a completion.
    Viable { file: String, comp: String },
    PartialInverse { file: String, machine: String },
    Contracting {
        file: String,
        machine: String,
        #[arg(long, default_value_t = 3)]
        len: usize,
        #[arg(long, default_value_t = 4)]
        depth: usize,
    },
    /// Image of an eventually periodic word `u(v)` under a state.
    Eval { file: String, machine: String, state: String, point: String },
    Dot { file: String, machine: String },
    /// The built-in reproduction suite.
    PaperCheck,
}

/// Output and exit code of a command.
struct Outcome {
    text: String,
    code: u8,
}

impl Outcome {
    fn ok(text: String) -> Self {
        Outcome { text, code: 0 }
    }

    fn verdict(text: String, positive: bool) -> Self {
        Outcome { text, code: if positive { 0 } else { 1 } }
    }
}

fn exit_code(e: &Error) -> u8 {
    match e {
        Error::NotSynchronizing | Error::NotInjective | Error::NotSurjective => 1,
        e if e.is_budget() => 3,
        _ => 2,
    }
}

fn budget_from_env() -> Result<Budget, String> {
    let Ok(value) = std::env::var("TX_BUDGET") else { return Ok(Budget::default()) };
    let parts: Vec<&str> = value.split(',').map(str::trim).collect();
    let [configs, depth] = parts.as_slice() else {
        return Err(format!("TX_BUDGET must be <configs>,<depth>, got `{value}`"));
    };
    let num = |s: &str| s.parse::<usize>().map_err(|_| format!("TX_BUDGET: `{s}` is not a number"));
    Budget::new(num(configs)?, num(depth)?).map_err(|e| format!("TX_BUDGET: {e}"))
}

/// `builtin` names the corpus; a file also sees corpus names it does not shadow.
fn load(file: &str) -> Result<Document, Error> {
    let builtin = Document::builtin();
    if file == "builtin" {
        return Ok(builtin);
    }
    let text = std::fs::read_to_string(file)
        .map_err(|e| Error::Parse { line: 0, col: 0, msg: format!("{file}: {e}") })?;
    let mut doc = parse(&text)?;
    for (name, item) in builtin.items {
        doc.items.entry(name).or_insert(item);
    }
    Ok(doc)
}

fn yes(b: bool) -> &'static str {
    if b {
        "yes"
    } else {
        "no"
    }
}

fn block(name: &str, t: &InitialTransducer) -> String {
    serialize_transducer(name, t)
}

fn automaton_block(name: &str, a: Automaton) -> String {
    let mut doc = Document::default();
    doc.items.insert(name.to_string(), Item::Automaton(a));
    serialize(&doc)
}

fn run(cmd: Command, budget: Budget) -> Result<Outcome, Error> {
    let mut out = String::new();
    match cmd {
        Command::Validate { file, machine } => {
            let doc = load(&file)?;
            let t = doc.transducer(&machine)?;
            let r = t.validate();
            writeln!(out, "accessible {}", yes(r.accessible)).unwrap();
            writeln!(out, "unreachable {}", r.unreachable_states.join(" ")).unwrap();
            writeln!(out, "degenerate {}", r.degenerate_states.join(" ")).unwrap();
            for note in &r.notes {
                writeln!(out, "note {note}").unwrap();
            }
            if !r.passes() {
                return Ok(Outcome::verdict(out, false));
            }
            let pi = tx_core::image::is_partially_invertible(&t.machine, budget)?;
            if let Some(e) = pi.budget_failure() {
                return Err(e.clone());
            }
            writeln!(out, "partially_invertible {}", yes(pi.passes())).unwrap();
            Ok(Outcome::verdict(out, pi.passes()))
        }
        Command::Minimize { file, machine } => {
            let doc = load(&file)?;
            let m = doc.transducer(&machine)?.minimize()?;
            writeln!(out, "# preamble {}", fmt_word(&m.preamble)).unwrap();
            out.push_str(&block(&machine, &m.machine));
            Ok(Outcome::ok(out))
        }
        Command::Invert { file, machine } => {
            let doc = load(&file)?;
            let t = doc.transducer(&machine)?;
            let s = invert(t, budget)?.as_initial();
            writeln!(out, "# certificate {}", if verify_inverse(t, &s).valid() { "valid" } else { "invalid" }).unwrap();
            out.push_str(&block(&format!("{machine}_inv"), &s));
            Ok(Outcome::ok(out))
        }
        Command::Product { file, first, second } => {
            let doc = load(&file)?;
            let p = doc.transducer(&first)?.then(doc.transducer(&second)?)?;
            out.push_str(&block(&format!("{first}_{second}"), &p));
            Ok(Outcome::ok(out))
        }
        Command::SyncLevel { file, machine, max } => {
            let doc = load(&file)?;
            match synchronizing_level(&doc.transducer(&machine)?.accessible_part().machine, max) {
                Some(k) => Ok(Outcome::ok(format!("level {k}\n"))),
                None => Ok(Outcome::verdict("not_synchronizing\n".into(), false)),
            }
        }
        Command::Classify { file, machine } => {
            let doc = load(&file)?;
            let c = classify_synchronicity(doc.transducer(&machine)?, DEFAULT_KMAX, budget)?;
            Ok(Outcome::verdict(format!("{c}\n"), c != Synchronicity::NotSynchronizing))
        }
        Command::Core { file, machine } => {
            let doc = load(&file)?;
            let t = doc.transducer(&machine)?.accessible_part();
            let c = core(&t.machine, DEFAULT_KMAX)?;
            out.push_str(&block(&format!("{machine}_core"), &InitialTransducer::new(c, 0)?));
            Ok(Outcome::ok(out))
        }
        Command::Collapse { file, machine } => {
            let doc = load(&file)?;
            let c = collapse(&doc.automaton(&machine)?);
            writeln!(out, "steps {}", c.steps).unwrap();
            for (q, class) in c.class_of.iter().enumerate() {
                writeln!(out, "class {} {}", c.original.name(q), class).unwrap();
            }
            writeln!(out, "condition1 {}", yes(c.satisfies_condition1())).unwrap();
            out.push_str(&automaton_block(&format!("{machine}_collapsed"), c.quotient));
            Ok(Outcome::ok(out))
        }
        Command::Relation { file, machine, words, inverse } => {
            let doc = load(&file)?;
            let a = if inverse {
                let s = invert(doc.transducer(&machine)?, budget)?;
                Automaton::of(&s.machine, s.initial)
            } else {
                doc.automaton(&machine)?
            };
            let c = collapse(&a);
            let mut classes = Vec::new();
            for w in &words {
                let class = c.relation_classify(&parse_word(w, a.alphabet_size())?)?;
                writeln!(out, "class {w} {class}").unwrap();
                classes.push(class);
            }
            let related = classes.windows(2).all(|p| p[0] == p[1]);
            if words.len() > 1 {
                writeln!(out, "related {}", yes(related)).unwrap();
            }
            Ok(Outcome::verdict(out, related))
        }
        Command::Member { file, automaton, vmap } => {
            let doc = load(&file)?;
            let c = collapse(&doc.automaton(&automaton)?);
            let verdict = doc.vmap(&vmap)?.preserves_relation(&c)?;
            for p in &verdict.witnesses {
                let classes = p.classes.map_or("- -".to_string(), |(a, b)| format!("{a} {b}"));
                let status = if p.preserved() { "kept" } else { "broken" };
                writeln!(out, "pair {} {} {classes} {status}", fmt_word(&p.domain), fmt_word(&p.range)).unwrap();
            }
            writeln!(out, "member {}", yes(verdict.member)).unwrap();
            Ok(Outcome::verdict(out, verdict.member))
        }
        Command::Conj { file, machine, vmap, inverse } => {
            let doc = load(&file)?;
            let t = doc.transducer(&machine)?;
            let v = doc.vmap(&vmap)?;
            let mut result = Document::default();
            if inverse {
                let h = conjugate_overgroup(v, t, DEFAULT_KMAX, budget)?;
                let over = format!("{machine}_U");
                let u = InitialTransducer::new(h.machine().clone(), 0)?;
                result.items.insert(over.clone(), Item::Transducer(u));
                result.items.insert(format!("{vmap}_conj"), Item::Comp { over, map: h });
            } else {
                let c = conjugate_subgroup(v, t, DEFAULT_KMAX, budget)?;
                result.items.insert(format!("{vmap}_conj"), Item::VMap(c));
            }
            out.push_str(&serialize(&result));
            Ok(Outcome::ok(out))
        }
        Command::GroupTs { file, machine, max_order } => {
            let doc = load(&file)?;
            let g = automaton_group_ts(doc.transducer(&machine)?, max_order, DEFAULT_KMAX, budget)?;
            writeln!(out, "block_length {}", g.block_length).unwrap();
            writeln!(out, "generators {}", g.generators.len()).unwrap();
            writeln!(out, "order {}", g.order).unwrap();
            Ok(Outcome::ok(out))
        }
        Command::Viable { file, comp } => {
            let doc = load(&file)?;
            let h = doc.comp(&comp)?;
            let v = validate_viable(h.machine(), &h.targets(), budget)?;
            writeln!(out, "valid {}", yes(v.valid)).unwrap();
            writeln!(out, "effective {}", yes(v.effective)).unwrap();
            if let Some(r) = &v.reason {
                writeln!(out, "reason {r}").unwrap();
            }
            Ok(Outcome::verdict(out, v.valid))
        }
        Command::PartialInverse { file, machine } => {
            let doc = load(&file)?;
            let t = doc.transducer(&machine)?;
            let p = partial_inverse(&t.machine, budget)?;
            out.push_str(&block(&format!("{machine}_pinv"), &InitialTransducer::new(p.machine, 0)?));
            Ok(Outcome::ok(out))
        }
        Command::Contracting { file, machine, len, depth } => {
            let doc = load(&file)?;
            let v = contracting_check(&doc.transducer(&machine)?.machine, len, depth, budget)?;
            writeln!(out, "{}", v.label()).unwrap();
            match &v {
                ContractingVerdict::ContractingToDepth { len, depth, products } => {
                    writeln!(out, "products {products}\nlength {len}\ndepth {depth}\ncounterexamples 0").unwrap();
                    Ok(Outcome::ok(out))
                }
                ContractingVerdict::Counterexample { product, reached } => {
                    writeln!(out, "product {product}\nreached {reached}").unwrap();
                    Ok(Outcome::verdict(out, false))
                }
                ContractingVerdict::Inconclusive(why) => {
                    writeln!(out, "reason {why}").unwrap();
                    Ok(Outcome { text: out, code: 3 })
                }
            }
        }
        Command::Eval { file, machine, state, point } => {
            let doc = load(&file)?;
            let t = doc.transducer(&machine)?;
            let q = t.machine.state(&state)?;
            let x: EpWord = point.parse()?;
            x.check(t.alphabet_size())?;
            writeln!(out, "{}", t.machine.evaluate_ep(q, &x)?).unwrap();
            Ok(Outcome::ok(out))
        }
        Command::Dot { file, machine } => {
            let doc = load(&file)?;
            Ok(Outcome::ok(emit_dot(doc.transducer(&machine)?)))
        }
        Command::PaperCheck => {
            let results = checks::run_all(budget);
            for c in &results {
                writeln!(out, "{} {}: {}", if c.pass { "PASS" } else { "FAIL" }, c.name, c.detail).unwrap();
            }
            Ok(Outcome::verdict(out, results.iter().all(|c| c.pass)))
        }
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let budget = match budget_from_env() {
        Ok(b) => b,
        Err(msg) => {
            eprintln!("error: {msg}");
            return ExitCode::from(2);
        }
    };
    match run(cli.command, budget) {
        Ok(Outcome { text, code }) => {
            print!("{text}");
            ExitCode::from(code)
        }
        Err(Error::Parse { line: 0, msg, .. }) => {
            eprintln!("error: {msg}");
            ExitCode::from(2)
        }
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(exit_code(&e))
        }
    }
}
