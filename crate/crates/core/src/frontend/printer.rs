//! Canonical source rendering. Definitions are inlined and every location
//! set becomes a `where()` query, so the output reparses to the same tree
//! (up to `Named` wrappers) against the same database and granularity.

use std::fmt::Write;

use super::ast::{ModifierAst, Program, RegexAst, SpecAst};
use super::predicate::{PrefixPredicate, PrefixTest};
use crate::automata::SymbolTable;
use crate::snapshot::Granularity;

fn loc_text(symbols: &[crate::automata::Symbol], table: &SymbolTable, granularity: Granularity) -> String {
    let drop = table.drop_symbol();
    let attr = granularity.attribute();
    let terms: Vec<String> = symbols
        .iter()
        .filter(|&&s| s != drop)
        .map(|&s| format!("{attr}=={:?}", table.name(s)))
        .collect();
    let query = (!terms.is_empty()).then(|| format!("where({})", terms.join(" || ")));
    match (symbols.contains(&drop), query) {
        (true, Some(q)) => format!("(drop | {q})"),
        (true, None) => "drop".to_string(),
        (false, Some(q)) => q,
        (false, None) => unreachable!("location sets are non-empty"),
    }
}

pub fn print_regex(r: &RegexAst, table: &SymbolTable, granularity: Granularity) -> String {
    match r {
        RegexAst::Loc(ss) => loc_text(ss, table, granularity),
        RegexAst::Dot => ".".to_string(),
        RegexAst::Union(a, b) => format!(
            "({} | {})",
            print_regex(a, table, granularity),
            print_regex(b, table, granularity)
        ),
        RegexAst::Concat(a, b) => format!(
            "({} {})",
            print_regex(a, table, granularity),
            print_regex(b, table, granularity)
        ),
        RegexAst::Star(a) => format!("{}*", print_regex(a, table, granularity)),
        RegexAst::Named(_, a) => print_regex(a, table, granularity),
    }
}

fn print_modifier(m: &ModifierAst, table: &SymbolTable, granularity: Granularity) -> String {
    let r = |x: &RegexAst| print_regex(x, table, granularity);
    match m {
        ModifierAst::Preserve | ModifierAst::Drop => m.keyword().to_string(),
        ModifierAst::Add(x) | ModifierAst::Remove(x) | ModifierAst::Any(x) => format!("{}({})", m.keyword(), r(x)),
        ModifierAst::Replace(x, y) => format!("replace({}, {})", r(x), r(y)),
    }
}

pub fn print_spec(s: &SpecAst, table: &SymbolTable, granularity: Granularity) -> String {
    match s {
        SpecAst::Atomic(z, m) => format!(
            "{} : {}",
            print_regex(z, table, granularity),
            print_modifier(m, table, granularity)
        ),
        SpecAst::Concat(a, b) => format!(
            "{{ {}; {} }}",
            print_spec(a, table, granularity),
            print_spec(b, table, granularity)
        ),
        SpecAst::Else(a, b) => format!(
            "({} else {})",
            print_spec(a, table, granularity),
            print_spec(b, table, granularity)
        ),
        SpecAst::Named(_, a) => print_spec(a, table, granularity),
    }
}

fn print_predicate(p: &PrefixPredicate) -> String {
    match p {
        PrefixPredicate::True => "true".to_string(),
        PrefixPredicate::Atom(field, test) => {
            let field = field.keyword();
            match test {
                PrefixTest::Eq(c) => format!("{field} == \"{c}\""),
                PrefixTest::Ne(c) => format!("{field} != \"{c}\""),
                PrefixTest::In(cs) => {
                    let items: Vec<String> = cs.iter().map(|c| format!("\"{c}\"")).collect();
                    format!("{field} in {{{}}}", items.join(", "))
                }
            }
        }
        PrefixPredicate::And(a, b) => format!("({} and {})", print_predicate(a), print_predicate(b)),
        PrefixPredicate::Or(a, b) => format!("({} or {})", print_predicate(a), print_predicate(b)),
        PrefixPredicate::Not(a) => format!("not {}", print_predicate(a)),
    }
}

/// The guarded specs followed by the default spec, fully inlined.
pub fn print_program(program: &Program, granularity: Granularity) -> String {
    let mut out = String::new();
    for g in &program.guarded {
        let _ = writeln!(
            out,
            "pspec {} := {} -> {}",
            g.name,
            print_predicate(&g.predicate),
            print_spec(&g.spec, &program.table, granularity)
        );
    }
    if let Some(d) = &program.default {
        let _ = writeln!(out, "spec {} := {}", d.name, print_spec(&d.spec, &program.table, granularity));
    }
    out
}
