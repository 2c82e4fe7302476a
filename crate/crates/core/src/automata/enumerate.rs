use std::collections::BTreeSet;

use super::fsa::{Fsa, StateId};
use super::symbol::Symbol;

/// A bounded listing of words from a language.
///
/// Words are ordered by length, then lexicographically by symbol id.
/// `truncated` is set iff the language holds words beyond the listed ones.
#[derive(Debug, Clone, PartialEq, Eq, Default)]
pub struct PathList {
    pub paths: Vec<Vec<Symbol>>,
    pub truncated: bool,
}

impl PathList {
    pub fn is_empty(&self) -> bool {
        self.paths.is_empty()
    }

    pub fn len(&self) -> usize {
        self.paths.len()
    }

    pub fn as_set(&self) -> BTreeSet<Vec<Symbol>> {
        self.paths.iter().cloned().collect()
    }
}

/// The `limit` shortest words of `fsa` in canonical order.
pub fn enumerate_shortest(fsa: &Fsa, limit: usize) -> PathList {
    assert!(limit >= 1, "enumeration limit must be positive");
    let dfa = fsa.minimize();
    if dfa.is_empty() {
        return PathList::default();
    }
    // One extra word decides the truncation flag.
    let want = limit + 1;
    let mut found: Vec<Vec<Symbol>> = Vec::new();
    let mut layer: Vec<(Vec<Symbol>, StateId)> = vec![(Vec::new(), dfa.start())];
    let mut per_state = vec![0usize; dfa.num_states()];
    while !layer.is_empty() && found.len() < want {
        for (word, state) in &layer {
            if dfa.is_final(*state) {
                found.push(word.clone());
                if found.len() == want {
                    break;
                }
            }
        }
        if found.len() == want {
            break;
        }
        // Words reaching the same state share their completions, so the
        // lexicographically first `want` of them dominate the rest.
        per_state.iter_mut().for_each(|c| *c = 0);
        let mut next = Vec::new();
        for (word, state) in &layer {
            for &(label, to) in dfa.arcs(*state) {
                if per_state[to as usize] < want {
                    per_state[to as usize] += 1;
                    let mut extended = word.clone();
                    extended.push(label.expect("deterministic arc"));
                    next.push((extended, to));
                }
            }
        }
        layer = next;
    }
    let truncated = found.len() > limit;
    found.truncate(limit);
    PathList {
        paths: found,
        truncated,
    }
}

/// Every accepted word of length at most `max_len`.
pub fn words_up_to(fsa: &Fsa, max_len: usize) -> BTreeSet<Vec<Symbol>> {
    let dfa = fsa.minimize();
    let mut out = BTreeSet::new();
    if dfa.is_empty() {
        return out;
    }
    let mut stack: Vec<(Vec<Symbol>, StateId)> = vec![(Vec::new(), dfa.start())];
    while let Some((word, state)) = stack.pop() {
        if dfa.is_final(state) {
            out.insert(word.clone());
        }
        if word.len() == max_len {
            continue;
        }
        for &(label, to) in dfa.arcs(state) {
            let mut extended = word.clone();
            extended.push(label.expect("deterministic arc"));
            stack.push((extended, to));
        }
    }
    out
}
