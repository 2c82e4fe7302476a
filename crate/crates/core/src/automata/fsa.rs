use std::collections::{HashMap, VecDeque};

use super::symbol::{Alphabet, Label, Symbol, EPSILON};

pub type StateId = u32;

/// A finite-state automaton over interned symbols.
///
/// States are dense indices. Arcs carry a symbol or epsilon. The
/// `deterministic` flag is only ever set by operations that guarantee it
/// (determinization, minimization, products of deterministic inputs); any
/// mutation through [`Fsa::add_arc`] clears it.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Fsa {
    pub(crate) start: StateId,
    pub(crate) finals: Vec<bool>,
    pub(crate) arcs: Vec<Vec<(Label, StateId)>>,
    pub(crate) deterministic: bool,
}

impl Fsa {
    /// An automaton with a single non-accepting start state.
    pub fn empty() -> Self {
        Fsa {
            start: 0,
            finals: vec![false],
            arcs: vec![Vec::new()],
            deterministic: true,
        }
    }

    /// Accepts exactly the empty word.
    pub fn epsilon() -> Self {
        Fsa {
            start: 0,
            finals: vec![true],
            arcs: vec![Vec::new()],
            deterministic: true,
        }
    }

    pub fn symbol(symbol: Symbol) -> Self {
        Self::one_of(&[symbol])
    }

    /// Accepts every single-symbol word drawn from `symbols`.
    pub fn one_of(symbols: &[Symbol]) -> Self {
        let mut sorted = symbols.to_vec();
        sorted.sort_unstable();
        sorted.dedup();
        Fsa {
            start: 0,
            finals: vec![false, true],
            arcs: vec![sorted.into_iter().map(|s| (Some(s), 1)).collect(), Vec::new()],
            deterministic: true,
        }
    }

    pub fn word(word: &[Symbol]) -> Self {
        Self::from_words(std::iter::once(word))
    }

    /// A deterministic trie accepting exactly the given words.
    pub fn from_words<'a, I>(words: I) -> Self
    where
        I: IntoIterator<Item = &'a [Symbol]>,
    {
        let mut fsa = Fsa::empty();
        let mut children: HashMap<(StateId, Symbol), StateId> = HashMap::new();
        for word in words {
            let mut state = fsa.start;
            for &symbol in word {
                state = match children.get(&(state, symbol)) {
                    Some(&next) => next,
                    None => {
                        let next = fsa.push_state(false);
                        fsa.arcs[state as usize].push((Some(symbol), next));
                        children.insert((state, symbol), next);
                        next
                    }
                };
            }
            fsa.finals[state as usize] = true;
        }
        for arcs in &mut fsa.arcs {
            arcs.sort_unstable();
        }
        fsa.deterministic = true;
        fsa
    }

    fn push_state(&mut self, is_final: bool) -> StateId {
        self.finals.push(is_final);
        self.arcs.push(Vec::new());
        (self.finals.len() - 1) as StateId
    }

    pub fn add_state(&mut self, is_final: bool) -> StateId {
        self.deterministic = false;
        self.push_state(is_final)
    }

    pub fn add_arc(&mut self, from: StateId, label: Label, to: StateId) {
        assert!((to as usize) < self.finals.len(), "arc target {to} is not a state");
        self.deterministic = false;
        self.arcs[from as usize].push((label, to));
    }

    pub fn set_final(&mut self, state: StateId, is_final: bool) {
        self.finals[state as usize] = is_final;
    }

    pub fn set_start(&mut self, state: StateId) {
        assert!((state as usize) < self.finals.len());
        self.start = state;
    }

    pub fn start(&self) -> StateId {
        self.start
    }

    pub fn num_states(&self) -> usize {
        self.finals.len()
    }

    pub fn num_arcs(&self) -> usize {
        self.arcs.iter().map(Vec::len).sum()
    }

    pub fn is_final(&self, state: StateId) -> bool {
        self.finals[state as usize]
    }

    pub fn arcs(&self, state: StateId) -> &[(Label, StateId)] {
        &self.arcs[state as usize]
    }

    pub fn is_deterministic(&self) -> bool {
        self.deterministic
    }

    /// Every symbol that labels some arc.
    pub fn symbols(&self) -> Alphabet {
        self.arcs
            .iter()
            .flatten()
            .filter_map(|&(label, _)| label)
            .collect()
    }

    /// Appends the states of `other`, returning the offset of its state ids.
    fn absorb(&mut self, other: &Fsa) -> StateId {
        let offset = self.finals.len() as StateId;
        self.finals.extend_from_slice(&other.finals);
        self.arcs.extend(other.arcs.iter().map(|arcs| {
            arcs.iter()
                .map(|&(label, to)| (label, to + offset))
                .collect::<Vec<_>>()
        }));
        offset
    }

    pub fn union(&self, other: &Fsa) -> Fsa {
        let mut out = Fsa {
            start: 0,
            finals: vec![false],
            arcs: vec![Vec::new()],
            deterministic: false,
        };
        let a = out.absorb(self);
        let b = out.absorb(other);
        out.arcs[0].push((EPSILON, self.start + a));
        out.arcs[0].push((EPSILON, other.start + b));
        out
    }

    pub fn concat(&self, other: &Fsa) -> Fsa {
        let mut out = self.clone();
        out.deterministic = false;
        let b = out.absorb(other);
        for state in 0..self.finals.len() {
            if self.finals[state] {
                out.finals[state] = false;
                out.arcs[state].push((EPSILON, other.start + b));
            }
        }
        out
    }

    pub fn star(&self) -> Fsa {
        let mut out = Fsa {
            start: 0,
            finals: vec![true],
            arcs: vec![Vec::new()],
            deterministic: false,
        };
        let a = out.absorb(self);
        out.arcs[0].push((EPSILON, self.start + a));
        for state in 0..self.finals.len() {
            if self.finals[state] {
                out.arcs[state + a as usize].push((EPSILON, 0));
            }
        }
        out
    }

    /// Epsilon closure of a set of states, returned sorted.
    pub(crate) fn closure(&self, seeds: impl IntoIterator<Item = StateId>) -> Vec<StateId> {
        let mut seen = vec![false; self.finals.len()];
        let mut stack: Vec<StateId> = Vec::new();
        let mut out = Vec::new();
        for s in seeds {
            if !seen[s as usize] {
                seen[s as usize] = true;
                stack.push(s);
            }
        }
        while let Some(s) = stack.pop() {
            out.push(s);
            for &(label, to) in &self.arcs[s as usize] {
                if label.is_none() && !seen[to as usize] {
                    seen[to as usize] = true;
                    stack.push(to);
                }
            }
        }
        out.sort_unstable();
        out
    }

    pub fn accepts(&self, word: &[Symbol]) -> bool {
        let mut current = self.closure([self.start]);
        for &symbol in word {
            let next: Vec<StateId> = current
                .iter()
                .flat_map(|&s| self.arcs[s as usize].iter())
                .filter(|&&(label, _)| label == Some(symbol))
                .map(|&(_, to)| to)
                .collect();
            if next.is_empty() {
                return false;
            }
            current = self.closure(next);
        }
        current.iter().any(|&s| self.finals[s as usize])
    }

    fn accessible(&self) -> Vec<bool> {
        let mut seen = vec![false; self.finals.len()];
        let mut stack = vec![self.start];
        seen[self.start as usize] = true;
        while let Some(s) = stack.pop() {
            for &(_, to) in &self.arcs[s as usize] {
                if !seen[to as usize] {
                    seen[to as usize] = true;
                    stack.push(to);
                }
            }
        }
        seen
    }

    fn coaccessible(&self) -> Vec<bool> {
        let mut reverse: Vec<Vec<StateId>> = vec![Vec::new(); self.finals.len()];
        for (from, arcs) in self.arcs.iter().enumerate() {
            for &(_, to) in arcs {
                reverse[to as usize].push(from as StateId);
            }
        }
        let mut seen = self.finals.clone();
        let mut stack: Vec<StateId> = (0..self.finals.len() as StateId)
            .filter(|&s| self.finals[s as usize])
            .collect();
        while let Some(s) = stack.pop() {
            for &from in &reverse[s as usize] {
                if !seen[from as usize] {
                    seen[from as usize] = true;
                    stack.push(from);
                }
            }
        }
        seen
    }

    pub fn is_empty(&self) -> bool {
        let reach = self.accessible();
        !reach
            .iter()
            .zip(&self.finals)
            .any(|(&reached, &is_final)| reached && is_final)
    }

    /// Removes states that are unreachable or cannot reach an accepting
    /// state. An empty language trims down to [`Fsa::empty`].
    pub fn trim(&self) -> Fsa {
        let acc = self.accessible();
        let coacc = self.coaccessible();
        if !coacc[self.start as usize] {
            return Fsa::empty();
        }
        let mut remap = vec![u32::MAX; self.finals.len()];
        let mut order = Vec::new();
        // BFS numbering from the start keeps the result canonical for a
        // canonical input.
        let mut queue = VecDeque::from([self.start]);
        remap[self.start as usize] = 0;
        order.push(self.start);
        while let Some(s) = queue.pop_front() {
            for &(_, to) in &self.arcs[s as usize] {
                let t = to as usize;
                if acc[t] && coacc[t] && remap[t] == u32::MAX {
                    remap[t] = order.len() as u32;
                    order.push(to);
                    queue.push_back(to);
                }
            }
        }
        let finals = order.iter().map(|&s| self.finals[s as usize]).collect();
        let arcs = order
            .iter()
            .map(|&s| {
                self.arcs[s as usize]
                    .iter()
                    .filter(|&&(_, to)| remap[to as usize] != u32::MAX)
                    .map(|&(label, to)| (label, remap[to as usize]))
                    .collect()
            })
            .collect();
        Fsa {
            start: 0,
            finals,
            arcs,
            deterministic: self.deterministic,
        }
    }

    /// Deterministic intersection of the two languages.
    pub fn intersect(&self, other: &Fsa) -> Fsa {
        let left = self.determinize();
        let right = other.determinize();
        let mut out = Fsa::empty();
        let mut index: HashMap<(StateId, StateId), StateId> = HashMap::new();
        let mut queue = VecDeque::new();
        index.insert((left.start, right.start), 0);
        out.finals[0] = left.is_final(left.start) && right.is_final(right.start);
        queue.push_back((left.start, right.start));
        while let Some((l, r)) = queue.pop_front() {
            let from = index[&(l, r)];
            let (la, ra) = (left.arcs(l), right.arcs(r));
            let (mut i, mut j) = (0, 0);
            // Deterministic arcs are sorted by symbol: merge-join them.
            while i < la.len() && j < ra.len() {
                match la[i].0.cmp(&ra[j].0) {
                    std::cmp::Ordering::Less => i += 1,
                    std::cmp::Ordering::Greater => j += 1,
                    std::cmp::Ordering::Equal => {
                        let key = (la[i].1, ra[j].1);
                        let to = *index.entry(key).or_insert_with(|| {
                            queue.push_back(key);
                            out.push_state(left.is_final(key.0) && right.is_final(key.1))
                        });
                        out.arcs[from as usize].push((la[i].0, to));
                        i += 1;
                        j += 1;
                    }
                }
            }
        }
        out.deterministic = true;
        out.trim()
    }

    /// Deterministic automaton for `L(self) \ L(other)`.
    ///
    /// This is the product of `self` with the complement of `other`, where
    /// the complement is taken lazily: a missing arc in `other` leads to an
    /// implicit rejecting sink. The difference is exact for every symbol,
    /// markers included.
    pub fn difference(&self, other: &Fsa) -> Fsa {
        let left = self.determinize();
        let right = other.determinize();
        let mut out = Fsa::empty();
        let mut index: HashMap<(StateId, Option<StateId>), StateId> = HashMap::new();
        let mut queue = VecDeque::new();
        let accepts = |l: StateId, r: Option<StateId>| {
            left.is_final(l) && r.map_or(true, |r| !right.is_final(r))
        };
        let key0 = (left.start, Some(right.start));
        index.insert(key0, 0);
        out.finals[0] = accepts(key0.0, key0.1);
        queue.push_back(key0);
        while let Some((l, r)) = queue.pop_front() {
            let from = index[&(l, r)];
            for &(label, lto) in left.arcs(l) {
                let rto = r.and_then(|r| right.step(r, label.expect("deterministic arc")));
                let key = (lto, rto);
                let to = *index.entry(key).or_insert_with(|| {
                    queue.push_back(key);
                    out.push_state(accepts(key.0, key.1))
                });
                out.arcs[from as usize].push((label, to));
            }
        }
        out.deterministic = true;
        out.trim()
    }

    /// The successor of `state` on `symbol` in a deterministic automaton.
    pub fn step(&self, state: StateId, symbol: Symbol) -> Option<StateId> {
        debug_assert!(self.deterministic);
        let arcs = &self.arcs[state as usize];
        arcs.binary_search_by(|&(label, _)| label.cmp(&Some(symbol)))
            .ok()
            .map(|i| arcs[i].1)
    }

    /// Complement relative to `universe*`. Symbols outside the universe
    /// (markers) are discarded first, so words containing them are never
    /// accepted by the result.
    pub fn complement(&self, universe: &Alphabet) -> Fsa {
        let dfa = self.determinize();
        let n = dfa.num_states();
        let sink = n as StateId;
        let mut out = Fsa {
            start: dfa.start,
            finals: dfa.finals.iter().map(|&f| !f).collect(),
            arcs: Vec::with_capacity(n + 1),
            deterministic: true,
        };
        out.finals.push(true);
        for state in 0..n as StateId {
            let mut arcs = Vec::with_capacity(universe.len());
            for &symbol in universe.symbols() {
                arcs.push((Some(symbol), dfa.step(state, symbol).unwrap_or(sink)));
            }
            out.arcs.push(arcs);
        }
        out.arcs
            .push(universe.symbols().iter().map(|&s| (Some(s), sink)).collect());
        out.minimize()
    }

    pub fn equivalent(&self, other: &Fsa) -> bool {
        self.difference(other).is_empty() && other.difference(self).is_empty()
    }

    /// Replaces every arc label through `f`; `None` results become epsilon.
    pub fn relabel(&self, mut f: impl FnMut(Symbol) -> Label) -> Fsa {
        Fsa {
            start: self.start,
            finals: self.finals.clone(),
            arcs: self
                .arcs
                .iter()
                .map(|arcs| {
                    arcs.iter()
                        .map(|&(label, to)| (label.and_then(&mut f), to))
                        .collect()
                })
                .collect(),
            deterministic: false,
        }
    }
}

/// Emptiness of both directed differences.
pub fn fsa_equivalent(x: &Fsa, y: &Fsa) -> bool {
    x.equivalent(y)
}

pub fn fsa_difference(x: &Fsa, y: &Fsa) -> Fsa {
    x.difference(y)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn s(i: u32) -> Symbol {
        Symbol::from_index(i)
    }

    #[test]
    fn concat_of_symbols() {
        let ab = Fsa::symbol(s(1)).concat(&Fsa::symbol(s(2)));
        assert!(ab.accepts(&[s(1), s(2)]));
        assert!(!ab.accepts(&[s(1)]));
        assert!(!ab.accepts(&[]));
    }

    #[test]
    fn star_accepts_empty_and_repeats() {
        let a_star = Fsa::symbol(s(1)).star();
        assert!(a_star.accepts(&[]));
        assert!(a_star.accepts(&[s(1), s(1), s(1)]));
        assert!(!a_star.accepts(&[s(2)]));
    }

    #[test]
    fn complement_of_empty_is_universal() {
        let universe = Alphabet::new(vec![s(1), s(2)]);
        let all = Fsa::empty().complement(&universe);
        assert!(all.accepts(&[]));
        assert!(all.accepts(&[s(2), s(1), s(1)]));
        assert!(!all.accepts(&[s(3)]));
        assert!(all.is_deterministic());
    }

    #[test]
    fn intersect_star_with_pair() {
        let a = Fsa::symbol(s(1));
        let got = a.star().intersect(&a.concat(&a));
        assert!(got.is_deterministic());
        assert!(got.equivalent(&Fsa::word(&[s(1), s(1)])));
    }

    #[test]
    fn difference_of_finite_sets() {
        let x = Fsa::from_words([&[s(1), s(2)][..], &[s(1), s(3)][..]]);
        let y = Fsa::word(&[s(1), s(2)]);
        assert!(x.difference(&y).equivalent(&Fsa::word(&[s(1), s(3)])));
        assert!(x.difference(&x).is_empty());
    }

    #[test]
    fn difference_keeps_marker_words() {
        // Symbol 9 stands in for a marker: differences never drop it.
        let x = Fsa::word(&[s(1), s(9)]);
        let y = Fsa::word(&[s(1)]);
        assert!(x.difference(&y).accepts(&[s(1), s(9)]));
    }

    #[test]
    fn equivalence_detects_epsilon() {
        let a = Fsa::symbol(s(1));
        assert!(!a.star().equivalent(&a.star().concat(&a)));
        assert!(a.star().equivalent(&a.star()));
    }

    #[test]
    fn trim_of_empty_language() {
        let mut fsa = Fsa::empty();
        let t = fsa.add_state(false);
        fsa.add_arc(0, Some(s(1)), t);
        let trimmed = fsa.trim();
        assert_eq!(trimmed.num_states(), 1);
        assert!(trimmed.is_empty());
    }

    #[test]
    #[should_panic(expected = "not a state")]
    fn arc_endpoints_must_exist() {
        let mut fsa = Fsa::empty();
        fsa.add_arc(0, Some(s(1)), 7);
    }
}
