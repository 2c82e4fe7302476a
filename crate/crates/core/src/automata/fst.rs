use std::collections::{HashMap, VecDeque};

use super::fsa::{Fsa, StateId};
use super::symbol::{Label, Symbol, EPSILON};

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct FstArc {
    pub input: Label,
    pub output: Label,
    pub to: StateId,
}

/// A two-tape finite-state transducer.
///
/// Each state's arcs are kept sorted by input label so that composition and
/// image can look up matching arcs by binary search.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Fst {
    start: StateId,
    finals: Vec<bool>,
    arcs: Vec<Vec<FstArc>>,
}

impl Fst {
    /// The empty relation.
    pub fn empty() -> Self {
        Fst {
            start: 0,
            finals: vec![false],
            arcs: vec![Vec::new()],
        }
    }

    /// Relates the empty word to itself.
    pub fn epsilon() -> Self {
        Fst {
            start: 0,
            finals: vec![true],
            arcs: vec![Vec::new()],
        }
    }

    fn from_fsa(fsa: &Fsa, mut label: impl FnMut(Label) -> (Label, Label)) -> Fst {
        let n = fsa.num_states();
        Fst {
            start: fsa.start(),
            finals: (0..n as StateId).map(|s| fsa.is_final(s)).collect(),
            arcs: (0..n as StateId)
                .map(|s| {
                    fsa.arcs(s)
                        .iter()
                        .map(|&(l, to)| {
                            let (input, output) = label(l);
                            FstArc { input, output, to }
                        })
                        .collect()
                })
                .collect(),
        }
    }

    /// `I(P)`: every word of `p` related to itself.
    pub fn identity(p: &Fsa) -> Fst {
        Self::from_fsa(p, |l| (l, l)).sorted()
    }

    /// `P1 × P2`, built as P1 on the input tape followed by P2 on the output
    /// tape, so the result has `|P1| + |P2|` states.
    pub fn cross(p1: &Fsa, p2: &Fsa) -> Fst {
        let left = Self::from_fsa(p1, |l| (l, EPSILON));
        let right = Self::from_fsa(p2, |l| (EPSILON, l));
        left.concat(&right).sorted()
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

    pub fn arcs(&self, state: StateId) -> &[FstArc] {
        &self.arcs[state as usize]
    }

    fn absorb(&mut self, other: &Fst) -> StateId {
        let offset = self.finals.len() as StateId;
        self.finals.extend_from_slice(&other.finals);
        self.arcs.extend(other.arcs.iter().map(|arcs| {
            arcs.iter()
                .map(|a| FstArc {
                    to: a.to + offset,
                    ..*a
                })
                .collect::<Vec<_>>()
        }));
        offset
    }

    fn eps(to: StateId) -> FstArc {
        FstArc {
            input: EPSILON,
            output: EPSILON,
            to,
        }
    }

    pub fn union(&self, other: &Fst) -> Fst {
        let mut out = Fst::empty();
        let a = out.absorb(self);
        let b = out.absorb(other);
        out.arcs[0].push(Self::eps(self.start + a));
        out.arcs[0].push(Self::eps(other.start + b));
        out.sorted()
    }

    /// Pairwise concatenation: `(p1 p2, q1 q2)` for related pairs.
    pub fn concat(&self, other: &Fst) -> Fst {
        let mut out = self.clone();
        let b = out.absorb(other);
        for state in 0..self.finals.len() {
            if self.finals[state] {
                out.finals[state] = false;
                out.arcs[state].push(Self::eps(other.start + b));
            }
        }
        out.sorted()
    }

    pub fn star(&self) -> Fst {
        let mut out = Fst::epsilon();
        let a = out.absorb(self);
        out.arcs[0].push(Self::eps(self.start + a));
        for state in 0..self.finals.len() {
            if self.finals[state] {
                out.arcs[state + a as usize].push(Self::eps(0));
            }
        }
        out.sorted()
    }

    /// Restores the arc order invariant: each state's arcs sorted by input.
    fn sorted(mut self) -> Fst {
        for arcs in &mut self.arcs {
            arcs.sort_unstable();
        }
        self
    }

    /// `self ∘ other`: relates `x` to `z` when `self` relates `x` to some `y`
    /// and `other` relates `y` to `z`.
    ///
    /// Uses a sequencing epsilon filter: between two matched moves, moves of
    /// `self` that write nothing come before moves of `other` that read
    /// nothing. Every interleaving reduces to that one, so each related pair
    /// is still produced.
    pub fn compose(&self, other: &Fst) -> Fst {
        let mut out = Fst::empty();
        out.finals.clear();
        out.arcs.clear();
        let mut index: HashMap<(StateId, StateId, bool), StateId> = HashMap::new();
        let mut queue = VecDeque::new();
        let mut intern = |key: (StateId, StateId, bool),
                          out: &mut Fst,
                          queue: &mut VecDeque<(StateId, StateId, bool)>| {
            *index.entry(key).or_insert_with(|| {
                out.finals.push(self.is_final(key.0) && other.is_final(key.1));
                out.arcs.push(Vec::new());
                queue.push_back(key);
                (out.finals.len() - 1) as StateId
            })
        };
        intern((self.start, other.start, false), &mut out, &mut queue);
        while let Some(key) = queue.pop_front() {
            let from = intern(key, &mut out, &mut queue);
            let (q1, q2, blocked) = key;
            for a1 in self.arcs(q1) {
                match a1.output {
                    None => {
                        if !blocked {
                            let to = intern((a1.to, q2, false), &mut out, &mut queue);
                            out.arcs[from as usize].push(FstArc {
                                input: a1.input,
                                output: EPSILON,
                                to,
                            });
                        }
                    }
                    Some(mid) => {
                        for a2 in matching(other.arcs(q2), Some(mid)) {
                            let to = intern((a1.to, a2.to, false), &mut out, &mut queue);
                            out.arcs[from as usize].push(FstArc {
                                input: a1.input,
                                output: a2.output,
                                to,
                            });
                        }
                    }
                }
            }
            for a2 in matching(other.arcs(q2), EPSILON) {
                let to = intern((q1, a2.to, true), &mut out, &mut queue);
                out.arcs[from as usize].push(FstArc {
                    input: EPSILON,
                    output: a2.output,
                    to,
                });
            }
        }
        out.sorted().trim()
    }

    /// The image `{ q | ∃p ∈ L(p). (p, q) ∈ self }`, computed as the output
    /// projection of `I(p) ∘ self` without materializing `I(p)`.
    pub fn image(&self, p: &Fsa) -> Fsa {
        let mut out = Fsa::empty();
        out.finals.clear();
        out.arcs.clear();
        out.deterministic = false;
        let mut index: HashMap<(StateId, StateId, bool), StateId> = HashMap::new();
        let mut queue = VecDeque::new();
        let mut intern = |key: (StateId, StateId, bool),
                          out: &mut Fsa,
                          queue: &mut VecDeque<(StateId, StateId, bool)>| {
            *index.entry(key).or_insert_with(|| {
                out.finals.push(p.is_final(key.0) && self.is_final(key.1));
                out.arcs.push(Vec::new());
                queue.push_back(key);
                (out.finals.len() - 1) as StateId
            })
        };
        intern((p.start(), self.start, false), &mut out, &mut queue);
        while let Some(key) = queue.pop_front() {
            let from = intern(key, &mut out, &mut queue);
            let (qp, qr, blocked) = key;
            for &(label, pto) in p.arcs(qp) {
                match label {
                    None => {
                        if !blocked {
                            let to = intern((pto, qr, false), &mut out, &mut queue);
                            out.arcs[from as usize].push((EPSILON, to));
                        }
                    }
                    Some(symbol) => {
                        for a in matching(self.arcs(qr), Some(symbol)) {
                            let to = intern((pto, a.to, false), &mut out, &mut queue);
                            out.arcs[from as usize].push((a.output, to));
                        }
                    }
                }
            }
            for a in matching(self.arcs(qr), EPSILON) {
                let to = intern((qp, a.to, true), &mut out, &mut queue);
                out.arcs[from as usize].push((a.output, to));
            }
        }
        out.start = 0;
        out.trim()
    }

    /// Minimizes the transducer as an acceptor over label pairs.
    ///
    /// Each `(input, output)` pair is encoded as one symbol and `ε:ε` as
    /// epsilon; the pair language determines the relation, so minimizing it
    /// keeps the relation intact.
    pub fn optimize(&self) -> Fst {
        let mut codes: HashMap<(Label, Label), Symbol> = HashMap::new();
        let mut pairs: Vec<(Label, Label)> = Vec::new();
        let mut acceptor = self.project(|_| EPSILON);
        for (state, arcs) in self.arcs.iter().enumerate() {
            for (i, a) in arcs.iter().enumerate() {
                if a.input.is_none() && a.output.is_none() {
                    continue;
                }
                let code = *codes.entry((a.input, a.output)).or_insert_with(|| {
                    pairs.push((a.input, a.output));
                    Symbol::from_index(pairs.len() as u32 - 1)
                });
                acceptor.arcs[state][i].0 = Some(code);
            }
        }
        let min = acceptor.minimize();
        Fst {
            start: min.start(),
            finals: (0..min.num_states() as StateId).map(|s| min.is_final(s)).collect(),
            arcs: (0..min.num_states() as StateId)
                .map(|s| {
                    min.arcs(s)
                        .iter()
                        .map(|&(code, to)| {
                            let (input, output) =
                                pairs[code.expect("deterministic arc").index() as usize];
                            FstArc { input, output, to }
                        })
                        .collect()
                })
                .collect(),
        }
        .sorted()
    }

    /// Every word related to `word`.
    pub fn relate(&self, word: &[Symbol]) -> Fsa {
        self.image(&Fsa::word(word))
    }

    pub fn input_projection(&self) -> Fsa {
        self.project(|a| a.input)
    }

    pub fn output_projection(&self) -> Fsa {
        self.project(|a| a.output)
    }

    fn project(&self, side: impl Fn(&FstArc) -> Label) -> Fsa {
        let mut fsa = Fsa::empty();
        fsa.finals = self.finals.clone();
        fsa.arcs = self
            .arcs
            .iter()
            .map(|arcs| arcs.iter().map(|a| (side(a), a.to)).collect())
            .collect();
        fsa.start = self.start;
        fsa.deterministic = false;
        fsa
    }

    /// Drops states that are unreachable or cannot reach an accepting state.
    pub fn trim(&self) -> Fst {
        let n = self.num_states();
        let mut reach = vec![false; n];
        let mut stack = vec![self.start];
        reach[self.start as usize] = true;
        while let Some(s) = stack.pop() {
            for a in &self.arcs[s as usize] {
                if !reach[a.to as usize] {
                    reach[a.to as usize] = true;
                    stack.push(a.to);
                }
            }
        }
        let mut reverse: Vec<Vec<StateId>> = vec![Vec::new(); n];
        for (from, arcs) in self.arcs.iter().enumerate() {
            for a in arcs {
                reverse[a.to as usize].push(from as StateId);
            }
        }
        let mut live = self.finals.clone();
        let mut stack: Vec<StateId> = (0..n as StateId).filter(|&s| live[s as usize]).collect();
        while let Some(s) = stack.pop() {
            for &from in &reverse[s as usize] {
                if !live[from as usize] {
                    live[from as usize] = true;
                    stack.push(from);
                }
            }
        }
        if !live[self.start as usize] {
            return Fst::empty();
        }
        let mut remap = vec![u32::MAX; n];
        let mut order = vec![self.start];
        remap[self.start as usize] = 0;
        let mut i = 0;
        while i < order.len() {
            let s = order[i];
            for a in &self.arcs[s as usize] {
                let t = a.to as usize;
                if reach[t] && live[t] && remap[t] == u32::MAX {
                    remap[t] = order.len() as u32;
                    order.push(a.to);
                }
            }
            i += 1;
        }
        Fst {
            start: 0,
            finals: order.iter().map(|&s| self.finals[s as usize]).collect(),
            arcs: order
                .iter()
                .map(|&s| {
                    self.arcs[s as usize]
                        .iter()
                        .filter(|a| remap[a.to as usize] != u32::MAX)
                        .map(|a| FstArc {
                            to: remap[a.to as usize],
                            ..*a
                        })
                        .collect()
                })
                .collect(),
        }
    }
}

/// The arcs of a by-input sorted list whose input equals `input`.
fn matching(arcs: &[FstArc], input: Label) -> &[FstArc] {
    let lo = arcs.partition_point(|a| a.input < input);
    let hi = arcs[lo..].partition_point(|a| a.input == input) + lo;
    &arcs[lo..hi]
}

/// `P ▷ R`.
pub fn apply_image(p: &Fsa, r: &Fst) -> Fsa {
    r.image(p)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::automata::enumerate::words_up_to;

    fn s(i: u32) -> Symbol {
        Symbol::from_index(i)
    }

    #[test]
    fn cross_maps_single_word() {
        let (a, b) = (s(1), s(2));
        let r = Fst::cross(&Fsa::symbol(a), &Fsa::symbol(b));
        assert!(r.relate(&[a]).equivalent(&Fsa::symbol(b)));
        assert!(r.relate(&[b]).is_empty());
        assert!(r.relate(&[]).is_empty());
    }

    #[test]
    fn cross_is_linear_size() {
        let p1 = Fsa::from_words([&[s(1), s(2)][..], &[s(3)][..]]);
        let p2 = Fsa::symbol(s(4)).star();
        let r = Fst::cross(&p1, &p2);
        assert_eq!(r.num_states(), p1.num_states() + p2.num_states());
    }

    #[test]
    fn identity_on_finite_set() {
        let (a, b, c) = (s(1), s(2), s(3));
        let r = Fst::identity(&Fsa::word(&[a, b]));
        assert!(r.relate(&[a, b]).equivalent(&Fsa::word(&[a, b])));
        assert!(r.relate(&[a, c]).is_empty());
    }

    #[test]
    fn composition_chains_relations() {
        let (a, b, c) = (s(1), s(2), s(3));
        let ab = Fst::cross(&Fsa::symbol(a), &Fsa::symbol(b));
        let bc = Fst::cross(&Fsa::symbol(b), &Fsa::symbol(c));
        let ac = ab.compose(&bc);
        assert!(ac.relate(&[a]).equivalent(&Fsa::symbol(c)));
        assert!(ac.relate(&[b]).is_empty());
    }

    #[test]
    fn composition_with_epsilon_heavy_sides() {
        // (a × ε)(ε × b) composed with I(b*) still maps a to b.
        let (a, b) = (s(1), s(2));
        let left = Fst::cross(&Fsa::symbol(a), &Fsa::epsilon())
            .concat(&Fst::cross(&Fsa::epsilon(), &Fsa::symbol(b)));
        let right = Fst::identity(&Fsa::symbol(b).star());
        let r = left.compose(&right);
        assert_eq!(words_up_to(&r.relate(&[a]), 3).len(), 1);
        assert!(r.relate(&[a]).accepts(&[b]));
    }

    #[test]
    fn image_through_identity_is_intersection() {
        let (p, q) = (s(1), s(2));
        let set = Fsa::from_words([&[p][..], &[q][..]]);
        let img = apply_image(&set, &Fst::identity(&Fsa::symbol(p)));
        assert!(img.equivalent(&Fsa::symbol(p)));
    }

    #[test]
    fn image_through_cross() {
        let (a, b, c, d) = (s(1), s(2), s(3), s(4));
        let r = Fst::cross(&Fsa::word(&[a, b]), &Fsa::word(&[c, d]));
        assert!(apply_image(&Fsa::word(&[a, b]), &r).equivalent(&Fsa::word(&[c, d])));
    }

    #[test]
    fn star_of_identity() {
        let a = s(1);
        let r = Fst::identity(&Fsa::symbol(a)).star();
        assert!(r.relate(&[a, a, a]).equivalent(&Fsa::word(&[a, a, a])));
        assert!(r.relate(&[]).equivalent(&Fsa::epsilon()));
    }

    #[test]
    fn optimize_preserves_relation() {
        let (a, b, c) = (s(1), s(2), s(3));
        let r = Fst::identity(&Fsa::symbol(a).star())
            .union(&Fst::cross(&Fsa::word(&[a, b]), &Fsa::symbol(c)))
            .star();
        let opt = r.optimize();
        assert!(opt.num_states() <= r.num_states());
        for word in [&[][..], &[a][..], &[a, b][..], &[a, b, a][..], &[b][..]] {
            assert!(r.relate(word).equivalent(&opt.relate(word)), "{word:?}");
        }
    }

    #[test]
    fn projections() {
        let (a, b) = (s(1), s(2));
        let r = Fst::cross(&Fsa::symbol(a), &Fsa::symbol(b).star());
        assert!(r.input_projection().equivalent(&Fsa::symbol(a)));
        assert!(r.output_projection().equivalent(&Fsa::symbol(b).star()));
    }
}
