//! A direct, length-bounded evaluation of RIR terms over explicit word sets.
//!
//! Slow and approximate beyond its bound; meant for cross-checking the
//! automaton evaluator on tiny alphabets.

use std::collections::{BTreeSet, HashMap};

use super::{PathSet, Rel, Spec};
use crate::automata::Symbol;

pub type Word = Vec<Symbol>;
pub type WordSet = BTreeSet<Word>;

/// Length bound for intermediate results. Inputs and intermediate words of
/// relations longer than this are not explored.
pub const INTERNAL_BOUND: usize = 8;

/// The explicit snapshot pair and the complement universe.
#[derive(Debug, Clone)]
pub struct OracleEnv {
    pub pre: WordSet,
    pub post: WordSet,
    pub universe: Vec<Symbol>,
}

/// `p` evaluated over explicit sets, restricted to words of length at most
/// `maxlen`.
pub fn oracle_eval_pathset(p: &PathSet, env: &OracleEnv, maxlen: usize) -> WordSet {
    assert!(maxlen <= INTERNAL_BOUND, "oracle bound is at most {INTERNAL_BOUND}");
    let mut oracle = Oracle::new(env);
    let set = oracle.pathset(p);
    set.iter().filter(|w| w.len() <= maxlen).cloned().collect()
}

/// Every word related to `word` by `r`, up to the internal bound.
pub fn oracle_relate(r: &Rel, env: &OracleEnv, word: &[Symbol]) -> WordSet {
    Oracle::new(env).image_of(r, word)
}

/// Satisfaction of `s`, with all sets cut at the internal bound.
pub fn oracle_check(s: &Spec, env: &OracleEnv) -> bool {
    Oracle::new(env).check(s)
}

struct Oracle<'a> {
    env: &'a OracleEnv,
    bound: usize,
    sets: HashMap<PathSet, WordSet>,
    images: HashMap<(Rel, Word), WordSet>,
}

impl<'a> Oracle<'a> {
    fn new(env: &'a OracleEnv) -> Self {
        Oracle {
            env,
            bound: INTERNAL_BOUND,
            sets: HashMap::new(),
            images: HashMap::new(),
        }
    }

    fn cut(&self, set: &WordSet) -> WordSet {
        set.iter().filter(|w| w.len() <= self.bound).cloned().collect()
    }

    fn all_words(&self) -> WordSet {
        let mut out = WordSet::new();
        let mut layer = vec![Word::new()];
        for len in 0..=self.bound {
            out.extend(layer.iter().cloned());
            if len == self.bound {
                break;
            }
            layer = layer
                .iter()
                .flat_map(|w| {
                    self.env.universe.iter().map(move |&s| {
                        let mut x = w.clone();
                        x.push(s);
                        x
                    })
                })
                .collect();
        }
        out
    }

    fn concat(&self, a: &WordSet, b: &WordSet) -> WordSet {
        let mut by_len: Vec<Vec<&Word>> = vec![Vec::new(); self.bound + 1];
        for w in b {
            by_len[w.len()].push(w);
        }
        let mut out = WordSet::new();
        for x in a {
            for bucket in &by_len[..=self.bound - x.len()] {
                for y in bucket {
                    let mut w = x.clone();
                    w.extend_from_slice(y);
                    out.insert(w);
                }
            }
        }
        out
    }

    fn star(&self, a: &WordSet) -> WordSet {
        let mut out: WordSet = [Word::new()].into_iter().collect();
        let mut frontier = out.clone();
        while !frontier.is_empty() {
            let next = self.concat(&frontier, a);
            frontier = next.difference(&out).cloned().collect();
            out.extend(frontier.iter().cloned());
        }
        out
    }

    fn pathset(&mut self, p: &PathSet) -> WordSet {
        if let Some(hit) = self.sets.get(p) {
            return hit.clone();
        }
        let set = match p {
            PathSet::Sym(s) => [vec![*s]].into_iter().collect(),
            PathSet::Class(ss) => ss.iter().map(|&s| vec![s]).collect(),
            PathSet::Zero => WordSet::new(),
            PathSet::One => [Word::new()].into_iter().collect(),
            PathSet::PreState => self.cut(&self.env.pre),
            PathSet::PostState => self.cut(&self.env.post),
            PathSet::Union(a, b) => {
                let mut x = self.pathset(a);
                x.extend(self.pathset(b));
                x
            }
            PathSet::Concat(a, b) => {
                let (x, y) = (self.pathset(a), self.pathset(b));
                self.concat(&x, &y)
            }
            PathSet::Star(a) => {
                let x = self.pathset(a);
                self.star(&x)
            }
            PathSet::Intersect(a, b) => {
                let x = self.pathset(a);
                let y = self.pathset(b);
                x.intersection(&y).cloned().collect()
            }
            PathSet::Complement(a) => {
                let x = self.pathset(a);
                self.all_words().difference(&x).cloned().collect()
            }
            PathSet::Image(q, r) => {
                let mut out = WordSet::new();
                for w in self.pathset(q) {
                    out.extend(self.image_of(r, &w));
                }
                out
            }
        };
        self.sets.insert(p.clone(), set.clone());
        set
    }

    /// `{ q | (word, q) ∈ r }`, cut at the bound.
    fn image_of(&mut self, r: &Rel, word: &[Symbol]) -> WordSet {
        let key = (r.clone(), word.to_vec());
        if let Some(hit) = self.images.get(&key) {
            return hit.clone();
        }
        let out = match r {
            Rel::Cross(a, b) => {
                if self.pathset(a).contains(word) {
                    self.pathset(b)
                } else {
                    WordSet::new()
                }
            }
            Rel::Identity(p) => {
                if self.pathset(p).contains(word) {
                    [word.to_vec()].into_iter().collect()
                } else {
                    WordSet::new()
                }
            }
            Rel::Zero => WordSet::new(),
            Rel::One => {
                if word.is_empty() {
                    [Word::new()].into_iter().collect()
                } else {
                    WordSet::new()
                }
            }
            Rel::Union(a, b) => {
                let mut x = self.image_of(a, word);
                x.extend(self.image_of(b, word));
                x
            }
            Rel::Concat(a, b) => {
                let mut out = WordSet::new();
                for split in 0..=word.len() {
                    let x = self.image_of(a, &word[..split]);
                    if x.is_empty() {
                        continue;
                    }
                    let y = self.image_of(b, &word[split..]);
                    out.extend(self.concat(&x, &y));
                }
                out
            }
            Rel::Compose(a, b) => {
                let mut out = WordSet::new();
                for mid in self.image_of(a, word) {
                    out.extend(self.image_of(b, &mid));
                }
                out
            }
            Rel::Star(a) => self.star_image(a, word),
        };
        self.images.insert(key, out.clone());
        out
    }

    /// Images under `a*` of every suffix of `word`, found by iterating
    /// `S(v) = {ε | v = ε} ∪ ⋃_{v = xy} img_a(x) · S(y)` to a fixpoint.
    fn star_image(&mut self, a: &Rel, word: &[Symbol]) -> WordSet {
        let n = word.len();
        let mut pieces: Vec<Vec<WordSet>> = vec![Vec::new(); n + 1];
        for (i, row) in pieces.iter_mut().enumerate() {
            for j in i..=n {
                row.push(self.image_of(a, &word[i..j]));
            }
        }
        let mut suffix: Vec<WordSet> = vec![WordSet::new(); n + 1];
        suffix[n].insert(Word::new());
        loop {
            let mut changed = false;
            for i in (0..=n).rev() {
                let mut acc = suffix[i].clone();
                for j in i..=n {
                    let head = &pieces[i][j - i];
                    if head.is_empty() || suffix[j].is_empty() {
                        continue;
                    }
                    acc.extend(self.concat(head, &suffix[j]));
                }
                if acc.len() != suffix[i].len() {
                    suffix[i] = acc;
                    changed = true;
                }
            }
            if !changed {
                break;
            }
        }
        std::mem::take(&mut suffix[0])
    }

    fn check(&mut self, s: &Spec) -> bool {
        match s {
            Spec::Equal(a, b) => self.pathset(a) == self.pathset(b),
            Spec::Subset(a, b) => self.pathset(a).is_subset(&self.pathset(b)),
            Spec::And(a, b) => self.check(a) && self.check(b),
            Spec::Or(a, b) => self.check(a) || self.check(b),
            Spec::Not(a) => !self.check(a),
        }
    }
}

/// All pairs `(p, q)` of `r` with `p` drawn from `inputs`.
pub fn oracle_relation_pairs(r: &Rel, env: &OracleEnv, inputs: &WordSet) -> BTreeSet<(Word, Word)> {
    let mut oracle = Oracle::new(env);
    let mut out = BTreeSet::new();
    for p in inputs {
        for q in oracle.image_of(r, p) {
            out.insert((p.clone(), q));
        }
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    fn s(i: u32) -> Symbol {
        Symbol::from_index(i)
    }

    fn env(universe: &[u32]) -> OracleEnv {
        OracleEnv {
            pre: WordSet::new(),
            post: WordSet::new(),
            universe: universe.iter().map(|&i| s(i)).collect(),
        }
    }

    fn ws(list: &[&[u32]]) -> WordSet {
        list.iter().map(|w| w.iter().map(|&i| s(i)).collect()).collect()
    }

    #[test]
    fn bounded_star() {
        let p = PathSet::Sym(s(1)).star();
        assert_eq!(oracle_eval_pathset(&p, &env(&[1]), 2), ws(&[&[], &[1], &[1, 1]]));
    }

    #[test]
    fn complement_of_zero() {
        let p = PathSet::Zero.complement();
        assert_eq!(oracle_eval_pathset(&p, &env(&[1]), 1), ws(&[&[], &[1]]));
    }

    #[test]
    fn image_of_cross() {
        let mut e = env(&[1, 2, 3]);
        e.pre = ws(&[&[1]]);
        let p = PathSet::PreState.image(Rel::cross(
            PathSet::Sym(s(1)),
            PathSet::Sym(s(2)).union(PathSet::Sym(s(3))),
        ));
        assert_eq!(oracle_eval_pathset(&p, &e, 4), ws(&[&[2], &[3]]));
    }

    #[test]
    fn star_of_epsilon_producer_is_bounded() {
        let e = env(&[1]);
        let r = Rel::cross(PathSet::One, PathSet::Sym(s(1))).star();
        let out = oracle_relate(&r, &e, &[]);
        assert_eq!(out.len(), INTERNAL_BOUND + 1);
    }

    #[test]
    fn relation_concat_splits_input() {
        let e = env(&[1, 2, 3, 4]);
        let r = Rel::cross(PathSet::Sym(s(1)), PathSet::Sym(s(2)))
            .concat(Rel::cross(PathSet::Sym(s(3)), PathSet::Sym(s(4))));
        assert_eq!(oracle_relate(&r, &e, &[s(1), s(3)]), ws(&[&[2, 4]]));
        assert!(oracle_relate(&r, &e, &[s(3), s(1)]).is_empty());
    }

    #[test]
    fn pairs_of_composition() {
        let e = env(&[1, 2, 3]);
        let r = Rel::cross(PathSet::Sym(s(1)), PathSet::Sym(s(2)))
            .compose(Rel::cross(PathSet::Sym(s(2)), PathSet::Sym(s(3))));
        let inputs = ws(&[&[], &[1], &[2], &[1, 1]]);
        let pairs = oracle_relation_pairs(&r, &e, &inputs);
        assert_eq!(pairs, [(vec![s(1)], vec![s(3)])].into_iter().collect());
    }
}
