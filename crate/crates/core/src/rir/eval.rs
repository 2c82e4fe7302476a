use std::collections::HashMap;
use std::sync::Arc;

use super::{PathSet, Rel, SnapshotPair, Spec};
use crate::automata::{Alphabet, Fsa, Fst};

/// Automata for the snapshot-independent subterms of a set of expressions.
///
/// Built once per compiled specification and then shared read-only by every
/// per-FEC evaluator.
#[derive(Debug, Default)]
pub struct EvalCache {
    pathsets: HashMap<PathSet, Arc<Fsa>>,
    rels: HashMap<Rel, Arc<Fst>>,
}

impl EvalCache {
    pub fn new() -> Self {
        EvalCache::default()
    }

    /// Evaluates every snapshot-independent subterm of `specs` into a new
    /// cache.
    pub fn prepare<'a>(universe: &Alphabet, specs: impl IntoIterator<Item = &'a Spec>) -> Self {
        let mut ev = Evaluator::new(universe, None);
        for spec in specs {
            ev.warm_spec(spec);
        }
        ev.into_cache()
    }

    pub fn len(&self) -> usize {
        self.pathsets.len() + self.rels.len()
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }
}

/// Evaluates RIR terms to automata against one snapshot pair, memoizing
/// structurally identical subterms.
///
/// Without an environment only snapshot-independent terms may be evaluated;
/// `PreState` and `PostState` then panic.
pub struct Evaluator<'a> {
    universe: &'a Alphabet,
    env: Option<&'a SnapshotPair>,
    shared: Option<&'a EvalCache>,
    local: EvalCache,
}

impl<'a> Evaluator<'a> {
    pub fn new(universe: &'a Alphabet, env: Option<&'a SnapshotPair>) -> Self {
        Evaluator {
            universe,
            env,
            shared: None,
            local: EvalCache::new(),
        }
    }

    pub fn with_cache(mut self, cache: &'a EvalCache) -> Self {
        self.shared = Some(cache);
        self
    }

    pub fn universe(&self) -> &Alphabet {
        self.universe
    }

    pub fn into_cache(self) -> EvalCache {
        self.local
    }

    fn env(&self) -> &'a SnapshotPair {
        self.env.expect("snapshot-dependent term evaluated without a snapshot pair")
    }

    fn lookup_pathset(&self, p: &PathSet) -> Option<Arc<Fsa>> {
        self.shared
            .and_then(|c| c.pathsets.get(p))
            .or_else(|| self.local.pathsets.get(p))
            .cloned()
    }

    fn lookup_rel(&self, r: &Rel) -> Option<Arc<Fst>> {
        self.shared
            .and_then(|c| c.rels.get(r))
            .or_else(|| self.local.rels.get(r))
            .cloned()
    }

    pub fn pathset(&mut self, p: &PathSet) -> Arc<Fsa> {
        if let Some(hit) = self.lookup_pathset(p) {
            return hit;
        }
        let fsa = match p {
            PathSet::Sym(s) => Fsa::symbol(*s),
            PathSet::Class(ss) => Fsa::one_of(ss),
            PathSet::Zero => Fsa::empty(),
            PathSet::One => Fsa::epsilon(),
            PathSet::PreState => self.env().pre.clone(),
            PathSet::PostState => self.env().post.clone(),
            PathSet::Union(a, b) => self.pathset(a).union(&self.pathset(b)),
            PathSet::Concat(a, b) => self.pathset(a).concat(&self.pathset(b)),
            PathSet::Star(a) => self.pathset(a).star(),
            PathSet::Intersect(a, b) => self.pathset(a).intersect(&self.pathset(b)),
            PathSet::Complement(a) => self.pathset(a).complement(self.universe),
            PathSet::Image(q, r) => {
                let input = self.pathset(q);
                self.rel(r).image(&input)
            }
        };
        // Snapshot-independent values are reused across FECs, so they are
        // worth canonicalizing; per-FEC values are used once or twice.
        let fsa = if p.mentions_state() {
            fsa
        } else {
            fsa.minimize()
        };
        let fsa = Arc::new(fsa);
        self.local.pathsets.insert(p.clone(), fsa.clone());
        fsa
    }

    pub fn rel(&mut self, r: &Rel) -> Arc<Fst> {
        if let Some(hit) = self.lookup_rel(r) {
            return hit;
        }
        let fst = match r {
            Rel::Cross(a, b) => Fst::cross(&self.pathset(a), &self.pathset(b)),
            Rel::Identity(p) => Fst::identity(&self.pathset(p)),
            Rel::Zero => Fst::empty(),
            Rel::One => Fst::epsilon(),
            Rel::Union(a, b) => self.rel(a).union(&self.rel(b)),
            Rel::Concat(a, b) => self.rel(a).concat(&self.rel(b)),
            Rel::Star(a) => self.rel(a).star(),
            Rel::Compose(a, b) => self.rel(a).compose(&self.rel(b)),
        };
        let fst = if r.mentions_state() {
            fst
        } else {
            fst.optimize()
        };
        let fst = Arc::new(fst);
        self.local.rels.insert(r.clone(), fst.clone());
        fst
    }

    fn warm_pathset(&mut self, p: &PathSet) {
        if !p.mentions_state() {
            self.pathset(p);
            return;
        }
        match p {
            PathSet::Union(a, b) | PathSet::Concat(a, b) | PathSet::Intersect(a, b) => {
                self.warm_pathset(a);
                self.warm_pathset(b);
            }
            PathSet::Star(a) | PathSet::Complement(a) => self.warm_pathset(a),
            PathSet::Image(q, r) => {
                self.warm_pathset(q);
                self.warm_rel(r);
            }
            _ => {}
        }
    }

    fn warm_rel(&mut self, r: &Rel) {
        if !r.mentions_state() {
            self.rel(r);
            return;
        }
        match r {
            Rel::Cross(a, b) => {
                self.warm_pathset(a);
                self.warm_pathset(b);
            }
            Rel::Identity(p) => self.warm_pathset(p),
            Rel::Union(a, b) | Rel::Concat(a, b) | Rel::Compose(a, b) => {
                self.warm_rel(a);
                self.warm_rel(b);
            }
            Rel::Star(a) => self.warm_rel(a),
            Rel::Zero | Rel::One => {}
        }
    }

    fn warm_spec(&mut self, s: &Spec) {
        match s {
            Spec::Equal(a, b) | Spec::Subset(a, b) => {
                self.warm_pathset(a);
                self.warm_pathset(b);
            }
            Spec::And(a, b) | Spec::Or(a, b) => {
                self.warm_spec(a);
                self.warm_spec(b);
            }
            Spec::Not(a) => self.warm_spec(a),
        }
    }

    pub fn check(&mut self, s: &Spec) -> Verdict {
        let (holds, witnesses) = self.check_polarized(s, true);
        Verdict { holds, witnesses }
    }

    /// Returns the truth value of `s` and the positive-polarity leaf
    /// failures that explain it.
    fn check_polarized(&mut self, s: &Spec, positive: bool) -> (bool, Vec<LeafWitness>) {
        match s {
            Spec::Equal(a, b) | Spec::Subset(a, b) => {
                let left = self.pathset(a);
                let right = self.pathset(b);
                let left_only = left.difference(&right);
                let right_only = right.difference(&left);
                let holds = match s {
                    Spec::Equal(..) => left_only.is_empty() && right_only.is_empty(),
                    _ => left_only.is_empty(),
                };
                if holds || !positive {
                    return (holds, Vec::new());
                }
                let subset = matches!(s, Spec::Subset(..));
                let witness = LeafWitness {
                    leaf: s.clone(),
                    left_only,
                    right_only: if subset { Fsa::empty() } else { right_only },
                };
                (false, vec![witness])
            }
            Spec::And(a, b) | Spec::Or(a, b) => {
                let (ha, wa) = self.check_polarized(a, positive);
                let (hb, wb) = self.check_polarized(b, positive);
                let holds = match s {
                    Spec::And(..) => ha && hb,
                    _ => ha || hb,
                };
                // Keep the reasons of the children whose value agrees with
                // the result.
                let mut reasons = Vec::new();
                if ha == holds {
                    reasons.extend(wa);
                }
                if hb == holds {
                    reasons.extend(wb);
                }
                (holds, reasons)
            }
            Spec::Not(a) => {
                let (h, w) = self.check_polarized(a, !positive);
                (!h, w)
            }
        }
    }
}

/// Why one `Equal` or `Subset` leaf failed.
#[derive(Debug, Clone)]
pub struct LeafWitness {
    pub leaf: Spec,
    /// Words of the left side missing from the right side.
    pub left_only: Fsa,
    /// Words of the right side missing from the left side. Always empty for
    /// a `Subset` leaf.
    pub right_only: Fsa,
}

#[derive(Debug, Clone)]
pub struct Verdict {
    pub holds: bool,
    pub witnesses: Vec<LeafWitness>,
}

pub fn eval_pathset(p: &PathSet, env: &SnapshotPair, universe: &Alphabet) -> Fsa {
    Evaluator::new(universe, Some(env)).pathset(p).as_ref().clone()
}

pub fn eval_rel(r: &Rel, env: &SnapshotPair, universe: &Alphabet) -> Fst {
    Evaluator::new(universe, Some(env)).rel(r).as_ref().clone()
}

pub fn check_spec(s: &Spec, env: &SnapshotPair, universe: &Alphabet) -> Verdict {
    Evaluator::new(universe, Some(env)).check(s)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::automata::{words_up_to, Symbol};

    fn s(i: u32) -> Symbol {
        Symbol::from_index(i)
    }

    fn sym(i: u32) -> PathSet {
        PathSet::Sym(s(i))
    }

    fn words(list: &[&[u32]]) -> std::collections::BTreeSet<Vec<Symbol>> {
        list.iter()
            .map(|w| w.iter().map(|&i| s(i)).collect())
            .collect()
    }

    fn env(pre: &[&[u32]], post: &[&[u32]]) -> SnapshotPair {
        let build = |ws: &[&[u32]]| {
            let ws: Vec<Vec<Symbol>> = ws.iter().map(|w| w.iter().map(|&i| s(i)).collect()).collect();
            Fsa::from_words(ws.iter().map(|w| w.as_slice()))
        };
        SnapshotPair {
            pre: build(pre),
            post: build(post),
        }
    }

    fn universe() -> Alphabet {
        Alphabet::new(vec![s(1), s(2), s(3), s(4)])
    }

    #[test]
    fn prestate_resolves_to_env() {
        let e = env(&[&[1, 2]], &[]);
        let fsa = eval_pathset(&PathSet::PreState, &e, &universe());
        assert_eq!(words_up_to(&fsa, 4), words(&[&[1, 2]]));
    }

    #[test]
    fn image_under_identity_intersects() {
        let e = env(&[&[1], &[2]], &[]);
        let p = PathSet::PreState.image(Rel::identity(sym(1)));
        let fsa = eval_pathset(&p, &e, &universe());
        assert_eq!(words_up_to(&fsa, 3), words(&[&[1]]));
    }

    #[test]
    fn nonempty_runs() {
        let u = Alphabet::new(vec![s(1)]);
        let p = sym(1).star().intersect(PathSet::One.complement());
        let fsa = eval_pathset(&p, &env(&[], &[]), &u);
        assert_eq!(
            words_up_to(&fsa, 5),
            words(&[&[1], &[1, 1], &[1, 1, 1], &[1, 1, 1, 1], &[1, 1, 1, 1, 1]])
        );
    }

    #[test]
    fn relation_concat_pairs_componentwise() {
        let r = Rel::cross(sym(1), sym(2)).concat(Rel::cross(sym(3), sym(4)));
        let fst = eval_rel(&r, &env(&[], &[]), &universe());
        assert_eq!(words_up_to(&fst.relate(&[s(1), s(3)]), 4), words(&[&[2, 4]]));
        assert!(fst.relate(&[s(1)]).is_empty());
        assert!(fst.relate(&[s(3), s(1)]).is_empty());
    }

    #[test]
    fn star_of_identity() {
        let fst = eval_rel(&Rel::identity(sym(1)).star(), &env(&[], &[]), &universe());
        assert_eq!(words_up_to(&fst.relate(&[s(1), s(1)]), 4), words(&[&[1, 1]]));
        assert!(fst.relate(&[s(2)]).is_empty());
    }

    #[test]
    fn equal_states_hold() {
        let e = env(&[&[1, 2]], &[&[1, 2]]);
        let v = check_spec(&Spec::Equal(PathSet::PreState, PathSet::PostState), &e, &universe());
        assert!(v.holds);
        assert!(v.witnesses.is_empty());
    }

    #[test]
    fn empty_subset_holds() {
        let e = env(&[&[1]], &[&[2]]);
        let v = check_spec(&Spec::Subset(PathSet::Zero, PathSet::PreState), &e, &universe());
        assert!(v.holds);
    }

    #[test]
    fn failing_equality_has_directed_witnesses() {
        let e = env(&[&[1, 2]], &[&[1, 3]]);
        let v = check_spec(&Spec::Equal(PathSet::PreState, PathSet::PostState), &e, &universe());
        assert!(!v.holds);
        assert_eq!(v.witnesses.len(), 1);
        assert_eq!(words_up_to(&v.witnesses[0].left_only, 4), words(&[&[1, 2]]));
        assert_eq!(words_up_to(&v.witnesses[0].right_only, 4), words(&[&[1, 3]]));
    }

    #[test]
    fn negated_leaves_carry_no_witnesses() {
        let e = env(&[&[1]], &[&[1]]);
        let v = check_spec(&Spec::Equal(PathSet::PreState, PathSet::PostState).not(), &e, &universe());
        assert!(!v.holds);
        assert!(v.witnesses.is_empty());
    }

    #[test]
    fn double_negation_keeps_witnesses() {
        let e = env(&[&[1]], &[&[2]]);
        let leaf = Spec::Equal(PathSet::PreState, PathSet::PostState);
        let v = check_spec(&leaf.not().not(), &e, &universe());
        assert!(!v.holds);
        assert_eq!(v.witnesses.len(), 1);
    }

    #[test]
    fn satisfied_disjunct_drops_witnesses_of_the_other() {
        let e = env(&[&[1]], &[&[2]]);
        let fails = Spec::Equal(PathSet::PreState, PathSet::PostState);
        let holds = Spec::Subset(PathSet::Zero, PathSet::PostState);
        let v = check_spec(&fails.clone().or(holds), &e, &universe());
        assert!(v.holds);
        assert!(v.witnesses.is_empty());
        let v = check_spec(&fails.clone().and(fails), &e, &universe());
        assert_eq!(v.witnesses.len(), 2);
    }

    #[test]
    fn shared_cache_agrees_with_fresh_evaluation() {
        let u = universe();
        let spec = Spec::Equal(
            PathSet::PreState.image(Rel::identity(sym(1).union(sym(2)).star())),
            PathSet::PostState.image(Rel::identity(sym(1).union(sym(2)).star())),
        );
        let cache = EvalCache::prepare(&u, [&spec]);
        assert!(!cache.is_empty());
        let e = env(&[&[1, 2], &[3]], &[&[1, 2], &[4]]);
        let cached = Evaluator::new(&u, Some(&e)).with_cache(&cache).check(&spec);
        let fresh = check_spec(&spec, &e, &u);
        assert_eq!(cached.holds, fresh.holds);
        assert!(cached.holds);
    }
}
