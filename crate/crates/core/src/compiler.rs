//! Lowering of surface specs to RIR: the pre- and post-relations, the zone,
//! and the top-level equation `PreState ▷ Rpre = PostState ▷ Rpost`.

use std::fmt::Write;

use crate::automata::{Symbol, SymbolTable};
use crate::frontend::{ModifierAst, RegexAst, SpecAst};
use crate::rir::{Notation, PathSet, Rel, Spec};

/// The marker standing for one `any(P)` occurrence.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct MarkerInfo {
    pub symbol: Symbol,
    pub pathset: PathSet,
    /// How `P` was written in the spec source.
    pub source: String,
}

/// One arm of the top-level `else` chain.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ArmInfo {
    /// The definition name of the arm, or `arm<k>` (1-based) if unnamed.
    pub label: String,
    /// The arm's own zone.
    pub zone: PathSet,
    /// The arm's relations restricted to paths outside every earlier zone.
    pub rpre: Rel,
    pub rpost: Rel,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CompiledSpec {
    pub top: Spec,
    pub rpre: Rel,
    pub rpost: Rel,
    pub zone: PathSet,
    pub subspec_index: Vec<ArmInfo>,
    pub markers: Vec<MarkerInfo>,
}

/// Lowers a location regex. `.` is any location, never drop.
pub fn regex_to_pathset(r: &RegexAst, table: &SymbolTable) -> PathSet {
    match r {
        RegexAst::Loc(ss) => PathSet::class(ss.clone()),
        RegexAst::Dot => PathSet::class(table.locations().symbols().to_vec()),
        RegexAst::Union(a, b) => regex_to_pathset(a, table).union(regex_to_pathset(b, table)),
        RegexAst::Concat(a, b) => regex_to_pathset(a, table).concat(regex_to_pathset(b, table)),
        RegexAst::Star(a) => regex_to_pathset(a, table).star(),
        RegexAst::Named(_, a) => regex_to_pathset(a, table),
    }
}

/// The zone of a spec: where its modifiers constrain paths.
pub fn zone_of(s: &SpecAst, table: &SymbolTable) -> PathSet {
    match s {
        SpecAst::Atomic(d, m) => {
            let d = regex_to_pathset(d, table);
            let r = |x: &RegexAst| regex_to_pathset(x, table);
            match m {
                ModifierAst::Preserve | ModifierAst::Remove(_) => d,
                ModifierAst::Add(p) | ModifierAst::Any(p) => d.union(r(p)),
                ModifierAst::Replace(_, p2) => d.union(r(p2)),
                ModifierAst::Drop => d.union(PathSet::Sym(table.drop_symbol())),
            }
        }
        SpecAst::Concat(a, b) => zone_of(a, table).concat(zone_of(b, table)),
        SpecAst::Else(a, b) => zone_of(a, table).union(zone_of(b, table)),
        SpecAst::Named(_, a) => zone_of(a, table),
    }
}

fn any_arguments<'s>(s: &'s SpecAst, out: &mut Vec<&'s RegexAst>) {
    match s {
        SpecAst::Atomic(_, ModifierAst::Any(p)) => out.push(p),
        SpecAst::Atomic(..) => {}
        SpecAst::Concat(a, b) | SpecAst::Else(a, b) => {
            any_arguments(a, out);
            any_arguments(b, out);
        }
        SpecAst::Named(_, a) => any_arguments(a, out),
    }
}

fn source_text(r: &RegexAst, table: &SymbolTable) -> String {
    match r {
        RegexAst::Named(text, _) => text.clone(),
        _ => r.display(table),
    }
}

struct Lowering<'a> {
    table: &'a SymbolTable,
    markers: &'a [MarkerInfo],
    /// Index of the next `any` occurrence in traversal order.
    next: usize,
}

impl Lowering<'_> {
    fn pathset(&self, r: &RegexAst) -> PathSet {
        regex_to_pathset(r, self.table)
    }

    /// Returns `(Rpre, Rpost, Z)`.
    fn lower(&mut self, s: &SpecAst) -> (Rel, Rel, PathSet) {
        match s {
            SpecAst::Atomic(d, m) => {
                let d = self.pathset(d);
                match m {
                    ModifierAst::Preserve => (Rel::identity(d.clone()), Rel::identity(d.clone()), d),
                    ModifierAst::Add(p) => {
                        let z = d.clone().union(self.pathset(p));
                        let rpre = Rel::identity(z.clone()).union(Rel::cross(d, self.pathset(p)));
                        (rpre, Rel::identity(z.clone()), z)
                    }
                    ModifierAst::Remove(p) => {
                        let rpre = Rel::identity(d.clone().minus(self.pathset(p)));
                        (rpre, Rel::identity(d.clone()), d)
                    }
                    ModifierAst::Replace(p1, p2) => {
                        let (p1, p2) = (self.pathset(p1), self.pathset(p2));
                        let z = d.clone().union(p2.clone());
                        let kept = Rel::identity(z.clone().minus(p1.clone()));
                        let rpre = kept.union(Rel::cross(d.intersect(p1), p2));
                        (rpre, Rel::identity(z.clone()), z)
                    }
                    ModifierAst::Drop => {
                        let drop = PathSet::Sym(self.table.drop_symbol());
                        let z = d.union(drop.clone());
                        (Rel::cross(z.clone(), drop), Rel::identity(z.clone()), z)
                    }
                    ModifierAst::Any(p) => {
                        let marker = &self.markers[self.next];
                        self.next += 1;
                        let p = self.pathset(p);
                        let hash = PathSet::Sym(marker.symbol);
                        let z = d.clone().union(p.clone());
                        let rpre = Rel::cross(z.clone(), hash.clone());
                        let rpost = Rel::cross(p.clone(), hash).union(Rel::identity(d.minus(p)));
                        (rpre, rpost, z)
                    }
                }
            }
            SpecAst::Concat(a, b) => {
                let (pre_a, post_a, za) = self.lower(a);
                let (pre_b, post_b, zb) = self.lower(b);
                (pre_a.concat(pre_b), post_a.concat(post_b), za.concat(zb))
            }
            SpecAst::Else(a, b) => {
                let (pre_a, post_a, za) = self.lower(a);
                let (pre_b, post_b, zb) = self.lower(b);
                let outside = Rel::identity(za.clone().complement());
                (
                    pre_a.union(outside.clone().compose(pre_b)),
                    post_a.union(outside.compose(post_b)),
                    za.union(zb),
                )
            }
            SpecAst::Named(_, a) => self.lower(a),
        }
    }
}

/// Compiles `s`, allocating a fresh marker in `table` for each `any`.
pub fn compile(s: &SpecAst, table: &mut SymbolTable) -> CompiledSpec {
    let mut args = Vec::new();
    any_arguments(s, &mut args);
    let markers: Vec<MarkerInfo> = args
        .into_iter()
        .map(|p| MarkerInfo {
            symbol: table.fresh_marker(),
            pathset: regex_to_pathset(p, table),
            source: source_text(p, table),
        })
        .collect();
    let table: &SymbolTable = table;

    let mut lowering = Lowering {
        table,
        markers: &markers,
        next: 0,
    };
    let (rpre, rpost, zone) = lowering.lower(s);

    let mut subspec_index = Vec::new();
    let mut earlier: Option<PathSet> = None;
    let mut offset = 0;
    for (k, (name, arm)) in s.else_arms().into_iter().enumerate() {
        let mut lowering = Lowering {
            table,
            markers: &markers,
            next: offset,
        };
        let (mut arm_pre, mut arm_post, arm_zone) = lowering.lower(arm);
        offset = lowering.next;
        if let Some(z) = &earlier {
            let outside = Rel::identity(z.clone().complement());
            arm_pre = outside.clone().compose(arm_pre);
            arm_post = outside.compose(arm_post);
        }
        earlier = Some(match earlier {
            None => arm_zone.clone(),
            Some(z) => z.union(arm_zone.clone()),
        });
        subspec_index.push(ArmInfo {
            label: name.map_or_else(|| format!("arm{}", k + 1), str::to_string),
            zone: arm_zone,
            rpre: arm_pre,
            rpost: arm_post,
        });
    }

    let top = Spec::Equal(
        PathSet::PreState.image(rpre.clone()),
        PathSet::PostState.image(rpost.clone()),
    );
    CompiledSpec {
        top,
        rpre,
        rpost,
        zone,
        subspec_index,
        markers,
    }
}

impl CompiledSpec {
    /// The compiled terms in RIR notation, one `key = term` per line. Every
    /// right-hand side parses back with the notation parsers.
    pub fn emit_rir(&self, table: &SymbolTable) -> String {
        let n = Notation::new(table);
        let mut out = String::new();
        let _ = writeln!(out, "Rpre = {}", n.rel(&self.rpre));
        let _ = writeln!(out, "Rpost = {}", n.rel(&self.rpost));
        let _ = writeln!(out, "Z = {}", n.pathset(&self.zone));
        let _ = writeln!(out, "top = {}", n.spec(&self.top));
        for m in &self.markers {
            let _ = writeln!(out, "{} = {}", table.name(m.symbol), n.pathset(&m.pathset));
        }
        for arm in &self.subspec_index {
            let _ = writeln!(out, "{}.Z = {}", arm.label, n.pathset(&arm.zone));
            let _ = writeln!(out, "{}.Rpre = {}", arm.label, n.rel(&arm.rpre));
            let _ = writeln!(out, "{}.Rpost = {}", arm.label, n.rel(&arm.rpost));
        }
        out
    }
}
