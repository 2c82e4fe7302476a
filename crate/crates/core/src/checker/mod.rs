//! Per-FEC checking, violation explanation, and report aggregation.

mod report;

pub use report::{
    sha256_hex, Counterexample, FecStatus, FecVerdict, InputError, Metadata, RenderedPaths, Report, RunVerdict,
    SubspecCount, Totals,
};

use std::collections::BTreeMap;
use std::sync::atomic::{AtomicBool, Ordering};

use rayon::prelude::*;

use crate::automata::{enumerate_shortest, Alphabet, Fsa, PathList, Symbol, SymbolKind, SymbolTable};
use crate::compiler::{compile, ArmInfo, CompiledSpec};
use crate::frontend::{match_predicate, LocationDb, PrefixPredicate, Program};
use crate::rir::{EvalCache, Evaluator, PathSet, Rel, SnapshotPair, Spec};
use crate::snapshot::{project_to_fsa, Fec, FecError, Granularity};

/// One spec of a program: a guarded spec, or the default when `predicate`
/// is `None`.
#[derive(Debug, Clone)]
pub struct CompiledEntry {
    pub name: String,
    pub predicate: Option<PrefixPredicate>,
    pub spec: CompiledSpec,
}

/// A program compiled at one granularity, with the snapshot-independent
/// automata evaluated once and shared by all FEC checks.
pub struct CompiledProgram {
    pub granularity: Granularity,
    /// The program's symbol table extended with the `any` markers.
    pub table: SymbolTable,
    pub universe: Alphabet,
    pub entries: Vec<CompiledEntry>,
    /// Substitutes each marker by the path set it stands for.
    expansion: Option<Rel>,
    cache: EvalCache,
}

/// Terms the explainer evaluates, gathered so that their snapshot-free
/// parts can be cached up front.
fn explain_terms(spec: &CompiledSpec, expansion: Option<&Rel>) -> Vec<Spec> {
    let expand = |p: PathSet| match expansion {
        Some(e) => p.image(e.clone()),
        None => p,
    };
    let mut terms = vec![spec.top.clone()];
    let mut sides = vec![(spec.rpre.clone(), spec.rpost.clone())];
    for arm in &spec.subspec_index {
        terms.push(Spec::Subset(PathSet::PreState.intersect(arm.zone.clone()), PathSet::Zero));
        terms.push(Spec::Subset(PathSet::PostState.intersect(arm.zone.clone()), PathSet::Zero));
        sides.push((arm.rpre.clone(), arm.rpost.clone()));
    }
    for (rpre, rpost) in sides {
        let pre = PathSet::PreState.image(rpre);
        let post = PathSet::PostState.image(rpost);
        terms.push(Spec::Equal(expand(pre.clone()), expand(post.clone())));
        terms.push(Spec::Equal(pre, post));
    }
    terms
}

impl CompiledProgram {
    pub fn new(program: &Program, granularity: Granularity) -> Self {
        let mut table = program.table.clone();
        let mut entries: Vec<CompiledEntry> = program
            .guarded
            .iter()
            .map(|g| CompiledEntry {
                name: g.name.clone(),
                predicate: Some(g.predicate.clone()),
                spec: compile(&g.spec, &mut table),
            })
            .collect();
        if let Some(d) = &program.default {
            entries.push(CompiledEntry {
                name: d.name.clone(),
                predicate: None,
                spec: compile(&d.spec, &mut table),
            });
        }
        let universe = table.universe();
        let markers: Vec<_> = entries.iter().flat_map(|e| e.spec.markers.iter()).collect();
        let expansion = (!markers.is_empty()).then(|| {
            let mut r = Rel::identity(PathSet::class(universe.symbols().to_vec()));
            for m in markers {
                r = r.union(Rel::cross(PathSet::Sym(m.symbol), m.pathset.clone()));
            }
            r.star()
        });
        let terms: Vec<Spec> = entries
            .iter()
            .flat_map(|e| explain_terms(&e.spec, expansion.as_ref()))
            .collect();
        let cache = EvalCache::prepare(&universe, &terms);
        CompiledProgram {
            granularity,
            table,
            universe,
            entries,
            expansion,
            cache,
        }
    }

    /// The first guarded entry whose predicate accepts the traffic, else the
    /// default, else `None`.
    pub fn dispatch(&self, fec: &Fec) -> Result<Option<&CompiledEntry>, String> {
        for entry in &self.entries {
            match &entry.predicate {
                Some(p) => {
                    if match_predicate(p, &fec.traffic)? {
                        return Ok(Some(entry));
                    }
                }
                None => return Ok(Some(entry)),
            }
        }
        Ok(None)
    }

    /// PreState and PostState of `fec` at the program's granularity.
    pub fn env(&self, fec: &Fec, db: &LocationDb) -> Result<SnapshotPair, String> {
        let pre = project_to_fsa(&fec.pre, db, self.granularity, &self.table).map_err(|e| format!("pre.{e}"))?;
        let post = project_to_fsa(&fec.post, db, self.granularity, &self.table).map_err(|e| format!("post.{e}"))?;
        Ok(SnapshotPair { pre, post })
    }

    pub fn evaluator<'a>(&'a self, env: &'a SnapshotPair) -> Evaluator<'a> {
        Evaluator::new(&self.universe, Some(env)).with_cache(&self.cache)
    }

    /// Renders a path; markers print as the source text they stand for.
    pub fn render(&self, word: &[Symbol]) -> String {
        let parts: Vec<String> = word
            .iter()
            .map(|&s| match self.table.kind(s) {
                SymbolKind::Marker => {
                    let source = self
                        .entries
                        .iter()
                        .flat_map(|e| &e.spec.markers)
                        .find(|m| m.symbol == s)
                        .map_or("?", |m| m.source.as_str());
                    format!("({source})")
                }
                _ => self.table.name(s).to_string(),
            })
            .collect();
        parts.join(" ")
    }

    pub fn render_list(&self, list: &PathList) -> RenderedPaths {
        RenderedPaths {
            paths: list.paths.iter().map(|w| self.render(w)).collect(),
            truncated: list.truncated,
        }
    }

    fn expand(&self, p: PathSet) -> PathSet {
        match &self.expansion {
            Some(e) => p.image(e.clone()),
            None => p,
        }
    }
}

/// Whether the snapshot pair satisfies the compiled spec.
pub fn check_fec(spec: &CompiledSpec, ev: &mut Evaluator<'_>) -> bool {
    ev.check(&spec.top).holds
}

/// Paths of `PreState ▷ Rpre` missing from `PostState ▷ Rpost`, and the
/// reverse, `limit` shortest each.
pub fn diff_languages(rpre: &Rel, rpost: &Rel, ev: &mut Evaluator<'_>, limit: usize) -> (PathList, PathList) {
    let expected = ev.pathset(&PathSet::PreState.image(rpre.clone()));
    let observed = ev.pathset(&PathSet::PostState.image(rpost.clone()));
    (
        enumerate_shortest(&expected.difference(&observed), limit),
        enumerate_shortest(&observed.difference(&expected), limit),
    )
}

/// Why one FEC fails its spec, at symbol level.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Explanation {
    /// The violated `else` arm, or the spec name when no arm applies.
    pub subspec: String,
    pub note: Option<String>,
    /// The arm's pre-image with markers substituted back.
    pub expected: PathList,
    /// The arm's post-image with markers substituted back.
    pub observed: PathList,
    /// Marker-level difference `expected \ observed`.
    pub missing: PathList,
    /// Marker-level difference `observed \ expected`.
    pub unexpected: PathList,
}

fn arm_fails(arm: &ArmInfo, ev: &mut Evaluator<'_>) -> bool {
    let pre = ev.pathset(&PathSet::PreState.image(arm.rpre.clone()));
    let post = ev.pathset(&PathSet::PostState.image(arm.rpost.clone()));
    !pre.equivalent(&post)
}

fn zone_meets(zone: &PathSet, state: PathSet, ev: &mut Evaluator<'_>) -> bool {
    !ev.pathset(&state.intersect(zone.clone())).is_empty()
}

/// Picks the violated arm: the first failing arm whose zone holds a
/// pre-path, else one holding a post-path. Without either, the whole spec
/// is reported with a `no-zone-match` note.
pub fn explain(
    program: &CompiledProgram,
    entry: &CompiledEntry,
    ev: &mut Evaluator<'_>,
    limit: usize,
) -> Explanation {
    let spec = &entry.spec;
    let mut chosen = None;
    for state in [PathSet::PreState, PathSet::PostState] {
        chosen = spec
            .subspec_index
            .iter()
            .find(|arm| zone_meets(&arm.zone, state.clone(), ev) && arm_fails(arm, ev));
        if chosen.is_some() {
            break;
        }
    }
    let (subspec, note, rpre, rpost) = match chosen {
        Some(arm) => (arm.label.clone(), None, &arm.rpre, &arm.rpost),
        None => (entry.name.clone(), Some("no-zone-match".to_string()), &spec.rpre, &spec.rpost),
    };
    let (missing, unexpected) = diff_languages(rpre, rpost, ev, limit);
    let expected = ev.pathset(&program.expand(PathSet::PreState.image(rpre.clone())));
    let observed = ev.pathset(&program.expand(PathSet::PostState.image(rpost.clone())));
    Explanation {
        subspec,
        note,
        expected: enumerate_shortest(&expected, limit),
        observed: enumerate_shortest(&observed, limit),
        missing,
        unexpected,
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct CheckOptions {
    pub workers: usize,
    /// Paths listed per FEC per direction.
    pub max_counterexamples: usize,
    /// Counterexamples kept per violated sub-spec.
    pub per_subspec_limit: usize,
    /// Counterexamples kept overall.
    pub global_limit: usize,
}

impl Default for CheckOptions {
    fn default() -> Self {
        CheckOptions {
            workers: 1,
            max_counterexamples: 100,
            per_subspec_limit: 100,
            global_limit: 1000,
        }
    }
}

enum Outcome {
    Verdict(FecVerdict, Option<Counterexample>),
    Error(InputError),
    Skipped,
}

fn check_one(program: &CompiledProgram, db: &LocationDb, fec: &Fec, limit: usize) -> Result<(FecVerdict, Option<Counterexample>), String> {
    let Some(entry) = program.dispatch(fec)? else {
        return Ok((
            FecVerdict {
                fec: fec.id.clone(),
                status: FecStatus::Unmatched,
                spec: None,
            },
            None,
        ));
    };
    let env = program.env(fec, db)?;
    let mut ev = program.evaluator(&env);
    let holds = check_fec(&entry.spec, &mut ev);
    let verdict = FecVerdict {
        fec: fec.id.clone(),
        status: if holds { FecStatus::Pass } else { FecStatus::Fail },
        spec: Some(entry.name.clone()),
    };
    if holds {
        return Ok((verdict, None));
    }
    let ex = explain(program, entry, &mut ev, limit);
    let paths = |fsa: &Fsa| program.render_list(&enumerate_shortest(fsa, limit));
    let cx = Counterexample {
        fec: fec.id.clone(),
        traffic: fec.traffic.clone(),
        spec: entry.name.clone(),
        violated_subspec: ex.subspec,
        note: ex.note,
        pre_paths: paths(&env.pre),
        post_paths: paths(&env.post),
        expected: program.render_list(&ex.expected),
        observed: program.render_list(&ex.observed),
        missing: program.render_list(&ex.missing),
        unexpected: program.render_list(&ex.unexpected),
    };
    Ok((verdict, Some(cx)))
}

/// Checks every FEC in parallel and aggregates a report sorted by FEC id.
///
/// Load errors become report entries. Once `cancel` is set, remaining FECs
/// are skipped and the report is marked incomplete.
pub fn check_all(
    program: &CompiledProgram,
    db: &LocationDb,
    fecs: Vec<Result<Fec, FecError>>,
    options: &CheckOptions,
    cancel: Option<&AtomicBool>,
) -> Report {
    let limit = options.max_counterexamples.max(1);
    let run = || -> Vec<Outcome> {
        fecs.par_iter()
            .map(|item| {
                if cancel.is_some_and(|c| c.load(Ordering::Relaxed)) {
                    return Outcome::Skipped;
                }
                match item {
                    Err(e) => Outcome::Error(InputError {
                        line: Some(e.line),
                        fec: e.fec.clone(),
                        message: e.message.clone(),
                    }),
                    Ok(fec) => match check_one(program, db, fec, limit) {
                        Ok((v, cx)) => Outcome::Verdict(v, cx),
                        Err(message) => Outcome::Error(InputError {
                            line: None,
                            fec: Some(fec.id.clone()),
                            message,
                        }),
                    },
                }
            })
            .collect()
    };
    let outcomes = match rayon::ThreadPoolBuilder::new().num_threads(options.workers.max(1)).build() {
        Ok(pool) => pool.install(run),
        Err(_) => run(),
    };

    let mut totals = Totals::default();
    let mut results = Vec::new();
    let mut failures = Vec::new();
    let mut errors = Vec::new();
    for outcome in outcomes {
        match outcome {
            Outcome::Verdict(v, cx) => {
                match v.status {
                    FecStatus::Pass => totals.pass += 1,
                    FecStatus::Fail => totals.fail += 1,
                    FecStatus::Unmatched => totals.unmatched += 1,
                }
                results.push(v);
                failures.extend(cx);
            }
            Outcome::Error(e) => errors.push(e),
            Outcome::Skipped => totals.skipped += 1,
        }
    }
    totals.errors = errors.len();
    totals.fecs = fecs.len();
    results.sort_by(|a, b| a.fec.cmp(&b.fec));
    failures.sort_by(|a, b| a.fec.cmp(&b.fec));
    errors.sort_by(|a, b| (&a.fec, a.line).cmp(&(&b.fec, b.line)));

    let mut counts: BTreeMap<(String, String), SubspecCount> = BTreeMap::new();
    let mut counterexamples = Vec::new();
    let mut counterexamples_truncated = false;
    for cx in failures {
        let count = counts
            .entry((cx.spec.clone(), cx.violated_subspec.clone()))
            .or_insert_with(|| SubspecCount {
                spec: cx.spec.clone(),
                subspec: cx.violated_subspec.clone(),
                violations: 0,
                reported: 0,
            });
        count.violations += 1;
        if count.reported < options.per_subspec_limit && counterexamples.len() < options.global_limit {
            count.reported += 1;
            counterexamples.push(cx);
        } else {
            counterexamples_truncated = true;
        }
    }

    Report {
        verdict: if totals.fail == 0 { RunVerdict::Pass } else { RunVerdict::Fail },
        complete: totals.skipped == 0,
        totals,
        subspec_violations: counts.into_values().collect(),
        counterexamples,
        counterexamples_truncated,
        results,
        errors,
        metadata: Metadata {
            granularity: program.granularity.to_string(),
            max_counterexamples: limit,
            ..Metadata::default()
        },
    }
}
