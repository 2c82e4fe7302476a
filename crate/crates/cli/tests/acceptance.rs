//! Acceptance checks, one PASS/FAIL line per criterion.
//!
//! Run with `cargo test -p rela-cli --test acceptance`.

use std::collections::BTreeSet;
use std::fs;
use std::panic::{self, AssertUnwindSafe};
use std::path::{Path, PathBuf};
use std::process::Command;
use std::time::{Duration, Instant};

use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde_json::Value;

use rela_cli::{execute, render, Format, RunConfig};
use rela_core::automata::{enumerate_shortest, words_up_to, Alphabet, Fsa, Symbol};
use rela_core::checker::{check_all, check_fec, diff_languages, CheckOptions, CompiledProgram, FecStatus, RunVerdict};
use rela_core::frontend::{parse_program, LocationDb, LocationRecord};
use rela_core::rir::oracle::{oracle_eval_pathset, OracleEnv};
use rela_core::rir::{eval_pathset, PathSet, Rel, SnapshotPair};
use rela_core::snapshot::{Fec, ForwardingGraph, Granularity, Traffic};
use rela_core::synth::{mutate_one_edge, random_dag, scale_spec, synthetic_db, unchanged_fec, DagShape, DbShape};

type Word = Vec<Symbol>;
type Lang = BTreeSet<Word>;
type Outcome = Result<String, String>;

fn ensure(cond: bool, msg: impl FnOnce() -> String) -> Result<(), String> {
    if cond {
        Ok(())
    } else {
        Err(msg())
    }
}

fn fixture(name: &str) -> PathBuf {
    PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("../../fixtures/migration").join(name)
}

// ---------------------------------------------------------------------------
// 1. Oracle equivalence

const TREES: usize = 1000;
const MAX_HEIGHT: u32 = 4;

fn random_word(rng: &mut ChaCha8Rng, alphabet: &[Symbol], max_len: usize) -> Word {
    let len = rng.gen_range(0..=max_len);
    (0..len).map(|_| *alphabet.choose(rng).unwrap()).collect()
}

fn random_lang(rng: &mut ChaCha8Rng, alphabet: &[Symbol]) -> Lang {
    let n = rng.gen_range(0..=5);
    (0..n).map(|_| random_word(rng, alphabet, 4)).collect()
}

fn leaf_pathset(rng: &mut ChaCha8Rng, alphabet: &[Symbol]) -> PathSet {
    match rng.gen_range(0..6) {
        0 => PathSet::Sym(*alphabet.choose(rng).unwrap()),
        1 => {
            let k = rng.gen_range(1..=alphabet.len());
            PathSet::class(alphabet.choose_multiple(rng, k).copied().collect())
        }
        2 => PathSet::Zero,
        3 => PathSet::One,
        4 => PathSet::PreState,
        _ => PathSet::PostState,
    }
}

/// A path-set tree of height at most `h`, counting relation nodes.
fn random_pathset(rng: &mut ChaCha8Rng, alphabet: &[Symbol], h: u32) -> PathSet {
    if h <= 1 || rng.gen_bool(0.25) {
        return leaf_pathset(rng, alphabet);
    }
    let sub = |rng: &mut ChaCha8Rng| Box::new(random_pathset(rng, alphabet, h - 1));
    match rng.gen_range(0..6) {
        0 => PathSet::Union(sub(rng), sub(rng)),
        1 => PathSet::Concat(sub(rng), sub(rng)),
        2 => PathSet::Star(sub(rng)),
        3 => PathSet::Intersect(sub(rng), sub(rng)),
        4 => PathSet::Complement(sub(rng)),
        _ => PathSet::Image(sub(rng), Box::new(random_rel(rng, alphabet, h - 1))),
    }
}

fn random_rel(rng: &mut ChaCha8Rng, alphabet: &[Symbol], h: u32) -> Rel {
    if h <= 1 {
        return if rng.gen_bool(0.5) { Rel::Zero } else { Rel::One };
    }
    if h == 2 || rng.gen_bool(0.4) {
        let sub = |rng: &mut ChaCha8Rng| Box::new(random_pathset(rng, alphabet, h - 1));
        return match rng.gen_range(0..4) {
            0 | 1 => Rel::Cross(sub(rng), sub(rng)),
            2 => Rel::Identity(sub(rng)),
            _ => Rel::One,
        };
    }
    let sub = |rng: &mut ChaCha8Rng| Box::new(random_rel(rng, alphabet, h - 1));
    match rng.gen_range(0..4) {
        0 => Rel::Union(sub(rng), sub(rng)),
        1 => Rel::Concat(sub(rng), sub(rng)),
        2 => Rel::Star(sub(rng)),
        _ => Rel::Compose(sub(rng), sub(rng)),
    }
}

fn oracle_equivalence() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(0x5eed_0001);
    let mut nonempty = 0;
    for i in 0..TREES {
        let k = rng.gen_range(1..=3u32);
        let alphabet: Vec<Symbol> = (1..=k).map(Symbol::from_index).collect();
        let (m, n) = (random_lang(&mut rng, &alphabet), random_lang(&mut rng, &alphabet));
        let p = random_pathset(&mut rng, &alphabet, MAX_HEIGHT);
        let env = SnapshotPair {
            pre: Fsa::from_words(m.iter().map(Vec::as_slice)),
            post: Fsa::from_words(n.iter().map(Vec::as_slice)),
        };
        let got = words_up_to(&eval_pathset(&p, &env, &Alphabet::new(alphabet.clone())), 6);
        let oracle = OracleEnv {
            pre: m,
            post: n,
            universe: alphabet,
        };
        let want = oracle_eval_pathset(&p, &oracle, 6);
        ensure(got == want, || {
            format!("tree {i} differs: {p:?}\n  evaluator {got:?}\n  oracle    {want:?}")
        })?;
        nonempty += usize::from(!got.is_empty());
    }
    Ok(format!("{TREES} trees agree up to length 6 ({nonempty} non-empty)"))
}

// ---------------------------------------------------------------------------
// 2. Compilation rules against an explicit-set model

/// The intended meaning of each construct, written per input word.
#[derive(Clone)]
enum Model {
    Preserve(Lang),
    Add(Lang, Lang),
    Remove(Lang, Lang),
    Replace(Lang, Lang, Lang),
    Drop(Lang, Word),
    Any(Lang, Lang, Word),
    Concat(Box<Model>, Box<Model>),
    Else(Box<Model>, Box<Model>),
}

fn one(w: &[Symbol]) -> Lang {
    [w.to_vec()].into_iter().collect()
}

fn concat_langs(a: &Lang, b: &Lang) -> Lang {
    a.iter()
        .flat_map(|x| b.iter().map(move |y| [x.as_slice(), y.as_slice()].concat()))
        .collect()
}

impl Model {
    fn zone(&self) -> Lang {
        match self {
            Model::Preserve(d) | Model::Remove(d, _) => d.clone(),
            Model::Add(d, p) | Model::Replace(d, _, p) | Model::Any(d, p, _) => d.union(p).cloned().collect(),
            Model::Drop(d, drop) => d.union(&one(drop)).cloned().collect(),
            Model::Concat(a, b) => concat_langs(&a.zone(), &b.zone()),
            Model::Else(a, b) => a.zone().union(&b.zone()).cloned().collect(),
        }
    }

    fn pre(&self, w: &[Symbol]) -> Lang {
        let mut out = Lang::new();
        match self {
            Model::Preserve(d) => {
                if d.contains(w) {
                    out.insert(w.to_vec());
                }
            }
            Model::Add(d, p) => {
                if d.contains(w) || p.contains(w) {
                    out.insert(w.to_vec());
                }
                if d.contains(w) {
                    out.extend(p.iter().cloned());
                }
            }
            Model::Remove(d, p) => {
                if d.contains(w) && !p.contains(w) {
                    out.insert(w.to_vec());
                }
            }
            Model::Replace(d, p1, p2) => {
                if (d.contains(w) || p2.contains(w)) && !p1.contains(w) {
                    out.insert(w.to_vec());
                }
                if d.contains(w) && p1.contains(w) {
                    out.extend(p2.iter().cloned());
                }
            }
            Model::Drop(d, drop) => {
                if d.contains(w) || w == drop.as_slice() {
                    out.insert(drop.clone());
                }
            }
            Model::Any(d, p, marker) => {
                if d.contains(w) || p.contains(w) {
                    out.insert(marker.clone());
                }
            }
            Model::Concat(a, b) => {
                for i in 0..=w.len() {
                    out.extend(concat_langs(&a.pre(&w[..i]), &b.pre(&w[i..])));
                }
            }
            Model::Else(a, b) => {
                out = a.pre(w);
                if !a.zone().contains(w) {
                    out.extend(b.pre(w));
                }
            }
        }
        out
    }

    fn post(&self, w: &[Symbol]) -> Lang {
        let mut out = Lang::new();
        match self {
            Model::Preserve(d) | Model::Remove(d, _) => {
                if d.contains(w) {
                    out.insert(w.to_vec());
                }
            }
            Model::Add(..) | Model::Replace(..) | Model::Drop(..) => {
                if self.zone().contains(w) {
                    out.insert(w.to_vec());
                }
            }
            Model::Any(d, p, marker) => {
                if p.contains(w) {
                    out.insert(marker.clone());
                } else if d.contains(w) {
                    out.insert(w.to_vec());
                }
            }
            Model::Concat(a, b) => {
                for i in 0..=w.len() {
                    out.extend(concat_langs(&a.post(&w[..i]), &b.post(&w[i..])));
                }
            }
            Model::Else(a, b) => {
                out = a.post(w);
                if !a.zone().contains(w) {
                    out.extend(b.post(w));
                }
            }
        }
        out
    }

    fn image(&self, set: &Lang, pre: bool) -> Lang {
        set.iter()
            .flat_map(|w| if pre { self.pre(w) } else { self.post(w) })
            .collect()
    }
}

/// Interface-level database with locations `a`, `b`, `c`.
fn abc_db() -> LocationDb {
    LocationDb::new(
        ["a", "b", "c"]
            .iter()
            .map(|n| LocationRecord::new(n, &format!("dev-{n}"), &format!("grp-{n}")))
            .collect(),
    )
    .unwrap()
}

struct RuleCase {
    name: &'static str,
    source: &'static str,
    /// Builds the model once the program's symbols are known.
    model: fn(&dyn Fn(&str) -> Lang, &[Word]) -> Model,
}

fn rule_cases() -> Vec<RuleCase> {
    vec![
        RuleCase {
            name: "preserve",
            source: "spec s := { a b | a c | b : preserve; }",
            model: |l, _| Model::Preserve(l("a b, a c, b")),
        },
        RuleCase {
            name: "add",
            source: "spec s := { a b | b : add(a c | c); }",
            model: |l, _| Model::Add(l("a b, b"), l("a c, c")),
        },
        RuleCase {
            name: "remove",
            source: "spec s := { a b | a c | b : remove(a c | c); }",
            model: |l, _| Model::Remove(l("a b, a c, b"), l("a c, c")),
        },
        RuleCase {
            name: "replace",
            source: "spec s := { a b | a c | b : replace(a b | c, b c | c); }",
            model: |l, _| Model::Replace(l("a b, a c, b"), l("a b, c"), l("b c, c")),
        },
        RuleCase {
            name: "drop",
            source: "spec s := { a b | b : drop; }",
            model: |l, _| Model::Drop(l("a b, b"), l("drop").into_iter().next().unwrap()),
        },
        RuleCase {
            name: "any",
            source: "spec s := { a b | a c | b : any(a c | c); }",
            model: |l, m| Model::Any(l("a b, a c, b"), l("a c, c"), m[0].clone()),
        },
        RuleCase {
            name: "concat",
            source: "spec s := { a : preserve; b | c : add(c b); }",
            model: |l, _| {
                Model::Concat(
                    Box::new(Model::Preserve(l("a"))),
                    Box::new(Model::Add(l("b, c"), l("c b"))),
                )
            },
        },
        RuleCase {
            name: "else",
            source: "spec first := { a b | b : remove(b); }\n\
                     spec second := { a b | a c | c : preserve; }\n\
                     spec s := first else second",
            model: |l, _| {
                Model::Else(
                    Box::new(Model::Remove(l("a b, b"), l("b"))),
                    Box::new(Model::Preserve(l("a b, a c, c"))),
                )
            },
        },
    ]
}

fn word_pool(abc: &[Symbol], drop: Symbol) -> Vec<Word> {
    let mut pool = vec![Vec::new()];
    for len in 1..=3 {
        let mut layer: Vec<Word> = vec![Vec::new()];
        for _ in 0..len {
            layer = layer
                .iter()
                .flat_map(|w| abc.iter().map(move |&s| [w.as_slice(), &[s]].concat()))
                .collect();
        }
        pool.extend(layer);
    }
    pool.push(vec![drop]);
    pool.push(vec![abc[0], drop]);
    pool.push(vec![abc[0], abc[1], drop]);
    pool
}

fn finite_words(fsa: &Fsa) -> Result<Lang, String> {
    let listed = enumerate_shortest(fsa, 100_000);
    ensure(!listed.truncated, || "language unexpectedly infinite".to_string())?;
    Ok(listed.as_set())
}

fn compilation_rules() -> Outcome {
    let db = abc_db();
    let mut rng = ChaCha8Rng::seed_from_u64(0x5eed_0002);
    let mut tally = Vec::new();
    for case in rule_cases() {
        let program = parse_program(case.source, &db, Granularity::Interface).map_err(|e| e.to_string())?;
        let compiled = CompiledProgram::new(&program, Granularity::Interface);
        let entry = &compiled.entries[0];
        let table = &compiled.table;
        let lang = |text: &str| -> Lang {
            text.split(',')
                .map(|w| w.split_whitespace().map(|n| table.get(n).unwrap()).collect())
                .collect()
        };
        let markers: Vec<Word> = entry.spec.markers.iter().map(|m| vec![m.symbol]).collect();
        let model = (case.model)(&lang, &markers);
        let abc: Vec<Symbol> = ["a", "b", "c"].iter().map(|n| table.get(n).unwrap()).collect();
        let pool = word_pool(&abc, table.drop_symbol());

        let empty = SnapshotPair {
            pre: Fsa::empty(),
            post: Fsa::empty(),
        };
        let zone = finite_words(&compiled.evaluator(&empty).pathset(&entry.spec.zone))?;
        ensure(zone == model.zone(), || format!("{}: zone {zone:?} != {:?}", case.name, model.zone()))?;

        let (mut holds_n, mut fails_n) = (0, 0);
        for trial in 0..150 {
            let pick = |rng: &mut ChaCha8Rng| -> Lang {
                let k = rng.gen_range(0..=5);
                pool.choose_multiple(rng, k).cloned().collect()
            };
            let pre = pick(&mut rng);
            let post = if trial % 2 == 0 {
                // A post state built to satisfy the intent: the model's
                // pre-image inside the zone, plus unrelated paths outside.
                let want = model.image(&pre, true);
                let zone = model.zone();
                let mut post: Lang = pick(&mut rng).into_iter().filter(|w| !zone.contains(w)).collect();
                post.extend(want.into_iter().filter(|w| !w.iter().any(|s| markers.contains(&vec![*s]))));
                post
            } else {
                pick(&mut rng)
            };
            let env = SnapshotPair {
                pre: Fsa::from_words(pre.iter().map(Vec::as_slice)),
                post: Fsa::from_words(post.iter().map(Vec::as_slice)),
            };
            let mut ev = compiled.evaluator(&env);
            let got_pre = finite_words(&ev.pathset(&PathSet::PreState.image(entry.spec.rpre.clone())))?;
            let got_post = finite_words(&ev.pathset(&PathSet::PostState.image(entry.spec.rpost.clone())))?;
            let (want_pre, want_post) = (model.image(&pre, true), model.image(&post, false));
            let describe = || format!("{}: pre {pre:?} post {post:?}", case.name);
            ensure(got_pre == want_pre, || format!("{} Rpre image {got_pre:?} != {want_pre:?}", describe()))?;
            ensure(got_post == want_post, || format!("{} Rpost image {got_post:?} != {want_post:?}", describe()))?;
            let holds = check_fec(&entry.spec, &mut ev);
            ensure(holds == (want_pre == want_post), || format!("{} verdict {holds}", describe()))?;
            if case.name == "preserve" {
                let d = model.zone();
                let restricted = |s: &Lang| -> Lang { s.intersection(&d).cloned().collect() };
                ensure(holds == (restricted(&pre) == restricted(&post)), || {
                    format!("{} preserve is not PreState∩D = PostState∩D", describe())
                })?;
            }
            if holds {
                holds_n += 1;
            } else {
                fails_n += 1;
            }
        }
        ensure(holds_n > 0 && fails_n > 0, || {
            format!("{}: degenerate sample ({holds_n} hold, {fails_n} fail)", case.name)
        })?;
        tally.push(format!("{} {holds_n}/{fails_n}", case.name));
    }
    Ok(format!("hold/fail per rule: {}", tally.join(", ")))
}

// ---------------------------------------------------------------------------
// 3. The worked scenario, end to end through the binary

fn run_binary(args: &[&str]) -> Result<(i32, String), String> {
    let out = Command::new(env!("CARGO_BIN_EXE_rela"))
        .args(args)
        .env("RUST_LOG", "warn")
        .output()
        .map_err(|e| e.to_string())?;
    Ok((out.status.code().unwrap_or(-1), String::from_utf8_lossy(&out.stdout).into_owned()))
}

fn migration_scenario() -> Outcome {
    let spec = fixture("change.rela");
    let locs = fixture("locations.json");
    let args = |fecs: &Path| -> Vec<String> {
        vec![
            "check".into(),
            "--spec".into(),
            spec.display().to_string(),
            "--locations".into(),
            locs.display().to_string(),
            "--fecs".into(),
            fecs.display().to_string(),
            "--granularity".into(),
            "group".into(),
        ]
    };
    let v2 = args(&fixture("fecs-v2.ndjson"));
    let (code, stdout) = run_binary(&v2.iter().map(String::as_str).collect::<Vec<_>>())?;
    ensure(code == 1, || format!("v2 exit status {code}, want 1"))?;
    let report: Value = serde_json::from_str(&stdout).map_err(|e| e.to_string())?;
    let cxs = report["counterexamples"].as_array().ok_or("no counterexamples")?;
    let strings = |v: &Value| -> Vec<String> {
        v["paths"]
            .as_array()
            .map(|a| a.iter().map(|p| p.as_str().unwrap_or_default().to_string()).collect())
            .unwrap_or_default()
    };
    let e2e = cxs
        .iter()
        .find(|c| c["violated_subspec"] == "e2e")
        .ok_or("no e2e violation")?;
    ensure(strings(&e2e["expected"]) == ["x1 A1 A2 A3 D1 y1"], || format!("e2e expected {}", e2e["expected"]))?;
    ensure(strings(&e2e["observed"]) == ["x1 A1 A2 A3 B3 D1 y1"], || format!("e2e observed {}", e2e["observed"]))?;
    let nochange = cxs
        .iter()
        .find(|c| c["violated_subspec"] == "nochange")
        .ok_or("no nochange violation")?;
    ensure(cxs.len() == 2, || format!("{} counterexamples, want 2", cxs.len()))?;

    let fin = args(&fixture("fecs-final.ndjson"));
    let (code, _) = run_binary(&fin.iter().map(String::as_str).collect::<Vec<_>>())?;
    ensure(code == 0, || format!("final exit status {code}, want 0"))?;
    Ok(format!(
        "v2 exits 1 (e2e on {}, nochange on {}); final exits 0",
        e2e["fec"], nochange["fec"]
    ))
}

// ---------------------------------------------------------------------------
// 4. No-change soundness

fn parse_rendered(program: &CompiledProgram, path: &str) -> Result<Word, String> {
    path.split_whitespace()
        .map(|n| program.table.get(n).ok_or_else(|| format!("unknown location {n:?} in {path:?}")))
        .collect()
}

fn no_change_soundness() -> Outcome {
    let db = synthetic_db(DbShape::default());
    let program = parse_program("spec all := { .* : preserve; }", &db, Granularity::Device).map_err(|e| e.to_string())?;
    let compiled = CompiledProgram::new(&program, Granularity::Device);
    let mut rng = ChaCha8Rng::seed_from_u64(0x5eed_0004);
    let mut fecs: Vec<Fec> = (0..200)
        .map(|i| unchanged_fec(&format!("F{i:03}"), &db, DagShape::default(), &mut rng))
        .collect();
    let options = CheckOptions::default();

    let report = check_all(&compiled, &db, fecs.iter().cloned().map(Ok).collect(), &options, None);
    ensure(report.totals.pass == 200 && report.verdict == RunVerdict::Pass, || {
        format!("unchanged FECs: {:?}", report.totals)
    })?;

    let victim = rng.gen_range(0..fecs.len());
    let changed = mutate_one_edge(&mut fecs[victim].post, &db, Granularity::Device, &compiled.table, &mut rng);
    ensure(changed, || "no mutation changes the path set".to_string())?;
    ensure(fecs[victim].post.edges.len() == fecs[victim].pre.edges.len() + 1, || "mutation is not one edge".into())?;

    let report = check_all(&compiled, &db, fecs.iter().cloned().map(Ok).collect(), &options, None);
    let failing: Vec<_> = report.results.iter().filter(|r| r.status == FecStatus::Fail).collect();
    ensure(failing.len() == 1 && failing[0].fec == fecs[victim].id, || {
        format!("failing FECs {failing:?}, want only {}", fecs[victim].id)
    })?;
    let cx = &report.counterexamples[0];
    ensure(!cx.unexpected.paths.is_empty(), || "counterexample lists no new path".into())?;
    let env = compiled.env(&fecs[victim], &db)?;
    for path in &cx.unexpected.paths {
        let w = parse_rendered(&compiled, path)?;
        ensure(env.post.accepts(&w) && !env.pre.accepts(&w), || format!("unexpected path {path:?} fails membership"))?;
    }
    for path in &cx.missing.paths {
        let w = parse_rendered(&compiled, path)?;
        ensure(env.pre.accepts(&w) && !env.post.accepts(&w), || format!("missing path {path:?} fails membership"))?;
    }
    Ok(format!(
        "200/200 unchanged pass; after one edge only {} fails ({} new path(s) verified)",
        fecs[victim].id,
        cx.unexpected.paths.len()
    ))
}

// ---------------------------------------------------------------------------
// 5. Synthetic scale

const SCALE_FECS: usize = 10_000;

fn scale_workload(n: usize, seed: u64) -> Result<(LocationDb, CompiledProgram, Vec<Fec>), String> {
    let db = synthetic_db(DbShape::default());
    let program = parse_program(&scale_spec(), &db, Granularity::Device).map_err(|e| e.to_string())?;
    let compiled = CompiledProgram::new(&program, Granularity::Device);
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut fecs = Vec::with_capacity(n);
    for i in 0..n {
        let mut fec = unchanged_fec(&format!("F{i:05}"), &db, DagShape::default(), &mut rng);
        if i % 10 == 0 {
            mutate_one_edge(&mut fec.post, &db, Granularity::Device, &compiled.table, &mut rng);
        }
        fecs.push(fec);
    }
    Ok((db, compiled, fecs))
}

fn synthetic_scale() -> Outcome {
    let (db, compiled, fecs) = scale_workload(SCALE_FECS, 0x5eed_0005)?;
    ensure(fecs.iter().all(|f| f.pre.nodes.len() <= 50 && f.post.edges.len() <= 201), || "DAG limits".into())?;
    let cores = std::thread::available_parallelism().map_or(1, |n| n.get());
    let mut reports = Vec::new();
    let mut timings = Vec::new();
    for workers in [8, 1] {
        let options = CheckOptions {
            workers,
            ..CheckOptions::default()
        };
        let started = Instant::now();
        let report = check_all(&compiled, &db, fecs.iter().cloned().map(Ok).collect(), &options, None);
        timings.push(format!("{workers} worker(s) {:.1?}", started.elapsed()));
        ensure(report.totals.fecs == SCALE_FECS && report.complete, || format!("{:?}", report.totals))?;
        reports.push(report.to_json());
    }
    ensure(reports[0] == reports[1], || "reports differ across worker counts".into())?;
    let report: Value = serde_json::from_str(&reports[0]).map_err(|e| e.to_string())?;
    Ok(format!(
        "{SCALE_FECS} FECs on {cores} core(s): {}; totals {}",
        timings.join(", "),
        report["totals"]
    ))
}

// ---------------------------------------------------------------------------
// 6. Counterexample exhaustiveness

fn exhaustiveness() -> Outcome {
    let db = abc_db();
    let preserve = parse_program("spec s := { (a | b | c)* : preserve; }", &db, Granularity::Interface)
        .map_err(|e| e.to_string())?;
    let compiled = CompiledProgram::new(&preserve, Granularity::Interface);
    let table = &compiled.table;
    let abc: Vec<Symbol> = ["a", "b", "c"].iter().map(|n| table.get(n).unwrap()).collect();
    let pool = word_pool(&abc, table.drop_symbol());
    let words: Vec<Word> = pool.into_iter().filter(|w| !w.contains(&table.drop_symbol())).collect();
    let mut long: Vec<Word> = Vec::new();
    for w in &words {
        for &s in &abc {
            long.push([w.as_slice(), &[s, s]].concat());
        }
    }
    let entry = &compiled.entries[0];

    let mut rng = ChaCha8Rng::seed_from_u64(0x5eed_0006);
    let mut cases = 0;
    for (pre_n, post_n) in [(10, 7), (40, 30), (100, 0), (0, 100), (70, 70)] {
        let pre: Lang = long.choose_multiple(&mut rng, pre_n).cloned().collect();
        let post: Lang = long.choose_multiple(&mut rng, post_n).cloned().collect();
        let missing: Lang = pre.difference(&post).cloned().collect();
        let unexpected: Lang = post.difference(&pre).cloned().collect();
        ensure(missing.len() <= 100 && unexpected.len() <= 100, || "fixture too large".into())?;
        let env = SnapshotPair {
            pre: Fsa::from_words(pre.iter().map(Vec::as_slice)),
            post: Fsa::from_words(post.iter().map(Vec::as_slice)),
        };
        let mut ev = compiled.evaluator(&env);
        let (got_missing, got_unexpected) = diff_languages(&entry.spec.rpre, &entry.spec.rpost, &mut ev, 100);
        ensure(got_missing.as_set() == missing && !got_missing.truncated, || {
            format!("missing for ({pre_n}, {post_n}) is not the full difference")
        })?;
        ensure(got_unexpected.as_set() == unexpected && !got_unexpected.truncated, || {
            format!("unexpected for ({pre_n}, {post_n}) is not the full difference")
        })?;
        cases += 1;
    }

    // `add(b*)` relates every `a` path to infinitely many others.
    let infinite = parse_program("spec s := { a : add(b*); }", &db, Granularity::Interface).map_err(|e| e.to_string())?;
    let compiled = CompiledProgram::new(&infinite, Granularity::Interface);
    let entry = &compiled.entries[0];
    let fec = Fec {
        id: "F".into(),
        traffic: Traffic {
            dst_prefix: "10.0.0.0/24".into(),
            src_prefix: None,
            ingress: "a".into(),
        },
        pre: ForwardingGraph::chain(&["a"]),
        post: ForwardingGraph::chain(&["a"]),
    };
    let env = compiled.env(&fec, &db)?;
    let mut ev = compiled.evaluator(&env);
    let (missing, unexpected) = diff_languages(&entry.spec.rpre, &entry.spec.rpost, &mut ev, 100);
    ensure(missing.truncated && missing.len() == 100 && unexpected.is_empty(), || {
        format!("infinite difference listed {} paths, truncated={}", missing.len(), missing.truncated)
    })?;
    let expected = ev.pathset(&PathSet::PreState.image(entry.spec.rpre.clone()));
    let observed = ev.pathset(&PathSet::PostState.image(entry.spec.rpost.clone()));
    for w in &missing.paths {
        ensure(expected.accepts(w) && !observed.accepts(w), || format!("{w:?} fails membership"))?;
    }
    let report = check_all(&compiled, &db, vec![Ok(fec)], &CheckOptions::default(), None);
    let cx = report.counterexamples.first().ok_or("no counterexample")?;
    ensure(cx.missing.truncated && cx.missing.paths.len() == 100, || "report does not flag truncation".into())?;
    Ok(format!("{cases} finite fixtures exact; infinite difference truncated at 100 verified paths"))
}

// ---------------------------------------------------------------------------
// 7. Determinism

fn determinism() -> Outcome {
    let dir = tempfile::tempdir().map_err(|e| e.to_string())?;
    let (db, _, mut fecs) = scale_workload(600, 0x5eed_0007)?;
    // Make some FECs hit the drop and shift arms with changed paths.
    let mut rng = ChaCha8Rng::seed_from_u64(0x5eed_0077);
    for fec in fecs.iter_mut().skip(3).step_by(17) {
        fec.post = random_dag(&db, DagShape::default(), &mut rng);
    }
    let mut lines: Vec<String> = fecs.iter().map(Fec::to_json_line).collect();
    lines.insert(250, "{\"id\": \"broken\"".to_string());
    let spec = dir.path().join("spec.rela");
    let locations = dir.path().join("locations.json");
    let fec_path = dir.path().join("fecs.ndjson");
    fs::write(&spec, scale_spec()).map_err(|e| e.to_string())?;
    fs::write(&locations, db.to_json()).map_err(|e| e.to_string())?;
    fs::write(&fec_path, lines.join("\n") + "\n").map_err(|e| e.to_string())?;

    let mut outputs = Vec::new();
    for workers in [1u16, 8, 1, 8] {
        let mut config = RunConfig::new(&spec, &locations, &fec_path);
        config.workers = Some(workers);
        let report = execute(&config).map_err(|e| e.to_string())?;
        outputs.push((render(&report, Format::Json), render(&report, Format::Text)));
    }
    ensure(outputs.iter().all(|o| *o == outputs[0]), || "reports differ between runs".into())?;

    let out = |name: &str| dir.path().join(name);
    for (workers, name) in [("1", "w1.json"), ("8", "w8.json")] {
        let target = out(name);
        let (code, _) = run_binary(&[
            "check",
            "--spec",
            spec.to_str().unwrap(),
            "--locations",
            locations.to_str().unwrap(),
            "--fecs",
            fec_path.to_str().unwrap(),
            "--workers",
            workers,
            "--output",
            target.to_str().unwrap(),
        ])?;
        ensure(code == 2, || format!("exit status {code}, want 2 for the malformed line"))?;
    }
    let (a, b) = (fs::read(out("w1.json")), fs::read(out("w8.json")));
    let (a, b) = (a.map_err(|e| e.to_string())?, b.map_err(|e| e.to_string())?);
    ensure(a == b && a == outputs[0].0.as_bytes(), || "binary reports differ".into())?;
    Ok(format!("4 library runs and 2 binary runs byte-identical ({} bytes)", a.len()))
}

// ---------------------------------------------------------------------------

struct Criterion {
    id: u8,
    name: &'static str,
    limit: Option<Duration>,
    run: fn() -> Outcome,
}

fn main() {
    let criteria = [
        Criterion {
            id: 1,
            name: "oracle equivalence",
            limit: Some(Duration::from_secs(60)),
            run: oracle_equivalence,
        },
        Criterion {
            id: 2,
            name: "compilation rules",
            limit: Some(Duration::from_secs(10)),
            run: compilation_rules,
        },
        Criterion {
            id: 3,
            name: "worked scenario",
            limit: Some(Duration::from_secs(10)),
            run: migration_scenario,
        },
        Criterion {
            id: 4,
            name: "no-change soundness",
            limit: Some(Duration::from_secs(30)),
            run: no_change_soundness,
        },
        Criterion {
            id: 5,
            name: "synthetic scale",
            limit: Some(Duration::from_secs(600)),
            run: synthetic_scale,
        },
        Criterion {
            id: 6,
            name: "counterexample exhaustiveness",
            limit: Some(Duration::from_secs(10)),
            run: exhaustiveness,
        },
        Criterion {
            id: 7,
            name: "determinism",
            limit: None,
            run: determinism,
        },
    ];
    let only: Option<u8> = std::env::var("RELA_ACCEPTANCE_ONLY").ok().and_then(|v| v.parse().ok());
    panic::set_hook(Box::new(|_| {}));
    let mut failed = 0;
    for c in criteria.iter().filter(|c| only.map_or(true, |id| id == c.id)) {
        let started = Instant::now();
        let outcome = panic::catch_unwind(AssertUnwindSafe(c.run)).unwrap_or_else(|p| {
            let msg = p
                .downcast_ref::<String>()
                .cloned()
                .or_else(|| p.downcast_ref::<&str>().map(|s| s.to_string()))
                .unwrap_or_default();
            Err(format!("panicked: {msg}"))
        });
        let elapsed = started.elapsed();
        let outcome = match (outcome, c.limit) {
            (Ok(_), Some(limit)) if elapsed > limit => Err(format!("took {elapsed:.1?}, limit {limit:?}")),
            (o, _) => o,
        };
        let limit = c.limit.map(|l| format!(", limit {l:?}")).unwrap_or_default();
        match outcome {
            Ok(detail) => println!("criterion {} {}: PASS [{elapsed:.2?}{limit}] {detail}", c.id, c.name),
            Err(why) => {
                failed += 1;
                println!("criterion {} {}: FAIL [{elapsed:.2?}{limit}] {why}", c.id, c.name);
            }
        }
    }
    if failed > 0 {
        std::process::exit(1);
    }
}
