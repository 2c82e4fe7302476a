use std::fmt::Write;

use serde::Serialize;
use sha2::{Digest, Sha256};

use crate::snapshot::Traffic;

pub fn sha256_hex(bytes: &[u8]) -> String {
    Sha256::digest(bytes).iter().fold(String::with_capacity(64), |mut s, b| {
        let _ = write!(s, "{b:02x}");
        s
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum FecStatus {
    Pass,
    Fail,
    Unmatched,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct FecVerdict {
    pub fec: String,
    pub status: FecStatus,
    /// The spec the FEC was dispatched to.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub spec: Option<String>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct RenderedPaths {
    pub paths: Vec<String>,
    pub truncated: bool,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct Counterexample {
    pub fec: String,
    pub traffic: Traffic,
    pub spec: String,
    pub violated_subspec: String,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub note: Option<String>,
    pub pre_paths: RenderedPaths,
    pub post_paths: RenderedPaths,
    pub expected: RenderedPaths,
    pub observed: RenderedPaths,
    pub missing: RenderedPaths,
    pub unexpected: RenderedPaths,
}

#[derive(Debug, Clone, Default, PartialEq, Eq, Serialize)]
pub struct Totals {
    pub fecs: usize,
    pub pass: usize,
    pub fail: usize,
    pub unmatched: usize,
    pub errors: usize,
    pub skipped: usize,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct SubspecCount {
    pub spec: String,
    pub subspec: String,
    pub violations: usize,
    pub reported: usize,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct InputError {
    #[serde(skip_serializing_if = "Option::is_none")]
    pub line: Option<usize>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub fec: Option<String>,
    pub message: String,
}

#[derive(Debug, Clone, Default, PartialEq, Eq, Serialize)]
pub struct Metadata {
    pub granularity: String,
    pub max_counterexamples: usize,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub spec_sha256: Option<String>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub locations_sha256: Option<String>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub fecs_sha256: Option<String>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum RunVerdict {
    Pass,
    Fail,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct Report {
    pub verdict: RunVerdict,
    /// False when the run was interrupted before every FEC was checked.
    pub complete: bool,
    pub totals: Totals,
    pub subspec_violations: Vec<SubspecCount>,
    pub counterexamples: Vec<Counterexample>,
    pub counterexamples_truncated: bool,
    pub results: Vec<FecVerdict>,
    pub errors: Vec<InputError>,
    pub metadata: Metadata,
}

fn paths_cell(p: &RenderedPaths) -> String {
    let mut s = format!("{{{}}}", p.paths.join(", "));
    if p.truncated {
        s.push_str(" ...");
    }
    s
}

impl Report {
    pub fn to_json(&self) -> String {
        let mut s = serde_json::to_string_pretty(self).expect("serializable");
        s.push('\n');
        s
    }

    /// 0 when everything passed, 1 on violations, 2 on input errors.
    pub fn exit_code(&self) -> i32 {
        if !self.errors.is_empty() {
            2
        } else if self.verdict == RunVerdict::Fail {
            1
        } else {
            0
        }
    }

    /// A plain-text rendering: a summary, then one block per counterexample
    /// with the FEC, its pre- and post-change paths, and the cause.
    pub fn to_text(&self) -> String {
        let t = &self.totals;
        let mut out = String::new();
        let verdict = match self.verdict {
            RunVerdict::Pass => "PASS",
            RunVerdict::Fail => "FAIL",
        };
        let _ = writeln!(
            out,
            "{verdict}: {} FECs, {} pass, {} fail, {} unmatched, {} errors{}",
            t.fecs,
            t.pass,
            t.fail,
            t.unmatched,
            t.errors,
            if self.complete { String::new() } else { format!(", {} skipped (incomplete)", t.skipped) }
        );
        for c in &self.subspec_violations {
            let _ = writeln!(out, "  {}/{}: {} violations ({} shown)", c.spec, c.subspec, c.violations, c.reported);
        }
        for cx in &self.counterexamples {
            let _ = writeln!(out);
            let _ = writeln!(out, "FEC {} (dst {}, ingress {})", cx.fec, cx.traffic.dst_prefix, cx.traffic.ingress);
            let _ = writeln!(out, "  pre-change:  {}", paths_cell(&cx.pre_paths));
            let _ = writeln!(out, "  post-change: {}", paths_cell(&cx.post_paths));
            let note = cx.note.as_deref().map(|n| format!(" [{n}]")).unwrap_or_default();
            let _ = writeln!(out, "  cause: violates {}{note}", cx.violated_subspec);
            let _ = writeln!(out, "    expected {}", paths_cell(&cx.expected));
            let _ = writeln!(out, "    observed {}", paths_cell(&cx.observed));
            if !cx.missing.paths.is_empty() {
                let _ = writeln!(out, "    missing {}", paths_cell(&cx.missing));
            }
            if !cx.unexpected.paths.is_empty() {
                let _ = writeln!(out, "    unexpected {}", paths_cell(&cx.unexpected));
            }
        }
        if self.counterexamples_truncated {
            let _ = writeln!(out, "\n(further counterexamples omitted)");
        }
        for e in &self.errors {
            let at = match (&e.line, &e.fec) {
                (Some(l), Some(f)) => format!("line {l}, FEC {f:?}: "),
                (Some(l), None) => format!("line {l}: "),
                (None, Some(f)) => format!("FEC {f:?}: "),
                (None, None) => String::new(),
            };
            let _ = writeln!(out, "error: {at}{}", e.message);
        }
        out
    }
}
