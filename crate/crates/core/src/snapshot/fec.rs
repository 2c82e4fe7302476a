use std::collections::HashSet;
use std::io::BufRead;

use serde::{Deserialize, Serialize};
use serde_json::Value;
use thiserror::Error;

use super::graph::ForwardingGraph;
use crate::frontend::{parse_prefix, LocationDb};

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, rename_all = "camelCase")]
pub struct Traffic {
    pub dst_prefix: String,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub src_prefix: Option<String>,
    pub ingress: String,
}

/// A flow equivalence class: traffic sharing its forwarding paths in both
/// snapshots.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Fec {
    pub id: String,
    pub traffic: Traffic,
    pub pre: ForwardingGraph,
    pub post: ForwardingGraph,
}

impl Fec {
    pub fn validate(&self, db: Option<&LocationDb>) -> Result<(), String> {
        if self.id.is_empty() {
            return Err("id: must not be empty".into());
        }
        parse_prefix(&self.traffic.dst_prefix).map_err(|e| format!("traffic.dstPrefix: {e}"))?;
        if let Some(src) = &self.traffic.src_prefix {
            parse_prefix(src).map_err(|e| format!("traffic.srcPrefix: {e}"))?;
        }
        self.pre.validate(db).map_err(|e| format!("pre.{e}"))?;
        self.post.validate(db).map_err(|e| format!("post.{e}"))?;
        Ok(())
    }

    /// One NDJSON line in canonical field order.
    pub fn to_json_line(&self) -> String {
        serde_json::to_string(self).expect("serializable")
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
#[error("line {line}{}: {message}", fec.as_ref().map(|id| format!(", FEC {id:?}")).unwrap_or_default())]
pub struct FecError {
    pub line: usize,
    pub fec: Option<String>,
    pub message: String,
}

/// Parses and validates one record.
pub fn parse_fec(text: &str, line: usize, db: Option<&LocationDb>) -> Result<Fec, FecError> {
    let err = |fec: Option<String>, message: String| FecError { line, fec, message };
    let value: Value = serde_json::from_str(text).map_err(|e| err(None, format!("malformed JSON: {e}")))?;
    let id = value.get("id").and_then(Value::as_str).map(str::to_string);
    let fec: Fec = serde_json::from_value(value).map_err(|e| err(id.clone(), format!("malformed record: {e}")))?;
    fec.validate(db).map_err(|m| err(id, m))?;
    Ok(fec)
}

/// Streams FEC records from newline-delimited JSON. Blank lines are skipped;
/// a repeated id is an error for the repeat.
pub struct FecReader<'a, R> {
    input: R,
    db: Option<&'a LocationDb>,
    line: usize,
    seen: HashSet<String>,
    buf: String,
}

impl<'a, R: BufRead> FecReader<'a, R> {
    pub fn new(input: R, db: Option<&'a LocationDb>) -> Self {
        FecReader {
            input,
            db,
            line: 0,
            seen: HashSet::new(),
            buf: String::new(),
        }
    }
}

impl<R: BufRead> Iterator for FecReader<'_, R> {
    type Item = Result<Fec, FecError>;

    fn next(&mut self) -> Option<Self::Item> {
        loop {
            self.buf.clear();
            self.line += 1;
            match self.input.read_line(&mut self.buf) {
                Ok(0) => return None,
                Ok(_) => {}
                Err(e) => {
                    return Some(Err(FecError {
                        line: self.line,
                        fec: None,
                        message: format!("read error: {e}"),
                    }))
                }
            }
            let text = self.buf.trim();
            if text.is_empty() {
                continue;
            }
            let result = parse_fec(text, self.line, self.db).and_then(|fec| {
                if self.seen.insert(fec.id.clone()) {
                    Ok(fec)
                } else {
                    Err(FecError {
                        line: self.line,
                        fec: Some(fec.id.clone()),
                        message: "duplicate FEC id".into(),
                    })
                }
            });
            return Some(result);
        }
    }
}

pub fn load_fecs<R: BufRead>(input: R, db: Option<&LocationDb>) -> FecReader<'_, R> {
    FecReader::new(input, db)
}
