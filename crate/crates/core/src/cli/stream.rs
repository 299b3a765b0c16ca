//! Line-oriented update streams.
//!
//! ```text
//! # optional comments anywhere
//! 5 2        <- vertex count, optional degree hint
//! + 0 1
//! - 0 1
//! ```

use std::collections::BTreeSet;
use std::fmt::Write as _;

use thiserror::Error;

use crate::graph_core::Vertex;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Update {
    Insert(Vertex, Vertex),
    Delete(Vertex, Vertex),
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct UpdateStream {
    pub n: usize,
    pub delta_hint: Option<usize>,
    pub updates: Vec<Update>,
}

#[derive(Debug, Error, PartialEq, Eq)]
pub enum StreamError {
    #[error("line {line}: {msg}")]
    Parse { line: usize, msg: String },
    #[error("stream has no header line")]
    MissingHeader,
}

fn bad(line: usize, msg: impl Into<String>) -> StreamError {
    StreamError::Parse { line, msg: msg.into() }
}

impl UpdateStream {
    /// Parses and replays the stream, rejecting anything a simple graph
    /// could not absorb.
    pub fn parse(text: &str) -> Result<Self, StreamError> {
        let mut header = None;
        let mut updates = Vec::new();
        let mut present = BTreeSet::new();
        for (i, raw) in text.lines().enumerate() {
            let line = i + 1;
            let body = raw.split('#').next().unwrap_or("").trim();
            if body.is_empty() {
                continue;
            }
            let fields: Vec<&str> = body.split_whitespace().collect();
            let Some((n, _)) = header else {
                let nums: Result<Vec<usize>, _> = fields.iter().map(|f| f.parse::<usize>()).collect();
                match nums.as_deref() {
                    Ok([n]) => header = Some((*n, None)),
                    Ok([n, d]) => header = Some((*n, Some(*d))),
                    _ => return Err(bad(line, format!("expected header `n [delta_max]`, got `{body}`"))),
                }
                continue;
            };
            let [op, u, v] = fields[..] else {
                return Err(bad(line, format!("expected `+ u v` or `- u v`, got `{body}`")));
            };
            let parse = |f: &str| f.parse::<usize>().map_err(|_| bad(line, format!("bad vertex `{f}`")));
            let (u, v) = (parse(u)?, parse(v)?);
            if u >= n || v >= n {
                return Err(bad(line, format!("vertex out of range 0..{n}")));
            }
            if u == v {
                return Err(bad(line, format!("self-loop at {u}")));
            }
            let key = (u.min(v), u.max(v));
            match op {
                "+" if !present.insert(key) => return Err(bad(line, format!("edge {u}-{v} already present"))),
                "+" => updates.push(Update::Insert(u, v)),
                "-" if !present.remove(&key) => return Err(bad(line, format!("edge {u}-{v} absent"))),
                "-" => updates.push(Update::Delete(u, v)),
                _ => return Err(bad(line, format!("unknown operation `{op}`"))),
            }
        }
        let (n, delta_hint) = header.ok_or(StreamError::MissingHeader)?;
        Ok(UpdateStream { n, delta_hint, updates })
    }

    /// Largest degree reached at any point of the replay.
    pub fn peak_degree(&self) -> usize {
        let mut deg = vec![0usize; self.n];
        let mut peak = 0;
        for u in &self.updates {
            match *u {
                Update::Insert(a, b) => {
                    deg[a] += 1;
                    deg[b] += 1;
                    peak = peak.max(deg[a]).max(deg[b]);
                }
                Update::Delete(a, b) => {
                    deg[a] -= 1;
                    deg[b] -= 1;
                }
            }
        }
        peak
    }

    pub fn render(&self, comment: &str) -> String {
        let mut out = String::new();
        for line in comment.lines() {
            let _ = writeln!(out, "# {line}");
        }
        match self.delta_hint {
            Some(d) => writeln!(out, "{} {d}", self.n),
            None => writeln!(out, "{}", self.n),
        }
        .expect("string write");
        for u in &self.updates {
            match u {
                Update::Insert(a, b) => writeln!(out, "+ {a} {b}"),
                Update::Delete(a, b) => writeln!(out, "- {a} {b}"),
            }
            .expect("string write");
        }
        out
    }
}
