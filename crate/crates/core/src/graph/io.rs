//! The `graphcode-v1` file format.
//!
//! ```text
//! graphcode-v1 n=<n> field=gf(q)[:<polymask>]
//! erased=<i:j>,<i:j>,...        (optional)
//! <row 0: 1 value>
//! <row 1: 2 values>
//! ...
//! ```
//!
//! Row `i` lists the labels of `(i, 0), ..., (i, i)`. Erased positions are
//! written as 0. A JSON mirror with keys `version`, `n`, `field`, `erased`
//! and `rows` is also accepted.

use serde::{Deserialize, Serialize};

use super::{EdgeId, LabeledGraph};
use crate::error::{Error, Result};
use crate::field::Field;

pub const MAGIC: &str = "graphcode-v1";

#[derive(Serialize, Deserialize)]
struct JsonGraph {
    version: String,
    n: usize,
    field: String,
    #[serde(default)]
    erased: Vec<String>,
    rows: Vec<Vec<u32>>,
}

fn parse_err(line: usize, msg: impl Into<String>) -> Error {
    Error::Parse { line, msg: msg.into() }
}

fn parse_edge(s: &str, line: usize) -> Result<EdgeId> {
    s.parse().map_err(|_| parse_err(line, format!("bad edge {s:?}")))
}

impl LabeledGraph {
    pub fn to_text(&self) -> String {
        let mut out = format!("{MAGIC} n={} field={}\n", self.n, self.field);
        let erased = self.erased_edges();
        if !erased.is_empty() {
            let list: Vec<String> = erased.iter().map(|e| e.to_string()).collect();
            out.push_str("erased=");
            out.push_str(&list.join(","));
            out.push('\n');
        }
        for i in 0..self.n {
            let row: Vec<String> = (0..=i).map(|j| self.visible(EdgeId { i, j }).to_string()).collect();
            out.push_str(&row.join(" "));
            out.push('\n');
        }
        out
    }

    pub fn from_text(s: &str) -> Result<Self> {
        let mut lines = s.lines().enumerate().map(|(k, l)| (k + 1, l.trim()));
        let (_, header) = lines.next().ok_or_else(|| parse_err(1, "empty input"))?;
        let mut tokens = header.split_whitespace();
        if tokens.next() != Some(MAGIC) {
            return Err(parse_err(1, format!("expected {MAGIC} header")));
        }
        let (mut n, mut field) = (None, None);
        for tok in tokens {
            match tok.split_once('=') {
                Some(("n", v)) => n = Some(v.parse::<usize>().map_err(|_| parse_err(1, "bad n"))?),
                Some(("field", v)) => field = Some(v.parse::<Field>()?),
                _ => return Err(parse_err(1, format!("unknown header token {tok:?}"))),
            }
        }
        let n = n.ok_or_else(|| parse_err(1, "missing n"))?;
        let field = field.ok_or_else(|| parse_err(1, "missing field"))?;
        let mut g = LabeledGraph::zero(n, &field)?;

        let mut rows = lines.filter(|(_, l)| !l.is_empty()).peekable();
        let mut erased = Vec::new();
        if let Some((ln, list)) = rows.peek().and_then(|&(ln, l)| Some((ln, l.strip_prefix("erased=")?))) {
            for item in list.split(',').filter(|s| !s.trim().is_empty()) {
                erased.push(parse_edge(item, ln)?);
            }
            rows.next();
        }
        for i in 0..n {
            let (ln, line) = rows.next().ok_or_else(|| parse_err(0, format!("missing row {i}")))?;
            let vals: Vec<&str> = line.split_whitespace().collect();
            if vals.len() != i + 1 {
                return Err(parse_err(ln, format!("row {i} has {} entries, expected {}", vals.len(), i + 1)));
            }
            for (j, v) in vals.into_iter().enumerate() {
                let v: u32 = v.parse().map_err(|_| parse_err(ln, format!("bad value {v:?}")))?;
                g.set_label(EdgeId { i, j }, v).map_err(|e| parse_err(ln, e.to_string()))?;
            }
        }
        if let Some((ln, _)) = rows.next() {
            return Err(parse_err(ln, "trailing content"));
        }
        for e in erased {
            g.mark_erased(e)?;
        }
        Ok(g)
    }

    pub fn to_json(&self) -> String {
        let doc = JsonGraph {
            version: MAGIC.into(),
            n: self.n,
            field: self.field.to_string(),
            erased: self.erased_edges().iter().map(|e| e.to_string()).collect(),
            rows: (0..self.n).map(|i| (0..=i).map(|j| self.visible(EdgeId { i, j })).collect()).collect(),
        };
        serde_json::to_string_pretty(&doc).expect("graph serializes")
    }

    pub fn from_json(s: &str) -> Result<Self> {
        let doc: JsonGraph = serde_json::from_str(s).map_err(|e| parse_err(e.line(), e.to_string()))?;
        if doc.version != MAGIC {
            return Err(parse_err(0, format!("unsupported version {:?}", doc.version)));
        }
        let field: Field = doc.field.parse()?;
        if doc.rows.len() != doc.n || doc.rows.iter().enumerate().any(|(i, r)| r.len() != i + 1) {
            return Err(parse_err(0, "rows do not form a lower triangle"));
        }
        let labels = doc.rows.into_iter().flatten().collect();
        let mut g = LabeledGraph::from_labels(doc.n, &field, labels)?;
        for e in &doc.erased {
            g.mark_erased(parse_edge(e, 0)?)?;
        }
        Ok(g)
    }

    /// Parses either the text form or the JSON mirror.
    pub fn parse(s: &str) -> Result<Self> {
        if s.trim_start().starts_with('{') {
            Self::from_json(s)
        } else {
            Self::from_text(s)
        }
    }
}
