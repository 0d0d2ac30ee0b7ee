//! Text formats for hypergraphs and node labels.
//!
//! A hypergraph file has one hyperedge per line: whitespace-separated node
//! tokens, optionally followed by `# w=<weight>`. Blank lines and lines
//! starting with `#` are ignored. A labels file has lines `<node> <label>`.

use std::collections::HashMap;
use std::fmt::Write as _;
use std::path::Path;

use hgricci::Hypergraph;

use crate::error::{CliError, Result};

/// Parsed hypergraph with its token table (`tokens[id]` is the name of node `id`).
#[derive(Debug, Clone, PartialEq)]
pub struct ParsedHypergraph {
    pub hypergraph: Hypergraph,
    pub tokens: Vec<String>,
    /// Lines skipped because they named fewer than two distinct nodes.
    pub dropped_lines: usize,
}

impl ParsedHypergraph {
    pub fn token_ids(&self) -> HashMap<&str, usize> {
        self.tokens.iter().enumerate().map(|(i, t)| (t.as_str(), i)).collect()
    }
}

fn parse_weight(annotation: &str, line: usize) -> Result<Option<f64>> {
    let Some(value) = annotation.trim().strip_prefix("w=") else {
        return Ok(None);
    };
    let bad = |what: &str| CliError::Parse { line, message: format!("{what} weight annotation `{}`", annotation.trim()) };
    let w: f64 = value.trim().parse().map_err(|_| bad("malformed"))?;
    if !(w > 0.0 && w.is_finite()) {
        return Err(bad("non-positive"));
    }
    Ok(Some(w))
}

/// Parses hypergraph text. Node ids follow first appearance. Tokens of
/// dropped single-node lines are still interned, so such nodes exist and
/// are isolated unless they appear elsewhere.
pub fn parse_hypergraph(text: &str) -> Result<ParsedHypergraph> {
    let mut ids: HashMap<String, usize> = HashMap::new();
    let mut tokens: Vec<String> = Vec::new();
    let mut edges = Vec::new();
    let mut weights = Vec::new();
    let mut dropped_lines = 0;
    for (idx, raw) in text.lines().enumerate() {
        let line = raw.trim();
        if line.is_empty() || line.starts_with('#') {
            continue;
        }
        let (nodes, weight) = match line.split_once('#') {
            Some((nodes, rest)) => (nodes, parse_weight(rest, idx + 1)?),
            None => (line, None),
        };
        let mut edge: Vec<usize> = nodes
            .split_whitespace()
            .map(|t| {
                *ids.entry(t.to_owned()).or_insert_with(|| {
                    tokens.push(t.to_owned());
                    tokens.len() - 1
                })
            })
            .collect();
        edge.sort_unstable();
        edge.dedup();
        if edge.len() < 2 {
            dropped_lines += 1;
            continue;
        }
        edges.push(edge);
        weights.push(weight.unwrap_or(1.0));
    }
    if edges.is_empty() {
        return Err(CliError::EmptyInput);
    }
    if dropped_lines > 0 {
        log::warn!("dropped {dropped_lines} line(s) with fewer than two distinct nodes");
    }
    let hypergraph = Hypergraph::with_weights(tokens.len(), edges, weights)?;
    Ok(ParsedHypergraph { hypergraph, tokens, dropped_lines })
}

pub fn read_hypergraph(path: &Path) -> Result<ParsedHypergraph> {
    parse_hypergraph(&std::fs::read_to_string(path).map_err(CliError::io(path))?)
}

/// Inverse of [`parse_hypergraph`]; unit weights are left implicit.
pub fn format_hypergraph(h: &Hypergraph, tokens: &[String]) -> String {
    let mut out = String::new();
    for (edge, &w) in h.edges().iter().zip(h.weights()) {
        let names: Vec<&str> = edge.iter().map(|&v| tokens[v].as_str()).collect();
        out.push_str(&names.join(" "));
        if w != 1.0 {
            let _ = write!(out, " # w={w}");
        }
        out.push('\n');
    }
    out
}

/// Decimal ids as tokens.
pub fn numeric_tokens(n: usize) -> Vec<String> {
    (0..n).map(|v| v.to_string()).collect()
}

/// Labels keyed by node token, as read from a labels file.
#[derive(Debug, Clone, PartialEq)]
pub struct LabelFile {
    pub entries: Vec<(String, String)>,
}

pub fn parse_labels(text: &str) -> Result<LabelFile> {
    let mut entries = Vec::new();
    let mut seen = HashMap::new();
    for (idx, raw) in text.lines().enumerate() {
        let line = raw.trim();
        if line.is_empty() || line.starts_with('#') {
            continue;
        }
        let mut parts = line.split_whitespace();
        let (Some(node), Some(label), None) = (parts.next(), parts.next(), parts.next()) else {
            return Err(CliError::Parse { line: idx + 1, message: "expected `<node> <label>`".into() });
        };
        if let Some(first) = seen.insert(node.to_owned(), idx + 1) {
            return Err(CliError::Parse { line: idx + 1, message: format!("node `{node}` already labeled on line {first}") });
        }
        entries.push((node.to_owned(), label.to_owned()));
    }
    Ok(LabelFile { entries })
}

pub fn read_labels(path: &Path) -> Result<LabelFile> {
    parse_labels(&std::fs::read_to_string(path).map_err(CliError::io(path))?)
}

impl LabelFile {
    /// Dense label ids aligned with `tokens`. Labels of unknown nodes are
    /// ignored; every listed node must have a label.
    pub fn align(&self, tokens: &[String]) -> Result<Vec<usize>> {
        let by_node: HashMap<&str, &str> = self.entries.iter().map(|(n, l)| (n.as_str(), l.as_str())).collect();
        let mut label_ids: HashMap<&str, usize> = HashMap::new();
        let mut out = Vec::with_capacity(tokens.len());
        for t in tokens {
            let label = by_node.get(t.as_str()).ok_or_else(|| CliError::Input(format!("node `{t}` has no label")))?;
            let next = label_ids.len();
            out.push(*label_ids.entry(label).or_insert(next));
        }
        let unknown = self.entries.len() - tokens.iter().filter(|t| by_node.contains_key(t.as_str())).count();
        if unknown > 0 {
            log::warn!("ignored labels of {unknown} node(s) absent from the hypergraph");
        }
        Ok(out)
    }
}

pub fn format_labels(tokens: &[String], labels: &[usize]) -> String {
    tokens.iter().zip(labels).map(|(t, l)| format!("{t} {l}\n")).collect()
}

pub fn write_file(path: &Path, contents: &str) -> Result<()> {
    std::fs::write(path, contents).map_err(CliError::io(path))
}
