//! Plain-text, JSON and DOT forms of a tree.

use serde::{Deserialize, Serialize};

use crate::error::{AbcError, Result};
use crate::graph::Tree;

#[derive(Serialize, Deserialize)]
struct TreeJson {
    n: usize,
    edges: Vec<[usize; 2]>,
}

/// Parses either the JSON form or the `n N` text form.
pub fn parse_tree(input: &str) -> Result<Tree> {
    if input.trim_start().starts_with('{') {
        parse_json(input)
    } else {
        parse_text(input)
    }
}

pub fn parse_text(input: &str) -> Result<Tree> {
    let mut lines = input
        .lines()
        .map(str::trim)
        .filter(|l| !l.is_empty() && !l.starts_with('#'));
    let header = lines.next().ok_or_else(|| AbcError::Parse("empty input".into()))?;
    let mut parts = header.split_whitespace();
    let n = match (parts.next(), parts.next(), parts.next()) {
        (Some("n"), Some(v), None) => parse_num(v)?,
        _ => return Err(AbcError::Parse(format!("expected `n <N>`, got `{header}`"))),
    };
    let mut edges = Vec::new();
    for line in lines {
        let mut parts = line.split_whitespace();
        match (parts.next(), parts.next(), parts.next()) {
            (Some(u), Some(v), None) => edges.push((parse_num(u)?, parse_num(v)?)),
            _ => return Err(AbcError::Parse(format!("bad edge line `{line}`"))),
        }
    }
    Tree::new(n, edges)
}

fn parse_num(s: &str) -> Result<usize> {
    s.parse().map_err(|_| AbcError::Parse(format!("not a vertex id: `{s}`")))
}

pub fn parse_json(input: &str) -> Result<Tree> {
    let raw: TreeJson =
        serde_json::from_str(input).map_err(|e| AbcError::Parse(e.to_string()))?;
    Tree::new(raw.n, raw.edges.into_iter().map(|[u, v]| (u, v)).collect())
}

pub fn to_text(t: &Tree) -> String {
    let mut out = format!("n {}\n", t.n());
    for &(u, v) in t.edges() {
        out.push_str(&format!("{u} {v}\n"));
    }
    out
}

pub fn to_json_value(t: &Tree) -> serde_json::Value {
    serde_json::to_value(TreeJson {
        n: t.n(),
        edges: t.edges().iter().map(|&(u, v)| [u, v]).collect(),
    })
    .expect("tree serializes")
}

pub fn to_json(t: &Tree) -> String {
    to_json_value(t).to_string()
}

pub fn to_dot(t: &Tree) -> String {
    let mut out = String::from("graph tree {\n");
    for v in 0..t.n() {
        out.push_str(&format!("  {v} [label=\"{v} ({})\"];\n", t.degree(v)));
    }
    for &(u, v) in t.edges() {
        out.push_str(&format!("  {u} -- {v};\n"));
    }
    out.push_str("}\n");
    out
}
