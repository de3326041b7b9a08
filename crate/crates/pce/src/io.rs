//! Graph files.
//!
//! Two formats are accepted:
//!
//! * JSON: `{"n": 3, "edges": [[0, 1, 1.0], [0, 2, 2.5]]}`. Unlisted pairs
//!   have weight 0.
//! * Edge list: one `i j w` triple per line, `#` starts a comment. The node
//!   count is one more than the largest index seen.
//!
//! Node indices are 0-based in both.

use std::fs;
use std::path::Path;

use pce_core::graph::WeightedGraph;
use serde::{Deserialize, Serialize};

use crate::error::{format_error, io_error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum GraphFormat {
    Json,
    EdgeList,
}

impl GraphFormat {
    /// `.json` files are JSON, anything else is an edge list.
    pub fn from_path(path: &Path) -> Self {
        match path.extension().and_then(|e| e.to_str()) {
            Some(ext) if ext.eq_ignore_ascii_case("json") => Self::Json,
            _ => Self::EdgeList,
        }
    }
}

#[derive(Serialize, Deserialize)]
struct GraphFile {
    n: usize,
    edges: Vec<(usize, usize, f64)>,
}

/// Reads a graph, choosing the format by extension. Files without a
/// `.json` extension whose first non-blank byte is `{` are read as JSON too.
pub fn read_graph(path: impl AsRef<Path>) -> Result<WeightedGraph> {
    let path = path.as_ref();
    let text = fs::read_to_string(path).map_err(io_error(path))?;
    let origin = path.display().to_string();
    let json =
        GraphFormat::from_path(path) == GraphFormat::Json || text.trim_start().starts_with('{');
    if json {
        parse_graph_json(&text, &origin)
    } else {
        parse_edge_list(&text, &origin)
    }
}

pub fn write_graph(g: &WeightedGraph, path: impl AsRef<Path>) -> Result<()> {
    let path = path.as_ref();
    let text = match GraphFormat::from_path(path) {
        GraphFormat::Json => graph_to_json(g)?,
        GraphFormat::EdgeList => graph_to_edge_list(g),
    };
    fs::write(path, text).map_err(io_error(path))
}

pub fn graph_to_json(g: &WeightedGraph) -> Result<String> {
    let file = GraphFile {
        n: g.n(),
        edges: g.edges().collect(),
    };
    let mut s = serde_json::to_string_pretty(&file)?;
    s.push('\n');
    Ok(s)
}

/// Edge-list text. Weights use the shortest representation that parses
/// back to the same `f64`. An isolated highest-index node would be lost, so
/// the node count is also written as a comment header.
pub fn graph_to_edge_list(g: &WeightedGraph) -> String {
    let mut out = format!("# n = {}\n", g.n());
    for (i, j, w) in g.edges() {
        out.push_str(&format!("{i} {j} {w:?}\n"));
    }
    out
}

pub fn parse_graph_json(text: &str, origin: &str) -> Result<WeightedGraph> {
    let file: GraphFile = serde_json::from_str(text).map_err(|e| {
        format_error(
            origin,
            format!("line {}, column {}: {e}", e.line(), e.column()),
        )
    })?;
    let mut builder = Builder::new(file.n);
    for (k, &(i, j, w)) in file.edges.iter().enumerate() {
        builder
            .add(i, j, w)
            .map_err(|m| format_error(origin, format!("edges[{k}]: {m}")))?;
    }
    builder.finish().map_err(|m| format_error(origin, m))
}

pub fn parse_edge_list(text: &str, origin: &str) -> Result<WeightedGraph> {
    let mut declared_n = None;
    let mut edges = Vec::new();
    for (idx, raw) in text.lines().enumerate() {
        let lineno = idx + 1;
        let (body, comment) = match raw.split_once('#') {
            Some((b, c)) => (b, Some(c)),
            None => (raw, None),
        };
        if let Some(n) = comment.and_then(header_n) {
            declared_n = Some(n);
        }
        let fields: Vec<&str> = body.split_whitespace().collect();
        if fields.is_empty() {
            continue;
        }
        if fields.len() != 3 {
            return Err(format_error(
                origin,
                format!(
                    "line {lineno}: expected `i j w`, found {} fields",
                    fields.len()
                ),
            ));
        }
        let field_err =
            |name: &str, v: &str| format_error(origin, format!("line {lineno}: bad {name} `{v}`"));
        let i: usize = fields[0]
            .parse()
            .map_err(|_| field_err("node index", fields[0]))?;
        let j: usize = fields[1]
            .parse()
            .map_err(|_| field_err("node index", fields[1]))?;
        let w: f64 = fields[2]
            .parse()
            .map_err(|_| field_err("weight", fields[2]))?;
        edges.push((lineno, i, j, w));
    }
    let inferred = edges
        .iter()
        .map(|&(_, i, j, _)| i.max(j) + 1)
        .max()
        .unwrap_or(0);
    let n = declared_n.map_or(inferred, |d: usize| d.max(inferred));
    let mut builder = Builder::new(n);
    for (lineno, i, j, w) in edges {
        builder
            .add(i, j, w)
            .map_err(|m| format_error(origin, format!("line {lineno}: {m}")))?;
    }
    builder.finish().map_err(|m| format_error(origin, m))
}

fn header_n(comment: &str) -> Option<usize> {
    let rest = comment
        .trim()
        .strip_prefix('n')?
        .trim_start()
        .strip_prefix('=')?;
    rest.trim().parse().ok()
}

/// Dense accumulator that reports the first bad entry.
struct Builder {
    n: usize,
    weights: Vec<Option<f64>>,
}

impl Builder {
    fn new(n: usize) -> Self {
        Self {
            n,
            weights: vec![None; n * n],
        }
    }

    fn add(&mut self, i: usize, j: usize, w: f64) -> Result<(), String> {
        let n = self.n;
        if i >= n || j >= n {
            return Err(format!("edge ({i}, {j}) out of range for {n} nodes"));
        }
        if i == j {
            return Err(format!("self loop on node {i}"));
        }
        if !w.is_finite() || w < 0.0 {
            return Err(format!("edge ({i}, {j}) has invalid weight {w}"));
        }
        let (a, b) = (i.min(j), i.max(j));
        match self.weights[a * n + b] {
            Some(prev) if prev != w => Err(format!(
                "edge ({i}, {j}) conflicts with earlier weight {prev} for the same pair"
            )),
            _ => {
                self.weights[a * n + b] = Some(w);
                Ok(())
            }
        }
    }

    fn finish(self) -> Result<WeightedGraph, String> {
        let n = self.n;
        let edges = (0..n)
            .flat_map(|i| ((i + 1)..n).map(move |j| (i, j)))
            .filter_map(|(i, j)| self.weights[i * n + j].map(|w| (i, j, w)));
        WeightedGraph::from_edges(n, edges).map_err(|e| e.to_string())
    }
}
