//! Plain-text edge lists.
//!
//! ```text
//! # optional comments
//! bipartite <l> <r> <m>
//! <u> <v>
//! ...
//! ```
//!
//! Ids are 0-based per side. The same format stores selected subgraphs.

use std::fmt::Write as _;
use std::fs;
use std::path::Path;

use log::warn;

use crate::error::{Error, Result};
use crate::graph::{BipartiteGraph, RecSubgraph};

/// Header and edge lines of an edge-list document, before any deduplication.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct EdgeListDoc {
    pub l: usize,
    pub r: usize,
    pub edges: Vec<(u32, u32)>,
}

pub fn parse_edge_list(text: &str) -> Result<EdgeListDoc> {
    let mut header: Option<(usize, usize, usize)> = None;
    let mut edges = Vec::new();
    for (idx, raw) in text.lines().enumerate() {
        let line_no = idx + 1;
        let line = raw.split('#').next().unwrap_or("").trim();
        if line.is_empty() {
            continue;
        }
        let tokens: Vec<&str> = line.split_ascii_whitespace().collect();
        let Some((l, r, _)) = header else {
            match tokens.as_slice() {
                ["bipartite", l, r, m] => {
                    header = Some((num(l, line_no)?, num(r, line_no)?, num(m, line_no)?));
                    continue;
                }
                _ => {
                    return Err(Error::Parse {
                        line: line_no,
                        msg: format!("expected 'bipartite <l> <r> <m>', got '{line}'"),
                    })
                }
            }
        };
        let [u, v] = tokens.as_slice() else {
            return Err(Error::Parse {
                line: line_no,
                msg: format!("expected '<u> <v>', got '{line}'"),
            });
        };
        let (u, v): (u64, u64) = (num(u, line_no)?, num(v, line_no)?);
        if u >= l as u64 || v >= r as u64 {
            return Err(Error::EndpointOutOfRangeAtLine { line: line_no, u, v, l, r });
        }
        edges.push((u as u32, v as u32));
    }
    let Some((l, r, m)) = header else {
        return Err(Error::Parse {
            line: text.lines().count().max(1),
            msg: "missing 'bipartite <l> <r> <m>' header".into(),
        });
    };
    if m != edges.len() {
        return Err(Error::HeaderMismatch {
            declared: m,
            found: edges.len(),
        });
    }
    Ok(EdgeListDoc { l, r, edges })
}

fn num<T: std::str::FromStr>(token: &str, line: usize) -> Result<T> {
    token.parse().map_err(|_| Error::Parse {
        line,
        msg: format!("'{token}' is not a non-negative integer"),
    })
}

/// Loaded graph plus the number of repeated edge lines that were dropped.
#[derive(Debug, Clone)]
pub struct LoadedGraph {
    pub graph: BipartiteGraph,
    pub duplicates: usize,
}

pub fn graph_from_doc(doc: EdgeListDoc) -> Result<LoadedGraph> {
    let EdgeListDoc { l, r, mut edges } = doc;
    let before = edges.len();
    edges.sort_unstable();
    edges.dedup();
    let duplicates = before - edges.len();
    let graph = BipartiteGraph::build(l, r, edges)?;
    Ok(LoadedGraph { graph, duplicates })
}

/// Reads a graph file. Repeated edge lines are collapsed with a warning, so
/// the result is always simple.
pub fn read_edge_list(path: impl AsRef<Path>) -> Result<LoadedGraph> {
    let path = path.as_ref();
    let text = fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
    let loaded = graph_from_doc(parse_edge_list(&text)?)?;
    if loaded.duplicates > 0 {
        warn!("{}: dropped {} duplicate edge line(s)", path.display(), loaded.duplicates);
    }
    Ok(loaded)
}

fn render(l: usize, r: usize, edges: impl ExactSizeIterator<Item = (u32, u32)>) -> String {
    let mut out = String::with_capacity(16 + edges.len() * 12);
    writeln!(out, "bipartite {l} {r} {}", edges.len()).unwrap();
    for (u, v) in edges {
        writeln!(out, "{u} {v}").unwrap();
    }
    out
}

/// Canonical text form of `g`: header, then edges sorted by `(u, v)`.
pub fn format_edge_list(g: &BipartiteGraph) -> String {
    let edges: Vec<_> = g.edges().collect();
    render(g.l(), g.r(), edges.into_iter())
}

pub fn write_edge_list(g: &BipartiteGraph, path: impl AsRef<Path>) -> Result<()> {
    let path = path.as_ref();
    fs::write(path, format_edge_list(g)).map_err(|e| Error::io(path, e))
}

/// Canonical text form of a selection, edges sorted by `(u, v)`.
pub fn format_subgraph(h: &RecSubgraph) -> String {
    let mut edges: Vec<_> = h.edges().collect();
    edges.sort_unstable();
    render(h.l(), h.r(), edges.into_iter())
}

pub fn write_subgraph(h: &RecSubgraph, path: impl AsRef<Path>) -> Result<()> {
    let path = path.as_ref();
    fs::write(path, format_subgraph(h)).map_err(|e| Error::io(path, e))
}

/// Reads a selection file. Duplicate lines are kept so validation can report them.
pub fn read_subgraph(path: impl AsRef<Path>, cap: usize) -> Result<RecSubgraph> {
    let path = path.as_ref();
    let text = fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
    let doc = parse_edge_list(&text)?;
    let mut h = RecSubgraph::new(doc.l, doc.r, cap);
    for (u, v) in doc.edges {
        h.push(u as usize, v);
    }
    Ok(h)
}
