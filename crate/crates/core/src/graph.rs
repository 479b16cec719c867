//! Bipartite candidate graphs, selected subgraphs and the coverage metric.

use std::fmt;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Immutable bipartite graph `G = (L, R, E)` with dense 0-based ids per side.
///
/// Both adjacency views are stored in offset-array form: the neighbours of
/// left vertex `u` are `left_adj[left_offsets[u]..left_offsets[u + 1]]`,
/// sorted ascending, and symmetrically for the right side. Parallel edges are
/// representable (the fixed-degree model samples with replacement); they show
/// up as repeated entries in both views.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct BipartiteGraph {
    l: usize,
    r: usize,
    left_offsets: Vec<usize>,
    left_adj: Vec<u32>,
    right_offsets: Vec<usize>,
    right_adj: Vec<u32>,
    simple: bool,
}

impl BipartiteGraph {
    /// Builds a graph from an edge sequence. Edges may repeat.
    pub fn build<I>(l: usize, r: usize, edges: I) -> Result<Self>
    where
        I: IntoIterator<Item = (u32, u32)>,
    {
        if l > u32::MAX as usize || r > u32::MAX as usize {
            return Err(Error::Config(format!(
                "side sizes must fit in 32 bits (l={l}, r={r})"
            )));
        }
        let edges: Vec<(u32, u32)> = edges.into_iter().collect();
        for (index, &(u, v)) in edges.iter().enumerate() {
            if u as usize >= l || v as usize >= r {
                return Err(Error::EndpointOutOfRange {
                    index,
                    u: u.into(),
                    v: v.into(),
                    l,
                    r,
                });
            }
        }

        // Bucket by right endpoint, sort each bucket, then transpose: scanning
        // v in ascending order fills every left bucket already sorted.
        let right_offsets = offsets(r, edges.iter().map(|&(_, v)| v));
        let mut right_adj = vec![0u32; edges.len()];
        let mut cursor = right_offsets.clone();
        for &(u, v) in &edges {
            right_adj[cursor[v as usize]] = u;
            cursor[v as usize] += 1;
        }
        for v in 0..r {
            right_adj[right_offsets[v]..right_offsets[v + 1]].sort_unstable();
        }

        let left_offsets = offsets(l, edges.iter().map(|&(u, _)| u));
        let mut left_adj = vec![0u32; edges.len()];
        let mut cursor = left_offsets.clone();
        for v in 0..r {
            for &u in &right_adj[right_offsets[v]..right_offsets[v + 1]] {
                left_adj[cursor[u as usize]] = v as u32;
                cursor[u as usize] += 1;
            }
        }

        let simple = (0..l).all(|u| {
            left_adj[left_offsets[u]..left_offsets[u + 1]]
                .windows(2)
                .all(|w| w[0] != w[1])
        });

        Ok(Self {
            l,
            r,
            left_offsets,
            left_adj,
            right_offsets,
            right_adj,
            simple,
        })
    }

    pub fn empty(l: usize, r: usize) -> Self {
        Self::build(l, r, std::iter::empty()).expect("empty graph is always valid")
    }

    /// `|L|`
    pub fn l(&self) -> usize {
        self.l
    }

    /// `|R|`
    pub fn r(&self) -> usize {
        self.r
    }

    /// Edge count, parallel edges included.
    pub fn m(&self) -> usize {
        self.left_adj.len()
    }

    /// Side ratio `k = l / r`.
    pub fn k(&self) -> f64 {
        self.l as f64 / self.r as f64
    }

    /// True when no (u, v) pair occurs more than once.
    pub fn is_simple(&self) -> bool {
        self.simple
    }

    pub fn neighbors_left(&self, u: usize) -> &[u32] {
        &self.left_adj[self.left_offsets[u]..self.left_offsets[u + 1]]
    }

    pub fn neighbors_right(&self, v: usize) -> &[u32] {
        &self.right_adj[self.right_offsets[v]..self.right_offsets[v + 1]]
    }

    pub fn degree_left(&self, u: usize) -> usize {
        self.left_offsets[u + 1] - self.left_offsets[u]
    }

    pub fn degree_right(&self, v: usize) -> usize {
        self.right_offsets[v + 1] - self.right_offsets[v]
    }

    /// Number of distinct left neighbours of `v`.
    pub fn distinct_degree_right(&self, v: usize) -> usize {
        count_distinct(self.neighbors_right(v))
    }

    pub fn max_degree_left(&self) -> usize {
        (0..self.l).map(|u| self.degree_left(u)).max().unwrap_or(0)
    }

    pub fn has_edge(&self, u: usize, v: u32) -> bool {
        u < self.l && self.neighbors_left(u).binary_search(&v).is_ok()
    }

    /// All edges in canonical `(u, v)` order, parallel edges repeated.
    pub fn edges(&self) -> impl Iterator<Item = (u32, u32)> + '_ {
        (0..self.l).flat_map(move |u| self.neighbors_left(u).iter().map(move |&v| (u as u32, v)))
    }

    /// Copy of this graph with parallel edges collapsed.
    pub fn simplified(&self) -> Self {
        if self.simple {
            return self.clone();
        }
        let mut last = None;
        let edges: Vec<_> = self
            .edges()
            .filter(|&e| {
                let keep = last != Some(e);
                last = Some(e);
                keep
            })
            .collect();
        Self::build(self.l, self.r, edges).expect("edges of a valid graph are in range")
    }
}

fn offsets(n: usize, keys: impl Iterator<Item = u32>) -> Vec<usize> {
    let mut offsets = vec![0usize; n + 1];
    for key in keys {
        offsets[key as usize + 1] += 1;
    }
    for i in 0..n {
        offsets[i + 1] += offsets[i];
    }
    offsets
}

/// Distinct values in a sorted slice.
pub(crate) fn count_distinct(sorted: &[u32]) -> usize {
    match sorted.len() {
        0 => 0,
        n => 1 + (1..n).filter(|&i| sorted[i] != sorted[i - 1]).count(),
    }
}

/// The `(c, a)` pair: out-degree budget per left vertex and target in-degree
/// per right vertex.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct ProblemParams {
    pub c: u32,
    pub a: u32,
}

impl ProblemParams {
    pub fn new(c: u32, a: u32) -> Result<Self> {
        if c == 0 || a == 0 {
            return Err(Error::Config(format!("c and a must be at least 1 (c={c}, a={a})")));
        }
        Ok(Self { c, a })
    }

    /// Non-fatal observations about these parameters on `g`.
    pub fn warnings(&self, g: &BipartiteGraph) -> Vec<String> {
        let mut out = Vec::new();
        let max_deg = g.max_degree_left();
        if max_deg > 0 && self.c as usize >= max_deg {
            out.push(format!(
                "c={} is at least the maximum left degree {max_deg}; sampling keeps every candidate",
                self.c
            ));
        }
        out
    }
}

/// A selected subgraph `H`: for each left vertex, the right neighbours kept.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct RecSubgraph {
    l: usize,
    r: usize,
    cap: usize,
    chosen: Vec<Vec<u32>>,
}

impl RecSubgraph {
    /// Empty selection over a graph of the given shape, allowing `cap` edges per left vertex.
    pub fn new(l: usize, r: usize, cap: usize) -> Self {
        Self {
            l,
            r,
            cap,
            chosen: vec![Vec::new(); l],
        }
    }

    pub fn from_chosen(r: usize, cap: usize, chosen: Vec<Vec<u32>>) -> Self {
        Self {
            l: chosen.len(),
            r,
            cap,
            chosen,
        }
    }

    /// Selection that keeps every distinct candidate edge of `g`.
    pub fn whole(g: &BipartiteGraph) -> Self {
        let chosen: Vec<Vec<u32>> = (0..g.l())
            .map(|u| {
                let mut vs = g.neighbors_left(u).to_vec();
                vs.dedup();
                vs
            })
            .collect();
        let cap = chosen.iter().map(Vec::len).max().unwrap_or(0);
        Self::from_chosen(g.r(), cap, chosen)
    }

    pub fn l(&self) -> usize {
        self.l
    }

    pub fn r(&self) -> usize {
        self.r
    }

    /// Out-degree budget this selection was built for.
    pub fn cap(&self) -> usize {
        self.cap
    }

    pub fn chosen(&self, u: usize) -> &[u32] {
        &self.chosen[u]
    }

    pub fn push(&mut self, u: usize, v: u32) {
        self.chosen[u].push(v);
    }

    pub(crate) fn chosen_mut(&mut self, u: usize) -> &mut Vec<u32> {
        &mut self.chosen[u]
    }

    pub fn edge_count(&self) -> usize {
        self.chosen.iter().map(Vec::len).sum()
    }

    /// Selected edges, grouped by left vertex in selection order.
    pub fn edges(&self) -> impl Iterator<Item = (u32, u32)> + '_ {
        self.chosen
            .iter()
            .enumerate()
            .flat_map(|(u, vs)| vs.iter().map(move |&v| (u as u32, v)))
    }

    pub fn in_degrees(&self) -> Vec<u32> {
        let mut deg = vec![0u32; self.r];
        for (_, v) in self.edges() {
            if let Some(d) = deg.get_mut(v as usize) {
                *d += 1;
            }
        }
        deg
    }

    /// Sorts each left vertex's selection. Useful before comparing or writing.
    pub fn canonicalize(&mut self) {
        for vs in &mut self.chosen {
            vs.sort_unstable();
        }
    }
}

/// One broken invariant of a [`RecSubgraph`] relative to its graph.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Violation {
    ShapeMismatch {
        graph: (usize, usize),
        subgraph: (usize, usize),
    },
    DegreeCap { u: usize, degree: usize, cap: usize },
    NonCandidate { u: usize, v: u32 },
    Duplicate { u: usize, v: u32 },
}

impl fmt::Display for Violation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Violation::ShapeMismatch { graph, subgraph } => write!(
                f,
                "shape mismatch: graph is {}x{}, subgraph is {}x{}",
                graph.0, graph.1, subgraph.0, subgraph.1
            ),
            Violation::DegreeCap { u, .. } => write!(f, "degree cap violated at u={u}"),
            Violation::NonCandidate { u, v } => write!(f, "non-candidate edge ({u},{v})"),
            Violation::Duplicate { u, v } => write!(f, "duplicate edge ({u},{v})"),
        }
    }
}

/// Lists every invariant `h` breaks with respect to `g` and the budget `c`.
/// An empty list means `h` is a valid recommendation subgraph.
pub fn validate(g: &BipartiteGraph, h: &RecSubgraph, c: usize) -> Vec<Violation> {
    if g.l() != h.l() || g.r() != h.r() {
        return vec![Violation::ShapeMismatch {
            graph: (g.l(), g.r()),
            subgraph: (h.l(), h.r()),
        }];
    }
    let mut out = Vec::new();
    let mut seen = Vec::new();
    for u in 0..h.l() {
        let vs = h.chosen(u);
        if vs.len() > c {
            out.push(Violation::DegreeCap {
                u,
                degree: vs.len(),
                cap: c,
            });
        }
        seen.clear();
        seen.extend_from_slice(vs);
        seen.sort_unstable();
        for (i, &v) in seen.iter().enumerate() {
            if !g.has_edge(u, v) {
                out.push(Violation::NonCandidate { u, v });
            } else if i > 0 && seen[i - 1] == v {
                out.push(Violation::Duplicate { u, v });
            }
        }
    }
    out
}

/// Number of right vertices whose in-degree in `h` is at least `a`.
///
/// `h` is validated against `g` using its own budget; the first violation is
/// reported as an error.
pub fn coverage(g: &BipartiteGraph, h: &RecSubgraph, a: u32) -> Result<usize> {
    if let Some(v) = validate(g, h, h.cap()).into_iter().next() {
        return Err(Error::InvalidSubgraph(v.to_string()));
    }
    Ok(count_covered(h, a))
}

pub(crate) fn count_covered(h: &RecSubgraph, a: u32) -> usize {
    h.in_degrees().into_iter().filter(|&d| d >= a).count()
}

/// `covered / upper_bound`, with `0 / 0` read as 1 (nothing coverable, nothing missed).
pub fn ratio(covered: usize, upper_bound: usize) -> f64 {
    if upper_bound == 0 {
        if covered == 0 {
            1.0
        } else {
            f64::INFINITY
        }
    } else {
        covered as f64 / upper_bound as f64
    }
}

/// Result of one solver run.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct CoverageReport {
    /// Right vertices meeting the in-degree target.
    pub covered: usize,
    /// Estimate of the optimum used as the ratio denominator.
    pub upper_bound: usize,
    pub ratio: f64,
    pub elapsed_ms: f64,
    /// Auxiliary words of state the solver held beyond its input and output.
    pub working_set: usize,
}
