//! Exact optimum for small instances.
//!
//! A target set `T` of right vertices is achievable iff the network
//! `source -c-> u -1-> v -a-> sink` (sink arcs only for `v` in `T`) carries a
//! flow of `a |T|`. The optimum is the largest achievable `T`, found by
//! enumerating candidate sets from the largest size down.

use std::collections::VecDeque;

use crate::error::{Error, Result};
use crate::graph::{BipartiteGraph, ProblemParams};

/// Default per-side size limit for [`exact_opt`].
pub const SIZE_GUARD: usize = 20;

#[derive(Debug, Clone, Copy)]
struct Arc {
    to: usize,
    cap: u64,
}

/// Directed network with integral capacities; arcs are stored in pairs
/// (forward, residual).
#[derive(Debug, Clone)]
pub struct FlowNetwork {
    adj: Vec<Vec<usize>>,
    arcs: Vec<Arc>,
    pub source: usize,
    pub sink: usize,
}

impl FlowNetwork {
    pub fn new(nodes: usize, source: usize, sink: usize) -> Self {
        Self {
            adj: vec![Vec::new(); nodes],
            arcs: Vec::new(),
            source,
            sink,
        }
    }

    pub fn add_arc(&mut self, from: usize, to: usize, cap: u64) {
        self.adj[from].push(self.arcs.len());
        self.arcs.push(Arc { to, cap });
        self.adj[to].push(self.arcs.len());
        self.arcs.push(Arc { to: from, cap: 0 });
    }

    /// Selection network for `g`: node 0 is the source, `1..=l` the left
    /// vertices, `l+1..=l+r` the right vertices and `l+r+1` the sink. Right
    /// vertex `v` gets a sink arc of capacity `a` if `targets[v]`, else none.
    pub fn for_selection(g: &BipartiteGraph, c: u64, a: u64, targets: &[bool]) -> Self {
        let (l, r) = (g.l(), g.r());
        let sink = l + r + 1;
        let mut net = Self::new(l + r + 2, 0, sink);
        for u in 0..l {
            net.add_arc(0, 1 + u, c);
            let mut prev = None;
            for &v in g.neighbors_left(u) {
                if prev != Some(v) {
                    net.add_arc(1 + u, 1 + l + v as usize, 1);
                }
                prev = Some(v);
            }
        }
        for (v, &t) in targets.iter().enumerate() {
            if t {
                net.add_arc(1 + l + v, sink, a);
            }
        }
        net
    }

    /// Maximum source-to-sink flow (Dinic). Consumes capacity; call on a clone
    /// to reuse the network.
    pub fn max_flow(&mut self) -> u64 {
        let n = self.adj.len();
        let mut level = vec![usize::MAX; n];
        let mut next = vec![0usize; n];
        let mut total = 0;
        loop {
            level.iter_mut().for_each(|x| *x = usize::MAX);
            level[self.source] = 0;
            let mut queue = VecDeque::from([self.source]);
            while let Some(x) = queue.pop_front() {
                for &id in &self.adj[x] {
                    let arc = self.arcs[id];
                    if arc.cap > 0 && level[arc.to] == usize::MAX {
                        level[arc.to] = level[x] + 1;
                        queue.push_back(arc.to);
                    }
                }
            }
            if level[self.sink] == usize::MAX {
                return total;
            }
            next.iter_mut().for_each(|x| *x = 0);
            loop {
                let pushed = self.push(self.source, u64::MAX, &level, &mut next);
                if pushed == 0 {
                    break;
                }
                total += pushed;
            }
        }
    }

    fn push(&mut self, x: usize, limit: u64, level: &[usize], next: &mut [usize]) -> u64 {
        if x == self.sink {
            return limit;
        }
        while next[x] < self.adj[x].len() {
            let id = self.adj[x][next[x]];
            let Arc { to, cap } = self.arcs[id];
            if cap > 0 && level[to] == level[x] + 1 {
                let got = self.push(to, limit.min(cap), level, next);
                if got > 0 {
                    self.arcs[id].cap -= got;
                    self.arcs[id ^ 1].cap += got;
                    return got;
                }
            }
            next[x] += 1;
        }
        0
    }
}

/// Maximum `b`-matching value of `g` for `a = 1`: every right vertex may
/// receive one edge, every left vertex up to `c`.
pub fn b_matching_value(g: &BipartiteGraph, c: u32) -> u64 {
    FlowNetwork::for_selection(g, c as u64, 1, &vec![true; g.r()]).max_flow()
}

/// Largest number of right vertices that can simultaneously reach in-degree
/// `a` with at most `c` edges per left vertex.
///
/// Exponential in `r`; refuses graphs with more than [`SIZE_GUARD`] vertices
/// on either side unless `force` is set.
pub fn exact_opt(g: &BipartiteGraph, params: &ProblemParams, force: bool) -> Result<usize> {
    if !force && (g.l() > SIZE_GUARD || g.r() > SIZE_GUARD) {
        return Err(Error::TooLarge {
            l: g.l(),
            r: g.r(),
            limit: SIZE_GUARD,
        });
    }
    let (c, a) = (params.c as u64, params.a as u64);
    let eligible: Vec<usize> = (0..g.r())
        .filter(|&v| g.distinct_degree_right(v) as u64 >= a)
        .collect();
    let budget = g.l() * params.c as usize / params.a as usize;
    let mut targets = vec![false; g.r()];
    for size in (1..=eligible.len().min(budget)).rev() {
        if any_feasible(g, c, a, &eligible, size, 0, &mut targets) {
            return Ok(size);
        }
    }
    Ok(0)
}

/// Tries every `remaining`-subset of `eligible[from..]` added to `targets`.
fn any_feasible(
    g: &BipartiteGraph,
    c: u64,
    a: u64,
    eligible: &[usize],
    remaining: usize,
    from: usize,
    targets: &mut Vec<bool>,
) -> bool {
    if remaining == 0 {
        let chosen = targets.iter().filter(|&&t| t).count() as u64;
        return FlowNetwork::for_selection(g, c, a, targets).max_flow() == a * chosen;
    }
    for i in from..=eligible.len() - remaining {
        targets[eligible[i]] = true;
        let found = any_feasible(g, c, a, eligible, remaining - 1, i + 1, targets);
        targets[eligible[i]] = false;
        if found {
            return true;
        }
    }
    false
}
