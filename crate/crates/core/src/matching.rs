//! Maximum bipartite matching (Hopcroft–Karp) and a length-limited variant.
//!
//! Each phase finds a maximal set of vertex-disjoint shortest augmenting paths
//! and applies them; the shortest augmenting path length grows strictly from
//! one phase to the next. Stopping once it would exceed a cutoff leaves a
//! matching with no augmenting path of at most that many edges, which is
//! within a factor `1 - 1/ceil((cutoff + 1) / 2)` of maximum.

use std::collections::VecDeque;

use crate::graph::BipartiteGraph;

const UNSEEN: u32 = u32::MAX;

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Matching {
    match_left: Vec<Option<u32>>,
    match_right: Vec<Option<u32>>,
    size: usize,
}

impl Matching {
    pub fn empty(l: usize, r: usize) -> Self {
        Self {
            match_left: vec![None; l],
            match_right: vec![None; r],
            size: 0,
        }
    }

    /// Builds a matching from explicit pairs. Returns `None` if two pairs
    /// share an endpoint or an endpoint is out of range.
    pub fn from_pairs(l: usize, r: usize, pairs: &[(u32, u32)]) -> Option<Self> {
        let mut m = Self::empty(l, r);
        for &(u, v) in pairs {
            let (ui, vi) = (u as usize, v as usize);
            if ui >= l || vi >= r || m.match_left[ui].is_some() || m.match_right[vi].is_some() {
                return None;
            }
            m.match_left[ui] = Some(v);
            m.match_right[vi] = Some(u);
            m.size += 1;
        }
        Some(m)
    }

    pub fn size(&self) -> usize {
        self.size
    }

    pub fn mate_of_left(&self, u: usize) -> Option<u32> {
        self.match_left[u]
    }

    pub fn mate_of_right(&self, v: usize) -> Option<u32> {
        self.match_right[v]
    }

    pub fn pairs(&self) -> impl Iterator<Item = (u32, u32)> + '_ {
        self.match_left
            .iter()
            .enumerate()
            .filter_map(|(u, v)| v.map(|v| (u as u32, v)))
    }

    /// Checks that both sides are mutually inverse, the size is right and
    /// every pair is an edge of `g`.
    pub fn is_valid_for(&self, g: &BipartiteGraph) -> bool {
        if self.match_left.len() != g.l() || self.match_right.len() != g.r() {
            return false;
        }
        let left_ok = self.match_left.iter().enumerate().all(|(u, v)| match v {
            Some(v) => {
                self.match_right.get(*v as usize) == Some(&Some(u as u32)) && g.has_edge(u, *v)
            }
            None => true,
        });
        let right_ok = self.match_right.iter().enumerate().all(|(v, u)| match u {
            Some(u) => self.match_left.get(*u as usize) == Some(&Some(v as u32)),
            None => true,
        });
        left_ok && right_ok && self.pairs().count() == self.size
    }
}

/// Matching plus the number of augmenting phases that were executed.
#[derive(Debug, Clone)]
pub struct MatchingRun {
    pub matching: Matching,
    pub phases: usize,
}

/// Maximum matching of `g`.
pub fn hopcroft_karp(g: &BipartiteGraph) -> Matching {
    run(g, Matching::empty(g.l(), g.r()), usize::MAX).matching
}

/// Maximum matching of `g`, reporting the phase count.
pub fn hopcroft_karp_run(g: &BipartiteGraph) -> MatchingRun {
    run(g, Matching::empty(g.l(), g.r()), usize::MAX)
}

/// A matching of `g` that admits no augmenting path with `max_path_len` or
/// fewer edges. Augmenting paths have odd length, so an even cutoff behaves
/// like the odd value below it.
pub fn bounded_matching(g: &BipartiteGraph, max_path_len: usize) -> Matching {
    run(g, Matching::empty(g.l(), g.r()), max_path_len).matching
}

/// As [`bounded_matching`], starting from an existing matching of `g`.
pub fn bounded_matching_from(g: &BipartiteGraph, initial: Matching, max_path_len: usize) -> MatchingRun {
    assert!(initial.is_valid_for(g), "initial matching is not a matching of the graph");
    run(g, initial, max_path_len)
}

fn run(g: &BipartiteGraph, mut m: Matching, max_path_len: usize) -> MatchingRun {
    let l = g.l();
    let mut dist = vec![UNSEEN; l];
    let mut next_edge = vec![0usize; l];
    let mut queue = VecDeque::new();
    let mut stack = Vec::new();
    let mut phases = 0;

    loop {
        // Layer free left vertices at 0 and walk alternating paths until the
        // first layer that reaches a free right vertex.
        queue.clear();
        for (u, du) in dist.iter_mut().enumerate().take(l) {
            if m.match_left[u].is_none() {
                *du = 0;
                queue.push_back(u as u32);
            } else {
                *du = UNSEEN;
            }
        }
        let mut last_layer = UNSEEN;
        while let Some(u) = queue.pop_front() {
            let du = dist[u as usize];
            if du >= last_layer {
                break;
            }
            for &v in g.neighbors_left(u as usize) {
                match m.match_right[v as usize] {
                    None => last_layer = last_layer.min(du),
                    Some(w) if dist[w as usize] == UNSEEN => {
                        dist[w as usize] = du + 1;
                        queue.push_back(w);
                    }
                    Some(_) => {}
                }
            }
        }
        if last_layer == UNSEEN {
            break;
        }
        let shortest = 2 * last_layer as usize + 1;
        if shortest > max_path_len {
            break;
        }

        phases += 1;
        next_edge.iter_mut().for_each(|e| *e = 0);
        for root in 0..l {
            if m.match_left[root].is_none() && dist[root] == 0 {
                augment_from(g, &mut m, &mut dist, &mut next_edge, &mut stack, root as u32, last_layer);
            }
        }
    }

    MatchingRun { matching: m, phases }
}

/// Depth-first search through the layered graph from `root`; applies the first
/// augmenting path found. Vertices on an applied path leave the layered graph.
fn augment_from(
    g: &BipartiteGraph,
    m: &mut Matching,
    dist: &mut [u32],
    next_edge: &mut [usize],
    stack: &mut Vec<u32>,
    root: u32,
    last_layer: u32,
) -> bool {
    stack.clear();
    stack.push(root);
    while let Some(&u) = stack.last() {
        let ui = u as usize;
        let adj = g.neighbors_left(ui);
        if next_edge[ui] == adj.len() {
            dist[ui] = UNSEEN;
            stack.pop();
            continue;
        }
        let v = adj[next_edge[ui]];
        match m.match_right[v as usize] {
            None if dist[ui] == last_layer => {
                for &w in stack.iter() {
                    let wi = w as usize;
                    let x = g.neighbors_left(wi)[next_edge[wi]];
                    if m.match_left[wi].is_none() {
                        m.size += 1;
                    }
                    m.match_left[wi] = Some(x);
                    m.match_right[x as usize] = Some(w);
                    dist[wi] = UNSEEN;
                }
                return true;
            }
            Some(w) if dist[ui] < last_layer && dist[w as usize] == dist[ui] + 1 => {
                stack.push(w);
            }
            _ => next_edge[ui] += 1,
        }
    }
    false
}

#[cfg(test)]
mod tests {
    use super::*;

    fn g(l: usize, r: usize, edges: &[(u32, u32)]) -> BipartiteGraph {
        BipartiteGraph::build(l, r, edges.iter().copied()).unwrap()
    }

    #[test]
    fn identity_graph() {
        let edges: Vec<_> = (0..5).map(|i| (i, i)).collect();
        let g = g(5, 5, &edges);
        let m = hopcroft_karp(&g);
        assert_eq!(m.size(), 5);
        assert!(m.is_valid_for(&g));
    }

    #[test]
    fn three_edge_instance() {
        let g = g(2, 2, &[(0, 0), (0, 1), (1, 0)]);
        let m = hopcroft_karp(&g);
        assert_eq!(m.size(), 2);
        assert_eq!(m.mate_of_left(0), Some(1));
        assert_eq!(m.mate_of_left(1), Some(0));
    }

    #[test]
    fn empty_graph() {
        assert_eq!(hopcroft_karp(&BipartiteGraph::empty(3, 4)).size(), 0);
        assert_eq!(hopcroft_karp(&BipartiteGraph::empty(0, 0)).size(), 0);
    }

    #[test]
    fn cutoff_one_is_maximal() {
        let g = g(3, 3, &[(0, 0), (0, 1), (1, 0), (2, 1), (2, 2)]);
        let m = bounded_matching(&g, 1);
        assert!(m.is_valid_for(&g));
        // maximal: every edge has a matched endpoint
        for (u, v) in g.edges() {
            assert!(m.mate_of_left(u as usize).is_some() || m.mate_of_right(v as usize).is_some());
        }
    }

    #[test]
    fn single_augmentation_of_length_three() {
        // u0-v0, u1-v0, u1-v1, starting from {(u1, v0)}
        let g = g(2, 2, &[(0, 0), (1, 0), (1, 1)]);
        let start = Matching::from_pairs(2, 2, &[(1, 0)]).unwrap();
        assert_eq!(bounded_matching_from(&g, start.clone(), 1).matching.size(), 1);
        let run = bounded_matching_from(&g, start, 3);
        assert_eq!(run.matching.size(), 2);
        assert_eq!(run.phases, 1);
        assert!(run.matching.is_valid_for(&g));
    }

    #[test]
    fn parallel_edges_do_not_change_size() {
        let g = g(2, 2, &[(0, 0), (0, 0), (0, 1), (1, 0), (1, 0)]);
        assert_eq!(hopcroft_karp(&g).size(), 2);
    }

    #[test]
    fn long_path_needs_large_cutoff() {
        // Path u0-v0-u1-v1-u2-v2 with v_i - u_{i+1}; greedy by cutoff 1 may
        // leave an augmenting path of length 5.
        let g = g(3, 3, &[(0, 0), (1, 0), (1, 1), (2, 1), (2, 2)]);
        let start = Matching::from_pairs(3, 3, &[(1, 0), (2, 1)]).unwrap();
        assert_eq!(bounded_matching_from(&g, start.clone(), 3).matching.size(), 2);
        assert_eq!(bounded_matching_from(&g, start.clone(), 4).matching.size(), 2);
        assert_eq!(bounded_matching_from(&g, start, 5).matching.size(), 3);
    }

    #[test]
    fn from_pairs_rejects_conflicts() {
        assert!(Matching::from_pairs(2, 2, &[(0, 0), (1, 0)]).is_none());
        assert!(Matching::from_pairs(2, 2, &[(0, 3)]).is_none());
    }
}
