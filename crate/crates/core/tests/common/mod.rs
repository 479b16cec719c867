#![allow(dead_code)]

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use recsub::BipartiteGraph;

/// Small random graph: either fixed-degree (parallel edges possible) or
/// G(l, r, p), chosen by the seed.
pub fn small_instance(seed: u64, max_side: usize, max_d: usize) -> BipartiteGraph {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let l = rng.random_range(1..=max_side);
    let r = rng.random_range(1..=max_side);
    let mut edges = Vec::new();
    if rng.random_bool(0.5) {
        let d = rng.random_range(1..=max_d);
        for u in 0..l as u32 {
            for _ in 0..d {
                edges.push((u, rng.random_range(0..r as u32)));
            }
        }
    } else {
        let p: f64 = rng.random_range(0.1..0.7);
        for u in 0..l as u32 {
            for v in 0..r as u32 {
                if rng.random_bool(p) {
                    edges.push((u, v));
                }
            }
        }
    }
    BipartiteGraph::build(l, r, edges).unwrap()
}

/// Maximum matching by exhaustive search over left vertices.
pub fn brute_force_matching(g: &BipartiteGraph) -> usize {
    fn go(g: &BipartiteGraph, u: usize, used: &mut Vec<bool>) -> usize {
        if u == g.l() {
            return 0;
        }
        let mut best = go(g, u + 1, used);
        for &v in g.neighbors_left(u) {
            if !used[v as usize] {
                used[v as usize] = true;
                best = best.max(1 + go(g, u + 1, used));
                used[v as usize] = false;
            }
        }
        best
    }
    go(g, 0, &mut vec![false; g.r()])
}

/// Optimum by enumerating every subset of distinct edges; independent of any
/// flow formulation. Only for graphs with at most ~16 distinct edges.
pub fn brute_force_opt(g: &BipartiteGraph, c: usize, a: u32) -> usize {
    let mut edges: Vec<(u32, u32)> = g.edges().collect();
    edges.dedup();
    assert!(edges.len() <= 16, "too many edges for exhaustive search");
    let mut best = 0;
    for mask in 0u32..(1 << edges.len()) {
        let mut out = vec![0usize; g.l()];
        let mut inn = vec![0u32; g.r()];
        for (i, &(u, v)) in edges.iter().enumerate() {
            if mask >> i & 1 == 1 {
                out[u as usize] += 1;
                inn[v as usize] += 1;
            }
        }
        if out.iter().all(|&d| d <= c) {
            best = best.max(inn.iter().filter(|&&d| d >= a).count());
        }
    }
    best
}
