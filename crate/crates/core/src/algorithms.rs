//! The three solvers: sampling, greedy and partition.
//!
//! | solver    | time            | working space |
//! |-----------|-----------------|---------------|
//! | sampling  | O(m)            | O(1)          |
//! | greedy    | O(m)            | O(l)          |
//! | partition | O(m sqrt(l+r))  | O(m)          |
//!
//! Every solver reports a [`SolveStats`] so these costs can be checked.

use std::fmt;
use std::str::FromStr;
use std::time::Instant;

use rand::seq::{index, SliceRandom};
use rand::Rng as _;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::bounds::upper_bound_estimate;
use crate::error::{Error, Result};
use crate::graph::{count_covered, ratio, validate, BipartiteGraph, CoverageReport, ProblemParams, RecSubgraph};
use crate::matching::bounded_matching;
use crate::rng::{stream_rng, Stream};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Algorithm {
    Sampling,
    Greedy,
    Partition,
}

impl Algorithm {
    pub const ALL: [Algorithm; 3] = [Algorithm::Sampling, Algorithm::Greedy, Algorithm::Partition];

    pub fn name(self) -> &'static str {
        match self {
            Algorithm::Sampling => "sampling",
            Algorithm::Greedy => "greedy",
            Algorithm::Partition => "partition",
        }
    }
}

impl fmt::Display for Algorithm {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Algorithm {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        Self::ALL
            .into_iter()
            .find(|a| a.name() == s)
            .ok_or_else(|| Error::Config(format!("unknown algorithm '{s}'")))
    }
}

/// Order in which greedy visits right vertices.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum GreedyOrder {
    #[default]
    InputOrder,
    /// Seeded uniform permutation of `R`.
    RandomPermutation,
}

/// Which `a` candidates greedy keeps when more than `a` left vertices still
/// have budget.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum GreedyTiebreak {
    /// Least-loaded left vertices first (most remaining budget), ties by id.
    #[default]
    MostCapacity,
    /// First `a` candidates in adjacency order.
    InputOrder,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SolverConfig {
    pub params: ProblemParams,
    pub seed: u64,
    /// Accuracy for partition, in `(0, 1]`.
    pub epsilon: f64,
    pub greedy_order: GreedyOrder,
    pub greedy_tiebreak: GreedyTiebreak,
}

impl SolverConfig {
    pub fn new(params: ProblemParams, seed: u64) -> Self {
        Self {
            params,
            seed,
            epsilon: 0.1,
            greedy_order: GreedyOrder::default(),
            greedy_tiebreak: GreedyTiebreak::default(),
        }
    }

    pub fn with_epsilon(mut self, epsilon: f64) -> Self {
        self.epsilon = epsilon;
        self
    }

    pub fn with_greedy(mut self, order: GreedyOrder, tiebreak: GreedyTiebreak) -> Self {
        self.greedy_order = order;
        self.greedy_tiebreak = tiebreak;
        self
    }

    pub fn validate(&self) -> Result<()> {
        ProblemParams::new(self.params.c, self.params.a)?;
        if !(self.epsilon > 0.0 && self.epsilon <= 1.0) {
            return Err(Error::Config(format!("epsilon must lie in (0, 1], got {}", self.epsilon)));
        }
        Ok(())
    }
}

/// Instrumentation counters for one solver run.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Serialize)]
pub struct SolveStats {
    /// Adjacency entries read.
    pub edge_touches: u64,
    /// Words of state kept per vertex for the whole run.
    pub vertex_counters: usize,
    /// Peak words of other auxiliary state (buffers, copied edges).
    pub scratch_words: usize,
}

impl SolveStats {
    pub fn working_set(&self) -> usize {
        self.vertex_counters + self.scratch_words
    }
}

#[derive(Debug, Clone)]
pub struct Solution {
    pub subgraph: RecSubgraph,
    pub stats: SolveStats,
}

/// Keeps a uniformly random `c`-subset of each left vertex's distinct
/// neighbours (all of them when there are at most `c`).
///
/// Single pass per left vertex with reservoir sampling: each adjacency entry
/// is read once and nothing but the output and two counters is held.
pub fn solve_sampling(g: &BipartiteGraph, config: &SolverConfig) -> Solution {
    let c = config.params.c as usize;
    let mut rng = stream_rng(config.seed, Stream::Sample);
    let mut h = RecSubgraph::new(g.l(), g.r(), c);
    let mut touches = 0u64;
    for u in 0..g.l() {
        let picked = h.chosen_mut(u);
        let mut prev = None;
        let mut seen = 0usize;
        for &v in g.neighbors_left(u) {
            touches += 1;
            // adjacency is sorted, so parallel edges are adjacent
            if prev == Some(v) {
                continue;
            }
            prev = Some(v);
            seen += 1;
            if picked.len() < c {
                picked.push(v);
            } else {
                let j = rng.random_range(0..seen);
                if j < c {
                    picked[j] = v;
                }
            }
        }
    }
    Solution {
        subgraph: h,
        stats: SolveStats {
            edge_touches: touches,
            vertex_counters: 0,
            scratch_words: 2,
        },
    }
}

/// Visits right vertices once; a vertex is covered with exactly `a` edges
/// when at least `a` of its neighbours still have budget, otherwise it gets
/// nothing.
pub fn solve_greedy(g: &BipartiteGraph, config: &SolverConfig) -> Solution {
    let ProblemParams { c, a } = config.params;
    let a = a as usize;
    let mut load = vec![0u32; g.l()];
    let mut h = RecSubgraph::new(g.l(), g.r(), c as usize);
    let mut candidates: Vec<u32> = Vec::new();
    let mut peak = 0usize;
    let mut touches = 0u64;

    let order: Option<Vec<u32>> = match config.greedy_order {
        GreedyOrder::InputOrder => None,
        GreedyOrder::RandomPermutation => {
            let mut perm: Vec<u32> = (0..g.r() as u32).collect();
            perm.shuffle(&mut stream_rng(config.seed, Stream::GreedyOrder));
            Some(perm)
        }
    };

    for step in 0..g.r() {
        let v = order.as_ref().map_or(step, |p| p[step] as usize);
        candidates.clear();
        let mut prev = None;
        for &u in g.neighbors_right(v) {
            touches += 1;
            if prev == Some(u) {
                continue;
            }
            prev = Some(u);
            if load[u as usize] < c {
                candidates.push(u);
            }
        }
        peak = peak.max(candidates.len());
        if candidates.len() < a {
            continue;
        }
        if config.greedy_tiebreak == GreedyTiebreak::MostCapacity && candidates.len() > a {
            candidates.select_nth_unstable_by_key(a - 1, |&u| (load[u as usize], u));
        }
        for &u in &candidates[..a] {
            h.push(u as usize, v as u32);
            load[u as usize] += 1;
        }
    }

    Solution {
        subgraph: h,
        stats: SolveStats {
            edge_touches: touches,
            vertex_counters: g.l(),
            scratch_words: peak + order.map_or(0, |p| p.len()),
        },
    }
}

/// Augmenting-path cutoff used by partition: `2 * ceil(c / epsilon) - 1`.
pub fn partition_path_cutoff(c: u32, epsilon: f64) -> usize {
    // tolerate representation error such as 3 / 0.1 = 30.000000000000004
    2 * (c as f64 / epsilon - 1e-9).ceil().max(1.0) as usize - 1
}

/// Overlapping window layout over a sample `R'` of right vertices.
///
/// Window `i` (for `i < c`) covers `width` consecutive sample positions
/// starting at `i * stride`, wrapping modulo `|R'|`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct WindowLayout {
    pub sample_len: usize,
    pub width: usize,
    pub stride: usize,
    pub windows: usize,
}

impl WindowLayout {
    pub fn new(l: usize, c: usize, a: usize, sample_len: usize) -> Self {
        Self {
            sample_len,
            width: l.min(sample_len),
            stride: (l / a).max(1),
            windows: c,
        }
    }

    pub fn start(&self, window: usize) -> usize {
        (window * self.stride) % self.sample_len
    }

    /// Offset of sample position `pos` inside `window`, if it is covered.
    pub fn offset_in(&self, window: usize, pos: usize) -> Option<usize> {
        let n = self.sample_len;
        let off = (pos + n - self.start(window)) % n;
        (off < self.width).then_some(off)
    }

    pub fn position(&self, window: usize, offset: usize) -> usize {
        (self.start(window) + offset) % self.sample_len
    }

    /// Windows covering each sample position, as `(offsets, window ids)`.
    pub fn memberships(&self) -> (Vec<usize>, Vec<u32>) {
        let mut offsets = Vec::with_capacity(self.sample_len + 1);
        let mut ids = Vec::new();
        offsets.push(0);
        for pos in 0..self.sample_len {
            ids.extend((0..self.windows).filter(|&w| self.offset_in(w, pos).is_some()).map(|w| w as u32));
            offsets.push(ids.len());
        }
        (offsets, ids)
    }
}

/// Matches `L` into `c` overlapping windows of a right-side sample and takes
/// the union of the matchings.
///
/// The sample has `min(r, floor(l c / a))` vertices in random order. With
/// window width `l` and stride `floor(l / a)`, each sampled vertex lies in
/// about `a` windows. Every candidate edge into the sample is assigned to one
/// of its vertex's windows uniformly at random, and each window graph is
/// matched until no augmenting path of `2 ceil(c / epsilon) - 1` edges or
/// fewer remains. A left vertex appears at most once per matching, so its
/// degree never exceeds `c`.
pub fn solve_partition(g: &BipartiteGraph, config: &SolverConfig) -> Result<Solution> {
    let ProblemParams { c, a } = config.params;
    if a > c {
        return Err(Error::Config(format!("partition requires a <= c (a={a}, c={c})")));
    }
    config.validate()?;
    let (l, r) = (g.l(), g.r());
    let mut h = RecSubgraph::new(l, r, c as usize);
    let sample_len = r.min(l * c as usize / a as usize);
    if sample_len == 0 || g.m() == 0 {
        return Ok(Solution {
            subgraph: h,
            stats: SolveStats::default(),
        });
    }

    let sample: Vec<u32> = index::sample(&mut stream_rng(config.seed, Stream::PartitionSubset), r, sample_len)
        .into_iter()
        .map(|v| v as u32)
        .collect();
    let mut position = vec![u32::MAX; r];
    for (pos, &v) in sample.iter().enumerate() {
        position[v as usize] = pos as u32;
    }

    let layout = WindowLayout::new(l, c as usize, a as usize, sample_len);
    let (member_offsets, member_ids) = layout.memberships();

    let mut window_edges: Vec<Vec<(u32, u32)>> = vec![Vec::new(); c as usize];
    let mut rng = stream_rng(config.seed, Stream::PartitionEdges);
    let mut touches = 0u64;
    let mut prev = None;
    for (u, v) in g.edges() {
        touches += 1;
        if prev == Some((u, v)) {
            continue;
        }
        prev = Some((u, v));
        let pos = position[v as usize];
        if pos == u32::MAX {
            continue;
        }
        let pos = pos as usize;
        let choices = &member_ids[member_offsets[pos]..member_offsets[pos + 1]];
        let w = match choices.len() {
            0 => continue,
            1 => choices[0] as usize,
            n => choices[rng.random_range(0..n)] as usize,
        };
        let off = layout.offset_in(w, pos).expect("membership implies coverage");
        window_edges[w].push((u, off as u32));
    }

    let held_edges: usize = window_edges.iter().map(Vec::len).sum();
    let cutoff = partition_path_cutoff(c, config.epsilon);
    let matchings: Vec<Vec<(u32, u32)>> = window_edges
        .into_par_iter()
        .map(|edges| {
            let wg = BipartiteGraph::build(l, layout.width, edges).expect("window offsets are in range");
            bounded_matching(&wg, cutoff).pairs().collect()
        })
        .collect();

    for (w, pairs) in matchings.iter().enumerate() {
        for &(u, off) in pairs {
            h.push(u as usize, sample[layout.position(w, off as usize)]);
        }
    }

    Ok(Solution {
        subgraph: h,
        stats: SolveStats {
            edge_touches: touches,
            vertex_counters: r,
            // copied edges (two words each) plus sample, memberships and
            // per-window matching state
            scratch_words: 2 * held_edges
                + sample_len
                + member_offsets.len()
                + member_ids.len()
                + c as usize * (l + layout.width),
        },
    })
}

/// Runs one solver, checks its output and measures it.
pub fn solve(g: &BipartiteGraph, algo: Algorithm, config: &SolverConfig) -> Result<(RecSubgraph, CoverageReport, SolveStats)> {
    config.validate()?;
    let start = Instant::now();
    let solution = match algo {
        Algorithm::Sampling => solve_sampling(g, config),
        Algorithm::Greedy => solve_greedy(g, config),
        Algorithm::Partition => solve_partition(g, config)?,
    };
    let elapsed_ms = start.elapsed().as_secs_f64() * 1e3;

    let Solution { subgraph, stats } = solution;
    if let Some(v) = validate(g, &subgraph, config.params.c as usize).first() {
        return Err(Error::InvalidSubgraph(format!("{algo} produced an invalid subgraph: {v}")));
    }
    let covered = count_covered(&subgraph, config.params.a);
    let upper_bound = upper_bound_estimate(g, &config.params);
    let report = CoverageReport {
        covered,
        upper_bound,
        ratio: ratio(covered, upper_bound),
        elapsed_ms,
        working_set: stats.working_set(),
    };
    Ok((subgraph, report, stats))
}
