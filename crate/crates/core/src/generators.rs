//! Seeded random candidate graphs.
//!
//! * Fixed-degree model: every left vertex draws `d` right neighbours
//!   uniformly and independently, with replacement. Repeated draws are kept
//!   as parallel edges.
//! * `G(l, r, p)`: each of the `l * r` possible edges appears independently
//!   with probability `p`.

use rand::Rng as _;
use rand_distr::{Distribution, Geometric};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::graph::BipartiteGraph;
use crate::rng::{stream_rng, Stream};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct FixedDegreeSpec {
    pub l: usize,
    pub r: usize,
    pub d: usize,
    pub seed: u64,
}

impl FixedDegreeSpec {
    pub fn validate(&self) -> Result<()> {
        if self.d == 0 || self.r == 0 {
            return Err(Error::Config(format!(
                "fixed-degree model needs d >= 1 and r >= 1 (d={}, r={})",
                self.d, self.r
            )));
        }
        Ok(())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ErdosRenyiSpec {
    pub l: usize,
    pub r: usize,
    pub p: f64,
    pub seed: u64,
}

impl ErdosRenyiSpec {
    pub fn validate(&self) -> Result<()> {
        if !(0.0..=1.0).contains(&self.p) {
            return Err(Error::Config(format!("edge probability must lie in [0, 1], got {}", self.p)));
        }
        Ok(())
    }

    /// `gamma` such that `p = gamma * ln(l) / l`.
    pub fn gamma(&self) -> f64 {
        gamma(self.p, self.l)
    }
}

pub fn gamma(p: f64, l: usize) -> f64 {
    let l = l as f64;
    p * l / l.ln()
}

pub fn gen_fixed_degree(spec: &FixedDegreeSpec) -> Result<BipartiteGraph> {
    spec.validate()?;
    let mut rng = stream_rng(spec.seed, Stream::Generate);
    let r = spec.r as u32;
    let mut edges = Vec::with_capacity(spec.l * spec.d);
    for u in 0..spec.l as u32 {
        for _ in 0..spec.d {
            edges.push((u, rng.random_range(0..r)));
        }
    }
    BipartiteGraph::build(spec.l, spec.r, edges)
}

pub fn gen_erdos_renyi(spec: &ErdosRenyiSpec) -> Result<BipartiteGraph> {
    spec.validate()?;
    let total = spec.l as u64 * spec.r as u64;
    if spec.p == 0.0 || total == 0 {
        return Ok(BipartiteGraph::empty(spec.l, spec.r));
    }
    let r = spec.r as u64;
    let to_edge = |idx: u64| ((idx / r) as u32, (idx % r) as u32);
    if spec.p == 1.0 {
        return BipartiteGraph::build(spec.l, spec.r, (0..total).map(to_edge));
    }

    // Skip-length sampling: the gap before the next present edge is geometric.
    let gaps = Geometric::new(spec.p).expect("p checked to lie in (0, 1)");
    let mut rng = stream_rng(spec.seed, Stream::Generate);
    let expected = (total as f64 * spec.p) as usize;
    let mut edges = Vec::with_capacity(expected + expected / 8 + 16);
    let mut next = 0u64;
    loop {
        next = match next.checked_add(gaps.sample(&mut rng)) {
            Some(idx) if idx < total => idx,
            _ => break,
        };
        edges.push(to_edge(next));
        next += 1;
    }
    BipartiteGraph::build(spec.l, spec.r, edges)
}
