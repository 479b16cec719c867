//! Selection of degree-capped recommendation subgraphs on bipartite graphs.
//!
//! A candidate graph `G = (L, R, E)` links "discovered" pages on the left to
//! pages that should be surfaced on the right. A `(c, a)` recommendation
//! subgraph keeps at most `c` out-edges per left vertex; its quality is the
//! number of right vertices that end up with in-degree at least `a`.
//!
//! The crate provides three solvers ([`algorithms`]), seeded random graph
//! models ([`generators`]), closed-form performance bounds ([`bounds`]), an
//! exact small-instance optimum ([`oracle`]) and an experiment harness
//! ([`experiment`]).

pub mod algorithms;
pub mod bounds;
pub mod error;
pub mod experiment;
pub mod generators;
pub mod graph;
pub mod io;
pub mod matching;
pub mod oracle;
pub mod rng;

pub use algorithms::{solve, Algorithm, GreedyOrder, GreedyTiebreak, SolveStats, SolverConfig};
pub use error::{Error, Result};
pub use graph::{BipartiteGraph, CoverageReport, ProblemParams, RecSubgraph, Violation};
