//! Monte-Carlo sweeps over random or loaded graphs.
//!
//! Trial `t` derives one seed, `mix(base_seed, t)`, used both to generate the
//! trial's graph and to seed every solver run on it (on separate streams).
//! Trials run concurrently; rows are put back into a fixed order before they
//! are returned, so output is independent of scheduling.

use std::fmt::Write as _;
use std::fs;
use std::path::{Path, PathBuf};
use std::sync::Arc;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::algorithms::{solve, solve_sampling, Algorithm, GreedyOrder, GreedyTiebreak, SolverConfig};
use crate::bounds::concentration_bound;
use crate::error::{Error, Result};
use crate::generators::{gen_erdos_renyi, gen_fixed_degree, ErdosRenyiSpec, FixedDegreeSpec};
use crate::graph::{count_covered, BipartiteGraph, ProblemParams};
use crate::io::read_edge_list;
use crate::rng::mix;

pub const CSV_HEADER: &str = "model,l,r,d_or_p,c,a,algo,trial,seed,covered,upper_bound,ratio,elapsed_ms";

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "kebab-case")]
pub enum ModelSpec {
    FixedDegree { l: usize, r: usize, d: usize },
    ErdosRenyi { l: usize, r: usize, p: f64 },
    File { path: PathBuf },
}

impl ModelSpec {
    pub fn name(&self) -> &'static str {
        match self {
            ModelSpec::FixedDegree { .. } => "fixed-degree",
            ModelSpec::ErdosRenyi { .. } => "erdos-renyi",
            ModelSpec::File { .. } => "file",
        }
    }

    fn d_or_p(&self) -> String {
        match self {
            ModelSpec::FixedDegree { d, .. } => d.to_string(),
            ModelSpec::ErdosRenyi { p, .. } => p.to_string(),
            ModelSpec::File { .. } => String::new(),
        }
    }

    /// Graph for one trial. Loaded graphs ignore the seed.
    pub fn generate(&self, seed: u64) -> Result<BipartiteGraph> {
        match *self {
            ModelSpec::FixedDegree { l, r, d } => gen_fixed_degree(&FixedDegreeSpec { l, r, d, seed }),
            ModelSpec::ErdosRenyi { l, r, p } => gen_erdos_renyi(&ErdosRenyiSpec { l, r, p, seed }),
            ModelSpec::File { ref path } => Ok(read_edge_list(path)?.graph),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ExperimentSpec {
    pub model: ModelSpec,
    /// `(c, a)` cells, in output order.
    pub sweep: Vec<(u32, u32)>,
    pub algos: Vec<Algorithm>,
    pub trials: usize,
    pub base_seed: u64,
    pub epsilon: f64,
    #[serde(default)]
    pub greedy_order: GreedyOrder,
    #[serde(default)]
    pub greedy_tiebreak: GreedyTiebreak,
    /// Record wall-clock solve times. When off, `elapsed_ms` is written as 0
    /// and output is byte-reproducible.
    #[serde(default = "default_true")]
    pub record_timing: bool,
}

fn default_true() -> bool {
    true
}

impl ExperimentSpec {
    /// Sweep `c` over `cs` at a fixed `a`.
    pub fn c_range(cs: impl IntoIterator<Item = u32>, a: u32) -> Vec<(u32, u32)> {
        cs.into_iter().map(|c| (c, a)).collect()
    }

    pub fn validate(&self) -> Result<()> {
        if self.trials == 0 {
            return Err(Error::Config("trials must be at least 1".into()));
        }
        if self.sweep.is_empty() {
            return Err(Error::Config("sweep must contain at least one (c, a) pair".into()));
        }
        if self.algos.is_empty() {
            return Err(Error::Config("at least one algorithm is required".into()));
        }
        for &(c, a) in &self.sweep {
            ProblemParams::new(c, a)?;
        }
        if !(self.epsilon > 0.0 && self.epsilon <= 1.0) {
            return Err(Error::Config(format!("epsilon must lie in (0, 1], got {}", self.epsilon)));
        }
        Ok(())
    }
}

/// One `(trial, c, a, algo)` measurement.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ExperimentRow {
    pub model: String,
    pub l: usize,
    pub r: usize,
    pub d_or_p: String,
    pub c: u32,
    pub a: u32,
    pub algo: Algorithm,
    pub trial: usize,
    pub seed: u64,
    pub covered: usize,
    pub upper_bound: usize,
    pub ratio: f64,
    pub elapsed_ms: f64,
    pub working_set: usize,
    pub edge_touches: u64,
    /// Why the cell was not solved, if it was not.
    pub skipped: Option<String>,
}

impl ExperimentRow {
    /// True when coverage exceeds the estimated optimum; never expected,
    /// since the estimate is a true bound.
    pub fn flagged(&self) -> bool {
        self.skipped.is_none() && self.covered > self.upper_bound
    }
}

/// Mean, sample standard deviation and standard error of a sample.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct Summary {
    pub n: usize,
    pub mean: f64,
    pub stddev: f64,
    pub stderr: f64,
}

impl Summary {
    pub fn of(values: &[f64]) -> Self {
        let n = values.len();
        if n == 0 {
            return Self { n, mean: f64::NAN, stddev: f64::NAN, stderr: f64::NAN };
        }
        let mean = values.iter().sum::<f64>() / n as f64;
        let stddev = if n > 1 {
            (values.iter().map(|x| (x - mean).powi(2)).sum::<f64>() / (n - 1) as f64).sqrt()
        } else {
            0.0
        };
        Self { n, mean, stddev, stderr: stddev / (n as f64).sqrt() }
    }
}

/// Aggregate over trials for one `(c, a, algo)` cell.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct CellSummary {
    pub c: u32,
    pub a: u32,
    pub algo: Algorithm,
    pub ratio: Summary,
    pub covered: Summary,
    /// `covered / r` per trial.
    pub coverage_fraction: Summary,
    pub elapsed_ms: Summary,
    pub skipped: usize,
}

#[derive(Debug, Clone)]
pub struct ExperimentOutput {
    pub rows: Vec<ExperimentRow>,
    pub cells: Vec<CellSummary>,
}

impl ExperimentOutput {
    pub fn cell(&self, c: u32, a: u32, algo: Algorithm) -> Option<&CellSummary> {
        self.cells.iter().find(|s| s.c == c && s.a == a && s.algo == algo)
    }
}

pub fn run_experiment(spec: &ExperimentSpec) -> Result<ExperimentOutput> {
    spec.validate()?;
    let shared = match &spec.model {
        ModelSpec::File { path } => Some(Arc::new(read_edge_list(path)?.graph)),
        _ => None,
    };
    let model = spec.model.name().to_string();
    let d_or_p = spec.model.d_or_p();

    let per_trial: Vec<Vec<ExperimentRow>> = (0..spec.trials)
        .into_par_iter()
        .map(|trial| {
            let seed = mix(spec.base_seed, trial as u64);
            let graph = match &shared {
                Some(g) => Arc::clone(g),
                None => Arc::new(spec.model.generate(seed)?),
            };
            let mut rows = Vec::with_capacity(spec.sweep.len() * spec.algos.len());
            for &(c, a) in &spec.sweep {
                let config = SolverConfig {
                    params: ProblemParams::new(c, a)?,
                    seed,
                    epsilon: spec.epsilon,
                    greedy_order: spec.greedy_order,
                    greedy_tiebreak: spec.greedy_tiebreak,
                };
                for &algo in &spec.algos {
                    let mut row = ExperimentRow {
                        model: model.clone(),
                        l: graph.l(),
                        r: graph.r(),
                        d_or_p: d_or_p.clone(),
                        c,
                        a,
                        algo,
                        trial,
                        seed,
                        covered: 0,
                        upper_bound: 0,
                        ratio: 0.0,
                        elapsed_ms: 0.0,
                        working_set: 0,
                        edge_touches: 0,
                        skipped: None,
                    };
                    if algo == Algorithm::Partition && a > c {
                        row.skipped = Some(format!("partition requires a <= c (a={a}, c={c})"));
                    } else {
                        let (_, report, stats) = solve(&graph, algo, &config)?;
                        row.covered = report.covered;
                        row.upper_bound = report.upper_bound;
                        row.ratio = report.ratio;
                        row.elapsed_ms = if spec.record_timing { report.elapsed_ms } else { 0.0 };
                        row.working_set = report.working_set;
                        row.edge_touches = stats.edge_touches;
                    }
                    rows.push(row);
                }
            }
            Ok(rows)
        })
        .collect::<Result<_>>()?;

    let mut rows: Vec<ExperimentRow> = per_trial.into_iter().flatten().collect();
    let cell_index = |r: &ExperimentRow| {
        let s = spec.sweep.iter().position(|&x| x == (r.c, r.a)).unwrap_or(usize::MAX);
        let a = spec.algos.iter().position(|&x| x == r.algo).unwrap_or(usize::MAX);
        (s, a)
    };
    rows.sort_by_key(|r| (cell_index(r), r.trial));

    let cells = rows
        .chunk_by(|x, y| cell_index(x) == cell_index(y))
        .map(|chunk| {
            let done: Vec<&ExperimentRow> = chunk.iter().filter(|r| r.skipped.is_none()).collect();
            let pick = |f: &dyn Fn(&ExperimentRow) -> f64| Summary::of(&done.iter().map(|r| f(r)).collect::<Vec<_>>());
            CellSummary {
                c: chunk[0].c,
                a: chunk[0].a,
                algo: chunk[0].algo,
                ratio: pick(&|r| r.ratio),
                covered: pick(&|r| r.covered as f64),
                coverage_fraction: pick(&|r| r.covered as f64 / r.r as f64),
                elapsed_ms: pick(&|r| r.elapsed_ms),
                skipped: chunk.len() - done.len(),
            }
        })
        .collect();

    Ok(ExperimentOutput { rows, cells })
}

/// CSV text with the fixed header. Skipped cells leave the measurement
/// columns empty.
pub fn format_csv(rows: &[ExperimentRow]) -> String {
    let mut out = String::with_capacity(64 * (rows.len() + 1));
    out.push_str(CSV_HEADER);
    out.push('\n');
    for r in rows {
        write!(out, "{},{},{},{},{},{},{},{},{},", r.model, r.l, r.r, r.d_or_p, r.c, r.a, r.algo, r.trial, r.seed).unwrap();
        if r.skipped.is_some() {
            out.push_str(",,,\n");
        } else {
            writeln!(out, "{},{},{:.6},{:.3}", r.covered, r.upper_bound, r.ratio, r.elapsed_ms).unwrap();
        }
    }
    out
}

pub fn emit_csv(rows: &[ExperimentRow], path: impl AsRef<Path>) -> Result<()> {
    let path = path.as_ref();
    fs::write(path, format_csv(rows)).map_err(|e| Error::io(path, e))
}

/// Plot-ready table: one line per `(c, a)` cell, with mean ratio and its
/// standard error for each algorithm.
pub fn format_plotdata(cells: &[CellSummary]) -> String {
    let mut algos: Vec<Algorithm> = Vec::new();
    let mut keys: Vec<(u32, u32)> = Vec::new();
    for s in cells {
        if !algos.contains(&s.algo) {
            algos.push(s.algo);
        }
        if !keys.contains(&(s.c, s.a)) {
            keys.push((s.c, s.a));
        }
    }
    let mut out = String::from("c,a");
    for algo in &algos {
        write!(out, ",{algo}_mean,{algo}_stderr").unwrap();
    }
    out.push('\n');
    for (c, a) in keys {
        write!(out, "{c},{a}").unwrap();
        for &algo in &algos {
            match cells.iter().find(|s| s.c == c && s.a == a && s.algo == algo) {
                Some(s) if s.ratio.n > 0 => write!(out, ",{:.6},{:.6}", s.ratio.mean, s.ratio.stderr).unwrap(),
                _ => out.push_str(",,"),
            }
        }
        out.push('\n');
    }
    out
}

pub fn emit_plotdata(cells: &[CellSummary], path: impl AsRef<Path>) -> Result<()> {
    let path = path.as_ref();
    fs::write(path, format_plotdata(cells)).map_err(|e| Error::io(path, e))
}

/// Empirical check of the sampling concentration bound (`a = 1`).
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct ConcentrationCheck {
    pub threshold: f64,
    pub prob_bound: f64,
    /// Fraction of trials with coverage at or below `threshold`.
    pub lower_tail_frequency: f64,
    pub mean_covered: f64,
    pub trials: usize,
}

/// Runs sampling with budget `c` on `trials` fixed-degree graphs and reports
/// how often coverage falls to the concentration threshold.
pub fn concentration_check(model: (usize, usize, usize), c: u32, trials: usize, base_seed: u64) -> Result<ConcentrationCheck> {
    let (l, r, d) = model;
    if trials == 0 {
        return Err(Error::Config("trials must be at least 1".into()));
    }
    let params = ProblemParams::new(c, 1)?;
    let ck = c as f64 * l as f64 / r as f64;
    let (threshold, prob_bound) = concentration_bound(r as f64, ck);
    let covered: Vec<usize> = (0..trials)
        .into_par_iter()
        .map(|t| {
            let seed = mix(base_seed, t as u64);
            let g = gen_fixed_degree(&FixedDegreeSpec { l, r, d, seed })?;
            let h = solve_sampling(&g, &SolverConfig::new(params, seed)).subgraph;
            Ok(count_covered(&h, 1))
        })
        .collect::<Result<_>>()?;
    let low = covered.iter().filter(|&&s| s as f64 <= threshold).count();
    Ok(ConcentrationCheck {
        threshold,
        prob_bound,
        lower_tail_frequency: low as f64 / trials as f64,
        mean_covered: covered.iter().sum::<usize>() as f64 / trials as f64,
        trials,
    })
}
