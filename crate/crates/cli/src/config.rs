//! Experiment configuration: flags override the spec file, which overrides defaults.

use std::path::{Path, PathBuf};

use recsub::algorithms::{GreedyOrder, GreedyTiebreak};
use recsub::experiment::{ExperimentSpec, ModelSpec};
use recsub::{Algorithm, Error, Result};
use serde::Deserialize;

/// Every setting is optional so that a file and the command line can each
/// supply a subset.
#[derive(Debug, Clone, Default, Deserialize)]
#[serde(deny_unknown_fields, rename_all = "kebab-case")]
pub struct PartialSpec {
    pub model: Option<String>,
    pub l: Option<usize>,
    pub r: Option<usize>,
    pub d: Option<usize>,
    pub p: Option<f64>,
    pub path: Option<PathBuf>,
    /// Explicit `(c, a)` pairs; wins over `c` + `a`.
    pub sweep: Option<Vec<(u32, u32)>>,
    pub c: Option<Vec<u32>>,
    pub a: Option<u32>,
    pub algos: Option<Vec<Algorithm>>,
    pub trials: Option<usize>,
    pub base_seed: Option<u64>,
    pub epsilon: Option<f64>,
    pub greedy_order: Option<GreedyOrder>,
    pub greedy_tiebreak: Option<GreedyTiebreak>,
    pub record_timing: Option<bool>,
}

impl PartialSpec {
    pub fn from_file(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path).map_err(|e| Error::Io { path: path.to_path_buf(), source: e })?;
        toml::from_str(&text).map_err(|e| Error::Config(format!("{}: {e}", path.display())))
    }

    /// Fields set in `self` win; the rest come from `base`.
    pub fn over(self, base: PartialSpec) -> PartialSpec {
        // an explicit c list on the command line replaces a file sweep
        let sweep = if self.sweep.is_none() && self.c.is_some() { None } else { self.sweep.or(base.sweep) };
        PartialSpec {
            model: self.model.or(base.model),
            l: self.l.or(base.l),
            r: self.r.or(base.r),
            d: self.d.or(base.d),
            p: self.p.or(base.p),
            path: self.path.or(base.path),
            sweep,
            c: self.c.or(base.c),
            a: self.a.or(base.a),
            algos: self.algos.or(base.algos),
            trials: self.trials.or(base.trials),
            base_seed: self.base_seed.or(base.base_seed),
            epsilon: self.epsilon.or(base.epsilon),
            greedy_order: self.greedy_order.or(base.greedy_order),
            greedy_tiebreak: self.greedy_tiebreak.or(base.greedy_tiebreak),
            record_timing: self.record_timing.or(base.record_timing),
        }
    }

    /// Fills the gaps with the desk-scale defaults and validates.
    pub fn resolve(self) -> Result<ExperimentSpec> {
        let l = self.l.unwrap_or(2500);
        let r = self.r.unwrap_or(10_000);
        let model = match self.model.as_deref().unwrap_or("fixed-degree") {
            "fixed-degree" => ModelSpec::FixedDegree { l, r, d: self.d.unwrap_or(20) },
            "erdos-renyi" => {
                let p = self.p.ok_or_else(|| Error::Config("erdos-renyi model needs p".into()))?;
                ModelSpec::ErdosRenyi { l, r, p }
            }
            "file" => {
                let path = self.path.ok_or_else(|| Error::Config("file model needs path".into()))?;
                ModelSpec::File { path }
            }
            other => return Err(Error::Config(format!("unknown model '{other}'"))),
        };
        let sweep = match self.sweep {
            Some(s) => s,
            None => ExperimentSpec::c_range(self.c.unwrap_or_else(|| (1..=10).collect()), self.a.unwrap_or(1)),
        };
        let spec = ExperimentSpec {
            model,
            sweep,
            algos: self.algos.unwrap_or_else(|| vec![Algorithm::Sampling, Algorithm::Greedy]),
            trials: self.trials.unwrap_or(100),
            base_seed: self.base_seed.unwrap_or(0),
            epsilon: self.epsilon.unwrap_or(0.1),
            greedy_order: self.greedy_order.unwrap_or_default(),
            greedy_tiebreak: self.greedy_tiebreak.unwrap_or_default(),
            record_timing: self.record_timing.unwrap_or(true),
        };
        spec.validate()?;
        Ok(spec)
    }
}

/// Parses `3`, `1,2,5` or an inclusive range `1..10`.
pub fn parse_c_list(s: &str) -> std::result::Result<Vec<u32>, String> {
    if let Some((lo, hi)) = s.split_once("..") {
        let lo: u32 = lo.trim().parse().map_err(|_| format!("bad range start in '{s}'"))?;
        let hi: u32 = hi.trim_start_matches('=').trim().parse().map_err(|_| format!("bad range end in '{s}'"))?;
        if lo > hi {
            return Err(format!("empty range '{s}'"));
        }
        return Ok((lo..=hi).collect());
    }
    s.split(',').map(|x| x.trim().parse().map_err(|_| format!("bad value '{x}'"))).collect()
}
