//! Closed-form performance bounds and the trivial optimum estimate.
//!
//! Notation: `k = l / r`, so `ck` is the number of selected edges per right
//! vertex when every left vertex uses its whole budget.

use serde::Serialize;

use crate::error::{Error, Result};
use crate::graph::{BipartiteGraph, ProblemParams};

/// Parameters a bound may depend on. Fields that a bound does not use are ignored.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct BoundInputs {
    pub l: f64,
    pub r: f64,
    pub c: u32,
    pub a: u32,
    /// Per-left-vertex degree of the fixed-degree model.
    pub d: f64,
    /// Edge probability of `G(l, r, p)`.
    pub p: f64,
    pub epsilon: f64,
}

impl BoundInputs {
    pub fn k(&self) -> f64 {
        self.l / self.r
    }

    pub fn ck(&self) -> f64 {
        self.c as f64 * self.k()
    }

    /// `gamma` with `p = gamma ln(l) / l`.
    pub fn gamma(&self) -> f64 {
        self.p * self.l / self.l.ln()
    }
}

/// `sum_{i < a} x^i`, i.e. `(x^a - 1) / (x - 1)` extended continuously to `x = 1`.
#[cfg(test)]
fn geometric_sum(x: f64, a: u32) -> f64 {
    ln_geometric_sum(x, a).exp()
}

/// `ln sum_{i < a} x^i` for `x >= 0`, factoring out the largest term when
/// `x > 1` so that large `x^a` does not overflow.
fn ln_geometric_sum(x: f64, a: u32) -> f64 {
    let (scale, base) = if x > 1.0 { ((a as f64 - 1.0) * x.ln(), 1.0 / x) } else { (0.0, x) };
    let mut term = 1.0;
    let mut total = 0.0;
    for _ in 0..a {
        total += term;
        term *= base;
    }
    scale + total.ln()
}

/// Lower bound on the expected number of right vertices the sampling solver
/// brings to in-degree `a` on a fixed-degree graph:
/// `r (1 - exp(-ck + (a - 1) / r) (ck^a - 1) / (ck - 1))`, clamped to `[0, r]`.
pub fn sampling_lower_bound(r: f64, ck: f64, a: u32) -> f64 {
    let miss = (-ck + (a as f64 - 1.0) / r + ln_geometric_sum(ck, a)).exp();
    (r * (1.0 - miss)).clamp(0.0, r)
}

/// [`sampling_lower_bound`] divided by `r`, in the limit `r -> infinity`.
pub fn sampling_limit_fraction(ck: f64, a: u32) -> f64 {
    1.0 - (-ck + ln_geometric_sum(ck, a)).exp()
}

/// Expected approximation ratio of sampling for `a = 1`:
/// `(1 - exp(-ck)) / min(ck, 1)`. Never below `1 - 1/e`, attained at `ck = 1`.
pub fn sampling_approx_ratio(ck: f64) -> f64 {
    -(-ck).exp_m1() / ck.min(1.0)
}

/// Smallest `ck` (on a 0.5 grid, then refined by bisection) at which the
/// large-`r` sampling bound reaches `target`.
pub fn required_ck(a: u32, target: f64) -> Result<f64> {
    const LIMIT: f64 = 1e3;
    const STEP: f64 = 0.5;
    if a == 0 || !(target > 0.0 && target < 1.0) {
        return Err(Error::Precondition(format!(
            "required_ck needs a >= 1 and target in (0, 1) (a={a}, target={target})"
        )));
    }
    let f = |x: f64| sampling_limit_fraction(x, a) - target;

    // The bound dips below zero near the origin for a >= 3, so scan for the
    // first sign change instead of assuming monotonicity.
    let mut hi = STEP;
    while f(hi) < 0.0 {
        hi += STEP;
        if hi > LIMIT {
            return Err(Error::Unreachable { a, target, limit: LIMIT });
        }
    }
    let mut lo = hi - STEP;
    for _ in 0..200 {
        let mid = 0.5 * (lo + hi);
        let fm = f(mid);
        if fm.abs() < 1e-12 {
            return Ok(mid);
        }
        if fm < 0.0 {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    Ok(0.5 * (lo + hi))
}

fn ln_expm1(x: f64) -> f64 {
    if x > 30.0 {
        x + (-(-x).exp()).ln_1p()
    } else {
        x.exp_m1().ln()
    }
}

/// Lower bound on the expected greedy coverage in `G(l, r, p)`:
/// `r - a (lp)^(a-1) / (1-p)^a * sum_{i<r} (1-p)^(l - i a / c)`, clamped to
/// `[0, r]`. Requires `lp >= 1`.
pub fn greedy_expected_bound(l: f64, r: f64, p: f64, c: u32, a: u32) -> Result<f64> {
    let deficit = greedy_bound_deficit(l, r, p, c, a)?;
    Ok((r - deficit).clamp(0.0, r))
}

/// The subtracted term of [`greedy_expected_bound`], unclamped.
///
/// The sum is geometric in `i` and is evaluated in closed form in log space,
/// since `(1-p)^(l - i a / c)` over- or underflows for realistic sizes.
/// For `p = 1` the deficit is 0 when `l >= a` and `r` otherwise.
pub fn greedy_bound_deficit(l: f64, r: f64, p: f64, c: u32, a: u32) -> Result<f64> {
    if !(p > 0.0 && p <= 1.0) || l * p < 1.0 {
        return Err(Error::Precondition(format!("greedy bound needs 0 < p <= 1 and lp >= 1 (l={l}, p={p})")));
    }
    if c == 0 || a == 0 {
        return Err(Error::Precondition(format!("c and a must be positive (c={c}, a={a})")));
    }
    if p == 1.0 {
        return Ok(if l >= a as f64 { 0.0 } else { r });
    }
    if r <= 0.0 {
        return Ok(0.0);
    }
    let ln_keep = (-p).ln_1p();
    let step = -(a as f64 / c as f64) * ln_keep;
    let ln_sum = l * ln_keep + ln_expm1(r * step) - ln_expm1(step);
    let ln_prefactor = (a as f64).ln() + (a as f64 - 1.0) * (l * p).ln() - a as f64 * ln_keep;
    Ok((ln_prefactor + ln_sum).exp())
}

/// `(r (1 - 2 exp(-ck)), (e/4)^(r (1 - exp(-ck))))`: a coverage threshold for
/// sampling with `a = 1` and the printed probability bound attached to it.
pub fn concentration_bound(r: f64, ck: f64) -> (f64, f64) {
    let hit = -(-ck).exp_m1();
    let threshold = r * (1.0 - 2.0 * (-ck).exp());
    let prob = ((std::f64::consts::E / 4.0).ln() * r * hit).exp();
    (threshold, prob)
}

/// Trivial cap on the optimum: `min(floor(l c / a), #{v : deg(v) >= a})`,
/// counting distinct neighbours.
pub fn upper_bound_estimate(g: &BipartiteGraph, params: &ProblemParams) -> usize {
    let budget = g.l() * params.c as usize / params.a as usize;
    let eligible = (0..g.r())
        .filter(|&v| g.distinct_degree_right(v) >= params.a as usize)
        .count();
    budget.min(eligible)
}
