//! Per-variable differential correlation tests against a fixed set.
//!
//! For a set `A` and variable `i` the statistic is the difference of the
//! average correlations of `i` with `A` under the two conditions,
//! `Δ̂(i, A) = W₁ᵀŨᵢ − W₂ᵀṼᵢ`, where `W` is the centroid of the standardized
//! columns of `A`. Under the null its variance is `τ₁/n₁ + τ₂/n₂`, with each
//! `τ` estimated from the delta-method influence function of the average
//! sample correlation.

use alloc::vec;
use alloc::vec::Vec;

use crate::data::{centroid_unchecked, ConditionPair, StandardizedCondition, VariableSet};
use crate::error::{Error, Result};
use crate::math::{dot, normal_sf, sqrt};

/// Floor applied to variance estimates so the standardized statistic stays
/// finite.
pub const VARIANCE_FLOOR: f64 = 1e-12;

/// Statistics of every variable against one tested set.
#[derive(Debug, Clone, PartialEq)]
pub struct TestReport {
    pub set_tested: VariableSet,
    pub delta: Vec<f64>,
    pub sigma0: Vec<f64>,
    pub pvalues: Vec<f64>,
}

/// Outcome of one update step: the report and the variables it selects.
#[derive(Debug, Clone, PartialEq)]
pub struct StepResult {
    pub report: TestReport,
    pub selected: VariableSet,
}

fn check_index(i: usize, p: usize) -> Result<()> {
    if i >= p {
        Err(Error::IndexOutOfRange { index: i, p })
    } else {
        Ok(())
    }
}

/// `(1/|A|) Σ_{j∈A} (r̂₁,ij − r̂₂,ij)`, via the two centroids.
///
/// When `i ∈ A` the `j = i` term is kept; it is exactly zero.
pub fn delta_hat(pair: &ConditionPair, i: usize, set: &VariableSet) -> Result<f64> {
    set.check(pair.p())?;
    check_index(i, pair.p())?;
    let w1 = centroid_unchecked(pair.cond1(), set);
    let w2 = centroid_unchecked(pair.cond2(), set);
    Ok(dot(&w1, pair.cond1().column(i)) - dot(&w2, pair.cond2().column(i)))
}

/// Scratch space reused across variables by [`variance_and_average`].
struct Scratch {
    y: Vec<f64>,
}

impl Scratch {
    fn new(n: usize) -> Self {
        Self { y: vec![0.0; n] }
    }
}

/// Returns `(r_A, τ̂)` for variable `i` given the unit-norm centroid `w`.
///
/// With `U = √n·u` and `W = √n·w` on the variance-one scale,
/// `Yₗ = (1/|A|) Σ_j r_ij U²_jl` and
///
/// ```text
/// τ̂ = (1/n) Σₗ { r_A²/4 U⁴ − r_A Wₗ U³ + (r_A Yₗ/2 + Wₗ²) U² − Wₗ Yₗ U + Yₗ²/4 }
///   = (1/n) Σₗ ( Wₗ U − (r_A U² + Yₗ)/2 )²
/// ```
///
/// The square form is evaluated, so the estimate is nonnegative up to
/// rounding; it is floored at [`VARIANCE_FLOOR`].
fn variance_and_average(
    cond: &StandardizedCondition,
    i: usize,
    set: &VariableSet,
    w: &[f64],
    scratch: &mut Scratch,
) -> (f64, f64) {
    let n = cond.n() as f64;
    let ui = cond.column(i);
    let r_a = dot(w, ui);

    let scale = n / set.len() as f64;
    scratch.y.iter_mut().for_each(|v| *v = 0.0);
    for j in set.iter() {
        let uj = cond.column(j);
        let c = dot(ui, uj) * scale;
        for (y, &u) in scratch.y.iter_mut().zip(uj) {
            *y += c * u * u;
        }
    }

    let sqrt_n = sqrt(n);
    let mut acc = 0.0;
    for ((&ul, &wl), &yl) in ui.iter().zip(w).zip(&scratch.y) {
        let u = ul * sqrt_n;
        let wv = wl * sqrt_n;
        let term = wv * u - 0.5 * (r_a * u * u + yl);
        acc += term * term;
    }
    (r_a, (acc / n).max(VARIANCE_FLOOR))
}

/// Consistent estimate of `Var(√n · r̄(i, A))` for one condition. Runs in
/// `O(n·|A|)` time and `O(n + |A|)` extra space.
pub fn tau_hat(cond: &StandardizedCondition, i: usize, set: &VariableSet) -> Result<f64> {
    set.check(cond.p())?;
    check_index(i, cond.p())?;
    let w = centroid_unchecked(cond, set);
    let mut scratch = Scratch::new(cond.n());
    Ok(variance_and_average(cond, i, set, &w, &mut scratch).1)
}

/// Null standard deviation of `Δ̂`: `sqrt(τ₁/n₁ + τ₂/n₂)`, floored at
/// `1e-12`.
pub fn sigma0(tau1: f64, n1: usize, tau2: f64, n2: usize) -> f64 {
    sqrt(tau1 / n1 as f64 + tau2 / n2 as f64).max(VARIANCE_FLOOR)
}

/// One-sided asymptotic p-value `1 − Φ(δ/σ₀)`.
pub fn p_value(delta: f64, sigma0: f64) -> f64 {
    normal_sf(delta / sigma0)
}

/// Benjamini–Yekutieli step-up selection at level `alpha`.
///
/// Finds the largest `k` with `p₍ₖ₎ < k·α / (p·Σᵢ₌₁ᵏ 1/i)` and returns every
/// index whose p-value is at most `p₍ₖ₎`, ties included. Returns the empty
/// set when no `k` qualifies.
pub fn by_fdr_select(pvalues: &[f64], alpha: f64) -> VariableSet {
    let candidates: Vec<usize> = (0..pvalues.len()).collect();
    by_select_among(pvalues, &candidates, alpha)
}

/// [`by_fdr_select`] restricted to `candidates`; the number of tests is
/// `candidates.len()`.
fn by_select_among(pvalues: &[f64], candidates: &[usize], alpha: f64) -> VariableSet {
    let m = candidates.len();
    if m == 0 {
        return VariableSet::empty();
    }
    let mut sorted: Vec<f64> = candidates.iter().map(|&i| pvalues[i]).collect();
    sorted.sort_by(|a, b| a.total_cmp(b));

    let mut harmonic = 0.0;
    let mut cutoff = None;
    for (idx, &pv) in sorted.iter().enumerate() {
        let k = (idx + 1) as f64;
        harmonic += 1.0 / k;
        if pv < k * alpha / (m as f64 * harmonic) {
            cutoff = Some(pv);
        }
    }
    match cutoff {
        Some(t) => candidates.iter().copied().filter(|&i| pvalues[i] <= t).collect(),
        None => VariableSet::empty(),
    }
}

/// Tests every variable against `set` and applies the BY selection.
///
/// The per-variable loop shares the two centroids and, with the `parallel`
/// feature, runs on the rayon pool. Each variable writes only its own slot,
/// so the report is identical for any number of workers.
pub fn test_step(pair: &ConditionPair, set: &VariableSet, alpha: f64) -> Result<StepResult> {
    set.check(pair.p())?;
    if !(alpha > 0.0 && alpha < 1.0) {
        return Err(Error::InvalidParameter(alloc::format!("alpha must lie in (0, 1), got {alpha}")));
    }
    let (c1, c2) = (pair.cond1(), pair.cond2());
    let w1 = centroid_unchecked(c1, set);
    let w2 = centroid_unchecked(c2, set);
    let (n1, n2) = (c1.n(), c2.n());

    let eval = |scratch: &mut (Scratch, Scratch), i: usize| -> (f64, f64, f64) {
        let (r1, t1) = variance_and_average(c1, i, set, &w1, &mut scratch.0);
        let (r2, t2) = variance_and_average(c2, i, set, &w2, &mut scratch.1);
        let delta = r1 - r2;
        let s0 = sigma0(t1, n1, t2, n2);
        (delta, s0, p_value(delta, s0))
    };
    let new_scratch = || (Scratch::new(n1), Scratch::new(n2));

    #[cfg(feature = "parallel")]
    let stats: Vec<(f64, f64, f64)> = {
        use rayon::prelude::*;
        (0..pair.p()).into_par_iter().map_init(new_scratch, eval).collect()
    };
    #[cfg(not(feature = "parallel"))]
    let stats: Vec<(f64, f64, f64)> = {
        let mut scratch = new_scratch();
        (0..pair.p()).map(|i| eval(&mut scratch, i)).collect()
    };

    let mut delta = Vec::with_capacity(stats.len());
    let mut sig = Vec::with_capacity(stats.len());
    let mut pvalues = Vec::with_capacity(stats.len());
    for (d, s, pv) in stats {
        delta.push(d);
        sig.push(s);
        pvalues.push(pv);
    }

    let selected = if pair.active_count() == pair.p() {
        by_fdr_select(&pvalues, alpha)
    } else {
        let candidates: Vec<usize> = (0..pair.p()).filter(|&i| pair.is_active(i)).collect();
        by_select_among(&pvalues, &candidates, alpha)
    };
    Ok(StepResult {
        report: TestReport { set_tested: set.clone(), delta, sigma0: sig, pvalues },
        selected,
    })
}
