//! Greedy starter-set search.
//!
//! Maximizes the Fisher-weighted score
//! `S(A) = Σ_{i≠j∈A} [√(n₁−3)·z(r̂₁,ij) − √(n₂−3)·z(r̂₂,ij)]`
//! over sets of fixed size by repeatedly applying the best single swap
//! (one member out, one non-member in) until no swap increases the score.

use alloc::vec;
use alloc::vec::Vec;

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use crate::data::{ConditionPair, VariableSet};
use crate::error::{Error, Result};
use crate::math::sqrt;

const FISHER_CLAMP: f64 = 1.0 - 1e-12;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct InitConfig {
    /// Size of the starter set. Smaller is safer than larger: an oversized
    /// start dilutes the signal of a small clique.
    pub init_size: usize,
    pub max_swaps: usize,
    pub rng_seed: u64,
    /// Independent random starts; the best terminal set wins.
    pub restarts: usize,
}

impl InitConfig {
    pub fn new(init_size: usize, rng_seed: u64) -> Self {
        Self { init_size, max_swaps: 10 * init_size, rng_seed, restarts: 3 }
    }
}

impl Default for InitConfig {
    fn default() -> Self {
        Self::new(50, 0)
    }
}

/// Fisher transform `½ ln((1+r)/(1−r))`, with `r` clamped just inside
/// `(−1, 1)`.
pub fn fisher_z(r: f64) -> f64 {
    libm::atanh(r.clamp(-FISHER_CLAMP, FISHER_CLAMP))
}

struct Weights {
    w1: f64,
    w2: f64,
}

impl Weights {
    fn new(pair: &ConditionPair) -> Result<Self> {
        let (n1, n2) = (pair.cond1().n(), pair.cond2().n());
        if n1 < 4 || n2 < 4 {
            return Err(Error::TooFewSamples { n: n1.min(n2), min: 4 });
        }
        Ok(Self { w1: sqrt((n1 - 3) as f64), w2: sqrt((n2 - 3) as f64) })
    }

    #[inline]
    fn pair_term(&self, pair: &ConditionPair, i: usize, j: usize) -> f64 {
        self.w1 * fisher_z(pair.cond1().corr(i, j)) - self.w2 * fisher_z(pair.cond2().corr(i, j))
    }
}

/// Initialization score of `set`, diagonal excluded. Costs `O(|A|²·n)`.
pub fn score(pair: &ConditionPair, set: &VariableSet) -> Result<f64> {
    if set.len() < 2 {
        return Err(Error::SetTooSmall { min: 2, got: set.len() });
    }
    set.check(pair.p())?;
    let weights = Weights::new(pair)?;
    let idx = set.as_slice();
    let mut total = 0.0;
    for (a, &i) in idx.iter().enumerate() {
        for &j in &idx[a + 1..] {
            total += weights.pair_term(pair, i, j);
        }
    }
    Ok(2.0 * total)
}

/// Swap-search state for one start.
///
/// `terms[slot * p + v]` holds the pair term of `v` with the member in
/// `slot` (zero when `v` is that member), and `row_sum[v]` its sum over
/// slots. Removing `a` and adding `r` changes the score by
/// `2·(row_sum[r] − terms[slot(a), r] − row_sum[a])`, so a full
/// neighborhood scan is `O(p·|A|)`; accepting a swap refreshes one slot in
/// `O(p·n)`.
struct SwapState<'a> {
    pair: &'a ConditionPair,
    weights: Weights,
    p: usize,
    members: Vec<usize>,
    in_set: Vec<bool>,
    terms: Vec<f64>,
    row_sum: Vec<f64>,
}

impl<'a> SwapState<'a> {
    fn new(pair: &'a ConditionPair, weights: Weights, members: Vec<usize>) -> Self {
        let p = pair.p();
        let mut in_set = vec![false; p];
        for &m in &members {
            in_set[m] = true;
        }
        let mut state = Self {
            pair,
            weights,
            p,
            terms: vec![0.0; members.len() * p],
            row_sum: vec![0.0; p],
            members,
            in_set,
        };
        for slot in 0..state.members.len() {
            state.fill_slot(slot);
        }
        state
    }

    fn fill_slot(&mut self, slot: usize) {
        let m = self.members[slot];
        let p = self.p;
        let (pair, weights) = (self.pair, &self.weights);
        let col = &mut self.terms[slot * p..(slot + 1) * p];
        for (v, (t, s)) in col.iter_mut().zip(self.row_sum.iter_mut()).enumerate() {
            let new = if v == m { 0.0 } else { weights.pair_term(pair, v, m) };
            *s += new - *t;
            *t = new;
        }
    }

    fn score(&self) -> f64 {
        self.members.iter().map(|&m| self.row_sum[m]).sum()
    }

    /// Best strictly improving swap as `(slot, incoming, gain)`, ties broken
    /// by the lowest `(outgoing, incoming)` index pair.
    fn best_swap(&self, eligible: &[usize]) -> Option<(usize, usize, f64)> {
        let mut order: Vec<usize> = (0..self.members.len()).collect();
        order.sort_unstable_by_key(|&s| self.members[s]);
        let tol = 1e-12 * (1.0 + self.score().abs());
        let mut best: Option<(usize, usize, f64)> = None;
        for &slot in &order {
            let out = self.members[slot];
            let base = self.row_sum[out];
            let col = &self.terms[slot * self.p..(slot + 1) * self.p];
            for &r in eligible {
                if self.in_set[r] {
                    continue;
                }
                let gain = 2.0 * (self.row_sum[r] - col[r] - base);
                if gain > tol && best.is_none_or(|(_, _, g)| gain > g) {
                    best = Some((slot, r, gain));
                }
            }
        }
        best
    }

    fn apply(&mut self, slot: usize, incoming: usize) {
        self.in_set[self.members[slot]] = false;
        self.in_set[incoming] = true;
        self.members[slot] = incoming;
        self.fill_slot(slot);
    }
}

/// Runs one swap search from `start` and returns the terminal members and
/// their score.
fn climb(pair: &ConditionPair, start: Vec<usize>, eligible: &[usize], max_swaps: usize) -> Result<(Vec<usize>, f64)> {
    let mut state = SwapState::new(pair, Weights::new(pair)?, start);
    for _ in 0..max_swaps {
        match state.best_swap(eligible) {
            Some((slot, r, _)) => state.apply(slot, r),
            None => break,
        }
    }
    let score = state.score();
    Ok((state.members, score))
}

/// Greedy pairwise-swap maximization of [`score`] from `config.restarts`
/// seeded random starts; returns the terminal set with the highest score.
///
/// Variables marked inactive in `pair` are never chosen. When exactly
/// `init_size` variables are eligible they are returned as is.
pub fn greedy_init(pair: &ConditionPair, config: &InitConfig) -> Result<VariableSet> {
    greedy_init_traced(pair, config).map(|(set, _)| set)
}

/// [`greedy_init`] that also returns the winning score.
pub fn greedy_init_traced(pair: &ConditionPair, config: &InitConfig) -> Result<(VariableSet, f64)> {
    let eligible: Vec<usize> = (0..pair.p()).filter(|&i| pair.is_active(i)).collect();
    let k = config.init_size;
    if k < 2 {
        return Err(Error::InvalidParameter(alloc::format!("init_size must be at least 2, got {k}")));
    }
    if k > eligible.len() {
        return Err(Error::InvalidParameter(alloc::format!(
            "init_size {k} exceeds the {} eligible variables",
            eligible.len()
        )));
    }
    if config.restarts == 0 {
        return Err(Error::InvalidParameter("restarts must be positive".into()));
    }
    if k == eligible.len() {
        let set = VariableSet::new(eligible);
        let s = score(pair, &set)?;
        return Ok((set, s));
    }

    let mut best: Option<(Vec<usize>, f64)> = None;
    for restart in 0..config.restarts {
        let mut rng = ChaCha8Rng::seed_from_u64(config.rng_seed);
        rng.set_stream(restart as u64);
        let start: Vec<usize> = rand::seq::index::sample(&mut rng, eligible.len(), k)
            .into_iter()
            .map(|pos| eligible[pos])
            .collect();
        let (members, s) = climb(pair, start, &eligible, config.max_swaps)?;
        if best.as_ref().is_none_or(|(_, b)| s > *b) {
            best = Some((members, s));
        }
    }
    let (members, s) = best.expect("at least one restart");
    Ok((VariableSet::new(members), s))
}
