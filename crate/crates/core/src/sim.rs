//! Gaussian designs with a planted differentially correlated block.
//!
//! Variables `0..k` form the block. Under condition `c` their pairwise
//! correlation is `rho_c`; every other off-diagonal entry is zero
//! (uncorrelated background) or `rho1/3` added everywhere in both conditions
//! (positive background). Samples come from a factor construction, so
//! generation is `O(n·p)` with no `p × p` factorization:
//!
//! ```text
//! x_j = √b·g + √ρ·z·[j < k] + √(1 − b − ρ·[j < k])·ε_j
//! ```
//!
//! with independent standard normal `g`, `z`, `ε_j` and `b` the background
//! boost.

use alloc::format;
use alloc::string::String;
use alloc::vec;
use alloc::vec::Vec;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;

use crate::data::{DataMatrix, VariableSet};
use crate::error::{Error, Result};
use crate::math::sqrt;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Background {
    Uncorrelated,
    Positive,
}

impl Background {
    pub fn as_str(self) -> &'static str {
        match self {
            Background::Uncorrelated => "uncorrelated",
            Background::Positive => "positive",
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SimulationSpec {
    pub p: usize,
    pub k: usize,
    pub n1: usize,
    pub n2: usize,
    pub rho1: f64,
    pub rho2: f64,
    pub background: Background,
    pub rng_seed: u64,
    pub replicates: usize,
}

impl Default for SimulationSpec {
    fn default() -> Self {
        Self {
            p: 500,
            k: 50,
            n1: 100,
            n2: 100,
            rho1: 0.5,
            rho2: 0.0,
            background: Background::Uncorrelated,
            rng_seed: 0,
            replicates: 20,
        }
    }
}

impl SimulationSpec {
    /// Off-diagonal boost shared by every pair in both conditions.
    pub fn boost(&self) -> f64 {
        match self.background {
            Background::Uncorrelated => 0.0,
            Background::Positive => self.rho1 / 3.0,
        }
    }

    /// Population correlation of variables `i` and `j` under condition 1 or 2.
    pub fn population_corr(&self, condition: u8, i: usize, j: usize) -> f64 {
        if i == j {
            return 1.0;
        }
        let rho = if condition == 1 { self.rho1 } else { self.rho2 };
        let block = if i < self.k && j < self.k { rho } else { 0.0 };
        block + self.boost()
    }

    pub fn validate(&self) -> Result<()> {
        let bad = |msg: String| Err(Error::InvalidParameter(msg));
        if self.k > self.p {
            return bad(format!("clique size {} exceeds p = {}", self.k, self.p));
        }
        if self.k < 2 {
            return bad(format!("clique size must be at least 2, got {}", self.k));
        }
        if self.n1 < 2 || self.n2 < 2 {
            return bad(format!("sample sizes must be at least 2, got {} and {}", self.n1, self.n2));
        }
        for (name, rho) in [("rho1", self.rho1), ("rho2", self.rho2)] {
            if !(0.0..1.0).contains(&rho) {
                return bad(format!("{name} must lie in [0, 1), got {rho}"));
            }
            if rho + self.boost() >= 1.0 {
                return bad(format!("{name} + rho1/3 = {} must stay below 1", rho + self.boost()));
            }
        }
        Ok(())
    }
}

/// Planted block indices.
#[derive(Debug, Clone, PartialEq)]
pub struct GroundTruth {
    pub clique: VariableSet,
}

fn variable_names(p: usize) -> Vec<String> {
    let width = format!("{}", p.max(1) - 1).len();
    (0..p).map(|j| format!("v{j:0width$}")).collect()
}

fn draw_condition(rng: &mut ChaCha8Rng, n: usize, p: usize, k: usize, rho: f64, boost: f64) -> Vec<f64> {
    let global: Vec<f64> = (0..n).map(|_| rng.sample(StandardNormal)).collect();
    let block: Vec<f64> = (0..n).map(|_| rng.sample(StandardNormal)).collect();
    let (gb, bb) = (sqrt(boost), sqrt(rho));
    let mut values = vec![0.0; n * p];
    for (j, col) in values.chunks_exact_mut(n).enumerate() {
        let in_block = j < k;
        let own = sqrt(1.0 - boost - if in_block { rho } else { 0.0 });
        for (l, v) in col.iter_mut().enumerate() {
            let eps: f64 = rng.sample(StandardNormal);
            let shared = gb * global[l] + if in_block { bb * block[l] } else { 0.0 };
            *v = shared + own * eps;
        }
    }
    values
}

/// Draws both conditions for `spec` from its seed. The two conditions use
/// separate streams of the same seed.
pub fn gen_gaussian(spec: &SimulationSpec) -> Result<(DataMatrix, DataMatrix, GroundTruth)> {
    spec.validate()?;
    let boost = spec.boost();
    let mut rng1 = ChaCha8Rng::seed_from_u64(spec.rng_seed);
    rng1.set_stream(1);
    let mut rng2 = ChaCha8Rng::seed_from_u64(spec.rng_seed);
    rng2.set_stream(2);
    let v1 = draw_condition(&mut rng1, spec.n1, spec.p, spec.k, spec.rho1, boost);
    let v2 = draw_condition(&mut rng2, spec.n2, spec.p, spec.k, spec.rho2, boost);
    let names = variable_names(spec.p);
    let d1 = DataMatrix::from_columns(spec.n1, names.clone(), v1)?;
    let d2 = DataMatrix::from_columns(spec.n2, names, v2)?;
    Ok((d1, d2, GroundTruth { clique: VariableSet::new(0..spec.k) }))
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RecoveryMetrics {
    /// `|B ∖ A| / |B|`, zero for an empty selection.
    pub fpr: f64,
    /// `|A ∖ B| / |A|`.
    pub fnr: f64,
    pub selected_size: usize,
}

/// False positive and false negative rates of `selected` against `truth`.
pub fn recovery(selected: &VariableSet, truth: &VariableSet) -> Result<RecoveryMetrics> {
    if truth.is_empty() {
        return Err(Error::EmptySet);
    }
    let hit = selected.intersection_len(truth);
    let fpr = if selected.is_empty() { 0.0 } else { (selected.len() - hit) as f64 / selected.len() as f64 };
    let fnr = (truth.len() - hit) as f64 / truth.len() as f64;
    Ok(RecoveryMetrics { fpr, fnr, selected_size: selected.len() })
}
