//! Differential correlation mining.
//!
//! Given two sample-by-variable datasets measured under different conditions,
//! finds variable sets whose average pairwise correlation is significantly
//! higher under the first condition than under the second. The search
//! alternates per-variable asymptotic tests against the current set with a
//! Benjamini–Yekutieli selection until the set stops changing, and
//! residualizes every discovered set before looking for the next one.
//!
//! The crate is `no_std` (with `alloc`) when built without the default
//! features. The `parallel` feature spreads the per-variable test loop over
//! a rayon pool; results do not depend on the number of workers.
//!
//! No routine in this crate materializes a `p × p` matrix: every correlation
//! is an inner product of two standardized columns computed on demand.

#![cfg_attr(not(feature = "std"), no_std)]

extern crate alloc;

pub mod data;
pub mod error;
pub mod init;
mod math;
pub mod resid;
pub mod search;
pub mod sim;
pub mod stats;

pub use data::{avg_corr, centroid, standardize, ConditionPair, DataMatrix, StandardizedCondition, VariableSet};
pub use error::{Error, Result};
pub use init::{fisher_z, greedy_init, score, InitConfig};
pub use resid::{estimate_loadings, residualize, FactorModel, Residualized};
pub use search::{dcm_search, mine, MineConfig, MiningRun, ResidualizationRecord, SearchOutcome, SearchStatus, TraceStep};
pub use sim::{gen_gaussian, recovery, Background, GroundTruth, RecoveryMetrics, SimulationSpec};
pub use stats::{by_fdr_select, delta_hat, p_value, sigma0, tau_hat, test_step, StepResult, TestReport};

/// Derives an independent 64-bit seed from a master seed and a stream index
/// (splitmix64 finalizer).
pub fn derive_seed(master: u64, index: u64) -> u64 {
    let mut z = master ^ index.wrapping_add(1).wrapping_mul(0x9E37_79B9_7F4A_7C15);
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    z ^ (z >> 31)
}
