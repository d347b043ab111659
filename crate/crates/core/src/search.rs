//! Iterative set refinement and multi-clique mining.

use alloc::vec::Vec;

use crate::data::{ConditionPair, VariableSet};
use crate::derive_seed;
use crate::error::{Error, Result};
use crate::init::{greedy_init, InitConfig};
use crate::resid::{estimate_loadings, residualize, FactorModel};
use crate::stats::{test_step, TestReport};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum SearchStatus {
    /// The update reproduced the current set.
    Converged,
    /// The update oscillated between two sets twice; the overlap is returned.
    CycleOverlap,
    /// The update emptied the set (or left a single variable).
    Degenerate,
    IterationLimit,
}

impl SearchStatus {
    pub fn as_str(self) -> &'static str {
        match self {
            SearchStatus::Converged => "converged",
            SearchStatus::CycleOverlap => "cycle_overlap",
            SearchStatus::Degenerate => "degenerate",
            SearchStatus::IterationLimit => "iteration_limit",
        }
    }
}

/// Size of the tested set and of its selection for one update.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct TraceStep {
    pub set_size: usize,
    pub selected: usize,
}

#[derive(Debug, Clone, PartialEq)]
pub struct SearchOutcome {
    pub status: SearchStatus,
    /// Empty iff `status` is `Degenerate`.
    pub final_set: VariableSet,
    /// Number of update steps taken.
    pub iterations: usize,
    pub trace: Vec<TraceStep>,
    /// Report of the last update. For non-degenerate outcomes this is the
    /// report against `final_set`.
    pub report: TestReport,
}

impl SearchOutcome {
    pub fn is_degenerate(&self) -> bool {
        self.status == SearchStatus::Degenerate
    }
}

/// Refines `init` by repeated [`test_step`] until the set is reproduced,
/// empties, or `max_iter` updates have run.
///
/// A return to the set before last is a 2-cycle: the first one restarts the
/// search from the overlap of the two alternating sets, the second one ends
/// it with that overlap. Longer cycles run into the iteration limit.
/// Selections of a single variable count as degenerate.
pub fn dcm_search(pair: &ConditionPair, init: &VariableSet, alpha: f64, max_iter: usize) -> Result<SearchOutcome> {
    init.check(pair.p())?;
    if max_iter == 0 {
        return Err(Error::InvalidParameter("max_iter must be positive".into()));
    }
    let mut current = init.clone();
    let mut previous: Option<VariableSet> = None;
    let mut cycles = 0;
    let mut trace = Vec::new();

    loop {
        let step = test_step(pair, &current, alpha)?;
        trace.push(TraceStep { set_size: current.len(), selected: step.selected.len() });
        let iterations = trace.len();
        let finish = |status, final_set, report, trace| {
            Ok(SearchOutcome { status, final_set, iterations, trace, report })
        };

        if step.selected.len() < 2 {
            return finish(SearchStatus::Degenerate, VariableSet::empty(), step.report, trace);
        }
        if step.selected == current {
            return finish(SearchStatus::Converged, current, step.report, trace);
        }
        let next = if previous.as_ref() == Some(&step.selected) {
            cycles += 1;
            let overlap = current.intersection(&step.selected);
            if overlap.len() < 2 {
                return finish(SearchStatus::Degenerate, VariableSet::empty(), step.report, trace);
            }
            if cycles == 2 {
                let report = test_step(pair, &overlap, alpha)?.report;
                return finish(SearchStatus::CycleOverlap, overlap, report, trace);
            }
            overlap
        } else {
            step.selected
        };
        if iterations >= max_iter {
            let report = test_step(pair, &current, alpha)?.report;
            return finish(SearchStatus::IterationLimit, current, report, trace);
        }
        previous = Some(core::mem::replace(&mut current, next));
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct MineConfig {
    pub alpha: f64,
    pub init: InitConfig,
    pub max_iter: usize,
    pub max_cliques: usize,
    /// Consecutive degenerate searches, each from a fresh seed, after which
    /// the data is considered exhausted.
    pub max_attempts: usize,
}

impl Default for MineConfig {
    fn default() -> Self {
        Self { alpha: 0.05, init: InitConfig::default(), max_iter: 100, max_cliques: 10, max_attempts: 3 }
    }
}

/// Factor models removed from each condition after a discovery.
#[derive(Debug, Clone, PartialEq)]
pub struct ResidualizationRecord {
    pub cond1: FactorModel,
    pub cond2: FactorModel,
    /// Variables fully explained by the factor and excluded from then on.
    pub dropped: Vec<usize>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct MiningRun {
    /// Non-degenerate outcomes in discovery order.
    pub cliques: Vec<SearchOutcome>,
    pub residualizations: Vec<ResidualizationRecord>,
    pub config: MineConfig,
    /// Total searches started, degenerate ones included.
    pub searches: usize,
}

/// Finds up to `config.max_cliques` sets: greedy start, refinement, then
/// residualization of both conditions on each discovery.
///
/// Stops after `config.max_attempts` consecutive degenerate searches. An
/// outcome contained in an earlier discovery counts as degenerate. Start
/// seeds are derived from `config.init.rng_seed` and the search number.
pub fn mine(pair: &ConditionPair, config: &MineConfig) -> Result<MiningRun> {
    if config.max_attempts == 0 {
        return Err(Error::InvalidParameter("max_attempts must be positive".into()));
    }
    let mut work = pair.clone();
    let mut run = MiningRun { cliques: Vec::new(), residualizations: Vec::new(), config: *config, searches: 0 };
    let mut failures = 0;

    while run.cliques.len() < config.max_cliques && failures < config.max_attempts {
        let eligible = work.active_count();
        let init_size = config.init.init_size.min(eligible);
        if init_size < 2 {
            break;
        }
        let init_config = InitConfig {
            init_size,
            rng_seed: derive_seed(config.init.rng_seed, run.searches as u64),
            ..config.init
        };
        run.searches += 1;
        let start = greedy_init(&work, &init_config)?;
        let outcome = dcm_search(&work, &start, config.alpha, config.max_iter)?;
        let repeat = run.cliques.iter().any(|c| outcome.final_set.is_subset(&c.final_set));
        if outcome.is_degenerate() || repeat {
            failures += 1;
            continue;
        }
        failures = 0;

        let set = &outcome.final_set;
        let m1 = estimate_loadings(work.cond1(), set)?;
        let m2 = estimate_loadings(work.cond2(), set)?;
        let r1 = residualize(work.cond1(), set, &m1)?;
        let r2 = residualize(work.cond2(), set, &m2)?;
        let mut dropped: Vec<usize> = r1.dropped.iter().chain(&r2.dropped).copied().collect();
        dropped.sort_unstable();
        dropped.dedup();
        work.replace(r1.condition, r2.condition);
        for &j in &dropped {
            work.deactivate(j);
        }
        run.residualizations.push(ResidualizationRecord { cond1: m1, cond2: m2, dropped });
        run.cliques.push(outcome);
    }
    Ok(run)
}
