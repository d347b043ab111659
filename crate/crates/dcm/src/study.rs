//! Replicated simulation studies over a grid of correlation settings.

use rayon::prelude::*;
use serde::Serialize;

use dcm_core::{
    derive_seed, gen_gaussian, mine, recovery, test_step, Background, ConditionPair, MineConfig, SearchStatus,
    SimulationSpec, VariableSet,
};

use crate::error::{Error, Result};
use crate::fish::fish_baseline;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Method {
    Dcm,
    Fish,
}

impl Method {
    pub fn as_str(self) -> &'static str {
        match self {
            Method::Dcm => "DCM",
            Method::Fish => "FISH",
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct StudyConfig {
    /// `(rho1, rho2)` cells, run in order.
    pub cells: Vec<(f64, f64)>,
    pub backgrounds: Vec<Background>,
    /// Shape, sample sizes, master seed and replicate count. Its `rho1`,
    /// `rho2` and `background` are overridden per cell.
    pub base: SimulationSpec,
    pub mine: MineConfig,
    /// Cluster size for FISH; `None` skips the baseline.
    pub fish_target: Option<usize>,
}

/// Averages over the replicates of one (method, background, cell).
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct StudyRow {
    pub method: Method,
    pub background: &'static str,
    pub rho1: f64,
    pub rho2: f64,
    pub replicates: usize,
    pub mean_fpr: f64,
    pub mean_fnr: f64,
    pub mean_selected_size: f64,
    /// Replicates whose DCM search converged. Zero for FISH.
    pub converged: usize,
    /// Converged outcomes that an extra update did not reproduce.
    pub fixed_point_violations: usize,
}

struct Trial {
    dcm: (f64, f64, usize),
    converged: bool,
    violation: bool,
    fish: Option<(f64, f64, usize)>,
}

fn run_trial(spec: &SimulationSpec, mine_cfg: &MineConfig, fish_target: Option<usize>) -> Result<Trial> {
    let (d1, d2, truth) = gen_gaussian(spec)?;
    let pair = ConditionPair::from_data(&d1, &d2)?;
    let mut cfg = *mine_cfg;
    cfg.max_cliques = 1;
    cfg.init.rng_seed = derive_seed(spec.rng_seed, 0);
    let run = mine(&pair, &cfg)?;
    let (selected, converged) = match run.cliques.first() {
        Some(c) => (c.final_set.clone(), c.status == SearchStatus::Converged),
        None => (VariableSet::empty(), false),
    };
    let violation = converged && test_step(&pair, &selected, cfg.alpha)?.selected != selected;
    let m = recovery(&selected, &truth.clique)?;
    let fish = match fish_target {
        Some(t) => {
            let f = recovery(&fish_baseline(&pair, t)?, &truth.clique)?;
            Some((f.fpr, f.fnr, f.selected_size))
        }
        None => None,
    };
    Ok(Trial { dcm: (m.fpr, m.fnr, m.selected_size), converged, violation, fish })
}

fn average(
    method: Method,
    background: Background,
    (rho1, rho2): (f64, f64),
    metrics: impl Iterator<Item = (f64, f64, usize)>,
) -> StudyRow {
    let (mut fpr, mut fnr, mut size, mut count) = (0.0, 0.0, 0.0, 0usize);
    for (a, b, s) in metrics {
        fpr += a;
        fnr += b;
        size += s as f64;
        count += 1;
    }
    let c = count.max(1) as f64;
    StudyRow {
        method,
        background: background.as_str(),
        rho1,
        rho2,
        replicates: count,
        mean_fpr: fpr / c,
        mean_fnr: fnr / c,
        mean_selected_size: size / c,
        converged: 0,
        fixed_point_violations: 0,
    }
}

/// Runs every (background, cell) combination for `base.replicates` seeded
/// replicates. Replicate `r` draws its data from `derive_seed(seed, r)` in
/// every cell, and replicates run in parallel; the table does not depend on
/// the worker count.
pub fn run_study(config: &StudyConfig) -> Result<Vec<StudyRow>> {
    if config.base.replicates == 0 && !config.cells.is_empty() {
        return Err(Error::Validation("replicates must be positive".into()));
    }
    let mut settings = Vec::new();
    for &background in &config.backgrounds {
        for &(rho1, rho2) in &config.cells {
            let spec = SimulationSpec { rho1, rho2, background, ..config.base };
            spec.validate()?;
            settings.push(spec);
        }
    }

    let mut rows = Vec::new();
    for spec in settings {
        let trials = (0..spec.replicates as u64)
            .into_par_iter()
            .map(|r| {
                let replicate = SimulationSpec { rng_seed: derive_seed(config.base.rng_seed, r), ..spec };
                run_trial(&replicate, &config.mine, config.fish_target)
            })
            .collect::<Result<Vec<Trial>>>()?;
        let cell = (spec.rho1, spec.rho2);
        let mut dcm = average(Method::Dcm, spec.background, cell, trials.iter().map(|t| t.dcm));
        dcm.converged = trials.iter().filter(|t| t.converged).count();
        dcm.fixed_point_violations = trials.iter().filter(|t| t.violation).count();
        rows.push(dcm);
        if config.fish_target.is_some() {
            rows.push(average(Method::Fish, spec.background, cell, trials.iter().filter_map(|t| t.fish)));
        }
    }
    Ok(rows)
}
