//! Structured (JSON) reports and delimited tables.
//!
//! Output is a pure function of inputs and configuration: no timestamps, no
//! host details, fixed field order, shortest round-trip float formatting.

use std::fs::File;
use std::io::{BufWriter, Write};
use std::path::Path;

use serde::Serialize;

use dcm_core::{MiningRun, SearchOutcome};

use crate::error::{Error, Result};
use crate::study::StudyRow;

pub const SCHEMA_VERSION: u32 = 1;

#[derive(Debug, Clone, Serialize)]
pub struct MineConfigEcho {
    pub cond1: String,
    pub cond2: String,
    pub direction: u8,
    pub alpha: f64,
    pub init_size: usize,
    pub max_iter: usize,
    pub max_cliques: usize,
    pub max_attempts: usize,
    pub seed: u64,
}

#[derive(Debug, Clone, Serialize)]
pub struct Member {
    pub name: String,
    pub delta: f64,
    pub sigma0: f64,
    pub p_value: f64,
}

#[derive(Debug, Clone, Serialize)]
pub struct TraceEntry {
    pub set_size: usize,
    pub selected: usize,
}

#[derive(Debug, Clone, Serialize)]
pub struct CliqueReport {
    pub index: usize,
    pub status: &'static str,
    pub size: usize,
    pub iterations: usize,
    pub variables: Vec<String>,
    pub members: Vec<Member>,
    pub trace: Vec<TraceEntry>,
    /// Share of the set's correlation carried by the removed factor, per
    /// condition.
    pub explained: [f64; 2],
    /// Members excluded from later searches because the factor explained
    /// them completely.
    pub dropped: Vec<String>,
}

#[derive(Debug, Clone, Serialize)]
pub struct MineReport {
    pub schema_version: u32,
    pub command: &'static str,
    pub config: MineConfigEcho,
    pub samples: [usize; 2],
    pub variables: usize,
    pub searches: usize,
    pub cliques: Vec<CliqueReport>,
}

fn clique_report(index: usize, outcome: &SearchOutcome, run: &MiningRun, names: &[String]) -> CliqueReport {
    let report = &outcome.report;
    let members = outcome
        .final_set
        .iter()
        .map(|j| Member {
            name: names[j].clone(),
            delta: report.delta[j],
            sigma0: report.sigma0[j],
            p_value: report.pvalues[j],
        })
        .collect();
    let resid = &run.residualizations[index];
    CliqueReport {
        index: index + 1,
        status: outcome.status.as_str(),
        size: outcome.final_set.len(),
        iterations: outcome.iterations,
        variables: outcome.final_set.iter().map(|j| names[j].clone()).collect(),
        members,
        trace: outcome.trace.iter().map(|t| TraceEntry { set_size: t.set_size, selected: t.selected }).collect(),
        explained: [resid.cond1.explained, resid.cond2.explained],
        dropped: resid.dropped.iter().map(|&j| names[j].clone()).collect(),
    }
}

impl MineReport {
    pub fn new(config: MineConfigEcho, samples: [usize; 2], names: &[String], run: &MiningRun) -> Self {
        MineReport {
            schema_version: SCHEMA_VERSION,
            command: "mine",
            config,
            samples,
            variables: names.len(),
            searches: run.searches,
            cliques: run.cliques.iter().enumerate().map(|(i, c)| clique_report(i, c, run, names)).collect(),
        }
    }

    /// One row per clique member.
    pub fn table(&self) -> String {
        let mut out = String::from("clique\tvariable\tdelta\tsigma0\tp_value\n");
        for c in &self.cliques {
            for m in &c.members {
                out.push_str(&format!("{}\t{}\t{}\t{}\t{}\n", c.index, m.name, m.delta, m.sigma0, m.p_value));
            }
        }
        out
    }
}

#[derive(Debug, Clone, Serialize)]
pub struct SimulateConfigEcho {
    pub p: usize,
    pub k: usize,
    pub n1: usize,
    pub n2: usize,
    pub cells: Vec<[f64; 2]>,
    pub backgrounds: Vec<&'static str>,
    pub replicates: usize,
    pub seed: u64,
    pub alpha: f64,
    pub init_size: usize,
    pub max_iter: usize,
    pub fish_target: Option<usize>,
}

#[derive(Debug, Clone, Serialize)]
pub struct StudyReport {
    pub schema_version: u32,
    pub command: &'static str,
    pub config: SimulateConfigEcho,
    pub rows: Vec<StudyRow>,
}

impl StudyReport {
    pub fn new(config: SimulateConfigEcho, rows: Vec<StudyRow>) -> Self {
        StudyReport { schema_version: SCHEMA_VERSION, command: "simulate", config, rows }
    }

    pub fn table(&self) -> String {
        let mut out = String::from(
            "method\tbackground\trho1\trho2\treplicates\tmean_fpr\tmean_fnr\tmean_selected_size\tconverged\tfixed_point_violations\n",
        );
        for r in &self.rows {
            out.push_str(&format!(
                "{}\t{}\t{}\t{}\t{}\t{}\t{}\t{}\t{}\t{}\n",
                r.method.as_str(),
                r.background,
                r.rho1,
                r.rho2,
                r.replicates,
                r.mean_fpr,
                r.mean_fnr,
                r.mean_selected_size,
                r.converged,
                r.fixed_point_violations
            ));
        }
        out
    }
}

pub fn write_text(path: &Path, text: &str) -> Result<()> {
    std::fs::write(path, text).map_err(|e| Error::io(path, e))
}

pub fn write_json<T: Serialize>(path: &Path, value: &T) -> Result<()> {
    let file = File::create(path).map_err(|e| Error::io(path, e))?;
    let mut w = BufWriter::new(file);
    serde_json::to_writer_pretty(&mut w, value)
        .map_err(|e| Error::io(path, std::io::Error::other(e)))?;
    w.write_all(b"\n").and_then(|_| w.flush()).map_err(|e| Error::io(path, e))
}
