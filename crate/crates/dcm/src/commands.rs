//! The `mine` and `simulate` commands.

use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand, ValueEnum};
use log::info;

use dcm_core::{mine, Background, ConditionPair, InitConfig, MineConfig, SimulationSpec};

use crate::error::{Error, Result};
use crate::io::{align_to, ingest, Delimiter};
use crate::report::{write_json, write_text, MineConfigEcho, MineReport, SimulateConfigEcho, StudyReport};
use crate::study::{run_study, StudyConfig};

#[derive(Debug, Parser)]
#[command(name = "dcm", version, about = "Differential correlation mining")]
pub struct Cli {
    /// Worker threads (defaults to the number of CPUs).
    #[arg(long, global = true)]
    pub threads: Option<usize>,
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Mine two condition files for differentially correlated sets.
    Mine(MineArgs),
    /// Run a replicated simulation study on planted-block data.
    Simulate(SimulateArgs),
}

#[derive(Debug, Clone, Args)]
pub struct SearchArgs {
    /// Target false discovery rate of each update.
    #[arg(long, default_value_t = 0.05)]
    pub alpha: f64,
    /// Size of the greedy starting set.
    #[arg(long, default_value_t = 50)]
    pub init_size: usize,
    #[arg(long, default_value_t = 100)]
    pub max_iter: usize,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
}

#[derive(Debug, Clone, Args)]
pub struct MineArgs {
    #[arg(long)]
    pub cond1: PathBuf,
    #[arg(long)]
    pub cond2: PathBuf,
    #[command(flatten)]
    pub search: SearchArgs,
    #[arg(long, default_value_t = 10)]
    pub max_cliques: usize,
    /// 1 looks for sets more correlated in cond1, 2 for the reverse.
    #[arg(long, default_value_t = 1, value_parser = clap::value_parser!(u8).range(1..=2))]
    pub direction: u8,
    /// Member table (tab separated).
    #[arg(long)]
    pub out: PathBuf,
    /// Structured report; defaults to the table path with a `.json` extension.
    #[arg(long)]
    pub report: Option<PathBuf>,
    /// Input delimiter; inferred from the file extension when absent.
    #[arg(long, value_enum)]
    pub delimiter: Option<Delimiter>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum BackgroundArg {
    Uncorrelated,
    Positive,
}

impl From<BackgroundArg> for Background {
    fn from(b: BackgroundArg) -> Self {
        match b {
            BackgroundArg::Uncorrelated => Background::Uncorrelated,
            BackgroundArg::Positive => Background::Positive,
        }
    }
}

#[derive(Debug, Clone, Args)]
pub struct SimulateArgs {
    #[arg(long, default_value_t = 500)]
    pub p: usize,
    /// Planted block size.
    #[arg(long, default_value_t = 50)]
    pub k: usize,
    #[arg(long, default_value_t = 100)]
    pub n1: usize,
    #[arg(long, default_value_t = 100)]
    pub n2: usize,
    /// Block correlations under condition 1. Paired with --rho2 by
    /// position; a single value is repeated.
    #[arg(long, value_delimiter = ',', default_value = "0.5")]
    pub rho1: Vec<f64>,
    #[arg(long, value_delimiter = ',', default_value = "0")]
    pub rho2: Vec<f64>,
    #[arg(long, value_enum, value_delimiter = ',', default_value = "uncorrelated")]
    pub background: Vec<BackgroundArg>,
    #[arg(long, default_value_t = 20)]
    pub replicates: usize,
    #[command(flatten)]
    pub search: SearchArgs,
    /// Also run the FISH clustering baseline.
    #[arg(long)]
    pub fish: bool,
    /// FISH cluster size; defaults to k.
    #[arg(long)]
    pub target_size: Option<usize>,
    /// Results table (tab separated).
    #[arg(long)]
    pub out: PathBuf,
    #[arg(long)]
    pub report: Option<PathBuf>,
}

fn report_path(out: &Path, report: &Option<PathBuf>) -> PathBuf {
    report.clone().unwrap_or_else(|| out.with_extension("json"))
}

fn mine_config(args: &SearchArgs, max_cliques: usize) -> Result<MineConfig> {
    if !(args.alpha > 0.0 && args.alpha < 1.0) {
        return Err(Error::Validation(format!("--alpha must lie in (0, 1), got {}", args.alpha)));
    }
    if args.init_size < 2 {
        return Err(Error::Validation(format!("--init-size must be at least 2, got {}", args.init_size)));
    }
    if args.max_iter == 0 {
        return Err(Error::Validation("--max-iter must be positive".into()));
    }
    Ok(MineConfig {
        alpha: args.alpha,
        init: InitConfig::new(args.init_size, args.seed),
        max_iter: args.max_iter,
        max_cliques,
        ..MineConfig::default()
    })
}

/// Ingests, aligns and mines; writes the table and the JSON report.
pub fn cmd_mine(args: &MineArgs) -> Result<MineReport> {
    let config = mine_config(&args.search, args.max_cliques)?;
    let d1 = ingest(&args.cond1, args.delimiter)?;
    let d2 = align_to(&d1, &ingest(&args.cond2, args.delimiter)?)?;
    let (first, second) = if args.direction == 2 { (&d2, &d1) } else { (&d1, &d2) };
    let pair = ConditionPair::from_data(first, second)?;
    info!("mining {} variables, n = {} / {}", pair.p(), first.n(), second.n());

    let run = mine(&pair, &config)?;
    info!("{} clique(s) from {} search(es)", run.cliques.len(), run.searches);
    let echo = MineConfigEcho {
        cond1: args.cond1.display().to_string(),
        cond2: args.cond2.display().to_string(),
        direction: args.direction,
        alpha: config.alpha,
        init_size: config.init.init_size,
        max_iter: config.max_iter,
        max_cliques: config.max_cliques,
        max_attempts: config.max_attempts,
        seed: args.search.seed,
    };
    let report = MineReport::new(echo, [first.n(), second.n()], pair.names(), &run);
    write_text(&args.out, &report.table())?;
    write_json(&report_path(&args.out, &args.report), &report)?;
    Ok(report)
}

/// Pairs the two rho lists by position, repeating a single value.
pub fn rho_cells(rho1: &[f64], rho2: &[f64]) -> Result<Vec<(f64, f64)>> {
    match (rho1.len(), rho2.len()) {
        (0, _) | (_, 0) => Ok(Vec::new()),
        (a, b) if a == b => Ok(rho1.iter().copied().zip(rho2.iter().copied()).collect()),
        (_, 1) => Ok(rho1.iter().map(|&r| (r, rho2[0])).collect()),
        (1, _) => Ok(rho2.iter().map(|&r| (rho1[0], r)).collect()),
        (a, b) => Err(Error::Validation(format!("--rho1 has {a} values and --rho2 has {b}; lengths must match or be 1"))),
    }
}

pub fn cmd_simulate(args: &SimulateArgs) -> Result<StudyReport> {
    let mine_cfg = mine_config(&args.search, 1)?;
    if args.replicates == 0 {
        return Err(Error::Validation("--replicates must be positive".into()));
    }
    let fish_target = args.fish.then(|| args.target_size.unwrap_or(args.k));
    if fish_target == Some(0) {
        return Err(Error::Validation("--target-size must be positive".into()));
    }
    let mut backgrounds: Vec<Background> = args.background.iter().map(|&b| b.into()).collect();
    backgrounds.dedup();
    let config = StudyConfig {
        cells: rho_cells(&args.rho1, &args.rho2)?,
        backgrounds,
        base: SimulationSpec {
            p: args.p,
            k: args.k,
            n1: args.n1,
            n2: args.n2,
            rng_seed: args.search.seed,
            replicates: args.replicates,
            ..SimulationSpec::default()
        },
        mine: mine_cfg,
        fish_target,
    };
    let rows = run_study(&config)?;
    let echo = SimulateConfigEcho {
        p: args.p,
        k: args.k,
        n1: args.n1,
        n2: args.n2,
        cells: config.cells.iter().map(|&(a, b)| [a, b]).collect(),
        backgrounds: config.backgrounds.iter().map(|b| b.as_str()).collect(),
        replicates: args.replicates,
        seed: args.search.seed,
        alpha: mine_cfg.alpha,
        init_size: mine_cfg.init.init_size,
        max_iter: mine_cfg.max_iter,
        fish_target,
    };
    let report = StudyReport::new(echo, rows);
    write_text(&args.out, &report.table())?;
    write_json(&report_path(&args.out, &args.report), &report)?;
    Ok(report)
}
