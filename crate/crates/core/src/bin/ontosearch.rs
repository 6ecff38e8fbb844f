use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};

use ontosearch::envmodel::Environment;
use ontosearch::harness::{
    emit, personalize_seeds, study_ablation, study_compare, study_enhancement, study_initial_estimates,
    ExperimentConfig, ExperimentReport, OutputFormat,
};
use ontosearch::ontology::{EmpiricalCounts, PriorKind};
use ontosearch::planner::PlannerKind;

#[derive(Parser)]
#[command(
    name = "ontosearch",
    version,
    about = "Personalized ontology learning and object search experiments"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Run personalization episodes until the Wilson gate closes.
    Personalize(Common),
    /// Run one of the studies.
    #[command(subcommand)]
    Study(Study),
}

#[derive(Subcommand)]
enum Study {
    InitialEstimates(Common),
    Ablation(Common),
    Compare(Common),
    Enhancement(Common),
}

#[derive(Args)]
struct Common {
    /// Environment JSON; defaults to the shipped reference flat.
    #[arg(long)]
    env: Option<PathBuf>,
    /// Generic co-occurrence counts CSV; defaults to the shipped table.
    #[arg(long)]
    counts: Option<PathBuf>,
    /// Seed list: `0..20` or `1,2,7`.
    #[arg(long, value_parser = parse_seeds)]
    seeds: Option<SeedList>,
    #[arg(long, default_value = "uniform")]
    prior: PriorKind,
    /// Comma-separated planner kinds.
    #[arg(long, value_delimiter = ',')]
    planner: Vec<PlannerKind>,
    #[arg(long, allow_hyphen_values = true)]
    alpha: Option<f64>,
    #[arg(long)]
    max_episodes: Option<u32>,
    /// Comma-separated snapshot episodes.
    #[arg(long, value_delimiter = ',')]
    snapshots: Option<Vec<u32>>,
    #[arg(long, default_value = "out")]
    out: PathBuf,
    #[arg(long, default_value = "csv")]
    format: OutputFormat,
}

#[derive(Clone)]
struct SeedList(Vec<u64>);

fn parse_seeds(s: &str) -> Result<SeedList, String> {
    if let Some((a, b)) = s.split_once("..") {
        let a: u64 = a.trim().parse().map_err(|e| format!("bad seed range start: {e}"))?;
        let b: u64 = b.trim().parse().map_err(|e| format!("bad seed range end: {e}"))?;
        if a >= b {
            return Err(format!("empty seed range {s}"));
        }
        return Ok(SeedList((a..b).collect()));
    }
    s.split(',')
        .map(|x| x.trim().parse().map_err(|e| format!("bad seed `{x}`: {e}")))
        .collect::<Result<_, _>>()
        .map(SeedList)
}

impl Common {
    fn config(&self) -> ExperimentConfig {
        let mut cfg = ExperimentConfig {
            env: self.env.clone(),
            prior: self.prior,
            ..ExperimentConfig::default()
        };
        if let Some(s) = &self.seeds {
            cfg.seeds = s.0.clone();
        }
        if !self.planner.is_empty() {
            cfg.planners = self.planner.clone();
        }
        if let Some(a) = self.alpha {
            cfg.alpha = a;
        }
        if let Some(m) = self.max_episodes {
            cfg.max_episodes = m;
        }
        if let Some(s) = &self.snapshots {
            cfg.snapshots = s.clone();
        }
        cfg
    }
}

type BoxError = Box<dyn std::error::Error>;

#[derive(Clone, Copy)]
enum Job {
    Personalize,
    InitialEstimates,
    Ablation,
    Compare,
    Enhancement,
}

fn run(cli: Cli) -> Result<(), BoxError> {
    let (common, job) = match &cli.command {
        Command::Personalize(c) => (c, Job::Personalize),
        Command::Study(Study::InitialEstimates(c)) => (c, Job::InitialEstimates),
        Command::Study(Study::Ablation(c)) => (c, Job::Ablation),
        Command::Study(Study::Compare(c)) => (c, Job::Compare),
        Command::Study(Study::Enhancement(c)) => (c, Job::Enhancement),
    };
    let cfg = common.config();
    let env = match &cfg.env {
        Some(p) => Environment::load(p)?,
        None => Environment::reference(),
    };
    let counts = match &common.counts {
        Some(p) => EmpiricalCounts::from_csv_path(p)?,
        None => EmpiricalCounts::reference(),
    };
    let report: ExperimentReport = match job {
        Job::Personalize => personalize_seeds(&env, &counts, &cfg)?.1,
        Job::InitialEstimates => study_initial_estimates(&env, &counts, &cfg)?.report(&env, &cfg)?,
        Job::Ablation => study_ablation(&env, &counts, &cfg)?.report(&env, &cfg),
        Job::Compare => study_compare(&env, &counts, &cfg)?.report(&env, &cfg),
        Job::Enhancement => study_enhancement(&env, &counts, &cfg)?.report(&env, &cfg),
    };
    for path in emit(&report, &common.out, common.format)? {
        println!("{}", path.display());
    }
    Ok(())
}

fn main() -> ExitCode {
    match run(Cli::parse()) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::FAILURE
        }
    }
}
