use std::path::PathBuf;

use clap::{Args, Parser, Subcommand};
use moldsched::engine::AllocationPolicy;
use moldsched::model::ModelKind;

fn policy(s: &str) -> Result<AllocationPolicy, String> {
    AllocationPolicy::parse(s).map_err(|e| e.to_string())
}

fn model(s: &str) -> Result<ModelKind, String> {
    match s.trim().to_ascii_lowercase().as_str() {
        "roofline" | "roo" => Ok(ModelKind::Roofline),
        "communication" | "com" => Ok(ModelKind::Communication),
        "amdahl" | "amd" => Ok(ModelKind::Amdahl),
        "general" | "gen" => Ok(ModelKind::General),
        "tabulated" | "table" => Ok(ModelKind::Tabulated),
        other => Err(format!("unknown model `{other}`")),
    }
}

/// One model family, or every closed-form one when empty.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct ModelFilter(pub Option<ModelKind>);

fn model_or_all(s: &str) -> Result<ModelFilter, String> {
    if s.eq_ignore_ascii_case("all") {
        Ok(ModelFilter(None))
    } else {
        model(s).map(|m| ModelFilter(Some(m)))
    }
}

#[derive(Debug, Parser)]
#[command(
    name = "moldsched",
    version,
    about = "Online scheduling of moldable task graphs"
)]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Run the online list scheduler on a graph file.
    Simulate(SimulateArgs),
    /// Write a generated instance.
    #[command(subcommand)]
    Generate(GenerateCommand),
    /// Check allocation, model and adversary properties.
    #[command(subcommand)]
    Verify(VerifyCommand),
    /// Exact minimum makespan of a tiny graph.
    Oracle(OracleArgs),
    /// Batch of random instances summarized as CSV.
    Sweep(SweepArgs),
}

#[derive(Debug, Args)]
pub struct SimulateArgs {
    pub graph: PathBuf,
    /// Platform size; defaults to the one stored in the file.
    #[arg(long)]
    pub procs: Option<usize>,
    /// paper, mintime, seq, fixed:K or fixed-fig6b.
    #[arg(long, value_parser = policy, default_value = "paper")]
    pub policy: AllocationPolicy,
    /// Write the schedule here.
    #[arg(long)]
    pub out: Option<PathBuf>,
    /// Write the full report here.
    #[arg(long)]
    pub report: Option<PathBuf>,
    /// Also run the exact oracle when the graph is small enough.
    #[arg(long)]
    pub with_oracle: bool,
    /// For chain instances, reveal the whole graph up front instead of
    /// playing the adaptive adversary.
    #[arg(long = "static")]
    pub static_graph: bool,
}

#[derive(Debug, Subcommand)]
pub enum GenerateCommand {
    /// Chains of identical logarithmic-speedup tasks.
    Chains {
        #[arg(long)]
        ell: u32,
        #[arg(long)]
        out: PathBuf,
    },
    /// Layered instance that forces a long alternation on a local policy.
    Lb {
        #[arg(long, value_parser = model)]
        model: ModelKind,
        #[arg(long)]
        procs: usize,
        #[arg(long)]
        eps: f64,
        #[arg(long, value_parser = policy, default_value = "paper")]
        policy: AllocationPolicy,
        /// Output directory for graph.json and meta.json.
        #[arg(long)]
        out: PathBuf,
    },
    /// Seeded layered random DAG.
    Random {
        #[arg(long)]
        seed: Option<u64>,
        #[arg(long)]
        n: usize,
        #[arg(long)]
        procs: usize,
        #[arg(long, value_parser = model)]
        model: ModelKind,
        #[arg(long, default_value_t = 0.3)]
        density: f64,
        #[arg(long)]
        out: PathBuf,
    },
}

#[derive(Debug, Args)]
pub struct GridArgs {
    /// A model name or `all`.
    #[arg(long, value_parser = model_or_all, default_value = "all")]
    pub model: ModelFilter,
    #[arg(long, default_value_t = 256)]
    pub procs: usize,
    #[arg(long, default_value_t = 10_000)]
    pub samples: usize,
    #[arg(long)]
    pub seed: Option<u64>,
    /// Worker threads; defaults to all cores.
    #[arg(long)]
    pub jobs: Option<usize>,
}

#[derive(Debug, Subcommand)]
pub enum VerifyCommand {
    /// Allocation parameter rows and their defining relations.
    Params {
        #[arg(long)]
        json: bool,
    },
    /// Area and time ratios of the initial allocation on sampled laws.
    AllocBounds(GridArgs),
    /// Time, area and speedup monotonicity on sampled laws.
    Monotonic(GridArgs),
    /// Phase gaps of the adaptive chain adversary.
    #[command(name = "lemma12", alias = "phase-gaps")]
    PhaseGaps {
        #[arg(long, default_value_t = 2)]
        ell: u32,
        /// Repeatable; defaults to every shipped policy.
        #[arg(long, value_parser = policy)]
        policy: Vec<AllocationPolicy>,
    },
}

#[derive(Debug, Args)]
pub struct OracleArgs {
    pub graph: PathBuf,
    #[arg(long)]
    pub procs: Option<usize>,
    /// Search nodes before giving up on optimality.
    #[arg(long)]
    pub budget: Option<u64>,
    #[arg(long)]
    pub out: Option<PathBuf>,
}

#[derive(Debug, Args)]
pub struct SweepArgs {
    #[arg(long)]
    pub config: PathBuf,
    /// Defaults to the config's `output`.
    #[arg(long)]
    pub csv: Option<PathBuf>,
    #[arg(long)]
    pub jobs: Option<usize>,
}
