use std::path::PathBuf;

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde::Deserialize;

#[derive(Debug, Parser)]
#[command(name = "falqon", version, about = "Feedback-based quantum optimization for MaxCut")]
pub struct Cli {
    /// Worker threads for corpus-level parallelism (default: one per core).
    #[arg(long, global = true)]
    pub threads: Option<usize>,

    /// TOML file with per-command defaults; flags take precedence.
    #[arg(long, global = true)]
    pub config: Option<PathBuf>,

    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Write a corpus of regular graphs as instance files.
    Generate(GenerateArgs),
    /// Run the feedback loop on one or more instances.
    Run(RunArgs),
    /// Corpus studies: critical time step or layers to threshold.
    #[command(subcommand)]
    Sweep(SweepCommand),
    /// Sampling cost of a shot-mode run.
    Cost(CostArgs),
}

#[derive(Debug, Args)]
pub struct OutArg {
    /// Output directory.
    #[arg(long, env = "FALQON_OUT")]
    pub out: Option<PathBuf>,
}

#[derive(Debug, Args)]
pub struct GenerateArgs {
    #[arg(long)]
    pub n: Option<usize>,
    #[arg(long)]
    pub d: Option<usize>,
    /// Every nonisomorphic connected graph (the default without --count).
    #[arg(long, conflicts_with = "count")]
    pub all: bool,
    /// Number of distinct random graphs.
    #[arg(long)]
    pub count: Option<usize>,
    #[arg(long)]
    pub seed: Option<u64>,
    /// Edge weights uniform in (0, 1).
    #[arg(long)]
    pub weighted: bool,
    /// Write into a non-empty output directory.
    #[arg(long)]
    pub force: bool,
    #[command(flatten)]
    pub out: OutArg,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum VariantName {
    Standard,
    Kicks,
    Reference,
    Iterative,
}

#[derive(Debug, Args)]
pub struct RunArgs {
    /// Instance files, or directories of them.
    pub instances: Vec<PathBuf>,
    #[arg(long)]
    pub dt: Option<f64>,
    #[arg(long)]
    pub layers: Option<usize>,
    #[arg(long, value_enum)]
    pub variant: Option<VariantName>,
    /// Iterations of the iterative variant.
    #[arg(long)]
    pub iters: Option<usize>,
    /// `exact` or `shots:M` (M samples per Pauli string).
    #[arg(long)]
    pub estimator: Option<String>,
    /// In shot mode, also sample the energy each layer.
    #[arg(long)]
    pub estimate_energy: bool,
    /// Master seed; per-instance seeds are derived from it.
    #[arg(long)]
    pub seed: Option<u64>,
    /// Kick target coefficient.
    #[arg(long)]
    pub beta_c: Option<f64>,
    /// Kick envelope amplitude.
    #[arg(long)]
    pub kick_amp: Option<f64>,
    /// Amplitude of the default reference schedule.
    #[arg(long)]
    pub ref_amp: Option<f64>,
    /// JSON array with one reference offset per layer.
    #[arg(long)]
    pub ref_schedule: Option<PathBuf>,
    /// Feedback gain w in beta = -w A.
    #[arg(long)]
    pub gain: Option<f64>,
    /// Run every layer even after the control has settled.
    #[arg(long)]
    pub no_early_stop: bool,
    /// Samples drawn from the final state to pick a candidate cut.
    #[arg(long)]
    pub final_shots: Option<usize>,
    #[command(flatten)]
    pub out: OutArg,
}

#[derive(Debug, Subcommand)]
pub enum SweepCommand {
    /// Largest time step with monotone descent on every instance.
    Dtc(DtcArgs),
    /// Layers needed to reach the reference approximation ratio and
    /// ground-state probability.
    Thresholds(ThresholdArgs),
}

#[derive(Debug, Args)]
pub struct DtcArgs {
    /// Corpus directory or instance files.
    #[arg(long, required = true, num_args = 1..)]
    pub corpus: Vec<PathBuf>,
    #[arg(long)]
    pub layers: Option<usize>,
    #[arg(long)]
    pub lo: Option<f64>,
    #[arg(long)]
    pub hi: Option<f64>,
    #[arg(long)]
    pub resolution: Option<f64>,
    #[command(flatten)]
    pub out: OutArg,
}

#[derive(Debug, Args)]
pub struct ThresholdArgs {
    #[arg(long, required = true, num_args = 1..)]
    pub corpus: Vec<PathBuf>,
    #[arg(long)]
    pub dt: Option<f64>,
    #[arg(long)]
    pub layers: Option<usize>,
    /// Also write per-layer mean/std of beta, r_A and phi across the corpus.
    #[arg(long)]
    pub aggregate: bool,
    #[command(flatten)]
    pub out: OutArg,
}

#[derive(Debug, Args)]
pub struct CostArgs {
    pub instance: PathBuf,
    #[arg(long)]
    pub dt: Option<f64>,
    #[arg(long)]
    pub layers: Option<usize>,
    /// Samples per Pauli string.
    #[arg(long)]
    pub shots: Option<u64>,
    #[arg(long)]
    pub estimate_energy: bool,
    #[arg(long)]
    pub seed: Option<u64>,
    #[command(flatten)]
    pub out: OutArg,
}
