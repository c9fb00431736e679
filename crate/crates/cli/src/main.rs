mod classes;
mod commands;

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};

/// Online chain-of-thought verification: dimensions, learners, adversaries
/// and verifier-guided boosting over finite verifier classes.
#[derive(Parser, Debug)]
#[command(name = "cotverify", version)]
pub struct Cli {
    /// Worker threads for parallel sections (default: all cores).
    #[arg(long, global = true)]
    threads: Option<usize>,

    /// Write the JSON report here instead of stdout.
    #[arg(long, global = true)]
    out: Option<PathBuf>,

    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand, Debug)]
pub enum Command {
    /// List the built-in class families or write one out as a class file.
    Families {
        /// Family name such as indicator4 or complement5x3; lists all when omitted.
        name: Option<String>,
        /// Add a fail token that every verifier rejects.
        #[arg(long)]
        fail_token: bool,
    },
    /// Compute a dimension of a class, with a witness tree.
    Dim(DimArgs),
    /// Play a learner against the oracle for one target verifier.
    Run(RunArgs),
    /// Play a learner against an adversary and report whether the bounds hold.
    Duel(DuelArgs),
    /// Train a verifier to boost a set of weak provers.
    Boost(BoostArgs),
}

#[derive(Args, Debug, Clone)]
pub struct CostArgs {
    /// Soundness mistake cost.
    #[arg(long, default_value = "1")]
    pub gamma_s: String,
    /// Completeness mistake cost.
    #[arg(long, default_value = "1")]
    pub gamma_c: String,
    /// Location mistake cost.
    #[arg(long, default_value = "1")]
    pub gamma_l: String,
}

#[derive(ValueEnum, Clone, Copy, Debug, PartialEq, Eq)]
pub enum DimChoice {
    Ldim,
    Sc,
    Wsc,
    Scl,
}

#[derive(Args, Debug)]
pub struct DimArgs {
    /// Class file or family name.
    #[arg(long)]
    pub class: String,
    #[arg(long, value_enum)]
    pub kind: DimChoice,
    /// Soundness budget for `sc`.
    #[arg(long, default_value_t = 0)]
    pub k: u32,
    #[command(flatten)]
    pub costs: CostArgs,
    /// Leave the witness tree out of the report.
    #[arg(long)]
    pub no_witness: bool,
    /// Also write the witness tree in Graphviz format.
    #[arg(long)]
    pub dot: Option<PathBuf>,
    /// Search root candidates in parallel.
    #[arg(long)]
    pub parallel: bool,
}

#[derive(ValueEnum, Clone, Copy, Debug, PartialEq, Eq)]
pub enum LearnerChoice {
    ScSoa,
    WscSoa,
    SclSoa,
    Majority,
    SoundConservative,
    RejectAll,
}

#[derive(ValueEnum, Clone, Copy, Debug, PartialEq, Eq)]
pub enum ModeChoice {
    Prefix,
    Sequence,
}

#[derive(Args, Debug)]
pub struct LearnerArgs {
    /// Class file or family name.
    #[arg(long)]
    pub class: String,
    #[arg(long, value_enum)]
    pub learner: LearnerChoice,
    /// Soundness budget for sc-soa.
    #[arg(long, default_value_t = 0)]
    pub k: u32,
    #[command(flatten)]
    pub costs: CostArgs,
}

#[derive(Args, Debug)]
pub struct RunArgs {
    #[command(flatten)]
    pub learner: LearnerArgs,
    /// Index of the true verifier.
    #[arg(long, default_value_t = 0)]
    pub target: usize,
    /// JSON list of {"problem", "steps"} instances.
    #[arg(long)]
    pub sequence: Option<PathBuf>,
    /// Length of a random sequence when no file is given.
    #[arg(long, default_value_t = 20)]
    pub random: usize,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    /// Mistake taxonomy for trace runs.
    #[arg(long, value_enum, default_value = "prefix")]
    pub mode: ModeChoice,
    /// Run a prefix learner on traces through the trace-from-prefix wrapper.
    #[arg(long, conflicts_with = "via_cot")]
    pub via_prefix: bool,
    /// Run a trace learner on prefixes through the prefix-from-trace wrapper.
    #[arg(long)]
    pub via_cot: bool,
}

#[derive(ValueEnum, Clone, Copy, Debug, PartialEq, Eq)]
pub enum AdversaryChoice {
    Tree,
    Bitstring,
    Complement,
}

#[derive(Args, Debug)]
pub struct DuelArgs {
    #[command(flatten)]
    pub learner: LearnerArgs,
    #[arg(long, value_enum)]
    pub adversary: AdversaryChoice,
}

#[derive(Args, Debug)]
#[command(args_conflicts_with_subcommands = true)]
pub struct BoostArgs {
    #[command(subcommand)]
    pub action: Option<BoostAction>,
    #[command(flatten)]
    pub run: BoostRunArgs,
}

#[derive(Args, Debug, Clone)]
pub struct ScenarioArgs {
    /// Scenario file; the built-in reference scenario when omitted.
    #[arg(long)]
    pub scenario: Option<PathBuf>,
    /// Target verifier of the built-in scenario.
    #[arg(long, default_value_t = 5)]
    pub target: usize,
}

#[derive(Args, Debug, Clone)]
pub struct BoostRunArgs {
    #[command(flatten)]
    pub scenario: ScenarioArgs,
    #[arg(long, default_value_t = 20)]
    pub runs: u64,
    /// Evaluation draws per run.
    #[arg(long, default_value_t = 400)]
    pub trials: u64,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    /// Keep only the aggregate in the report.
    #[arg(long)]
    pub summary: bool,
}

#[derive(Subcommand, Debug)]
pub enum BoostAction {
    /// Check the goodness level of the prover set on every problem.
    VerifyAlpha(ScenarioArgs),
    /// Write the built-in scenario as a scenario file.
    Standard(ScenarioArgs),
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match commands::dispatch(cli) {
        Ok(code) => code,
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::from(2)
        }
    }
}
