//! Experiment harness: collect datasets, train on simulated PIM cores,
//! evaluate policies, and sweep core counts into CSV reports.

mod commands;
mod qtable_io;

use std::path::PathBuf;

use clap::{Parser, Subcommand, ValueEnum};
use pimrl_core::{Algo, DType, EnvKind, Mode, SamplingStrategy};

#[derive(Parser)]
#[command(
    name = "pimrl",
    version,
    about = "Offline tabular RL on a simulated processing-in-memory system"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Collect an offline experience dataset with a uniform random policy.
    Collect(CollectArgs),
    /// Train on a dataset across simulated PIM cores.
    Train(TrainArgs),
    /// Evaluate a stored Q-table by greedy rollouts.
    Eval(EvalArgs),
    /// Run the training across a list of core counts and report scaling.
    Sweep(SweepArgs),
}

#[derive(Clone, Copy, ValueEnum)]
enum EnvArg {
    FrozenLake,
    Taxi,
}

impl From<EnvArg> for EnvKind {
    fn from(v: EnvArg) -> EnvKind {
        match v {
            EnvArg::FrozenLake => EnvKind::FrozenLake,
            EnvArg::Taxi => EnvKind::Taxi,
        }
    }
}

#[derive(Clone, Copy, ValueEnum)]
enum DtypeArg {
    Fp32,
    Int32,
}

impl From<DtypeArg> for DType {
    fn from(v: DtypeArg) -> DType {
        match v {
            DtypeArg::Fp32 => DType::Fp32,
            DtypeArg::Int32 => DType::Int32,
        }
    }
}

#[derive(Clone, Copy, ValueEnum)]
enum SamplingArg {
    Seq,
    Ran,
    Str,
}

#[derive(Clone, Copy, ValueEnum)]
enum AlgoArg {
    Q,
    Sarsa,
}

impl From<AlgoArg> for Algo {
    fn from(v: AlgoArg) -> Algo {
        match v {
            AlgoArg::Q => Algo::QLearning,
            AlgoArg::Sarsa => Algo::Sarsa,
        }
    }
}

#[derive(Clone, Copy, ValueEnum)]
enum ModeArg {
    Single,
    MultiAgent,
}

impl From<ModeArg> for Mode {
    fn from(v: ModeArg) -> Mode {
        match v {
            ModeArg::Single => Mode::SingleTable,
            ModeArg::MultiAgent => Mode::MultiAgent,
        }
    }
}

#[derive(Parser)]
struct CollectArgs {
    /// Environment to collect from.
    #[arg(long, value_enum)]
    env: EnvArg,
    /// Number of transitions to log.
    #[arg(long)]
    transitions: usize,
    /// Seed for the behavior policy and environment randomness.
    #[arg(long, default_value_t = 0)]
    seed: u64,
    /// Dataset file to write.
    #[arg(long)]
    out: PathBuf,
}

#[derive(Parser)]
struct TrainArgs {
    /// Dataset file. In multi-agent mode, either repeat the flag once per
    /// agent or pass one dataset to split evenly across agents.
    #[arg(long, required = true)]
    dataset: Vec<PathBuf>,
    /// Number of simulated PIM cores.
    #[arg(long, default_value_t = 1)]
    cores: usize,
    #[arg(long, value_enum, default_value = "fp32")]
    dtype: DtypeArg,
    #[arg(long, value_enum, default_value = "seq")]
    sampling: SamplingArg,
    /// Stride for --sampling str.
    #[arg(long, default_value_t = 4)]
    stride: usize,
    /// Episodes between table-averaging rounds.
    #[arg(long, default_value_t = 50)]
    tau: usize,
    #[arg(long, default_value_t = 2000)]
    episodes: usize,
    #[arg(long, default_value_t = 0.1)]
    alpha: f32,
    #[arg(long, default_value_t = 0.95)]
    gamma: f32,
    /// Epsilon for SARSA next-action selection.
    #[arg(long, default_value_t = 0.1)]
    epsilon: f32,
    #[arg(long, default_value_t = 10_000)]
    scale_factor: u32,
    #[arg(long, value_enum, default_value = "q")]
    algo: AlgoArg,
    #[arg(long, value_enum, default_value = "single")]
    mode: ModeArg,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    /// Output prefix: writes PREFIX.csv and PREFIX.qtable
    /// (PREFIX.agentK.qtable per agent in multi-agent mode).
    #[arg(long)]
    out: PathBuf,
    /// Gather-only syncs: do not push the averaged table back to cores.
    #[arg(long)]
    no_broadcast: bool,
    /// INT32 variant that stores descaled values after every update.
    #[arg(long)]
    descale_every_update: bool,
}

#[derive(Parser)]
struct EvalArgs {
    /// Q-table file produced by `train`.
    #[arg(long)]
    qtable: PathBuf,
    #[arg(long, value_enum)]
    env: EnvArg,
    /// Number of evaluation episodes.
    #[arg(long, default_value_t = 1000)]
    episodes: usize,
    /// Episode truncation; defaults to 100 (frozen-lake) or 200 (taxi).
    #[arg(long)]
    max_steps: Option<usize>,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    /// CSV file to write.
    #[arg(long)]
    out: PathBuf,
}

#[derive(Parser)]
struct SweepArgs {
    #[arg(long)]
    dataset: PathBuf,
    /// Core counts, comma separated (e.g. 8,16,32,64,128).
    #[arg(long, value_delimiter = ',', required = true)]
    cores: Vec<usize>,
    #[arg(long, value_enum, default_value = "fp32")]
    dtype: DtypeArg,
    #[arg(long, value_enum, default_value = "seq")]
    sampling: SamplingArg,
    #[arg(long, default_value_t = 4)]
    stride: usize,
    #[arg(long, default_value_t = 50)]
    tau: usize,
    #[arg(long, default_value_t = 2000)]
    episodes: usize,
    #[arg(long, default_value_t = 0.1)]
    alpha: f32,
    #[arg(long, default_value_t = 0.95)]
    gamma: f32,
    #[arg(long, default_value_t = 0.1)]
    epsilon: f32,
    #[arg(long, default_value_t = 10_000)]
    scale_factor: u32,
    #[arg(long, value_enum, default_value = "q")]
    algo: AlgoArg,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    /// CSV file to write.
    #[arg(long)]
    out: PathBuf,
}

impl SamplingArg {
    fn to_strategy(self, stride: usize) -> SamplingStrategy {
        match self {
            SamplingArg::Seq => SamplingStrategy::Seq,
            SamplingArg::Ran => SamplingStrategy::Ran,
            SamplingArg::Str => SamplingStrategy::Str { stride },
        }
    }
}

fn main() -> anyhow::Result<()> {
    match Cli::parse().command {
        Command::Collect(args) => commands::collect(args),
        Command::Train(args) => commands::train(args),
        Command::Eval(args) => commands::eval(args),
        Command::Sweep(args) => commands::sweep(args),
    }
}
