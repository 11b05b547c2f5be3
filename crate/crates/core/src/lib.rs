//! Offline tabular reinforcement learning on a simulated
//! processing-in-memory system.
//!
//! The crate trains Q-learning and SARSA policies from logged experience
//! datasets the way a bank-attached accelerator would: the dataset is split
//! into per-core chunks, each simulated core updates a local Q-table with
//! integer or floating-point kernels, tables are periodically averaged
//! through the host, and a parametric cost model accounts simulated time
//! for every phase of the run.

pub mod dataset;
pub mod envs;
pub mod eval;
pub mod kernels;
pub mod pim_sim;
pub mod reference;

pub use dataset::{partition, read_dataset, write_dataset, Chunk, Dataset, Transition};
pub use envs::{collect_dataset, BehaviorPolicy, EnvKind, EnvSpec};
pub use eval::{default_max_steps, evaluate, greedy_policy, EvalReport, Policy};
pub use kernels::{Algo, DType, Hyperparams, QTable, RngState, SamplingStrategy};
pub use pim_sim::{
    aggregate, run_multi_agent, run_training, CostModel, Mode, MultiAgentOutput, PimConfig,
    SimReport, TrainOutput,
};
pub use reference::reference_train;
