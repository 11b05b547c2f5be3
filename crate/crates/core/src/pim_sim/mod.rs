//! The distributed training workflow: chunk loading, parallel per-core
//! kernel execution, periodic table averaging through the host, final
//! aggregation, and simulated-time accounting for each phase.
//!
//! Functional results depend only on the dataset, the configuration and
//! the seed; the cost model changes reported times and nothing else.

mod cost;

pub use cost::{
    kernel_cycles, per_update_counts, transfer_seconds, CostModel, CostModelError, OpCounts,
};

use rayon::prelude::*;
use thiserror::Error;

use crate::dataset::{partition, Chunk, Dataset, PartitionError, Transition, RECORD_LEN};
use crate::kernels::qtable::{DType, Hyperparams, HyperparamsError, QTable};
use crate::kernels::sampling::{sample_order_into, SamplingStrategy};
use crate::kernels::update::{
    epsilon_threshold, fp32_q_step, fp32_sarsa_step, int32_descaled_q_step,
    int32_descaled_sarsa_step, int32_q_step, int32_sarsa_step, Algo, KernelError, ScaledHyper,
};
use crate::kernels::{to_fixed, RngState};

/// Training topology.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Mode {
    /// One logical Q-table: local tables are averaged every `tau` episodes.
    SingleTable,
    /// Independent learners, one dataset per core, no aggregation.
    MultiAgent,
}

impl Mode {
    pub fn as_str(&self) -> &'static str {
        match self {
            Mode::SingleTable => "single",
            Mode::MultiAgent => "multi-agent",
        }
    }
}

/// Full configuration of a simulated training run.
#[derive(Debug, Clone)]
pub struct PimConfig {
    pub n_cores: usize,
    pub dtype: DType,
    pub algo: Algo,
    pub strategy: SamplingStrategy,
    pub hyper: Hyperparams,
    /// Synchronization period in episodes; must divide `hyper.episodes`.
    pub tau: usize,
    pub mode: Mode,
    pub seed: u64,
    pub costs: CostModel,
    /// Push the averaged table back to every core after each sync round.
    pub broadcast_after_sync: bool,
    /// INT32 alternative that stores the descaled real value after every
    /// update instead of keeping scaled state until transfer.
    pub descale_every_update: bool,
}

impl Default for PimConfig {
    fn default() -> Self {
        PimConfig {
            n_cores: 1,
            dtype: DType::Fp32,
            algo: Algo::QLearning,
            strategy: SamplingStrategy::Seq,
            hyper: Hyperparams::default(),
            tau: 50,
            mode: Mode::SingleTable,
            seed: 0,
            costs: CostModel::default(),
            broadcast_after_sync: true,
            descale_every_update: false,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Error)]
pub enum ConfigError {
    #[error(transparent)]
    Hyper(#[from] HyperparamsError),
    #[error(transparent)]
    Cost(#[from] CostModelError),
    #[error("n_cores must be >= 1")]
    ZeroCores,
    #[error("tau must be >= 1")]
    ZeroTau,
    #[error("episodes ({episodes}) must be divisible by tau ({tau})")]
    TauDoesNotDivideEpisodes { episodes: usize, tau: usize },
    #[error("operation requires mode {expected} but the config selects {actual}")]
    WrongMode {
        expected: &'static str,
        actual: &'static str,
    },
    #[error("multi-agent mode needs one dataset per core: {n_cores} cores, {n_datasets} datasets")]
    DatasetCountMismatch { n_cores: usize, n_datasets: usize },
    #[error("multi-agent datasets must share one environment")]
    MixedEnvironments,
}

#[derive(Debug, Error)]
pub enum SimError {
    #[error(transparent)]
    Config(#[from] ConfigError),
    #[error(transparent)]
    Partition(#[from] PartitionError),
    #[error(transparent)]
    Kernel(#[from] KernelError),
}

impl PimConfig {
    pub fn validate(&self) -> Result<(), ConfigError> {
        self.hyper.validate()?;
        self.costs.validate()?;
        if self.n_cores == 0 {
            return Err(ConfigError::ZeroCores);
        }
        if self.tau == 0 {
            return Err(ConfigError::ZeroTau);
        }
        if !self.hyper.episodes.is_multiple_of(self.tau) {
            return Err(ConfigError::TauDoesNotDivideEpisodes {
                episodes: self.hyper.episodes,
                tau: self.tau,
            });
        }
        Ok(())
    }

    /// RNG stream for a numbered core under this config's seed.
    pub fn core_rng(&self, core_id: usize) -> RngState {
        RngState::derive_stream(self.seed, core_id as u64)
    }
}

/// Simulated seconds and bytes moved for one phase of the workflow.
#[derive(Debug, Clone, Copy, Default, PartialEq)]
pub struct Phase {
    pub seconds: f64,
    pub bytes: u64,
}

/// Per-phase simulated time of one run.
#[derive(Debug, Clone, Copy, Default, PartialEq)]
pub struct PhaseBreakdown {
    pub cpu_to_pim: Phase,
    pub kernel: Phase,
    pub inter_core: Phase,
    pub pim_to_cpu: Phase,
}

impl PhaseBreakdown {
    pub fn total_seconds(&self) -> f64 {
        self.cpu_to_pim.seconds
            + self.kernel.seconds
            + self.inter_core.seconds
            + self.pim_to_cpu.seconds
    }
}

/// Outcome accounting of a simulated run.
#[derive(Debug, Clone, PartialEq)]
pub struct SimReport {
    pub phases: PhaseBreakdown,
    pub comm_rounds: u64,
    pub per_core_op_counts: Vec<OpCounts>,
}

/// Trained table plus accounting for a single-table run.
#[derive(Debug, Clone)]
pub struct TrainOutput {
    pub qtable: QTable,
    pub report: SimReport,
}

/// Per-agent tables plus accounting for a multi-agent run.
#[derive(Debug, Clone)]
pub struct MultiAgentOutput {
    pub qtables: Vec<QTable>,
    pub report: SimReport,
}

/// Local training state of one simulated core.
struct CoreState<'a> {
    chunk: Chunk<'a>,
    table: CoreTable,
    rng: RngState,
    op_counts: OpCounts,
    /// Chunk rewards prescaled by the host for the INT32 kernels.
    scaled_rewards: Vec<i32>,
    order_buf: Vec<u32>,
    error: Option<KernelError>,
}

enum CoreTable {
    Fp32(Vec<f32>),
    Int32(Vec<i32>),
    /// INT32 arithmetic with descaled resting storage.
    Int32Descaled(Vec<f32>),
}

struct KernelParams {
    algo: Algo,
    strategy: SamplingStrategy,
    alpha: f32,
    gamma: f32,
    scaled: ScaledHyper,
    epsilon_threshold: u32,
    n_actions: usize,
    per_update: OpCounts,
}

impl<'a> CoreState<'a> {
    fn new(
        chunk: Chunk<'a>,
        config: &PimConfig,
        n_states: usize,
        n_actions: usize,
    ) -> Result<Self, KernelError> {
        let cells = n_states * n_actions;
        let table = match (config.dtype, config.descale_every_update) {
            (DType::Fp32, _) => CoreTable::Fp32(vec![0.0; cells]),
            (DType::Int32, false) => CoreTable::Int32(vec![0; cells]),
            (DType::Int32, true) => CoreTable::Int32Descaled(vec![0.0; cells]),
        };
        let scaled_rewards = if config.dtype == DType::Int32 {
            chunk
                .transitions
                .iter()
                .map(|t| to_fixed(t.reward, config.hyper.scale_factor))
                .collect::<Result<Vec<_>, _>>()?
        } else {
            Vec::new()
        };
        Ok(CoreState {
            chunk,
            table,
            rng: config.core_rng(chunk.core_id),
            op_counts: OpCounts::default(),
            scaled_rewards,
            order_buf: Vec::new(),
            error: None,
        })
    }

    /// One full pass over the local chunk in the configured sample order.
    fn run_episode(&mut self, p: &KernelParams) -> Result<(), KernelError> {
        let len = self.chunk.len();
        sample_order_into(p.strategy, len, &mut self.rng, &mut self.order_buf);

        let transitions: &[Transition] = self.chunk.transitions;
        let order = &self.order_buf;
        let rng = &mut self.rng;
        match (&mut self.table, p.algo) {
            (CoreTable::Fp32(values), Algo::QLearning) => {
                for &i in order {
                    fp32_q_step(
                        values,
                        p.n_actions,
                        &transitions[i as usize],
                        p.alpha,
                        p.gamma,
                    );
                }
            }
            (CoreTable::Fp32(values), Algo::Sarsa) => {
                for &i in order {
                    fp32_sarsa_step(
                        values,
                        p.n_actions,
                        &transitions[i as usize],
                        p.alpha,
                        p.gamma,
                        p.epsilon_threshold,
                        rng,
                    );
                }
            }
            (CoreTable::Int32(values), Algo::QLearning) => {
                for &i in order {
                    int32_q_step(
                        values,
                        p.n_actions,
                        &transitions[i as usize],
                        &p.scaled,
                        self.scaled_rewards[i as usize],
                    )?;
                }
            }
            (CoreTable::Int32(values), Algo::Sarsa) => {
                for &i in order {
                    int32_sarsa_step(
                        values,
                        p.n_actions,
                        &transitions[i as usize],
                        &p.scaled,
                        self.scaled_rewards[i as usize],
                        p.epsilon_threshold,
                        rng,
                    )?;
                }
            }
            (CoreTable::Int32Descaled(values), Algo::QLearning) => {
                for &i in order {
                    int32_descaled_q_step(
                        values,
                        p.n_actions,
                        &transitions[i as usize],
                        &p.scaled,
                        self.scaled_rewards[i as usize],
                    )?;
                }
            }
            (CoreTable::Int32Descaled(values), Algo::Sarsa) => {
                for &i in order {
                    int32_descaled_sarsa_step(
                        values,
                        p.n_actions,
                        &transitions[i as usize],
                        &p.scaled,
                        self.scaled_rewards[i as usize],
                        p.epsilon_threshold,
                        rng,
                    )?;
                }
            }
        }
        self.op_counts.add_scaled(&p.per_update, len as u64);
        Ok(())
    }

    /// Run a block of episodes, stashing any kernel error for the driver.
    fn run_segment(&mut self, episodes: usize, p: &KernelParams) {
        for _ in 0..episodes {
            if let Err(e) = self.run_episode(p) {
                self.error = Some(e);
                return;
            }
        }
    }

    /// Host-visible FP32 view of the local table.
    fn descaled_table(&self, n_states: usize, n_actions: usize, scale_factor: u32) -> QTable {
        match &self.table {
            CoreTable::Fp32(v) | CoreTable::Int32Descaled(v) => {
                QTable::from_values(n_states, n_actions, v.clone())
            }
            CoreTable::Int32(v) => {
                let descaled = v
                    .iter()
                    .map(|&i| crate::kernels::from_fixed(i, scale_factor))
                    .collect();
                QTable::from_values(n_states, n_actions, descaled)
            }
        }
    }

    /// Replace the local table with a broadcast FP32 average.
    fn load_broadcast(&mut self, avg: &QTable, scale_factor: u32) -> Result<(), KernelError> {
        match &mut self.table {
            CoreTable::Fp32(v) | CoreTable::Int32Descaled(v) => {
                v.copy_from_slice(avg.values());
            }
            CoreTable::Int32(v) => {
                for (slot, &value) in v.iter_mut().zip(avg.values()) {
                    *slot = to_fixed(value, scale_factor)?;
                }
            }
        }
        Ok(())
    }
}

#[derive(Debug, Clone, PartialEq, Error)]
pub enum AggregateError {
    #[error("cannot aggregate zero tables")]
    Empty,
    #[error(
        "table {index} has shape {actual_states}x{actual_actions}, expected {states}x{actions}"
    )]
    DimensionMismatch {
        index: usize,
        states: usize,
        actions: usize,
        actual_states: usize,
        actual_actions: usize,
    },
    #[error("aggregate requires FP32 tables (descale INT32 tables first)")]
    NotFp32,
}

/// Element-wise arithmetic mean of FP32 tables, summed in f64
/// left-to-right.
pub fn aggregate(tables: &[QTable]) -> Result<QTable, AggregateError> {
    let first = tables.first().ok_or(AggregateError::Empty)?;
    let (states, actions) = (first.n_states(), first.n_actions());
    for (index, t) in tables.iter().enumerate() {
        if t.dtype() != DType::Fp32 {
            return Err(AggregateError::NotFp32);
        }
        if t.n_states() != states || t.n_actions() != actions {
            return Err(AggregateError::DimensionMismatch {
                index,
                states,
                actions,
                actual_states: t.n_states(),
                actual_actions: t.n_actions(),
            });
        }
    }
    let mut acc = vec![0.0f64; states * actions];
    for t in tables {
        for (slot, &v) in acc.iter_mut().zip(t.values()) {
            *slot += v as f64;
        }
    }
    let n = tables.len() as f64;
    let mean: Vec<f32> = acc.into_iter().map(|s| (s / n) as f32).collect();
    Ok(QTable::from_values(states, actions, mean))
}

fn take_core_error(cores: &mut [CoreState<'_>]) -> Result<(), KernelError> {
    for core in cores {
        if let Some(e) = core.error.take() {
            return Err(e);
        }
    }
    Ok(())
}

fn kernel_params(config: &PimConfig, n_actions: usize) -> Result<KernelParams, KernelError> {
    Ok(KernelParams {
        algo: config.algo,
        strategy: config.strategy,
        alpha: config.hyper.alpha,
        gamma: config.hyper.gamma,
        scaled: ScaledHyper::new(&config.hyper)?,
        epsilon_threshold: epsilon_threshold(config.hyper.epsilon),
        n_actions,
        per_update: per_update_counts(config.algo, config.dtype, config.strategy, n_actions),
    })
}

/// Simulate the single-table workflow:
///
/// 1. partition the dataset and charge the CPU-to-PIM chunk transfer;
/// 2. every episode, each core does one full pass over its chunk;
/// 3. every `tau` episodes, ship all tables to the host and back, replacing
///    the locals with the element-wise average;
/// 4. after the final round, charge the PIM-to-CPU retrieval and return the
///    last average (descaled when training in INT32).
///
/// Kernel time between barriers is the maximum over cores.
pub fn run_training(config: &PimConfig, dataset: &Dataset) -> Result<TrainOutput, SimError> {
    config.validate()?;
    if config.mode != Mode::SingleTable {
        return Err(ConfigError::WrongMode {
            expected: Mode::SingleTable.as_str(),
            actual: config.mode.as_str(),
        }
        .into());
    }

    let spec = dataset.spec();
    let (n_states, n_actions) = (spec.n_states() as usize, spec.n_actions() as usize);
    let params = kernel_params(config, n_actions)?;

    let chunks = partition(dataset, config.n_cores)?;
    let mut cores = chunks
        .into_iter()
        .map(|chunk| CoreState::new(chunk, config, n_states, n_actions))
        .collect::<Result<Vec<_>, _>>()?;

    let mut phases = PhaseBreakdown::default();
    let chunk_bytes = (dataset.len() * RECORD_LEN) as u64;
    phases.cpu_to_pim = Phase {
        seconds: transfer_seconds(chunk_bytes, &config.costs),
        bytes: chunk_bytes,
    };

    let table_bytes = (n_states * n_actions * 4) as u64;
    let rounds = (config.hyper.episodes / config.tau) as u64;
    let mut average = None;
    let mut kernel_cycles_total: u64 = 0;

    for _round in 0..rounds {
        // Kernel phase: cores run tau episodes in parallel and meet at the
        // sync barrier, so the segment costs the slowest core's cycles.
        let cycles_before: Vec<u64> = cores
            .iter()
            .map(|c| kernel_cycles(&c.op_counts, &config.costs))
            .collect();
        cores
            .par_iter_mut()
            .for_each(|core| core.run_segment(config.tau, &params));
        take_core_error(&mut cores)?;
        kernel_cycles_total += cores
            .iter()
            .zip(&cycles_before)
            .map(|(c, &before)| kernel_cycles(&c.op_counts, &config.costs) - before)
            .max()
            .unwrap_or(0);

        // Inter-core phase: all tables to the host, average, and (by
        // default) broadcast the average back.
        let locals: Vec<QTable> = cores
            .iter()
            .map(|c| c.descaled_table(n_states, n_actions, config.hyper.scale_factor))
            .collect();
        let avg = aggregate(&locals).expect("local tables share shape and dtype");

        if config.broadcast_after_sync {
            for core in &mut cores {
                core.load_broadcast(&avg, config.hyper.scale_factor)?;
            }
        }
        average = Some(avg);
    }
    phases.kernel.seconds = kernel_cycles_total as f64 / config.costs.core_freq_hz;

    // Each round moves every table to the host and, with broadcast on, back
    // again. Per-round cost is constant, so the total is a clean multiple
    // of the round count.
    let gather_bytes = config.n_cores as u64 * table_bytes;
    let transfers_per_round = if config.broadcast_after_sync { 2 } else { 1 };
    let round_seconds = transfers_per_round as f64 * transfer_seconds(gather_bytes, &config.costs);
    phases.inter_core = Phase {
        seconds: rounds as f64 * round_seconds,
        bytes: rounds * transfers_per_round * gather_bytes,
    };

    let retrieval_bytes = config.n_cores as u64 * table_bytes;
    phases.pim_to_cpu = Phase {
        seconds: transfer_seconds(retrieval_bytes, &config.costs),
        bytes: retrieval_bytes,
    };

    Ok(TrainOutput {
        qtable: average.expect("episodes >= 1 implies at least one round"),
        report: SimReport {
            phases,
            comm_rounds: rounds,
            per_core_op_counts: cores.into_iter().map(|c| c.op_counts).collect(),
        },
    })
}

/// Simulate independent learners: one dataset per core, every core runs all
/// episodes with no inter-core phase, and the per-agent tables are returned
/// without aggregation.
pub fn run_multi_agent(
    config: &PimConfig,
    datasets: &[Dataset],
) -> Result<MultiAgentOutput, SimError> {
    config.validate()?;
    if config.mode != Mode::MultiAgent {
        return Err(ConfigError::WrongMode {
            expected: Mode::MultiAgent.as_str(),
            actual: config.mode.as_str(),
        }
        .into());
    }
    if datasets.len() != config.n_cores {
        return Err(ConfigError::DatasetCountMismatch {
            n_cores: config.n_cores,
            n_datasets: datasets.len(),
        }
        .into());
    }
    let spec = datasets[0].spec();
    if datasets.iter().any(|d| d.spec() != spec) {
        return Err(ConfigError::MixedEnvironments.into());
    }

    let (n_states, n_actions) = (spec.n_states() as usize, spec.n_actions() as usize);
    let params = kernel_params(config, n_actions)?;

    let mut cores = datasets
        .iter()
        .enumerate()
        .map(|(core_id, dataset)| {
            let chunk = Chunk {
                core_id,
                offset: 0,
                transitions: dataset.transitions(),
            };
            CoreState::new(chunk, config, n_states, n_actions)
        })
        .collect::<Result<Vec<_>, _>>()?;

    let mut phases = PhaseBreakdown::default();
    let chunk_bytes: u64 = datasets.iter().map(|d| (d.len() * RECORD_LEN) as u64).sum();
    phases.cpu_to_pim = Phase {
        seconds: transfer_seconds(chunk_bytes, &config.costs),
        bytes: chunk_bytes,
    };

    cores
        .par_iter_mut()
        .for_each(|core| core.run_segment(config.hyper.episodes, &params));
    take_core_error(&mut cores)?;
    let max_cycles = cores
        .iter()
        .map(|c| kernel_cycles(&c.op_counts, &config.costs))
        .max()
        .unwrap_or(0);
    phases.kernel.seconds = max_cycles as f64 / config.costs.core_freq_hz;

    let table_bytes = (n_states * n_actions * 4) as u64;
    let retrieval_bytes = config.n_cores as u64 * table_bytes;
    phases.pim_to_cpu = Phase {
        seconds: transfer_seconds(retrieval_bytes, &config.costs),
        bytes: retrieval_bytes,
    };

    let qtables = cores
        .iter()
        .map(|c| c.descaled_table(n_states, n_actions, config.hyper.scale_factor))
        .collect();
    Ok(MultiAgentOutput {
        qtables,
        report: SimReport {
            phases,
            comm_rounds: 0,
            per_core_op_counts: cores.into_iter().map(|c| c.op_counts).collect(),
        },
    })
}
