//! Environment dynamics and offline dataset collection.
//!
//! Both environments are pure functions over explicit state and RNG values;
//! nothing here holds mutable state between calls.

pub mod frozen_lake;
pub mod taxi;

use thiserror::Error;

use crate::dataset::{Dataset, Transition};
use crate::kernels::RngState;

pub use frozen_lake::{frozen_lake_move, frozen_lake_step};
pub use taxi::{decode_taxi, encode_taxi, taxi_step};

/// Supported environments.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum EnvKind {
    FrozenLake,
    Taxi,
}

impl EnvKind {
    pub fn as_str(&self) -> &'static str {
        match self {
            EnvKind::FrozenLake => "frozen-lake",
            EnvKind::Taxi => "taxi",
        }
    }
}

/// State- and action-space shape of an environment. Constructed only
/// through [`EnvSpec::new`], so the counts always match the kind.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct EnvSpec {
    kind: EnvKind,
}

impl EnvSpec {
    pub fn new(kind: EnvKind) -> Self {
        EnvSpec { kind }
    }

    pub fn frozen_lake() -> Self {
        EnvSpec::new(EnvKind::FrozenLake)
    }

    pub fn taxi() -> Self {
        EnvSpec::new(EnvKind::Taxi)
    }

    pub fn kind(&self) -> EnvKind {
        self.kind
    }

    pub fn n_states(&self) -> u32 {
        match self.kind {
            EnvKind::FrozenLake => frozen_lake::N_STATES,
            EnvKind::Taxi => taxi::N_STATES,
        }
    }

    pub fn n_actions(&self) -> u32 {
        match self.kind {
            EnvKind::FrozenLake => frozen_lake::N_ACTIONS,
            EnvKind::Taxi => taxi::N_ACTIONS,
        }
    }

    pub fn is_terminal(&self, state: u32) -> bool {
        match self.kind {
            EnvKind::FrozenLake => frozen_lake::is_terminal(state),
            EnvKind::Taxi => taxi::is_terminal(state),
        }
    }

    /// Episode start state: the fixed corner for FrozenLake, a uniformly
    /// random non-terminal state for Taxi.
    pub fn start_state(&self, rng: &mut RngState) -> u32 {
        match self.kind {
            EnvKind::FrozenLake => frozen_lake::START,
            EnvKind::Taxi => taxi::random_start(rng),
        }
    }

    /// One environment step under this spec.
    pub fn step(&self, state: u32, action: u32, rng: &mut RngState) -> Result<EnvStep, EnvError> {
        match self.kind {
            EnvKind::FrozenLake => frozen_lake::frozen_lake_step(state, action, rng),
            EnvKind::Taxi => taxi::taxi_step(state, action),
        }
    }
}

/// Outcome of a single environment step.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct EnvStep {
    pub next_state: u32,
    pub reward: f32,
    pub done: bool,
}

/// The data-collecting policy. Only uniform random selection is used.
#[derive(Debug, Clone, Copy)]
pub struct BehaviorPolicy {
    pub kind: PolicyKind,
    pub seed: u64,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum PolicyKind {
    UniformRandom,
}

impl BehaviorPolicy {
    pub fn uniform_random(seed: u64) -> Self {
        BehaviorPolicy {
            kind: PolicyKind::UniformRandom,
            seed,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Error)]
pub enum EnvError {
    #[error("state {state} out of range [0, {n_states})")]
    InvalidState { state: u32, n_states: u32 },
    #[error("action {action} out of range [0, {n_actions})")]
    InvalidAction { action: u32, n_actions: u32 },
    #[error("state {state} is terminal and admits no further transitions")]
    TerminalState { state: u32 },
    #[error("taxi components out of range: row={row} col={col} pass_loc={pass_loc} dest={dest}")]
    InvalidTaxiComponents {
        row: u32,
        col: u32,
        pass_loc: u32,
        dest: u32,
    },
}

/// Roll the behavior policy until exactly `n_transitions` experiences are
/// logged, resetting whenever an episode terminates. Fully determined by
/// the policy seed and the environment seed.
pub fn collect_dataset(
    spec: EnvSpec,
    policy: BehaviorPolicy,
    n_transitions: usize,
    seed: u64,
) -> Dataset {
    assert!(n_transitions >= 1, "n_transitions must be >= 1");
    let PolicyKind::UniformRandom = policy.kind;

    // Separate streams for action selection and environment randomness
    // (slips and episode starts) keep the two uncorrelated.
    let mut policy_rng = RngState::derive_stream(policy.seed, 0);
    let mut env_rng = RngState::derive_stream(seed, 1);

    let n_actions = spec.n_actions();
    let mut transitions = Vec::with_capacity(n_transitions);
    let mut state = spec.start_state(&mut env_rng);
    while transitions.len() < n_transitions {
        let action = policy_rng.below(n_actions);
        let step = spec
            .step(state, action, &mut env_rng)
            .expect("collection only steps from valid non-terminal states");
        transitions.push(Transition {
            state,
            action,
            reward: step.reward,
            next_state: step.next_state,
        });
        state = if step.done {
            spec.start_state(&mut env_rng)
        } else {
            step.next_state
        };
    }
    Dataset::new(spec, transitions, seed).expect("collected datasets are valid by construction")
}
