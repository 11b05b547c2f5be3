//! Greedy policy extraction and rollout evaluation.

use crate::envs::{EnvKind, EnvSpec};
use crate::kernels::{argmax_row_f32, DType, QTable, RngState};

/// One action per state.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Policy {
    actions: Vec<u32>,
}

impl Policy {
    pub fn new(actions: Vec<u32>) -> Self {
        Policy { actions }
    }

    pub fn action(&self, state: u32) -> u32 {
        self.actions[state as usize]
    }

    pub fn actions(&self) -> &[u32] {
        &self.actions
    }
}

/// Per-state argmax of an FP32 table, ties broken toward the lowest action
/// index. Descale INT32 tables before extraction.
pub fn greedy_policy(q: &QTable) -> Policy {
    assert_eq!(
        q.dtype(),
        DType::Fp32,
        "greedy_policy requires an FP32 table"
    );
    let n_actions = q.n_actions();
    let actions = q
        .values()
        .chunks_exact(n_actions)
        .map(|row| argmax_row_f32(row) as u32)
        .collect();
    Policy { actions }
}

/// Standard episode truncation horizons.
pub fn default_max_steps(kind: EnvKind) -> usize {
    match kind {
        EnvKind::FrozenLake => 100,
        EnvKind::Taxi => 200,
    }
}

/// Mean and sample standard deviation of total episode reward.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct EvalReport {
    pub mean_reward: f64,
    pub std_dev: f64,
    pub episodes: usize,
}

/// Roll the policy out for `n_episodes` episodes, each truncated at
/// `max_steps`. Episode `i` draws from the stream derived for `(seed, i)`,
/// and the mean is summed in episode order.
pub fn evaluate(
    policy: &Policy,
    spec: EnvSpec,
    n_episodes: usize,
    max_steps: usize,
    seed: u64,
) -> EvalReport {
    assert!(n_episodes >= 1, "n_episodes must be >= 1");
    let mut sum = 0.0f64;
    let mut sum_sq = 0.0f64;
    for episode in 0..n_episodes {
        let mut rng = RngState::derive_stream(seed, episode as u64);
        let mut state = spec.start_state(&mut rng);
        let mut total = 0.0f64;
        for _ in 0..max_steps {
            let step = spec
                .step(state, policy.action(state), &mut rng)
                .expect("rollouts only step from valid non-terminal states");
            total += step.reward as f64;
            if step.done {
                break;
            }
            state = step.next_state;
        }
        sum += total;
        sum_sq += total * total;
    }
    let n = n_episodes as f64;
    let mean = sum / n;
    let variance = if n_episodes > 1 {
        (sum_sq - n * mean * mean) / (n - 1.0)
    } else {
        0.0
    };
    EvalReport {
        mean_reward: mean,
        std_dev: variance.max(0.0).sqrt(),
        episodes: n_episodes,
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::envs::taxi::encode_taxi;

    #[test]
    fn greedy_policy_of_zero_table_is_all_zero() {
        let q = QTable::zeros_fp32(16, 4);
        assert!(greedy_policy(&q).actions().iter().all(|&a| a == 0));
    }

    #[test]
    fn greedy_policy_picks_row_argmax() {
        let mut q = QTable::zeros_fp32(2, 4);
        for (a, v) in [0.1f32, 0.5, 0.2, 0.0].into_iter().enumerate() {
            q.set(0, a, v);
        }
        assert_eq!(greedy_policy(&q).action(0), 1);
    }

    #[test]
    fn greedy_policy_is_scale_invariant() {
        let values: Vec<f32> = (0..64).map(|i| ((i * 37 % 64) as f32) / 64.0).collect();
        let q = QTable::from_values(16, 4, values.clone());
        let doubled = QTable::from_values(16, 4, values.into_iter().map(|v| v * 2.0).collect());
        assert_eq!(greedy_policy(&q), greedy_policy(&doubled));
    }

    #[test]
    fn hopeless_frozen_lake_policy_scores_exactly_zero() {
        // Left only ever executes Left, Up or Down, so the agent never
        // leaves column 0: every episode ends in the hole at state 12 or
        // truncates, and the goal column is unreachable.
        let policy = Policy::new(vec![0; 16]); // always Left
        let report = evaluate(&policy, EnvSpec::frozen_lake(), 500, 100, 9);
        assert_eq!(report.mean_reward, 0.0);

        // Per-episode FrozenLake reward is 0 or 1, so any mean is in [0, 1].
        let down = evaluate(
            &Policy::new(vec![1; 16]),
            EnvSpec::frozen_lake(),
            500,
            100,
            9,
        );
        assert!(down.mean_reward >= 0.0 && down.mean_reward <= 1.0);
    }

    #[test]
    fn taxi_evaluation_is_deterministic() {
        let policy = Policy::new(vec![0; 500]); // always South
        let spec = EnvSpec::taxi();
        let a = evaluate(&policy, spec, 50, 200, 123);
        let b = evaluate(&policy, spec, 50, 200, 123);
        assert_eq!(a, b);
        // Always-South never drops off, so every step costs -1.
        assert_eq!(a.mean_reward, -200.0);
    }

    #[test]
    fn taxi_reward_is_bounded_below() {
        let policy = Policy::new(vec![5; 500]); // always Dropoff
        let report = evaluate(&policy, EnvSpec::taxi(), 100, 50, 7);
        assert!(report.mean_reward >= -10.0 * 50.0);
    }

    #[test]
    fn taxi_trivial_dropoff_policy_succeeds_from_adjacent_state() {
        // Passenger in taxi at the destination R: one Dropoff ends the
        // episode with +20.
        let state = encode_taxi(0, 0, 4, 0).unwrap();
        let policy = Policy::new(vec![5; 500]);
        let mut rng = RngState::from_seed(1);
        let spec = EnvSpec::taxi();
        let step = spec.step(state, policy.action(state), &mut rng).unwrap();
        assert!(step.done);
        assert_eq!(step.reward, 20.0);
    }
}
