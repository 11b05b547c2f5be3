//! Rollout-quality oracle: value iteration over the exact FrozenLake
//! transition model yields a near-optimal policy whose evaluated mean
//! reward must land in the historical band.

use pimrl_core::envs::frozen_lake;
use pimrl_core::eval::{evaluate, Policy};
use pimrl_core::EnvSpec;

/// Exact transition model: for (state, action), the three equally likely
/// (next_state, reward, done) outcomes.
fn outcomes(state: u32, action: u32) -> [(u32, f64, bool); 3] {
    let mut out = [(0, 0.0, false); 3];
    for slip in 0..3u32 {
        let executed = (action + 3 + slip) % 4;
        let step = frozen_lake::frozen_lake_move(state, executed).unwrap();
        out[slip as usize] = (step.next_state, step.reward as f64, step.done);
    }
    out
}

/// Plain value iteration; independent of every training code path.
fn value_iteration(gamma: f64) -> Policy {
    let mut values = [0.0f64; 16];
    for _ in 0..10_000 {
        let mut delta = 0.0f64;
        for state in 0..16u32 {
            if frozen_lake::is_terminal(state) {
                continue;
            }
            let best = (0..4u32)
                .map(|a| {
                    outcomes(state, a)
                        .iter()
                        .map(|&(next, r, done)| {
                            (r + if done {
                                0.0
                            } else {
                                gamma * values[next as usize]
                            }) / 3.0
                        })
                        .sum::<f64>()
                })
                .fold(f64::NEG_INFINITY, f64::max);
            delta = delta.max((best - values[state as usize]).abs());
            values[state as usize] = best;
        }
        if delta < 1e-12 {
            break;
        }
    }

    let actions = (0..16u32)
        .map(|state| {
            if frozen_lake::is_terminal(state) {
                return 0;
            }
            (0..4u32)
                .map(|a| {
                    let q: f64 = outcomes(state, a)
                        .iter()
                        .map(|&(next, r, done)| {
                            (r + if done {
                                0.0
                            } else {
                                gamma * values[next as usize]
                            }) / 3.0
                        })
                        .sum();
                    (a, q)
                })
                .fold((0u32, f64::NEG_INFINITY), |best, cand| {
                    if cand.1 > best.1 {
                        cand
                    } else {
                        best
                    }
                })
                .0
        })
        .collect();
    Policy::new(actions)
}

#[test]
fn near_optimal_policy_lands_in_the_reference_band() {
    let policy = value_iteration(0.95);
    let report = evaluate(&policy, EnvSpec::frozen_lake(), 10_000, 100, 20_240_101);
    assert!(
        (0.65..=0.80).contains(&report.mean_reward),
        "value-iteration policy scored {}",
        report.mean_reward
    );
}
