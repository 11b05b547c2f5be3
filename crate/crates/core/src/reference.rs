//! Straight-line single-core trainer, kept as a correctness oracle for the
//! distributed simulation.
//!
//! No chunking, no synchronization, no cost accounting: one loop over
//! episodes, one loop over the sampled order, one update per experience.
//! Seed it with `RngState::derive_stream(seed, core_id)` to mirror the
//! stream of a simulated core.

use crate::dataset::Dataset;
use crate::kernels::{
    q_update_fp32, q_update_int32, sample_order, sarsa_update, Algo, DType, Hyperparams,
    KernelError, QTable, RngState, SamplingStrategy,
};

/// Train over the whole dataset and return the final table, descaled to
/// FP32 when the INT32 kernels were used.
pub fn reference_train(
    dataset: &Dataset,
    algo: Algo,
    dtype: DType,
    strategy: SamplingStrategy,
    hyper: &Hyperparams,
    mut rng: RngState,
) -> Result<QTable, KernelError> {
    let spec = dataset.spec();
    let (n_states, n_actions) = (spec.n_states() as usize, spec.n_actions() as usize);
    let mut q = match dtype {
        DType::Fp32 => QTable::zeros_fp32(n_states, n_actions),
        DType::Int32 => QTable::zeros_int32(n_states, n_actions),
    };

    for _ in 0..hyper.episodes {
        let order = sample_order(strategy, dataset.len(), &mut rng);
        for &i in &order {
            let t = &dataset.transitions()[i as usize];
            match (algo, dtype) {
                (Algo::QLearning, DType::Fp32) => q_update_fp32(&mut q, t, hyper),
                (Algo::QLearning, DType::Int32) => q_update_int32(&mut q, t, hyper)?,
                (Algo::Sarsa, _) => sarsa_update(&mut q, t, hyper, &mut rng)?,
            }
        }
    }
    Ok(q.descaled(hyper.scale_factor))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::envs::{collect_dataset, BehaviorPolicy, EnvSpec};

    #[test]
    fn reference_is_deterministic() {
        let d = collect_dataset(
            EnvSpec::frozen_lake(),
            BehaviorPolicy::uniform_random(2),
            200,
            2,
        );
        let h = Hyperparams {
            episodes: 5,
            ..Default::default()
        };
        let a = reference_train(
            &d,
            Algo::Sarsa,
            DType::Fp32,
            SamplingStrategy::Ran,
            &h,
            RngState::from_seed(1),
        )
        .unwrap();
        let b = reference_train(
            &d,
            Algo::Sarsa,
            DType::Fp32,
            SamplingStrategy::Ran,
            &h,
            RngState::from_seed(1),
        )
        .unwrap();
        assert_eq!(a, b);
    }

    #[test]
    fn reference_learns_positive_values_on_frozen_lake() {
        let d = collect_dataset(
            EnvSpec::frozen_lake(),
            BehaviorPolicy::uniform_random(3),
            5_000,
            3,
        );
        let h = Hyperparams {
            episodes: 20,
            ..Default::default()
        };
        let q = reference_train(
            &d,
            Algo::QLearning,
            DType::Fp32,
            SamplingStrategy::Seq,
            &h,
            RngState::from_seed(0),
        )
        .unwrap();
        // State 14 borders the goal; acting there must have acquired value.
        let row = &q.values()[14 * 4..15 * 4];
        assert!(
            row.iter().any(|&v| v > 0.0),
            "no value learned near the goal: {row:?}"
        );
    }
}
