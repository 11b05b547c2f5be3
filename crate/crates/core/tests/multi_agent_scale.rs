//! A thousand independent agents with 10,000 transitions each is a valid
//! multi-agent configuration and trains end to end.

use pimrl_core::{
    collect_dataset, run_multi_agent, BehaviorPolicy, Dataset, EnvSpec, Hyperparams, Mode,
    PimConfig,
};

#[test]
fn thousand_agents_train_end_to_end() {
    let datasets: Vec<Dataset> = (0..1000u64)
        .map(|k| {
            collect_dataset(
                EnvSpec::frozen_lake(),
                BehaviorPolicy::uniform_random(k),
                10_000,
                k,
            )
        })
        .collect();
    let config = PimConfig {
        n_cores: 1000,
        mode: Mode::MultiAgent,
        hyper: Hyperparams {
            episodes: 1,
            ..Default::default()
        },
        tau: 1,
        seed: 9,
        ..Default::default()
    };
    config.validate().unwrap();
    let out = run_multi_agent(&config, &datasets).unwrap();
    assert_eq!(out.qtables.len(), 1000);
    assert_eq!(out.report.phases.inter_core.seconds, 0.0);
    assert_eq!(out.report.per_core_op_counts.len(), 1000);
}
