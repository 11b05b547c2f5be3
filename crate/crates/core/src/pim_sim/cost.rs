//! Parametric cost model for kernel cycles and host transfers.
//!
//! The defaults are calibration knobs, not ground truth; the only
//! contractual property is the ordering between per-op cycle costs:
//! floating-point ops are emulated and must cost strictly more than their
//! native integer counterparts.

use thiserror::Error;

use crate::kernels::{Algo, DType, SamplingStrategy};

/// Per-op cycle costs and transfer parameters of the simulated machine.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CostModel {
    pub cycles_int_add: u64,
    pub cycles_int_mul32: u64,
    pub cycles_fp_add: u64,
    pub cycles_fp_mul: u64,
    pub core_freq_hz: f64,
    pub xfer_latency_s: f64,
    pub xfer_bandwidth_bps: f64,
}

impl Default for CostModel {
    fn default() -> Self {
        CostModel {
            cycles_int_add: 1,
            // 32-bit integer multiplication emulated by shift-and-add.
            cycles_int_mul32: 32,
            cycles_fp_add: 80,
            cycles_fp_mul: 120,
            core_freq_hz: 425.0e6,
            xfer_latency_s: 2.0e-6,
            xfer_bandwidth_bps: 1024.0 * 1024.0 * 1024.0,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Error)]
pub enum CostModelError {
    #[error("all cycle costs must be strictly positive")]
    NonPositiveCycles,
    #[error("cycle ordering violated: need fp_mul > int_mul32 > int_add and fp_add > int_add")]
    OrderingViolated,
    #[error("core frequency, transfer latency and bandwidth must be strictly positive")]
    NonPositiveTransfer,
}

impl CostModel {
    pub fn validate(&self) -> Result<(), CostModelError> {
        if self.cycles_int_add == 0
            || self.cycles_int_mul32 == 0
            || self.cycles_fp_add == 0
            || self.cycles_fp_mul == 0
        {
            return Err(CostModelError::NonPositiveCycles);
        }
        if !(self.cycles_fp_mul > self.cycles_int_mul32
            && self.cycles_int_mul32 > self.cycles_int_add
            && self.cycles_fp_add > self.cycles_int_add)
        {
            return Err(CostModelError::OrderingViolated);
        }
        if !(self.core_freq_hz > 0.0 && self.xfer_latency_s > 0.0 && self.xfer_bandwidth_bps > 0.0)
        {
            return Err(CostModelError::NonPositiveTransfer);
        }
        Ok(())
    }
}

/// Tally of operations executed by one core.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq)]
pub struct OpCounts {
    pub int_add: u64,
    pub int_mul32: u64,
    pub fp_add: u64,
    pub fp_mul: u64,
}

impl OpCounts {
    pub fn add_scaled(&mut self, per: &OpCounts, times: u64) {
        self.int_add += per.int_add * times;
        self.int_mul32 += per.int_mul32 * times;
        self.fp_add += per.fp_add * times;
        self.fp_mul += per.fp_mul * times;
    }
}

/// Fixed per-update operation counts of a kernel variant.
///
/// Both data types share the same structure: a value scan over the
/// next-state row (`n_actions - 1` compares), three adds/subs and two
/// multiplies for the update, index arithmetic, and the per-index sampling
/// work. The INT32 variant types its arithmetic on the integer units, with
/// each descaling division folded into the emulation cost of its product.
/// SARSA additionally charges the epsilon decision draw and the action
/// draw on every update, on both data types.
pub fn per_update_counts(
    algo: Algo,
    dtype: DType,
    strategy: SamplingStrategy,
    n_actions: usize,
) -> OpCounts {
    let mut counts = OpCounts {
        // Row-base computations for the (s, a) cell and the s' row.
        int_add: 2,
        int_mul32: 2,
        ..OpCounts::default()
    };

    // Sampling: SEQ/STR advance an index; RAN draws through the LCG.
    match strategy {
        SamplingStrategy::Seq | SamplingStrategy::Str { .. } => counts.int_add += 1,
        SamplingStrategy::Ran => {
            counts.int_mul32 += 1;
            counts.int_add += 2;
        }
    }

    // Arithmetic core, typed by the table representation.
    let scan_and_update_adds = (n_actions as u64 - 1) + 3;
    match dtype {
        DType::Fp32 => {
            counts.fp_add += scan_and_update_adds;
            counts.fp_mul += 2;
        }
        DType::Int32 => {
            counts.int_add += scan_and_update_adds;
            counts.int_mul32 += 2;
        }
    }

    if algo == Algo::Sarsa {
        counts.int_mul32 += 2;
        counts.int_add += 4;
    }

    counts
}

/// Dot product of an op tally with the per-op cycle costs.
pub fn kernel_cycles(counts: &OpCounts, costs: &CostModel) -> u64 {
    counts.int_add * costs.cycles_int_add
        + counts.int_mul32 * costs.cycles_int_mul32
        + counts.fp_add * costs.cycles_fp_add
        + counts.fp_mul * costs.cycles_fp_mul
}

/// Affine transfer time: fixed launch latency plus bytes over bandwidth.
pub fn transfer_seconds(bytes: u64, costs: &CostModel) -> f64 {
    costs.xfer_latency_s + bytes as f64 / costs.xfer_bandwidth_bps
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn default_model_is_valid() {
        CostModel::default().validate().unwrap();
    }

    #[test]
    fn ordering_violations_are_rejected() {
        let m = CostModel {
            cycles_int_mul32: 1,
            ..CostModel::default()
        };
        assert_eq!(m.validate(), Err(CostModelError::OrderingViolated));

        let m = CostModel {
            cycles_fp_mul: 32,
            ..CostModel::default()
        };
        assert_eq!(m.validate(), Err(CostModelError::OrderingViolated));

        let m = CostModel {
            cycles_fp_add: 1,
            ..CostModel::default()
        };
        assert_eq!(m.validate(), Err(CostModelError::OrderingViolated));

        let m = CostModel {
            cycles_int_add: 0,
            ..CostModel::default()
        };
        assert_eq!(m.validate(), Err(CostModelError::NonPositiveCycles));
    }

    #[test]
    fn zero_counts_cost_zero_cycles() {
        assert_eq!(
            kernel_cycles(&OpCounts::default(), &CostModel::default()),
            0
        );
    }

    #[test]
    fn cycles_are_linear_in_counts() {
        let costs = CostModel::default();
        let single = per_update_counts(Algo::QLearning, DType::Fp32, SamplingStrategy::Seq, 4);
        let mut doubled = OpCounts::default();
        doubled.add_scaled(&single, 2);
        assert_eq!(
            kernel_cycles(&doubled, &costs),
            2 * kernel_cycles(&single, &costs)
        );
    }

    #[test]
    fn fp32_strictly_dominates_int32_for_any_valid_model() {
        // The count difference between dtypes is a pure type swap, so the
        // ordering invariant alone forces FP32 to cost strictly more. Probe
        // the default model plus adversarial corners that sit just inside
        // the invariant.
        let models = [
            CostModel::default(),
            CostModel {
                cycles_int_add: 1,
                cycles_int_mul32: 2,
                cycles_fp_add: 2,
                cycles_fp_mul: 3,
                ..CostModel::default()
            },
            CostModel {
                cycles_int_add: 99,
                cycles_int_mul32: 100,
                cycles_fp_add: 100,
                cycles_fp_mul: 101,
                ..CostModel::default()
            },
            CostModel {
                cycles_int_add: 1,
                cycles_int_mul32: 1000,
                cycles_fp_add: 2,
                cycles_fp_mul: 1001,
                ..CostModel::default()
            },
        ];
        for costs in models {
            costs.validate().unwrap();
            for algo in [Algo::QLearning, Algo::Sarsa] {
                for strategy in [
                    SamplingStrategy::Seq,
                    SamplingStrategy::Ran,
                    SamplingStrategy::Str { stride: 4 },
                ] {
                    for n_actions in [4usize, 6] {
                        let fp = per_update_counts(algo, DType::Fp32, strategy, n_actions);
                        let int = per_update_counts(algo, DType::Int32, strategy, n_actions);
                        assert!(
                            kernel_cycles(&fp, &costs) > kernel_cycles(&int, &costs),
                            "fp32 not dominant for {algo:?}/{strategy:?}/{n_actions} under {costs:?}"
                        );
                    }
                }
            }
        }
    }

    #[test]
    fn default_fp_int_ratio_is_moderate() {
        let costs = CostModel::default();
        for n_actions in [4usize, 6] {
            let fp = kernel_cycles(
                &per_update_counts(
                    Algo::QLearning,
                    DType::Fp32,
                    SamplingStrategy::Seq,
                    n_actions,
                ),
                &costs,
            ) as f64;
            let int = kernel_cycles(
                &per_update_counts(
                    Algo::QLearning,
                    DType::Int32,
                    SamplingStrategy::Seq,
                    n_actions,
                ),
                &costs,
            ) as f64;
            let ratio = fp / int;
            assert!((2.0..=20.0).contains(&ratio), "ratio {ratio} out of band");
        }
    }

    #[test]
    fn transfer_time_is_affine() {
        let costs = CostModel::default();
        assert_eq!(transfer_seconds(0, &costs), costs.xfer_latency_s);
        let one = transfer_seconds(1_000_000, &costs);
        let two = transfer_seconds(2_000_000, &costs);
        assert!(two < 2.0 * one, "latency must make doubling sublinear");
        // Bandwidth to infinity leaves only the latency.
        let infinite = CostModel {
            xfer_bandwidth_bps: f64::INFINITY,
            ..costs
        };
        assert_eq!(transfer_seconds(1_000_000, &infinite), costs.xfer_latency_s);
    }
}
