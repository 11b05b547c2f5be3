//! Per-core numerics: the LCG, the fixed-point codec, Q-table types, the
//! update rules, and the sampling orders.

pub mod fixed;
pub mod qtable;
pub mod rng;
pub mod sampling;
pub mod update;

pub use fixed::{from_fixed, to_fixed, RangeError};
pub use qtable::{argmax_row_f32, argmax_row_i32, DType, Hyperparams, HyperparamsError, QTable};
pub use rng::RngState;
pub use sampling::{sample_order, sample_order_into, SamplingStrategy};
pub use update::{
    epsilon_threshold, q_target_fp32, q_update_fp32, q_update_int32, sarsa_next_action,
    sarsa_update, Algo, KernelError, ScaledHyper, EPSILON_RESOLUTION,
};
