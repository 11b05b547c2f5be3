//! Q-learning and SARSA update rules in FP32 and scaled INT32 arithmetic.
//!
//! The INT32 kernels keep every operand premultiplied by the scale factor
//! and descale products with truncating integer division, so the whole
//! update runs on integer units. Intermediate products are 64-bit and any
//! result that escapes the signed 32-bit table range is a hard error.

use thiserror::Error;

use super::fixed::{from_fixed, to_fixed, RangeError};
use super::qtable::{argmax_row_f32, argmax_row_i32, DType, Hyperparams, QTable};
use super::rng::RngState;
use crate::dataset::Transition;

/// Training update rule.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Algo {
    QLearning,
    Sarsa,
}

impl Algo {
    pub fn as_str(&self) -> &'static str {
        match self {
            Algo::QLearning => "q",
            Algo::Sarsa => "sarsa",
        }
    }
}

/// Granularity of the epsilon decision draw in SARSA action selection.
pub const EPSILON_RESOLUTION: u32 = 1_000_000;

/// Integer threshold equivalent to `epsilon` at [`EPSILON_RESOLUTION`].
pub fn epsilon_threshold(epsilon: f32) -> u32 {
    (epsilon as f64 * EPSILON_RESOLUTION as f64)
        .round()
        .clamp(0.0, EPSILON_RESOLUTION as f64) as u32
}

#[derive(Debug, Clone, PartialEq, Error)]
pub enum KernelError {
    #[error(
        "scaled Q-value overflow at (state {state}, action {action}): {scaled} does not fit in i32"
    )]
    QValueOverflow {
        state: u32,
        action: u32,
        scaled: i64,
    },
    #[error(transparent)]
    Range(#[from] RangeError),
}

/// Hyperparameters premultiplied by the scale factor for the INT32 kernels.
#[derive(Debug, Clone, Copy)]
pub struct ScaledHyper {
    pub alpha_s: i64,
    pub gamma_s: i64,
    pub scale: i64,
    pub scale_factor: u32,
}

impl ScaledHyper {
    pub fn new(h: &Hyperparams) -> Result<Self, RangeError> {
        Ok(ScaledHyper {
            alpha_s: to_fixed(h.alpha, h.scale_factor)? as i64,
            gamma_s: to_fixed(h.gamma, h.scale_factor)? as i64,
            scale: h.scale_factor as i64,
            scale_factor: h.scale_factor,
        })
    }
}

/// `r + gamma * max_a' Q(s', a')` on an FP32 table.
pub fn q_target_fp32(t: &Transition, q: &QTable, gamma: f32) -> f32 {
    debug_assert_eq!(q.dtype(), DType::Fp32);
    let n_actions = q.n_actions();
    let row = &q.values()[t.next_state as usize * n_actions..][..n_actions];
    let max = row[argmax_row_f32(row)];
    t.reward + gamma * max
}

/// One Q-learning update on a flat FP32 table. Exactly the `(s, a)` entry
/// changes.
pub(crate) fn fp32_q_step(
    values: &mut [f32],
    n_actions: usize,
    t: &Transition,
    alpha: f32,
    gamma: f32,
) {
    let next_row = &values[t.next_state as usize * n_actions..][..n_actions];
    let max = next_row[argmax_row_f32(next_row)];
    let target = t.reward + gamma * max;
    let idx = t.state as usize * n_actions + t.action as usize;
    values[idx] += alpha * (target - values[idx]);
}

/// One Q-learning update on an FP32 table.
pub fn q_update_fp32(q: &mut QTable, t: &Transition, h: &Hyperparams) {
    assert_eq!(
        q.dtype(),
        DType::Fp32,
        "q_update_fp32 requires an FP32 table"
    );
    let n_actions = q.n_actions();
    fp32_q_step(q.values_mut(), n_actions, t, h.alpha, h.gamma);
}

/// Shared scaled-arithmetic step: given the current scaled entry and the
/// scaled next-state value, produce the updated scaled entry.
fn scaled_new_q(
    q_s: i32,
    next_value_s: i32,
    r_s: i32,
    sh: &ScaledHyper,
    t: &Transition,
) -> Result<i32, KernelError> {
    let overflow = |scaled: i64| KernelError::QValueOverflow {
        state: t.state,
        action: t.action,
        scaled,
    };
    let target_s = (sh.gamma_s)
        .checked_mul(next_value_s as i64)
        .map(|p| r_s as i64 + p / sh.scale)
        .ok_or_else(|| overflow(i64::MAX))?;
    let delta = target_s - q_s as i64;
    let step = sh
        .alpha_s
        .checked_mul(delta)
        .map(|p| p / sh.scale)
        .ok_or_else(|| overflow(i64::MAX))?;
    let updated = q_s as i64 + step;
    i32::try_from(updated).map_err(|_| overflow(updated))
}

/// One Q-learning update on a flat scaled INT32 table.
pub(crate) fn int32_q_step(
    values: &mut [i32],
    n_actions: usize,
    t: &Transition,
    sh: &ScaledHyper,
    r_s: i32,
) -> Result<(), KernelError> {
    let next_row = &values[t.next_state as usize * n_actions..][..n_actions];
    let max = next_row[argmax_row_i32(next_row)];
    let idx = t.state as usize * n_actions + t.action as usize;
    values[idx] = scaled_new_q(values[idx], max, r_s, sh, t)?;
    Ok(())
}

/// One Q-learning update on an INT32 table.
pub fn q_update_int32(q: &mut QTable, t: &Transition, h: &Hyperparams) -> Result<(), KernelError> {
    assert_eq!(
        q.dtype(),
        DType::Int32,
        "q_update_int32 requires an INT32 table"
    );
    let sh = ScaledHyper::new(h)?;
    let r_s = to_fixed(t.reward, h.scale_factor)?;
    let n_actions = q.n_actions();
    int32_q_step(q.scaled_values_mut(), n_actions, t, &sh, r_s)
}

/// Variant of the INT32 rule that stores the descaled real value after
/// every update. Operands are rescaled on entry, so the arithmetic core is
/// identical; only the resting representation differs.
pub(crate) fn int32_descaled_q_step(
    values: &mut [f32],
    n_actions: usize,
    t: &Transition,
    sh: &ScaledHyper,
    r_s: i32,
) -> Result<(), KernelError> {
    let next_row = &values[t.next_state as usize * n_actions..][..n_actions];
    let max_s = to_fixed(next_row[argmax_row_f32(next_row)], sh.scale_factor)?;
    let idx = t.state as usize * n_actions + t.action as usize;
    let q_s = to_fixed(values[idx], sh.scale_factor)?;
    values[idx] = from_fixed(scaled_new_q(q_s, max_s, r_s, sh, t)?, sh.scale_factor);
    Ok(())
}

/// Epsilon-greedy next-action selection for SARSA.
///
/// One decision draw at [`EPSILON_RESOLUTION`] is always consumed; a second
/// draw picks the action when the random branch fires. Greedy ties break
/// toward the lowest action index.
pub fn sarsa_next_action(q: &QTable, s_next: usize, epsilon: f32, rng: &mut RngState) -> usize {
    let n_actions = q.n_actions();
    let threshold = epsilon_threshold(epsilon);
    let draw = rng.below(EPSILON_RESOLUTION);
    if draw < threshold {
        rng.below(n_actions as u32) as usize
    } else {
        match q.dtype() {
            DType::Fp32 => argmax_row_f32(&q.values()[s_next * n_actions..][..n_actions]),
            DType::Int32 => argmax_row_i32(&q.scaled_values()[s_next * n_actions..][..n_actions]),
        }
    }
}

fn pick_next_action<T: Copy, F: Fn(&[T]) -> usize>(
    values: &[T],
    n_actions: usize,
    next_state: usize,
    threshold: u32,
    rng: &mut RngState,
    argmax: F,
) -> usize {
    let draw = rng.below(EPSILON_RESOLUTION);
    if draw < threshold {
        rng.below(n_actions as u32) as usize
    } else {
        argmax(&values[next_state * n_actions..][..n_actions])
    }
}

/// One SARSA update on a flat FP32 table.
pub(crate) fn fp32_sarsa_step(
    values: &mut [f32],
    n_actions: usize,
    t: &Transition,
    alpha: f32,
    gamma: f32,
    threshold: u32,
    rng: &mut RngState,
) {
    let a_next = pick_next_action(
        values,
        n_actions,
        t.next_state as usize,
        threshold,
        rng,
        argmax_row_f32,
    );
    let next_q = values[t.next_state as usize * n_actions + a_next];
    let target = t.reward + gamma * next_q;
    let idx = t.state as usize * n_actions + t.action as usize;
    values[idx] += alpha * (target - values[idx]);
}

/// One SARSA update on a flat scaled INT32 table.
pub(crate) fn int32_sarsa_step(
    values: &mut [i32],
    n_actions: usize,
    t: &Transition,
    sh: &ScaledHyper,
    r_s: i32,
    threshold: u32,
    rng: &mut RngState,
) -> Result<(), KernelError> {
    let a_next = pick_next_action(
        values,
        n_actions,
        t.next_state as usize,
        threshold,
        rng,
        argmax_row_i32,
    );
    let next_q = values[t.next_state as usize * n_actions + a_next];
    let idx = t.state as usize * n_actions + t.action as usize;
    values[idx] = scaled_new_q(values[idx], next_q, r_s, sh, t)?;
    Ok(())
}

/// Descaled-storage SARSA variant, matching [`int32_descaled_q_step`].
pub(crate) fn int32_descaled_sarsa_step(
    values: &mut [f32],
    n_actions: usize,
    t: &Transition,
    sh: &ScaledHyper,
    r_s: i32,
    threshold: u32,
    rng: &mut RngState,
) -> Result<(), KernelError> {
    let a_next = pick_next_action(
        values,
        n_actions,
        t.next_state as usize,
        threshold,
        rng,
        argmax_row_f32,
    );
    let next_s = to_fixed(
        values[t.next_state as usize * n_actions + a_next],
        sh.scale_factor,
    )?;
    let idx = t.state as usize * n_actions + t.action as usize;
    let q_s = to_fixed(values[idx], sh.scale_factor)?;
    values[idx] = from_fixed(scaled_new_q(q_s, next_s, r_s, sh, t)?, sh.scale_factor);
    Ok(())
}

/// One SARSA update on either table type.
pub fn sarsa_update(
    q: &mut QTable,
    t: &Transition,
    h: &Hyperparams,
    rng: &mut RngState,
) -> Result<(), KernelError> {
    let n_actions = q.n_actions();
    let threshold = epsilon_threshold(h.epsilon);
    match q.dtype() {
        DType::Fp32 => {
            fp32_sarsa_step(
                q.values_mut(),
                n_actions,
                t,
                h.alpha,
                h.gamma,
                threshold,
                rng,
            );
            Ok(())
        }
        DType::Int32 => {
            let sh = ScaledHyper::new(h)?;
            let r_s = to_fixed(t.reward, h.scale_factor)?;
            int32_sarsa_step(
                q.scaled_values_mut(),
                n_actions,
                t,
                &sh,
                r_s,
                threshold,
                rng,
            )
        }
    }
}
