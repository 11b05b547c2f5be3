//! FrozenLake 4x4 dynamics on the standard slippery map.
//!
//! ```text
//! S F F F
//! F H F H
//! F F F H
//! H F F G
//! ```
//!
//! Actions are 0=Left, 1=Down, 2=Right, 3=Up. On slippery ice the executed
//! move is the intended direction or one of its two perpendiculars, each
//! with probability 1/3. Off-grid moves keep the position.

use crate::kernels::RngState;

use super::{EnvError, EnvStep};

pub const N_STATES: u32 = 16;
pub const N_ACTIONS: u32 = 4;

const GOAL: u32 = 15;
const HOLES: [u32; 4] = [5, 7, 11, 12];

pub fn is_terminal(state: u32) -> bool {
    state == GOAL || HOLES.contains(&state)
}

/// The episode start cell.
pub const START: u32 = 0;

fn check_bounds(state: u32, action: u32) -> Result<(), EnvError> {
    if state >= N_STATES {
        return Err(EnvError::InvalidState {
            state,
            n_states: N_STATES,
        });
    }
    if action >= N_ACTIONS {
        return Err(EnvError::InvalidAction {
            action,
            n_actions: N_ACTIONS,
        });
    }
    Ok(())
}

/// Apply one executed (post-slip) direction deterministically.
pub fn frozen_lake_move(state: u32, direction: u32) -> Result<EnvStep, EnvError> {
    check_bounds(state, direction)?;
    if is_terminal(state) {
        return Err(EnvError::TerminalState { state });
    }
    let (row, col) = (state / 4, state % 4);
    let (row, col) = match direction {
        0 => (row, col.saturating_sub(1)), // left
        1 => ((row + 1).min(3), col),      // down
        2 => (row, (col + 1).min(3)),      // right
        _ => (row.saturating_sub(1), col), // up
    };
    let next = row * 4 + col;
    Ok(EnvStep {
        next_state: next,
        reward: if next == GOAL { 1.0 } else { 0.0 },
        done: is_terminal(next),
    })
}

/// One slippery step: draws the slip outcome, then moves.
///
/// The three equally likely executed directions for intended action `a` are
/// `(a - 1) % 4`, `a`, `(a + 1) % 4`, in that draw order.
pub fn frozen_lake_step(state: u32, action: u32, rng: &mut RngState) -> Result<EnvStep, EnvError> {
    check_bounds(state, action)?;
    let slip = rng.below(3);
    let executed = (action + 3 + slip) % 4;
    frozen_lake_move(state, executed)
}
