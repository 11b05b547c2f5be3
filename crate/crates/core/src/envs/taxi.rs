//! Taxi dynamics on the standard 5x5 map.
//!
//! ```text
//! +---------+
//! |R: | : :G|
//! | : | : : |
//! | : : : : |
//! | | : | : |
//! |Y| : |B: |
//! +---------+
//! ```
//!
//! 500 states encode (taxi row, taxi col, passenger location, destination).
//! Passenger location 4 means "in the taxi". Actions are 0=South, 1=North,
//! 2=East, 3=West, 4=Pickup, 5=Dropoff. Movement into a wall or off the
//! grid keeps the position. Every step costs -1, an illegal pickup or
//! dropoff costs -10, and a successful dropoff pays +20 and ends the
//! episode.

use crate::kernels::RngState;

use super::{EnvError, EnvStep};

pub const N_STATES: u32 = 500;
pub const N_ACTIONS: u32 = 6;

/// Landmark cells in index order R, G, Y, B.
pub const LANDMARKS: [(u32, u32); 4] = [(0, 0), (0, 4), (4, 0), (4, 3)];

/// Vertical wall segments, keyed by the cell on their west side.
const WALLS_EAST_OF: [(u32, u32); 6] = [(0, 1), (1, 1), (3, 0), (3, 2), (4, 0), (4, 2)];

fn blocked_east(row: u32, col: u32) -> bool {
    WALLS_EAST_OF.contains(&(row, col))
}

/// Pack (row, col, passenger location, destination) into a state index.
pub fn encode_taxi(row: u32, col: u32, pass_loc: u32, dest: u32) -> Result<u32, EnvError> {
    if row > 4 || col > 4 || pass_loc > 4 || dest > 3 {
        return Err(EnvError::InvalidTaxiComponents {
            row,
            col,
            pass_loc,
            dest,
        });
    }
    Ok(((row * 5 + col) * 5 + pass_loc) * 4 + dest)
}

/// Inverse of [`encode_taxi`].
pub fn decode_taxi(state: u32) -> Result<(u32, u32, u32, u32), EnvError> {
    if state >= N_STATES {
        return Err(EnvError::InvalidState {
            state,
            n_states: N_STATES,
        });
    }
    let dest = state % 4;
    let rest = state / 4;
    let pass_loc = rest % 5;
    let rest = rest / 5;
    let col = rest % 5;
    let row = rest / 5;
    Ok((row, col, pass_loc, dest))
}

/// A state is terminal once the passenger sits at the destination.
pub fn is_terminal(state: u32) -> bool {
    match decode_taxi(state) {
        Ok((_, _, pass_loc, dest)) => pass_loc < 4 && pass_loc == dest,
        Err(_) => false,
    }
}

/// Deterministic Taxi step.
pub fn taxi_step(state: u32, action: u32) -> Result<EnvStep, EnvError> {
    let (row, col, pass_loc, dest) = decode_taxi(state)?;
    if action >= N_ACTIONS {
        return Err(EnvError::InvalidAction {
            action,
            n_actions: N_ACTIONS,
        });
    }
    if pass_loc < 4 && pass_loc == dest {
        return Err(EnvError::TerminalState { state });
    }

    let mut next = (row, col, pass_loc);
    let mut reward = -1.0f32;
    let mut done = false;
    match action {
        0 => next.0 = (row + 1).min(4),      // south
        1 => next.0 = row.saturating_sub(1), // north
        2 => {
            if col < 4 && !blocked_east(row, col) {
                next.1 = col + 1; // east
            }
        }
        3 => {
            if col > 0 && !blocked_east(row, col - 1) {
                next.1 = col - 1; // west
            }
        }
        4 => {
            // Pickup is only legal with the passenger waiting at this cell.
            if pass_loc < 4 && LANDMARKS[pass_loc as usize] == (row, col) {
                next.2 = 4;
            } else {
                reward = -10.0;
            }
        }
        _ => {
            // Dropoff: at the destination it ends the episode; at another
            // landmark the passenger just gets out; anywhere else it is
            // illegal.
            if pass_loc == 4 && LANDMARKS[dest as usize] == (row, col) {
                next.2 = dest;
                reward = 20.0;
                done = true;
            } else if pass_loc == 4 && LANDMARKS.contains(&(row, col)) {
                next.2 = LANDMARKS.iter().position(|&l| l == (row, col)).unwrap() as u32;
            } else {
                reward = -10.0;
            }
        }
    }

    Ok(EnvStep {
        next_state: encode_taxi(next.0, next.1, next.2, dest)?,
        reward,
        done,
    })
}

/// Uniform draw over the 400 non-terminal states, used for episode starts.
pub fn random_start(rng: &mut RngState) -> u32 {
    let k = rng.below(400);
    let mut seen = 0;
    for state in 0..N_STATES {
        if !is_terminal(state) {
            if seen == k {
                return state;
            }
            seen += 1;
        }
    }
    unreachable!("fewer than 400 non-terminal states")
}
