//! Exhaustive parity checks of the environment dynamics against tables
//! generated by an independent implementation (tests/data/gen_fixtures.py).

use pimrl_core::envs::{frozen_lake, taxi};

fn fixture(name: &str) -> String {
    let path = format!("{}/tests/data/{name}", env!("CARGO_MANIFEST_DIR"));
    std::fs::read_to_string(&path).unwrap_or_else(|e| panic!("reading {path}: {e}"))
}

#[test]
fn taxi_matches_the_reference_table() {
    let table = fixture("taxi_transitions.csv");
    let mut rows = 0;
    for line in table.lines().skip(1) {
        let fields: Vec<i64> = line.split(',').map(|v| v.parse().unwrap()).collect();
        let (state, action, next_state, reward, done) = (
            fields[0] as u32,
            fields[1] as u32,
            fields[2] as u32,
            fields[3] as f32,
            fields[4] == 1,
        );
        let step = taxi::taxi_step(state, action)
            .unwrap_or_else(|e| panic!("state {state} action {action}: {e}"));
        assert_eq!(step.next_state, next_state, "state {state} action {action}");
        assert_eq!(step.reward, reward, "state {state} action {action}");
        assert_eq!(step.done, done, "state {state} action {action}");
        rows += 1;
    }
    // 400 non-terminal states x 6 actions.
    assert_eq!(rows, 2_400);

    // Terminal coverage must agree too: exactly the 100 passenger-at-
    // destination states are excluded from the table.
    let in_table: std::collections::BTreeSet<u32> = table
        .lines()
        .skip(1)
        .map(|l| l.split(',').next().unwrap().parse().unwrap())
        .collect();
    for state in 0..500 {
        assert_eq!(
            !taxi::is_terminal(state),
            in_table.contains(&state),
            "terminal disagreement at state {state}"
        );
    }
}

#[test]
fn frozen_lake_matches_the_reference_table() {
    let table = fixture("frozen_lake_transitions.csv");
    let mut rows = 0;
    for line in table.lines().skip(1) {
        let fields: Vec<i64> = line.split(',').map(|v| v.parse().unwrap()).collect();
        let (state, action, slip, next_state, reward, done) = (
            fields[0] as u32,
            fields[1] as u32,
            fields[2] as u32,
            fields[3] as u32,
            fields[4] as f32,
            fields[5] == 1,
        );
        // Slip index k executes direction (action - 1 + k) mod 4.
        let executed = (action + 3 + slip) % 4;
        let step = frozen_lake::frozen_lake_move(state, executed)
            .unwrap_or_else(|e| panic!("state {state} action {action} slip {slip}: {e}"));
        assert_eq!(
            step.next_state, next_state,
            "state {state} action {action} slip {slip}"
        );
        assert_eq!(
            step.reward, reward,
            "state {state} action {action} slip {slip}"
        );
        assert_eq!(step.done, done, "state {state} action {action} slip {slip}");
        rows += 1;
    }
    // 11 non-terminal states x 4 actions x 3 slip outcomes.
    assert_eq!(rows, 132);
}
