//! Shared inputs for the benchmarks.

use coordplan_core::belief::{BeliefTable, ConfidenceFactors, PartnerHistory};
use coordplan_core::{generate_maze_pair, Action, GameConfig, GridPos, MazePair, PlayerId};

/// A generated square maze with the usual wall density.
pub fn maze(size: u32) -> MazePair {
    generate_maze_pair(0xBE7C, size, size, 0.45).expect("benchmark maze")
}

/// Corner-to-corner configuration with E in control.
pub fn corner_config(pair: &MazePair) -> GameConfig {
    GameConfig {
        init: GridPos::new(0, 0),
        goal: GridPos::new(pair.width() - 1, pair.height() - 1),
        initial_controller: PlayerId::E,
    }
}

/// Partner history that sweeps every row left to right.
pub fn sweep_history(pair: &MazePair) -> PartnerHistory {
    let mut h = PartnerHistory::new();
    for row in 0..pair.height() {
        for col in 0..pair.width().saturating_sub(1) {
            h.push(GridPos::new(col, row), Action::Right).expect("in-grid move");
        }
    }
    h
}

/// Belief after ingesting [`sweep_history`].
pub fn swept_belief(pair: &MazePair) -> BeliefTable {
    let mut t = BeliefTable::new(pair.width(), pair.height());
    t.ingest_history(&mut sweep_history(pair), &ConfidenceFactors::default());
    t
}
