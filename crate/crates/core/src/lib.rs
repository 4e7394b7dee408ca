//! Shared-control maze game, partner belief, intent planning and the
//! intent-aware Monte Carlo tree search agents that play it.

pub mod agents;
pub mod belief;
pub mod error;
pub mod game;
pub mod harness;
pub mod intent;
pub mod maze_gen;
pub mod maze_io;
pub mod mcts;
pub mod seed;

pub use agents::{AgentKind, AgentParams, AgentPolicy, AgentSeat, Decision, EgoView, HeuristicConfig};
pub use belief::{BeliefExport, BeliefTable, ConfidenceFactors, PartnerHistory};
pub use error::{Error, Result};
pub use game::{
    Action, ActionSet, ControllerState, GameConfig, Grid, GridPos, MazePair, MazeSide, PlayerId, DEFAULT_STEP_CAP,
};
pub use intent::{plan_intent, trim_intent, EdgeCostModel, IntentTrajectory};
pub use maze_gen::generate_maze_pair;
pub use mcts::{PlannerParams, RewardScheme, SearchOutcome};
pub use seed::derive_seed;
