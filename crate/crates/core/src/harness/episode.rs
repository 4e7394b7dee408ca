use serde::{Deserialize, Serialize};

use crate::agents::{AgentKind, AgentParams, AgentSeat};
use crate::error::{Error, Result};
use crate::game::{is_terminal, oracle_episode_length, step, Action, GameConfig, GridPos, MazePair, PlayerId};
use crate::intent::IntentTrajectory;
use crate::mcts::RewardScheme;
use crate::seed::derive_seed;

/// Agent kinds for both players plus shared parameters.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct PairSpec {
    pub agent_e: AgentKind,
    pub agent_h: AgentKind,
    pub params: AgentParams,
}

impl PairSpec {
    /// Both players use the same kind.
    pub fn homogeneous(kind: AgentKind, params: AgentParams) -> Self {
        PairSpec {
            agent_e: kind,
            agent_h: kind,
            params,
        }
    }

    pub fn kind(&self, player: PlayerId) -> AgentKind {
        match player {
            PlayerId::E => self.agent_e,
            PlayerId::H => self.agent_h,
        }
    }

    /// Scheme label for result files: the requested bonus scheme if any
    /// seat runs `mcts-intent`, otherwise `none`.
    pub fn scheme_label(&self) -> RewardScheme {
        if self.agent_e == AgentKind::IntentMcts || self.agent_h == AgentKind::IntentMcts {
            self.params.planner.scheme
        } else {
            RewardScheme::None
        }
    }

    pub fn seats(&self, pair: &MazePair, seed: u64) -> Result<[AgentSeat; 2]> {
        let seat = |player: PlayerId| {
            AgentSeat::new(
                player,
                pair.side(player).clone(),
                self.kind(player),
                &self.params,
                derive_seed(seed, &[player.index() as u64]),
            )
        };
        Ok([seat(PlayerId::E)?, seat(PlayerId::H)?])
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct TraceEvent {
    pub player: PlayerId,
    pub cell: GridPos,
    pub action: Action,
    /// Intent handed over with a `Switch`.
    pub intent: Option<IntentTrajectory>,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct EpisodeOutcome {
    pub steps: u32,
    pub switches: u32,
    pub success: bool,
    pub trace: Vec<TraceEvent>,
}

/// Plays one episode between two seats. The controlling seat acts until it
/// plays `Switch`, at which point its intent is delivered to the partner.
/// Every executed move is appended to the partner's history.
pub fn play_episode(pair: &MazePair, config: &GameConfig, seats: &mut [AgentSeat; 2], cap: u32) -> Result<EpisodeOutcome> {
    config.validate(pair.grid())?;
    if cap == 0 {
        return Err(Error::Domain("step cap must be positive".into()));
    }
    let mut state = config.initial_state();
    let mut steps = 0;
    let mut switches = 0;
    let mut trace = Vec::new();
    while !is_terminal(state, config.goal, steps, cap) {
        let player = state.controller;
        let decision = seats[player.index()].act(state.cell, config.goal)?;
        let next = step(pair.side(player), state, decision.action).ok_or(Error::ProtocolViolation {
            player,
            cell: state.cell,
            action: decision.action,
        })?;
        let partner = &mut seats[(-player).index()];
        if decision.action.is_move() {
            partner.record_partner_move(state.cell, decision.action)?;
        } else {
            switches += 1;
            partner.receive_intent(decision.intent.clone().unwrap_or_default());
        }
        trace.push(TraceEvent {
            player,
            cell: state.cell,
            action: decision.action,
            intent: decision.intent,
        });
        steps += 1;
        state = next;
    }
    Ok(EpisodeOutcome {
        steps,
        switches,
        success: state.cell == config.goal,
        trace,
    })
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct EpisodeRecord {
    pub maze_id: String,
    pub config: GameConfig,
    pub seed: u64,
    pub oracle_length: u32,
    pub steps: u32,
    pub switches: u32,
    pub success: bool,
    pub agent_e: AgentKind,
    pub agent_h: AgentKind,
    pub scheme: RewardScheme,
}

/// Runs one seeded episode and records it together with its oracle length.
pub fn run_episode(
    maze_id: &str,
    pair: &MazePair,
    config: &GameConfig,
    agents: &PairSpec,
    cap: u32,
    seed: u64,
) -> Result<EpisodeRecord> {
    let oracle_length = oracle_episode_length(pair, config)?;
    let mut seats = agents.seats(pair, seed)?;
    let out = play_episode(pair, config, &mut seats, cap)?;
    Ok(EpisodeRecord {
        maze_id: maze_id.to_string(),
        config: *config,
        seed,
        oracle_length,
        steps: out.steps,
        switches: out.switches,
        success: out.success,
        agent_e: agents.agent_e,
        agent_h: agents.agent_h,
        scheme: agents.scheme_label(),
    })
}
