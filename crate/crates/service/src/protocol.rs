//! JSON wire protocol. Every message travels in an [`Envelope`] with a
//! `type` tag and a `payload`; server pushes carry a per-session `seq`.

use coordplan_core::belief::BeliefExport;
use coordplan_core::maze_io::{ConfigRecord, MazeFile};
use coordplan_core::{Action, AgentKind, GridPos, PlayerId, RewardScheme};
use serde::{Deserialize, Serialize};

pub const FORMAT_VERSION: u32 = 1;

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Envelope<M> {
    pub format_version: u32,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub session_id: Option<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub seq: Option<u64>,
    #[serde(flatten)]
    pub message: M,
}

impl<M> Envelope<M> {
    pub fn new(session_id: Option<String>, seq: Option<u64>, message: M) -> Self {
        Envelope {
            format_version: FORMAT_VERSION,
            session_id,
            seq,
            message,
        }
    }
}

/// A fixture name or an inline maze document.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum MazeRef {
    Fixture(String),
    Inline(MazeFile),
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct CreateRequest {
    /// Requested id; the server picks one when absent.
    #[serde(default)]
    pub session_id: Option<String>,
    pub maze: MazeRef,
    pub config: ConfigRecord,
    pub human_side: PlayerId,
    pub agent_kind: AgentKind,
    #[serde(default)]
    pub scheme: Option<RewardScheme>,
    #[serde(default)]
    pub seed: u64,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "type", content = "payload", rename_all = "snake_case")]
pub enum ClientMessage {
    Create(CreateRequest),
    HumanAction { action: Action },
    HumanIntent { cells: Vec<GridPos> },
    /// Requests a belief_snapshot push.
    BeliefRequest,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Phase {
    HumanTurn,
    AgentTurn,
    Finished,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SessionSnapshot {
    pub session_id: String,
    pub maze_id: Option<String>,
    pub width: u32,
    pub height: u32,
    pub init: GridPos,
    pub goal: GridPos,
    pub human_side: PlayerId,
    pub agent_kind: AgentKind,
    pub cell: GridPos,
    pub controller: PlayerId,
    pub steps: u32,
    pub switches: u32,
    pub phase: Phase,
    pub success: bool,
    /// Latest intent the human sent to the agent.
    pub human_intent: Vec<GridPos>,
    /// Latest intent the agent handed to the human.
    pub agent_intent: Vec<GridPos>,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ErrorCode {
    Blocked,
    NotYourTurn,
    Finished,
    InvalidIntent,
    InvalidMaze,
    InvalidConfig,
    InvalidRequest,
    UnknownSession,
    DuplicateSession,
    Internal,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct AgentMove {
    pub action: Action,
    pub from: GridPos,
    pub cell: GridPos,
    pub controller: PlayerId,
    pub steps: u32,
    pub switches: u32,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "type", content = "payload", rename_all = "snake_case")]
pub enum ServerMessage {
    Created(SessionSnapshot),
    StateUpdate(SessionSnapshot),
    AgentMoved(AgentMove),
    IntentReceived { cells: Vec<GridPos> },
    BeliefSnapshot { belief: BeliefExport },
    Error { code: ErrorCode, message: String },
    Finished(SessionSnapshot),
}
