//! One human-vs-agent game. Pure state machine: no I/O, no clocks.

use coordplan_core::belief::BeliefExport;
use coordplan_core::game::{is_terminal, step};
use coordplan_core::{
    derive_seed, Action, AgentKind, AgentParams, AgentSeat, ControllerState, GameConfig, GridPos, IntentTrajectory,
    MazePair, PlayerId,
};

use crate::protocol::{AgentMove, ClientMessage, Envelope, ErrorCode, Phase, ServerMessage, SessionSnapshot};

#[derive(Clone, Debug, PartialEq, thiserror::Error)]
#[error("{code:?}: {message}")]
pub struct SessionError {
    pub code: ErrorCode,
    pub message: String,
}

impl SessionError {
    pub fn new(code: ErrorCode, message: impl Into<String>) -> Self {
        SessionError {
            code,
            message: message.into(),
        }
    }
}

pub type Pushes = Vec<Envelope<ServerMessage>>;

#[derive(Clone, Debug)]
pub struct SessionSetup {
    pub id: String,
    pub maze_id: Option<String>,
    pub pair: MazePair,
    pub config: GameConfig,
    pub human_side: PlayerId,
    pub agent_kind: AgentKind,
    pub params: AgentParams,
    /// Episode seed; the agent seat derives its stream exactly as the
    /// experiment harness does for the same player.
    pub seed: u64,
    pub cap: u32,
}

pub struct Session {
    id: String,
    maze_id: Option<String>,
    pair: MazePair,
    config: GameConfig,
    human_side: PlayerId,
    agent_kind: AgentKind,
    agent: AgentSeat,
    state: ControllerState,
    steps: u32,
    switches: u32,
    phase: Phase,
    human_intent: IntentTrajectory,
    agent_intent: IntentTrajectory,
    cap: u32,
    seq: u64,
}

impl Session {
    /// Builds the session and returns the `created` push. If the agent
    /// holds control first the phase is `AgentTurn`; drive it with
    /// [`Session::advance_agent`] or [`Session::run_agent`].
    pub fn create(setup: SessionSetup) -> Result<(Session, Pushes), SessionError> {
        setup
            .config
            .validate(setup.pair.grid())
            .map_err(|e| SessionError::new(ErrorCode::InvalidConfig, e.to_string()))?;
        if setup.cap == 0 {
            return Err(SessionError::new(ErrorCode::InvalidConfig, "step cap must be positive"));
        }
        let agent_side = -setup.human_side;
        let agent = AgentSeat::new(
            agent_side,
            setup.pair.side(agent_side).clone(),
            setup.agent_kind,
            &setup.params,
            derive_seed(setup.seed, &[agent_side.index() as u64]),
        )
        .map_err(|e| SessionError::new(ErrorCode::InvalidRequest, e.to_string()))?;
        let state = setup.config.initial_state();
        let mut session = Session {
            id: setup.id,
            maze_id: setup.maze_id,
            pair: setup.pair,
            config: setup.config,
            human_side: setup.human_side,
            agent_kind: setup.agent_kind,
            agent,
            state,
            steps: 0,
            switches: 0,
            phase: if state.controller == setup.human_side {
                Phase::HumanTurn
            } else {
                Phase::AgentTurn
            },
            human_intent: IntentTrajectory::empty(),
            agent_intent: IntentTrajectory::empty(),
            cap: setup.cap,
            seq: 0,
        };
        let created = ServerMessage::Created(session.snapshot());
        let pushes = session.stamp(vec![created]);
        Ok((session, pushes))
    }

    pub fn id(&self) -> &str {
        &self.id
    }

    pub fn phase(&self) -> Phase {
        self.phase
    }

    pub fn seq(&self) -> u64 {
        self.seq
    }

    pub fn agent(&self) -> &AgentSeat {
        &self.agent
    }

    pub fn snapshot(&self) -> SessionSnapshot {
        SessionSnapshot {
            session_id: self.id.clone(),
            maze_id: self.maze_id.clone(),
            width: self.pair.width(),
            height: self.pair.height(),
            init: self.config.init,
            goal: self.config.goal,
            human_side: self.human_side,
            agent_kind: self.agent_kind,
            cell: self.state.cell,
            controller: self.state.controller,
            steps: self.steps,
            switches: self.switches,
            phase: self.phase,
            success: self.state.cell == self.config.goal,
            human_intent: self.human_intent.cells().to_vec(),
            agent_intent: self.agent_intent.cells().to_vec(),
        }
    }

    /// The agent's current belief over the human's maze side.
    pub fn belief(&self) -> BeliefExport {
        self.agent.belief().export()
    }

    fn stamp_one(&mut self, message: ServerMessage) -> Envelope<ServerMessage> {
        self.seq += 1;
        Envelope::new(Some(self.id.clone()), Some(self.seq), message)
    }

    fn stamp(&mut self, messages: Vec<ServerMessage>) -> Pushes {
        messages.into_iter().map(|m| self.stamp_one(m)).collect()
    }

    /// Stamps an error push for this session.
    pub fn error_push(&mut self, err: SessionError) -> Envelope<ServerMessage> {
        self.stamp_one(ServerMessage::Error {
            code: err.code,
            message: err.message,
        })
    }

    fn require_human_turn(&self) -> Result<(), SessionError> {
        match self.phase {
            Phase::HumanTurn => Ok(()),
            Phase::AgentTurn => Err(SessionError::new(ErrorCode::NotYourTurn, "the agent is in control")),
            Phase::Finished => Err(SessionError::new(ErrorCode::Finished, "the game is over")),
        }
    }

    fn finish_if_terminal(&mut self, out: &mut Vec<ServerMessage>) {
        if is_terminal(self.state, self.config.goal, self.steps, self.cap) {
            self.phase = Phase::Finished;
            out.push(ServerMessage::Finished(self.snapshot()));
        }
    }

    /// Applies one human action. Blocked moves are rejected and leave no
    /// trace in the agent's history. `Switch` hands control to the agent
    /// together with the human's current intent.
    pub fn submit_action(&mut self, action: Action) -> Result<Pushes, SessionError> {
        self.require_human_turn()?;
        let from = self.state.cell;
        let next = step(self.pair.side(self.human_side), self.state, action).ok_or_else(|| {
            SessionError::new(ErrorCode::Blocked, format!("{action:?} from {from} is walled on your side"))
        })?;
        if action.is_move() {
            self.agent
                .record_partner_move(from, action)
                .map_err(|e| SessionError::new(ErrorCode::Internal, e.to_string()))?;
        } else {
            self.switches += 1;
            self.agent.receive_intent(self.human_intent.clone());
            self.phase = Phase::AgentTurn;
        }
        self.steps += 1;
        self.state = next;
        let mut out = vec![ServerMessage::StateUpdate(self.snapshot())];
        self.finish_if_terminal(&mut out);
        Ok(self.stamp(out))
    }

    /// Stores the human's intent for the agent's next turn. An empty list
    /// clears it.
    pub fn submit_intent(&mut self, cells: Vec<GridPos>) -> Result<Pushes, SessionError> {
        self.require_human_turn()?;
        let intent =
            IntentTrajectory::new(cells).map_err(|e| SessionError::new(ErrorCode::InvalidIntent, e.to_string()))?;
        if !intent.fits(self.pair.grid()) {
            return Err(SessionError::new(ErrorCode::InvalidIntent, "intent leaves the grid"));
        }
        self.human_intent = intent;
        Ok(self.stamp(vec![ServerMessage::StateUpdate(self.snapshot())]))
    }

    /// Lets the agent take exactly one action.
    pub fn advance_agent(&mut self) -> Result<Pushes, SessionError> {
        if self.phase != Phase::AgentTurn {
            return Err(SessionError::new(ErrorCode::InvalidRequest, "not the agent's turn"));
        }
        let agent_side = -self.human_side;
        let from = self.state.cell;
        let decision = self
            .agent
            .act(from, self.config.goal)
            .map_err(|e| SessionError::new(ErrorCode::Internal, e.to_string()))?;
        let next = step(self.pair.side(agent_side), self.state, decision.action).ok_or_else(|| {
            SessionError::new(ErrorCode::Internal, format!("agent chose blocked {:?} at {from}", decision.action))
        })?;
        self.steps += 1;
        self.state = next;
        let mut out = Vec::new();
        if decision.action == Action::Switch {
            self.switches += 1;
            self.agent_intent = decision.intent.unwrap_or_default();
            self.human_intent = IntentTrajectory::empty();
            self.phase = Phase::HumanTurn;
        }
        out.push(ServerMessage::AgentMoved(AgentMove {
            action: decision.action,
            from,
            cell: next.cell,
            controller: next.controller,
            steps: self.steps,
            switches: self.switches,
        }));
        if decision.action == Action::Switch {
            out.push(ServerMessage::IntentReceived {
                cells: self.agent_intent.cells().to_vec(),
            });
        }
        self.finish_if_terminal(&mut out);
        Ok(self.stamp(out))
    }

    /// Runs the agent until it hands back control or the game ends.
    pub fn run_agent(&mut self) -> Result<Pushes, SessionError> {
        let mut out = Vec::new();
        while self.phase == Phase::AgentTurn {
            out.extend(self.advance_agent()?);
        }
        Ok(out)
    }

    /// Handles one client message to completion, agent turn included.
    /// Failures come back as an `error` push.
    pub fn handle(&mut self, message: ClientMessage) -> Pushes {
        let result = match message {
            ClientMessage::HumanAction { action } => self.submit_action(action).and_then(|mut out| {
                out.extend(self.run_agent()?);
                Ok(out)
            }),
            ClientMessage::HumanIntent { cells } => self.submit_intent(cells),
            ClientMessage::BeliefRequest => {
                let belief = self.belief();
                Ok(self.stamp(vec![ServerMessage::BeliefSnapshot { belief }]))
            }
            ClientMessage::Create(_) => Err(SessionError::new(ErrorCode::DuplicateSession, "session already exists")),
        };
        result.unwrap_or_else(|e| vec![self.error_push(e)])
    }
}

/// Client-side state rebuilt purely from server pushes.
#[derive(Clone, Debug, Default, PartialEq)]
pub struct ClientView {
    pub snapshot: Option<SessionSnapshot>,
    pub last_seq: u64,
    pub belief: Option<BeliefExport>,
    pub last_error: Option<ErrorCode>,
}

impl ClientView {
    pub fn apply(&mut self, push: &Envelope<ServerMessage>) -> Result<(), String> {
        let seq = push.seq.ok_or("push without seq")?;
        if seq <= self.last_seq {
            return Err(format!("seq {seq} after {}", self.last_seq));
        }
        self.last_seq = seq;
        match &push.message {
            ServerMessage::Created(s) | ServerMessage::StateUpdate(s) | ServerMessage::Finished(s) => {
                self.snapshot = Some(s.clone());
            }
            ServerMessage::AgentMoved(m) => {
                let snap = self.snapshot.as_mut().ok_or("agent_moved before created")?;
                snap.cell = m.cell;
                snap.controller = m.controller;
                snap.steps = m.steps;
                snap.switches = m.switches;
                if m.controller == snap.human_side {
                    snap.phase = Phase::HumanTurn;
                    snap.human_intent.clear();
                }
                snap.success = snap.cell == snap.goal;
            }
            ServerMessage::IntentReceived { cells } => {
                self.snapshot.as_mut().ok_or("intent before created")?.agent_intent = cells.clone();
            }
            ServerMessage::BeliefSnapshot { belief } => self.belief = Some(belief.clone()),
            ServerMessage::Error { code, .. } => self.last_error = Some(*code),
        }
        Ok(())
    }
}
