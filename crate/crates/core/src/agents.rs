//! Agent policies and the per-player seat that wraps them with memory.

use std::fmt;
use std::str::FromStr;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::belief::{BeliefTable, ConfidenceFactors, PartnerHistory};
use crate::error::{Error, Result};
use crate::game::{Action, ControllerState, GridPos, MazeSide, PlayerId};
use crate::intent::{plan_intent, trim_intent, EdgeCostModel, IntentTrajectory};
use crate::mcts::{self, best_by_visits, feasible_actions, PlannerParams, RewardScheme};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum AgentKind {
    #[serde(rename = "heuristic")]
    Heuristic,
    #[serde(rename = "mcts-none")]
    NoIntentMcts,
    #[serde(rename = "mcts-single")]
    SingleStepMcts,
    #[serde(rename = "mcts-intent")]
    IntentMcts,
}

impl AgentKind {
    pub const ALL: [AgentKind; 4] = [
        AgentKind::Heuristic,
        AgentKind::NoIntentMcts,
        AgentKind::SingleStepMcts,
        AgentKind::IntentMcts,
    ];

    pub fn name(self) -> &'static str {
        match self {
            AgentKind::Heuristic => "heuristic",
            AgentKind::NoIntentMcts => "mcts-none",
            AgentKind::SingleStepMcts => "mcts-single",
            AgentKind::IntentMcts => "mcts-intent",
        }
    }

    /// Reward scheme the planner actually runs with.
    pub fn effective_scheme(self, requested: RewardScheme) -> RewardScheme {
        match self {
            AgentKind::IntentMcts => requested,
            _ => RewardScheme::None,
        }
    }
}

impl fmt::Display for AgentKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for AgentKind {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        AgentKind::ALL
            .into_iter()
            .find(|k| k.name() == s)
            .ok_or_else(|| Error::UnknownName {
                what: "agent kind",
                value: s.to_string(),
            })
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct HeuristicConfig {
    pub random_action_prob: f64,
}

impl Default for HeuristicConfig {
    fn default() -> Self {
        HeuristicConfig {
            random_action_prob: 0.2,
        }
    }
}

/// Everything an agent needs besides its kind.
#[derive(Clone, Copy, Debug, Default, PartialEq, Serialize, Deserialize)]
pub struct AgentParams {
    /// Planner settings; `scheme` applies to `mcts-intent` only and
    /// `rng_seed` is replaced per search.
    pub planner: PlannerParams,
    pub heuristic: HeuristicConfig,
    pub costs: EdgeCostModel,
    pub factors: ConfidenceFactors,
}

impl AgentParams {
    pub fn validate(&self) -> Result<()> {
        self.planner.validate()?;
        self.factors.validate()?;
        if !(0.0..=1.0).contains(&self.heuristic.random_action_prob) {
            return Err(Error::Domain("random_action_prob must lie in [0, 1]".into()));
        }
        if !(self.costs.own_move_cost > 0.0 && self.costs.wall_penalty_scale > 0.0) {
            return Err(Error::Domain("edge costs must be positive".into()));
        }
        Ok(())
    }
}

/// What a policy sees when it is asked to act, in the ego frame
/// (`state.controller == PlayerId::E` means the agent itself is in control).
#[derive(Clone, Copy, Debug)]
pub struct EgoView<'a> {
    pub state: ControllerState,
    pub own_side: &'a MazeSide,
    pub belief: &'a BeliefTable,
    pub intent: &'a IntentTrajectory,
    pub goal: GridPos,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Decision {
    pub action: Action,
    /// Set exactly when `action` is `Switch`.
    pub intent: Option<IntentTrajectory>,
}

pub trait AgentPolicy: Send {
    fn kind(&self) -> AgentKind;

    fn choose(&mut self, view: &EgoView<'_>, rng: &mut ChaCha8Rng) -> Result<Action>;
}

/// Follows the belief-conditioned shortest path; hands over control when
/// the next edge is walled on its own side.
pub fn heuristic_action(
    view: &EgoView<'_>,
    cfg: &HeuristicConfig,
    costs: &EdgeCostModel,
    rng: &mut ChaCha8Rng,
) -> Action {
    if cfg.random_action_prob > 0.0 && rng.random::<f64>() < cfg.random_action_prob {
        let options = feasible_actions(view.state, view.own_side);
        let k = rng.random_range(0..options.len());
        return options.nth(k).expect("index within feasible set");
    }
    let path = plan_intent(view.own_side, view.belief, view.state.cell, view.goal, costs);
    let next = path.first().expect("state is not terminal");
    let grid = view.own_side.grid();
    Action::MOVES
        .into_iter()
        .find(|a| grid.neighbor(view.state.cell, *a) == Some(next) && view.own_side.passable(view.state.cell, *a))
        .unwrap_or(Action::Switch)
}

/// Among the most-visited root children, prefers the one stepping onto the
/// first intent cell; otherwise the canonically smallest action.
pub fn single_step_tiebreak(children: &[(Action, u32, GridPos)], intent: &IntentTrajectory) -> Action {
    let max = children.iter().map(|c| c.1).max().expect("at least one child");
    let tied = children.iter().filter(|c| c.1 == max);
    if let Some(target) = intent.first() {
        if let Some(c) = tied.clone().filter(|c| c.2 == target).min_by_key(|c| c.0) {
            return c.0;
        }
    }
    tied.map(|c| c.0).min().expect("at least one child")
}

struct HeuristicAgent {
    cfg: HeuristicConfig,
    costs: EdgeCostModel,
}

impl AgentPolicy for HeuristicAgent {
    fn kind(&self) -> AgentKind {
        AgentKind::Heuristic
    }

    fn choose(&mut self, view: &EgoView<'_>, rng: &mut ChaCha8Rng) -> Result<Action> {
        Ok(heuristic_action(view, &self.cfg, &self.costs, rng))
    }
}

struct MctsAgent {
    kind: AgentKind,
    planner: PlannerParams,
}

impl AgentPolicy for MctsAgent {
    fn kind(&self) -> AgentKind {
        self.kind
    }

    fn choose(&mut self, view: &EgoView<'_>, rng: &mut ChaCha8Rng) -> Result<Action> {
        let params = PlannerParams {
            rng_seed: rng.random(),
            ..self.planner
        };
        let out = mcts::search(view.state, view.own_side, view.belief, view.intent, view.goal, &params)?;
        Ok(match self.kind {
            AgentKind::SingleStepMcts => {
                let children: Vec<_> = out.children.iter().map(|c| (c.action, c.visits, c.cell)).collect();
                single_step_tiebreak(&children, view.intent)
            }
            _ => best_by_visits(&out.children).unwrap_or(out.action),
        })
    }
}

pub fn make_agent(kind: AgentKind, params: &AgentParams) -> Result<Box<dyn AgentPolicy>> {
    params.validate()?;
    Ok(match kind {
        AgentKind::Heuristic => Box::new(HeuristicAgent {
            cfg: params.heuristic,
            costs: params.costs,
        }),
        _ => Box::new(MctsAgent {
            kind,
            planner: PlannerParams {
                scheme: kind.effective_scheme(params.planner.scheme),
                ..params.planner
            },
        }),
    })
}

/// One player driven by an agent: its maze side, its belief over the
/// partner, the partner's move history, the latest intent it received and
/// its random stream.
pub struct AgentSeat {
    player: PlayerId,
    own_side: MazeSide,
    belief: BeliefTable,
    history: PartnerHistory,
    received: IntentTrajectory,
    policy: Box<dyn AgentPolicy>,
    params: AgentParams,
    rng: ChaCha8Rng,
}

impl AgentSeat {
    pub fn new(player: PlayerId, own_side: MazeSide, kind: AgentKind, params: &AgentParams, seed: u64) -> Result<Self> {
        let policy = make_agent(kind, params)?;
        Ok(Self::with_policy(player, own_side, policy, params, seed))
    }

    /// Seat driven by a caller-supplied policy.
    pub fn with_policy(
        player: PlayerId,
        own_side: MazeSide,
        policy: Box<dyn AgentPolicy>,
        params: &AgentParams,
        seed: u64,
    ) -> Self {
        let belief = BeliefTable::new(own_side.width(), own_side.height());
        AgentSeat {
            player,
            own_side,
            belief,
            history: PartnerHistory::new(),
            received: IntentTrajectory::empty(),
            policy,
            params: *params,
            rng: ChaCha8Rng::seed_from_u64(seed),
        }
    }

    pub fn player(&self) -> PlayerId {
        self.player
    }

    pub fn kind(&self) -> AgentKind {
        self.policy.kind()
    }

    pub fn belief(&self) -> &BeliefTable {
        &self.belief
    }

    pub fn partner_history(&self) -> &PartnerHistory {
        &self.history
    }

    pub fn received_intent(&self) -> &IntentTrajectory {
        &self.received
    }

    /// Records a move the partner actually executed.
    pub fn record_partner_move(&mut self, cell: GridPos, action: Action) -> Result<()> {
        self.history.push(cell, action)
    }

    pub fn receive_intent(&mut self, intent: IntentTrajectory) {
        self.received = intent;
    }

    /// Brings the belief up to date with the partner's unread moves.
    pub fn sync_belief(&mut self) {
        self.belief.ingest_history(&mut self.history, &self.params.factors);
    }

    /// Chooses the next action while in control at `cell`. A `Switch`
    /// comes with the intent to hand to the partner.
    pub fn act(&mut self, cell: GridPos, goal: GridPos) -> Result<Decision> {
        self.sync_belief();
        self.received = trim_intent(&self.received, cell);
        let view = EgoView {
            state: ControllerState::new(cell, PlayerId::E),
            own_side: &self.own_side,
            belief: &self.belief,
            intent: &self.received,
            goal,
        };
        let action = self.policy.choose(&view, &mut self.rng)?;
        let intent = (action == Action::Switch)
            .then(|| plan_intent(&self.own_side, &self.belief, cell, goal, &self.params.costs));
        Ok(Decision { action, intent })
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn p(c: u32, r: u32) -> GridPos {
        GridPos::new(c, r)
    }

    fn view<'a>(own: &'a MazeSide, belief: &'a BeliefTable, intent: &'a IntentTrajectory, cell: GridPos, goal: GridPos) -> EgoView<'a> {
        EgoView {
            state: ControllerState::new(cell, PlayerId::E),
            own_side: own,
            belief,
            intent,
            goal,
        }
    }

    #[test]
    fn greedy_heuristic_follows_open_path() {
        let own = MazeSide::open(4, 1);
        let belief = BeliefTable::new(4, 1);
        let none = IntentTrajectory::empty();
        let cfg = HeuristicConfig { random_action_prob: 0.0 };
        let mut rng = ChaCha8Rng::seed_from_u64(0);
        let a = heuristic_action(&view(&own, &belief, &none, p(0, 0), p(3, 0)), &cfg, &EdgeCostModel::default(), &mut rng);
        assert_eq!(a, Action::Right);
    }

    #[test]
    fn greedy_heuristic_switches_when_blocked() {
        // Single row: the only way forward is walled on the own side.
        let mut own = MazeSide::open(3, 1);
        own.set_passable(p(0, 0), Action::Right, false);
        let belief = BeliefTable::new(3, 1);
        let none = IntentTrajectory::empty();
        let cfg = HeuristicConfig { random_action_prob: 0.0 };
        let mut rng = ChaCha8Rng::seed_from_u64(0);
        let a = heuristic_action(&view(&own, &belief, &none, p(0, 0), p(2, 0)), &cfg, &EdgeCostModel::default(), &mut rng);
        assert_eq!(a, Action::Switch);
    }

    #[test]
    fn tiebreak_rules() {
        let z = IntentTrajectory::new(vec![p(1, 0)]).unwrap();
        let children = [(Action::Up, 10, p(0, 1)), (Action::Right, 10, p(1, 0))];
        assert_eq!(single_step_tiebreak(&children, &z), Action::Right);
        let z2 = IntentTrajectory::new(vec![p(0, 1)]).unwrap();
        assert_eq!(single_step_tiebreak(&children, &z2), Action::Up);
        let unique = [(Action::Up, 11, p(0, 1)), (Action::Right, 10, p(1, 0))];
        assert_eq!(single_step_tiebreak(&unique, &z), Action::Up);
        let off = IntentTrajectory::new(vec![p(5, 5)]).unwrap();
        assert_eq!(single_step_tiebreak(&children, &off), Action::Right);
        assert_eq!(single_step_tiebreak(&children, &IntentTrajectory::empty()), Action::Right);
    }

    #[test]
    fn kind_names() {
        for k in AgentKind::ALL {
            assert_eq!(k.name().parse::<AgentKind>().unwrap(), k);
        }
        assert!("mcts-magic".parse::<AgentKind>().is_err());
    }

    #[test]
    fn seat_emits_intent_only_on_switch() {
        let own = MazeSide::closed(3, 3);
        let mut seat = AgentSeat::new(PlayerId::E, own, AgentKind::IntentMcts, &AgentParams::default(), 1).unwrap();
        let d = seat.act(p(0, 0), p(2, 2)).unwrap();
        assert_eq!(d.action, Action::Switch);
        let z = d.intent.unwrap();
        assert_eq!(z.last(), Some(p(2, 2)));
        assert!(p(0, 0).is_adjacent(z.first().unwrap()));
    }

    #[test]
    fn seat_ingests_partner_history_once() {
        let own = MazeSide::open(3, 3);
        let mut seat = AgentSeat::new(PlayerId::H, own, AgentKind::Heuristic, &AgentParams::default(), 1).unwrap();
        seat.record_partner_move(p(0, 0), Action::Right).unwrap();
        seat.sync_belief();
        seat.sync_belief();
        assert_eq!(seat.belief().mean(p(0, 0), Action::Right), 0.75);
        assert!(seat.record_partner_move(p(0, 0), Action::Switch).is_err());
    }

    #[test]
    fn seat_trims_received_intent() {
        let own = MazeSide::open(3, 3);
        let mut seat = AgentSeat::new(PlayerId::E, own, AgentKind::NoIntentMcts, &AgentParams::default(), 1).unwrap();
        seat.receive_intent(IntentTrajectory::new(vec![p(0, 1), p(1, 1), p(2, 1)]).unwrap());
        seat.act(p(1, 1), p(2, 2)).unwrap();
        assert_eq!(seat.received_intent().cells(), &[p(2, 1)]);
    }
}
