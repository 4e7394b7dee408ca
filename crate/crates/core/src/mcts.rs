//! Intent-aware multi-action Monte Carlo tree search.
//!
//! The tree holds one node per atomic action, so a player's multi-move turn
//! is simply a chain of same-controller nodes ended by a `Switch` edge.
//! Planning happens in the ego frame: `PlayerId::E` is the planning agent,
//! whose walls are known, and `PlayerId::H` is the partner, whose passages
//! are only known through the belief table.
//!
//! Partner moves are expanded optimistically and carry a feasibility `delta`
//! read from the belief. Rollouts execute a partner move only when a uniform
//! draw falls below `delta`, and backpropagation mixes the child's sample
//! return with the parent's running value estimate in proportion to
//! `delta`.
//!
//! When the partner has sent an intent, the ego player's own transitions
//! earn a bonus in `[0, 1]` for landing on intent cells.

use std::fmt;
use std::str::FromStr;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::belief::BeliefTable;
use crate::error::{Error, Result};
use crate::game::{env_reward, Action, ActionSet, ControllerState, GridPos, MazeSide, PlayerId, GOAL_REWARD, STEP_REWARD};
use crate::intent::IntentTrajectory;

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum RewardScheme {
    None,
    #[default]
    Discounted,
    Fixed,
    #[serde(rename = "fso")]
    FirstStepOnly,
    #[serde(rename = "linv")]
    LengthInverse,
}

impl RewardScheme {
    pub const BONUS_SCHEMES: [RewardScheme; 4] = [
        RewardScheme::Discounted,
        RewardScheme::Fixed,
        RewardScheme::FirstStepOnly,
        RewardScheme::LengthInverse,
    ];

    pub fn name(self) -> &'static str {
        match self {
            RewardScheme::None => "none",
            RewardScheme::Discounted => "discounted",
            RewardScheme::Fixed => "fixed",
            RewardScheme::FirstStepOnly => "fso",
            RewardScheme::LengthInverse => "linv",
        }
    }
}

impl fmt::Display for RewardScheme {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for RewardScheme {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        Ok(match s {
            "none" => RewardScheme::None,
            "discounted" => RewardScheme::Discounted,
            "fixed" => RewardScheme::Fixed,
            "fso" | "first-step-only" => RewardScheme::FirstStepOnly,
            "linv" | "length-inverse" => RewardScheme::LengthInverse,
            _ => {
                return Err(Error::UnknownName {
                    what: "reward scheme",
                    value: s.to_string(),
                })
            }
        })
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct PlannerParams {
    pub iterations: u32,
    pub exploration: f64,
    pub gamma: f64,
    pub horizon: u32,
    pub intent_discount: f64,
    pub scheme: RewardScheme,
    pub rng_seed: u64,
}

impl Default for PlannerParams {
    fn default() -> Self {
        PlannerParams {
            iterations: 100,
            exploration: std::f64::consts::SQRT_2,
            gamma: 0.99,
            horizon: 100,
            intent_discount: 0.5,
            scheme: RewardScheme::Discounted,
            rng_seed: 0,
        }
    }
}

impl PlannerParams {
    pub fn validate(&self) -> Result<()> {
        if self.iterations < 1 || self.horizon < 1 {
            return Err(Error::Domain("iterations and horizon must be at least 1".into()));
        }
        if !(self.gamma > 0.0 && self.gamma < 1.0) {
            return Err(Error::Domain(format!("gamma must lie in (0, 1), got {}", self.gamma)));
        }
        if !(self.intent_discount > 0.0 && self.intent_discount < self.gamma) {
            return Err(Error::Domain(format!(
                "intent discount must lie in (0, gamma), got {} with gamma {}",
                self.intent_discount, self.gamma
            )));
        }
        if !(self.exploration >= 0.0 && self.exploration.is_finite()) {
            return Err(Error::Domain("exploration constant must be finite and non-negative".into()));
        }
        Ok(())
    }
}

/// Actions the planner considers: the ego player only tries moves its own
/// maze allows, the partner may try anything.
pub fn feasible_actions(state: ControllerState, own: &MazeSide) -> ActionSet {
    match state.controller {
        PlayerId::E => {
            let mut set = own.open_moves(state.cell);
            set.insert(Action::Switch);
            set
        }
        PlayerId::H => ActionSet::ALL,
    }
}

/// Planner transition model. Ego moves are exact; partner moves land on the
/// neighbor as if passable, with feasibility taken from the belief. A
/// partner move off the grid keeps the cell and has feasibility 0.
pub fn forward(
    state: ControllerState,
    action: Action,
    own: &MazeSide,
    belief: &BeliefTable,
) -> (ControllerState, f64) {
    if action == Action::Switch {
        return (ControllerState::new(state.cell, -state.controller), 1.0);
    }
    match state.controller {
        PlayerId::E => {
            let next = crate::game::step(own, state, action).expect("ego action must be feasible");
            (next, 1.0)
        }
        PlayerId::H => match own.grid().neighbor(state.cell, action) {
            Some(cell) => (ControllerState::new(cell, PlayerId::H), belief.mean(state.cell, action)),
            None => (state, 0.0),
        },
    }
}

pub fn intent_bonus(scheme: RewardScheme, state: ControllerState, intent: &IntentTrajectory, lambda: f64) -> f64 {
    let Some(i) = intent.position(state.cell) else {
        return 0.0;
    };
    let m = intent.len();
    match scheme {
        RewardScheme::None => 0.0,
        RewardScheme::Discounted => lambda.powi((m - i) as i32),
        RewardScheme::Fixed => 0.5,
        RewardScheme::FirstStepOnly => {
            if i == 1 {
                0.5
            } else {
                0.0
            }
        }
        RewardScheme::LengthInverse => {
            if i == m {
                1.0
            } else {
                1.0 / m as f64
            }
        }
    }
}

/// Environment reward plus the intent bonus on ego-controlled states.
pub fn augmented_reward(
    state: ControllerState,
    goal: GridPos,
    intent: &IntentTrajectory,
    scheme: RewardScheme,
    lambda: f64,
) -> f64 {
    let bonus = match state.controller {
        PlayerId::E => intent_bonus(scheme, state, intent, lambda),
        PlayerId::H => 0.0,
    };
    env_reward(state, goal) + bonus
}

/// One backpropagation step: with probability `delta` the transition into
/// the child happened and its sample return counts, otherwise the action
/// had no effect and the current value estimate `w` stands in.
pub fn backprop_return(step_reward: f64, gamma: f64, delta: f64, q_child: f64, w: f64) -> f64 {
    step_reward + gamma * (delta * q_child + (1.0 - delta) * w)
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct SkipFollow {
    pub follow: f64,
    pub skip: f64,
    pub diff: f64,
}

fn check_discounts(gamma: f64, lambda: f64) -> Result<()> {
    if !(gamma > 0.0 && gamma < 1.0 && lambda > 0.0 && lambda < gamma) {
        return Err(Error::Domain(format!(
            "need 0 < lambda < gamma < 1, got lambda {lambda}, gamma {gamma}"
        )));
    }
    Ok(())
}

/// Returns of following an `m`-cell intent exactly versus reaching its last
/// cell by an `n`-step shortcut, and their difference (shortcut minus
/// follow) in closed form.
pub fn skip_vs_follow(m: u32, n: u32, gamma: f64, lambda: f64) -> Result<SkipFollow> {
    check_discounts(gamma, lambda)?;
    if !(1 <= n && n <= m) {
        return Err(Error::Domain(format!("need 1 <= n <= m, got n {n}, m {m}")));
    }
    let (mi, ni) = (m as i32, n as i32);
    let follow = (0..mi)
        .map(|t| gamma.powi(t) * (lambda.powi(mi - t - 1) - 1.0))
        .sum();
    let skip = gamma.powi(ni - 1) - (0..ni).map(|t| gamma.powi(t)).sum::<f64>();
    let diff = (gamma.powi(ni) - gamma.powi(mi + 1)) / (gamma * (1.0 - gamma))
        - (gamma.powi(mi) - lambda.powi(mi)) / (gamma - lambda);
    Ok(SkipFollow { follow, skip, diff })
}

/// Shortcut length below which skipping beats following.
pub fn skip_threshold(m: u32, gamma: f64, lambda: f64) -> Result<f64> {
    check_discounts(gamma, lambda)?;
    let mi = m as i32;
    let arg = gamma.powi(mi + 1)
        + gamma * (1.0 - gamma) * (gamma.powi(mi) - lambda.powi(mi)) / (gamma - lambda);
    Ok(arg.ln() / gamma.ln())
}

#[derive(Clone, Debug, PartialEq)]
pub struct SearchNode {
    pub state: ControllerState,
    pub incoming_action: Option<Action>,
    pub delta: f64,
    pub step_reward: f64,
    pub visits: u32,
    pub total_return: f64,
    pub parent: Option<usize>,
    pub children: Vec<usize>,
    pub untried: ActionSet,
}

impl SearchNode {
    pub fn mean_return(&self) -> f64 {
        if self.visits > 0 {
            self.total_return / self.visits as f64
        } else {
            0.0
        }
    }
}

/// Root child statistics, also the tree-dump wire form.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct ChildStats {
    pub action: Action,
    #[serde(rename = "N")]
    pub visits: u32,
    #[serde(rename = "Q")]
    pub total_return: f64,
    pub delta: f64,
    pub cell: GridPos,
}

#[derive(Clone, Debug)]
pub struct SearchTree {
    nodes: Vec<SearchNode>,
}

impl SearchTree {
    pub fn nodes(&self) -> &[SearchNode] {
        &self.nodes
    }

    pub fn root(&self) -> &SearchNode {
        &self.nodes[0]
    }

    pub fn root_children(&self) -> Vec<ChildStats> {
        self.root()
            .children
            .iter()
            .map(|&c| {
                let n = &self.nodes[c];
                ChildStats {
                    action: n.incoming_action.expect("children have an incoming action"),
                    visits: n.visits,
                    total_return: n.total_return,
                    delta: n.delta,
                    cell: n.state.cell,
                }
            })
            .collect()
    }

    /// Most-visited root child; ties go to the canonically smallest action.
    pub fn best_action(&self) -> Action {
        best_by_visits(&self.root_children()).expect("root has at least one child")
    }

    /// JSON dump of the root's children.
    pub fn dump(&self) -> serde_json::Value {
        serde_json::to_value(self.root_children()).expect("child stats serialize")
    }
}

pub(crate) fn best_by_visits(children: &[ChildStats]) -> Option<Action> {
    let max = children.iter().map(|c| c.visits).max()?;
    children
        .iter()
        .filter(|c| c.visits == max)
        .map(|c| c.action)
        .min()
}

#[derive(Clone, Debug)]
pub struct SearchOutcome {
    pub action: Action,
    pub children: Vec<ChildStats>,
}

/// Runs the planner from `root` and returns the most-visited root action.
pub fn search(
    root: ControllerState,
    own: &MazeSide,
    belief: &BeliefTable,
    intent: &IntentTrajectory,
    goal: GridPos,
    params: &PlannerParams,
) -> Result<SearchOutcome> {
    let tree = build_tree(root, own, belief, intent, goal, params)?;
    Ok(SearchOutcome {
        action: tree.best_action(),
        children: tree.root_children(),
    })
}

/// Runs the planner and returns the whole tree.
pub fn build_tree(
    root: ControllerState,
    own: &MazeSide,
    belief: &BeliefTable,
    intent: &IntentTrajectory,
    goal: GridPos,
    params: &PlannerParams,
) -> Result<SearchTree> {
    params.validate()?;
    let grid = own.grid();
    if belief.grid() != grid {
        return Err(Error::Domain("belief and maze dimensions differ".into()));
    }
    if !grid.contains(root.cell) || !grid.contains(goal) {
        return Err(Error::Domain("root or goal outside the grid".into()));
    }
    if root.cell == goal {
        return Err(Error::Domain("cannot plan from a terminal state".into()));
    }
    if !intent.fits(grid) {
        return Err(Error::InvalidIntent("intent leaves the grid".into()));
    }
    let mut planner = Planner::new(own, belief, intent, goal, params);
    planner.push_root(root);
    for _ in 0..params.iterations {
        planner.iterate();
    }
    Ok(SearchTree { nodes: planner.nodes })
}

const NO_NEIGHBOR: u32 = u32::MAX;

struct Planner<'a> {
    own: &'a MazeSide,
    params: &'a PlannerParams,
    goal: usize,
    /// Neighbor cell index per (cell, direction).
    neighbors: Vec<[u32; 4]>,
    /// Belief mean per (cell * 4 + direction).
    means: Vec<f64>,
    /// Intent bonus per cell, zero off the intent.
    bonus: Vec<f64>,
    nodes: Vec<SearchNode>,
    rng: ChaCha8Rng,
}

impl<'a> Planner<'a> {
    fn new(
        own: &'a MazeSide,
        belief: &BeliefTable,
        intent: &IntentTrajectory,
        goal: GridPos,
        params: &'a PlannerParams,
    ) -> Self {
        let grid = own.grid();
        let neighbors = grid
            .cells()
            .map(|p| {
                let mut out = [NO_NEIGHBOR; 4];
                for a in Action::MOVES {
                    if let Some(q) = grid.neighbor(p, a) {
                        out[a.index()] = grid.index(q) as u32;
                    }
                }
                out
            })
            .collect();
        let mut bonus = vec![0.0; grid.cell_count()];
        for &cell in intent.cells() {
            let s = ControllerState::new(cell, PlayerId::E);
            bonus[grid.index(cell)] = intent_bonus(params.scheme, s, intent, params.intent_discount);
        }
        Planner {
            own,
            params,
            goal: grid.index(goal),
            neighbors,
            means: belief.means(),
            bonus,
            nodes: Vec::with_capacity(params.iterations as usize + 1),
            rng: ChaCha8Rng::seed_from_u64(params.rng_seed),
        }
    }

    #[inline]
    fn reward(&self, cell: usize, controller: PlayerId) -> f64 {
        let env = if cell == self.goal { GOAL_REWARD } else { STEP_REWARD };
        match controller {
            PlayerId::E => env + self.bonus[cell],
            PlayerId::H => env,
        }
    }

    fn cell_index(&self, p: GridPos) -> usize {
        self.own.grid().index(p)
    }

    fn push_root(&mut self, state: ControllerState) {
        self.nodes.push(SearchNode {
            state,
            incoming_action: None,
            delta: 1.0,
            step_reward: 0.0,
            visits: 0,
            total_return: 0.0,
            parent: None,
            children: Vec::new(),
            untried: feasible_actions(state, self.own),
        });
    }

    fn is_terminal(&self, v: usize) -> bool {
        self.cell_index(self.nodes[v].state.cell) == self.goal
    }

    fn iterate(&mut self) {
        let mut v = 0;
        while !self.is_terminal(v) {
            if self.nodes[v].untried.is_empty() {
                v = self.select(v);
            } else {
                v = self.expand(v);
                break;
            }
        }
        let q = if self.is_terminal(v) {
            0.0
        } else {
            let s = self.nodes[v].state;
            self.rollout(self.cell_index(s.cell), s.controller)
        };
        self.backprop(v, q);
    }

    fn select(&self, v: usize) -> usize {
        let node = &self.nodes[v];
        let log_n = (node.visits as f64).ln();
        let mut best = node.children[0];
        let mut best_score = f64::NEG_INFINITY;
        for &c in &node.children {
            let child = &self.nodes[c];
            let score = if child.visits == 0 {
                f64::INFINITY
            } else {
                let n = child.visits as f64;
                child.total_return / n + self.params.exploration * (log_n / n).sqrt()
            };
            if score > best_score {
                best_score = score;
                best = c;
            }
        }
        best
    }

    fn expand(&mut self, v: usize) -> usize {
        let untried = self.nodes[v].untried;
        let pick = self.rng.random_range(0..untried.len());
        let action = untried.nth(pick).expect("index within untried set");
        self.nodes[v].untried.remove(action);

        let state = self.nodes[v].state;
        let (next, delta, reward) = if action == Action::Switch {
            (ControllerState::new(state.cell, -state.controller), 1.0, STEP_REWARD)
        } else {
            let means = &self.means;
            let grid = self.own.grid();
            let (next, delta) = match state.controller {
                PlayerId::E => (
                    crate::game::step(self.own, state, action).expect("ego expansions are feasible"),
                    1.0,
                ),
                PlayerId::H => match grid.neighbor(state.cell, action) {
                    Some(cell) => (
                        ControllerState::new(cell, PlayerId::H),
                        means[grid.index(state.cell) * 4 + action.index()],
                    ),
                    None => (state, 0.0),
                },
            };
            (next, delta, self.reward(self.cell_index(next.cell), next.controller))
        };

        let child = self.nodes.len();
        self.nodes.push(SearchNode {
            state: next,
            incoming_action: Some(action),
            delta,
            step_reward: reward,
            visits: 0,
            total_return: 0.0,
            parent: Some(v),
            children: Vec::new(),
            untried: feasible_actions(next, self.own),
        });
        self.nodes[v].children.push(child);
        child
    }

    fn rollout(&mut self, mut cell: usize, mut controller: PlayerId) -> f64 {
        let gamma = self.params.gamma;
        let mut q = 0.0;
        let mut discount = 1.0;
        for _ in 0..self.params.horizon {
            if cell == self.goal {
                break;
            }
            match controller {
                PlayerId::E => {
                    let mask = self.own.open_mask(cell);
                    let choices = mask.count_ones() + 1;
                    let k = self.rng.random_range(0..choices);
                    if k + 1 == choices {
                        controller = PlayerId::H;
                    } else {
                        let dir = nth_set_bit(mask, k);
                        cell = self.neighbors[cell][dir] as usize;
                    }
                }
                PlayerId::H => {
                    let k = self.rng.random_range(0..5u32) as usize;
                    if k == 4 {
                        controller = PlayerId::E;
                    } else {
                        let target = self.neighbors[cell][k];
                        if target != NO_NEIGHBOR {
                            let delta = self.means[cell * 4 + k];
                            if self.rng.random::<f64>() < delta {
                                cell = target as usize;
                            }
                        }
                    }
                }
            }
            q += discount * self.reward(cell, controller);
            discount *= gamma;
        }
        q
    }

    fn backprop(&mut self, leaf: usize, q: f64) {
        let gamma = self.params.gamma;
        let mut sample = q;
        let mut delta = 1.0;
        let mut cursor = Some(leaf);
        while let Some(v) = cursor {
            let node = &mut self.nodes[v];
            let w = node.mean_return();
            sample = backprop_return(node.step_reward, gamma, delta, sample, w);
            node.total_return += sample;
            node.visits += 1;
            delta = node.delta;
            cursor = node.parent;
        }
    }
}

#[inline]
fn nth_set_bit(mask: u8, n: u32) -> usize {
    let mut m = mask;
    for _ in 0..n {
        m &= m - 1;
    }
    m.trailing_zeros() as usize
}

#[cfg(test)]
mod tests {
    use super::*;

    fn p(c: u32, r: u32) -> GridPos {
        GridPos::new(c, r)
    }

    fn traj(cells: &[GridPos]) -> IntentTrajectory {
        IntentTrajectory::new(cells.to_vec()).unwrap()
    }

    #[test]
    fn feasible_sets() {
        let mut own = MazeSide::open(3, 3);
        let centre = p(1, 1);
        assert_eq!(feasible_actions(ControllerState::new(centre, PlayerId::E), &own).len(), 5);
        assert_eq!(feasible_actions(ControllerState::new(p(0, 0), PlayerId::H), &own).len(), 5);
        own.set_passable(centre, Action::Right, false);
        own.set_passable(centre, Action::Up, false);
        let set: Vec<_> = feasible_actions(ControllerState::new(centre, PlayerId::E), &own)
            .iter()
            .collect();
        assert_eq!(set, vec![Action::Left, Action::Down, Action::Switch]);
    }

    #[test]
    fn forward_model() {
        let own = MazeSide::open(3, 3);
        let belief = BeliefTable::new(3, 3);
        let e = ControllerState::new(p(0, 0), PlayerId::E);
        assert_eq!(
            forward(e, Action::Right, &own, &belief),
            (ControllerState::new(p(1, 0), PlayerId::E), 1.0)
        );
        let h = ControllerState::new(p(0, 0), PlayerId::H);
        assert_eq!(
            forward(h, Action::Up, &MazeSide::closed(3, 3), &belief),
            (ControllerState::new(p(0, 1), PlayerId::H), 0.5)
        );
        assert_eq!(
            forward(e, Action::Switch, &own, &belief),
            (ControllerState::new(p(0, 0), PlayerId::H), 1.0)
        );
        assert_eq!(forward(h, Action::Left, &own, &belief), (h, 0.0));
    }

    #[test]
    fn bonus_schemes() {
        let (a, b, c) = (p(0, 0), p(1, 0), p(2, 0));
        let z = traj(&[a, b, c]);
        let at = |cell| ControllerState::new(cell, PlayerId::E);
        assert_eq!(intent_bonus(RewardScheme::Discounted, at(a), &z, 0.5), 0.25);
        assert_eq!(intent_bonus(RewardScheme::Discounted, at(b), &z, 0.5), 0.5);
        assert_eq!(intent_bonus(RewardScheme::Discounted, at(c), &z, 0.5), 1.0);
        assert_eq!(intent_bonus(RewardScheme::Fixed, at(b), &z, 0.5), 0.5);
        assert_eq!(intent_bonus(RewardScheme::FirstStepOnly, at(a), &z, 0.5), 0.5);
        assert_eq!(intent_bonus(RewardScheme::FirstStepOnly, at(b), &z, 0.5), 0.0);
        let z4 = traj(&[a, b, c, p(2, 1)]);
        assert_eq!(intent_bonus(RewardScheme::LengthInverse, at(b), &z4, 0.5), 0.25);
        assert_eq!(intent_bonus(RewardScheme::LengthInverse, at(p(2, 1)), &z4, 0.5), 1.0);
        for s in RewardScheme::BONUS_SCHEMES {
            assert_eq!(intent_bonus(s, at(p(2, 2)), &z, 0.5), 0.0);
        }
        assert_eq!(intent_bonus(RewardScheme::None, at(c), &z, 0.5), 0.0);
    }

    #[test]
    fn augmented_reward_examples() {
        let z = traj(&[p(0, 1), p(1, 1)]);
        let goal = p(1, 1);
        let partner = ControllerState::new(p(0, 1), PlayerId::H);
        assert_eq!(augmented_reward(partner, goal, &z, RewardScheme::Discounted, 0.5), -1.0);
        let ego_final = traj(&[p(0, 1)]);
        let ego = ControllerState::new(p(0, 1), PlayerId::E);
        assert_eq!(augmented_reward(ego, goal, &ego_final, RewardScheme::Discounted, 0.5), 0.0);
        let ego_goal = ControllerState::new(goal, PlayerId::E);
        assert_eq!(augmented_reward(ego_goal, goal, &z, RewardScheme::Discounted, 0.5), 101.0);
    }

    #[test]
    fn backprop_examples() {
        assert_eq!(backprop_return(-1.0, 0.99, 1.0, 10.0, 4.0), -1.0 + 0.99 * 10.0);
        assert_eq!(backprop_return(-1.0, 0.99, 0.0, 10.0, 4.0), -1.0 + 0.99 * 4.0);
        assert!((backprop_return(-1.0, 0.99, 0.5, 10.0, 4.0) - 5.93).abs() < 1e-12);
    }

    #[test]
    fn skip_follow_example() {
        let r = skip_vs_follow(3, 1, 0.99, 0.5).unwrap();
        assert!((r.follow - -1.245).abs() < 1e-12);
        assert!(r.skip.abs() < 1e-12);
        assert!((r.diff - 1.245).abs() < 1e-12);
        assert!(skip_vs_follow(3, 4, 0.99, 0.5).is_err());
        assert!(skip_vs_follow(3, 1, 0.9, 0.95).is_err());
    }

    #[test]
    fn threshold_example() {
        let t = skip_threshold(3, 0.99, 0.5).unwrap();
        assert!((t - 2.246_6).abs() < 1e-3, "{t}");
        assert!(skip_vs_follow(3, 2, 0.99, 0.5).unwrap().diff > 0.0);
        assert!(skip_vs_follow(3, 3, 0.99, 0.5).unwrap().diff <= 0.0);
        assert!(skip_threshold(3, 0.5, 0.5).is_err());
    }

    #[test]
    fn params_validation() {
        assert!(PlannerParams::default().validate().is_ok());
        let bad = PlannerParams {
            intent_discount: 0.995,
            ..PlannerParams::default()
        };
        assert!(bad.validate().is_err());
        let bad = PlannerParams {
            iterations: 0,
            ..PlannerParams::default()
        };
        assert!(bad.validate().is_err());
    }

    #[test]
    fn scheme_names_round_trip() {
        for s in [RewardScheme::None, RewardScheme::Discounted, RewardScheme::Fixed, RewardScheme::FirstStepOnly, RewardScheme::LengthInverse] {
            assert_eq!(s.name().parse::<RewardScheme>().unwrap(), s);
            assert_eq!(serde_json::to_string(&s).unwrap(), format!("\"{}\"", s.name()));
        }
        assert!("greedy".parse::<RewardScheme>().is_err());
    }

    #[test]
    fn nth_bit() {
        assert_eq!(nth_set_bit(0b1010, 0), 1);
        assert_eq!(nth_set_bit(0b1010, 1), 3);
        assert_eq!(nth_set_bit(0b1111, 2), 2);
    }

    #[test]
    fn single_feasible_action_is_returned() {
        // Ego boxed in: only Switch remains.
        let own = MazeSide::closed(3, 3);
        let belief = BeliefTable::new(3, 3);
        let out = search(
            ControllerState::new(p(1, 1), PlayerId::E),
            &own,
            &belief,
            &IntentTrajectory::empty(),
            p(2, 2),
            &PlannerParams::default(),
        )
        .unwrap();
        assert_eq!(out.action, Action::Switch);
        assert_eq!(out.children.len(), 1);
    }

    #[test]
    fn terminal_root_rejected() {
        let own = MazeSide::open(3, 3);
        let err = search(
            ControllerState::new(p(2, 2), PlayerId::E),
            &own,
            &BeliefTable::new(3, 3),
            &IntentTrajectory::empty(),
            p(2, 2),
            &PlannerParams::default(),
        );
        assert!(err.is_err());
    }
}
