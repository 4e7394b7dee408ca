//! The multi-action shared-control maze game.
//!
//! Two players share one token on a grid. Each player has a private wall
//! layout ([`MazeSide`]) and may only move the token along its own passages.
//! The controlling player takes any number of atomic moves and hands the
//! token over with [`Action::Switch`].
//!
//! Coordinates: `col` grows to the right, `row` grows upward. `Up` moves to
//! `row + 1`.

use std::collections::VecDeque;
use std::fmt;
use std::ops::Neg;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Reward for landing on the goal cell.
pub const GOAL_REWARD: f64 = 100.0;
/// Reward for every other transition, switches included.
pub const STEP_REWARD: f64 = -1.0;
/// Episode step cap used by the experiments.
pub const DEFAULT_STEP_CAP: u32 = 1000;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(from = "[u32; 2]", into = "[u32; 2]")]
pub struct GridPos {
    pub col: u32,
    pub row: u32,
}

impl GridPos {
    pub const fn new(col: u32, row: u32) -> Self {
        GridPos { col, row }
    }

    pub fn is_adjacent(self, other: GridPos) -> bool {
        self.col.abs_diff(other.col) + self.row.abs_diff(other.row) == 1
    }

    pub fn manhattan(self, other: GridPos) -> u32 {
        self.col.abs_diff(other.col) + self.row.abs_diff(other.row)
    }
}

impl From<[u32; 2]> for GridPos {
    fn from([col, row]: [u32; 2]) -> Self {
        GridPos { col, row }
    }
}

impl From<GridPos> for [u32; 2] {
    fn from(p: GridPos) -> Self {
        [p.col, p.row]
    }
}

impl fmt::Display for GridPos {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{},{}", self.col, self.row)
    }
}

impl FromStr for GridPos {
    type Err = Error;

    /// Parses `"col,row"`.
    fn from_str(s: &str) -> Result<Self> {
        let bad = || Error::UnknownName {
            what: "cell",
            value: s.to_string(),
        };
        let (c, r) = s.split_once(',').ok_or_else(bad)?;
        Ok(GridPos {
            col: c.trim().parse().map_err(|_| bad())?,
            row: r.trim().parse().map_err(|_| bad())?,
        })
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum PlayerId {
    E,
    H,
}

impl PlayerId {
    pub const BOTH: [PlayerId; 2] = [PlayerId::E, PlayerId::H];

    pub fn other(self) -> PlayerId {
        match self {
            PlayerId::E => PlayerId::H,
            PlayerId::H => PlayerId::E,
        }
    }

    /// Re-labels `self` so that `ego` becomes `E`.
    pub fn relative_to(self, ego: PlayerId) -> PlayerId {
        if self == ego {
            PlayerId::E
        } else {
            PlayerId::H
        }
    }

    pub fn index(self) -> usize {
        self as usize
    }
}

impl Neg for PlayerId {
    type Output = PlayerId;

    fn neg(self) -> PlayerId {
        self.other()
    }
}

impl FromStr for PlayerId {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "E" | "e" => Ok(PlayerId::E),
            "H" | "h" => Ok(PlayerId::H),
            _ => Err(Error::UnknownName {
                what: "player",
                value: s.to_string(),
            }),
        }
    }
}

impl fmt::Display for PlayerId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            PlayerId::E => "E",
            PlayerId::H => "H",
        })
    }
}

/// Atomic actions. Declaration order is the canonical (lexicographic)
/// action order used for deterministic tie-breaking.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum Action {
    Right,
    Up,
    Left,
    Down,
    Switch,
}

impl Action {
    pub const ALL: [Action; 5] = [
        Action::Right,
        Action::Up,
        Action::Left,
        Action::Down,
        Action::Switch,
    ];
    pub const MOVES: [Action; 4] = [Action::Right, Action::Up, Action::Left, Action::Down];

    pub fn index(self) -> usize {
        self as usize
    }

    pub fn is_move(self) -> bool {
        self != Action::Switch
    }

    pub fn opposite(self) -> Action {
        match self {
            Action::Right => Action::Left,
            Action::Up => Action::Down,
            Action::Left => Action::Right,
            Action::Down => Action::Up,
            Action::Switch => Action::Switch,
        }
    }

    /// One-letter code used in maze files and belief exports.
    pub fn code(self) -> char {
        match self {
            Action::Right => 'R',
            Action::Up => 'U',
            Action::Left => 'L',
            Action::Down => 'D',
            Action::Switch => 'S',
        }
    }

    pub fn from_code(c: &str) -> Option<Action> {
        Some(match c {
            "R" => Action::Right,
            "U" => Action::Up,
            "L" => Action::Left,
            "D" => Action::Down,
            "S" => Action::Switch,
            _ => return None,
        })
    }
}

impl FromStr for Action {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        Action::ALL
            .into_iter()
            .find(|a| format!("{a:?}").eq_ignore_ascii_case(s))
            .or_else(|| Action::from_code(s))
            .ok_or_else(|| Error::UnknownName {
                what: "action",
                value: s.to_string(),
            })
    }
}

/// A small set of actions stored as a bitmask.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Hash)]
pub struct ActionSet(u8);

impl ActionSet {
    pub const EMPTY: ActionSet = ActionSet(0);
    pub const ALL: ActionSet = ActionSet(0b1_1111);

    pub fn insert(&mut self, a: Action) {
        self.0 |= 1 << a.index();
    }

    pub fn remove(&mut self, a: Action) {
        self.0 &= !(1 << a.index());
    }

    pub fn contains(self, a: Action) -> bool {
        self.0 & (1 << a.index()) != 0
    }

    pub fn len(self) -> usize {
        self.0.count_ones() as usize
    }

    pub fn is_empty(self) -> bool {
        self.0 == 0
    }

    /// The `i`-th member in canonical order.
    pub fn nth(self, i: usize) -> Option<Action> {
        self.iter().nth(i)
    }

    pub fn iter(self) -> impl Iterator<Item = Action> {
        Action::ALL.into_iter().filter(move |a| self.contains(*a))
    }
}

impl FromIterator<Action> for ActionSet {
    fn from_iter<I: IntoIterator<Item = Action>>(iter: I) -> Self {
        let mut s = ActionSet::EMPTY;
        for a in iter {
            s.insert(a);
        }
        s
    }
}

/// Grid dimensions and cell indexing.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct Grid {
    pub width: u32,
    pub height: u32,
}

impl Grid {
    pub fn new(width: u32, height: u32) -> Self {
        Grid { width, height }
    }

    pub fn cell_count(self) -> usize {
        (self.width * self.height) as usize
    }

    pub fn contains(self, p: GridPos) -> bool {
        p.col < self.width && p.row < self.height
    }

    pub fn index(self, p: GridPos) -> usize {
        (p.row * self.width + p.col) as usize
    }

    pub fn pos(self, index: usize) -> GridPos {
        let index = index as u32;
        GridPos::new(index % self.width, index / self.width)
    }

    pub fn cells(self) -> impl Iterator<Item = GridPos> {
        (0..self.cell_count()).map(move |i| self.pos(i))
    }

    /// The in-grid neighbor reached by a movement action.
    pub fn neighbor(self, p: GridPos, a: Action) -> Option<GridPos> {
        let q = match a {
            Action::Right => GridPos::new(p.col.checked_add(1)?, p.row),
            Action::Up => GridPos::new(p.col, p.row.checked_add(1)?),
            Action::Left => GridPos::new(p.col.checked_sub(1)?, p.row),
            Action::Down => GridPos::new(p.col, p.row.checked_sub(1)?),
            Action::Switch => return None,
        };
        self.contains(q).then_some(q)
    }

    /// Number of interior (undirected) edges.
    pub fn edge_count(self) -> usize {
        let (w, h) = (self.width as usize, self.height as usize);
        (w - 1) * h + w * (h - 1)
    }

    /// Every interior edge once, as (cell, `Right` | `Up`).
    pub fn edges(self) -> impl Iterator<Item = (GridPos, Action)> {
        self.cells().flat_map(move |p| {
            [Action::Right, Action::Up]
                .into_iter()
                .filter(move |a| self.neighbor(p, *a).is_some())
                .map(move |a| (p, a))
        })
    }
}

/// One player's private wall layout. Passability is stored per cell as a
/// bitmask over the four movement directions and is kept symmetric.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct MazeSide {
    grid: Grid,
    open: Vec<u8>,
}

impl MazeSide {
    /// A side with every interior edge passable.
    pub fn open(width: u32, height: u32) -> Self {
        let grid = Grid::new(width, height);
        let mut side = MazeSide::closed(width, height);
        for (p, a) in grid.edges().collect::<Vec<_>>() {
            side.set_passable(p, a, true);
        }
        side
    }

    /// A side where every edge is a wall.
    pub fn closed(width: u32, height: u32) -> Self {
        let grid = Grid::new(width, height);
        MazeSide {
            grid,
            open: vec![0; grid.cell_count()],
        }
    }

    pub fn grid(&self) -> Grid {
        self.grid
    }

    pub fn width(&self) -> u32 {
        self.grid.width
    }

    pub fn height(&self) -> u32 {
        self.grid.height
    }

    pub fn passable(&self, p: GridPos, a: Action) -> bool {
        a.is_move() && self.grid.contains(p) && self.open[self.grid.index(p)] & (1 << a.index()) != 0
    }

    /// Passable movement directions at a cell index.
    #[inline]
    pub(crate) fn open_mask(&self, index: usize) -> u8 {
        self.open[index]
    }

    pub fn open_moves(&self, p: GridPos) -> ActionSet {
        Action::MOVES
            .into_iter()
            .filter(|a| self.passable(p, *a))
            .collect()
    }

    /// Opens or walls the undirected edge leaving `p` in direction `a`.
    /// Border edges cannot be opened.
    pub fn set_passable(&mut self, p: GridPos, a: Action, passable: bool) {
        let q = self
            .grid
            .neighbor(p, a)
            .unwrap_or_else(|| panic!("{p:?} {a:?} is not an interior edge"));
        let (pi, qi) = (self.grid.index(p), self.grid.index(q));
        let (pb, qb) = (1u8 << a.index(), 1u8 << a.opposite().index());
        if passable {
            self.open[pi] |= pb;
            self.open[qi] |= qb;
        } else {
            self.open[pi] &= !pb;
            self.open[qi] &= !qb;
        }
    }

    /// Interior edges that are walls, in canonical (cell, `Right` | `Up`) form.
    pub fn walls(&self) -> Vec<(GridPos, Action)> {
        self.grid
            .edges()
            .filter(|(p, a)| !self.passable(*p, *a))
            .collect()
    }

    pub fn is_connected(&self) -> bool {
        reachable_count(self.grid, |p, a| self.passable(p, a)) == self.grid.cell_count()
    }
}

/// Counts cells reachable from (0,0) under a passability predicate.
fn reachable_count(grid: Grid, passable: impl Fn(GridPos, Action) -> bool) -> usize {
    let mut seen = vec![false; grid.cell_count()];
    let mut queue = VecDeque::from([GridPos::new(0, 0)]);
    seen[0] = true;
    let mut count = 1;
    while let Some(p) = queue.pop_front() {
        for a in Action::MOVES {
            if let Some(q) = grid.neighbor(p, a) {
                if passable(p, a) && !seen[grid.index(q)] {
                    seen[grid.index(q)] = true;
                    count += 1;
                    queue.push_back(q);
                }
            }
        }
    }
    count
}

/// Both players' wall layouts over a shared grid.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct MazePair {
    side_e: MazeSide,
    side_h: MazeSide,
}

impl MazePair {
    /// Builds a pair, checking shared dimensions and that the union of both
    /// sides connects every cell.
    pub fn new(side_e: MazeSide, side_h: MazeSide) -> Result<Self> {
        if side_e.grid() != side_h.grid() {
            return Err(Error::InvalidMaze(format!(
                "side dimensions differ: {:?} vs {:?}",
                side_e.grid(),
                side_h.grid()
            )));
        }
        let grid = side_e.grid();
        if grid.width < 1 || grid.height < 1 || grid.cell_count() < 2 {
            return Err(Error::InvalidMaze(format!("grid {grid:?} too small")));
        }
        let pair = MazePair { side_e, side_h };
        if !pair.union_connected() {
            return Err(Error::InvalidMaze(
                "the union of both sides does not connect every cell".into(),
            ));
        }
        Ok(pair)
    }

    pub fn side(&self, player: PlayerId) -> &MazeSide {
        match player {
            PlayerId::E => &self.side_e,
            PlayerId::H => &self.side_h,
        }
    }

    pub fn grid(&self) -> Grid {
        self.side_e.grid()
    }

    pub fn width(&self) -> u32 {
        self.grid().width
    }

    pub fn height(&self) -> u32 {
        self.grid().height
    }

    pub fn union_connected(&self) -> bool {
        reachable_count(self.grid(), |p, a| {
            self.side_e.passable(p, a) || self.side_h.passable(p, a)
        }) == self.grid().cell_count()
    }

    /// Every (init, goal) pair with init != goal, in index order, all
    /// starting with `start` in control.
    pub fn all_configs(&self, start: PlayerId) -> Vec<GameConfig> {
        let grid = self.grid();
        let mut out = Vec::with_capacity(grid.cell_count() * (grid.cell_count() - 1));
        for init in grid.cells() {
            for goal in grid.cells() {
                if init != goal {
                    out.push(GameConfig {
                        init,
                        goal,
                        initial_controller: start,
                    });
                }
            }
        }
        out
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct GameConfig {
    pub init: GridPos,
    pub goal: GridPos,
    pub initial_controller: PlayerId,
}

impl GameConfig {
    pub fn new(init: GridPos, goal: GridPos) -> Self {
        GameConfig {
            init,
            goal,
            initial_controller: PlayerId::E,
        }
    }

    pub fn validate(&self, grid: Grid) -> Result<()> {
        if self.init == self.goal {
            return Err(Error::InvalidConfig(format!(
                "init and goal are both {}",
                self.init
            )));
        }
        for (name, p) in [("init", self.init), ("goal", self.goal)] {
            if !grid.contains(p) {
                return Err(Error::InvalidConfig(format!(
                    "{name} {p} outside {}x{} grid",
                    grid.width, grid.height
                )));
            }
        }
        Ok(())
    }

    pub fn initial_state(&self) -> ControllerState {
        ControllerState::new(self.init, self.initial_controller)
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct ControllerState {
    pub cell: GridPos,
    pub controller: PlayerId,
}

impl ControllerState {
    pub fn new(cell: GridPos, controller: PlayerId) -> Self {
        ControllerState { cell, controller }
    }
}

/// Deterministic transition for the player whose maze is `side`.
/// Returns `None` for a blocked movement.
pub fn step(side: &MazeSide, state: ControllerState, action: Action) -> Option<ControllerState> {
    match action {
        Action::Switch => Some(ControllerState::new(state.cell, -state.controller)),
        mv if side.passable(state.cell, mv) => {
            let cell = side.grid().neighbor(state.cell, mv)?;
            Some(ControllerState::new(cell, state.controller))
        }
        _ => None,
    }
}

pub fn env_reward(state: ControllerState, goal: GridPos) -> f64 {
    if state.cell == goal {
        GOAL_REWARD
    } else {
        STEP_REWARD
    }
}

pub fn is_terminal(state: ControllerState, goal: GridPos, steps_elapsed: u32, cap: u32) -> bool {
    state.cell == goal || steps_elapsed >= cap
}

/// Minimum number of moves plus switches from the configured start to the
/// goal, given both wall layouts. Breadth-first search over
/// (cell, controller).
pub fn oracle_episode_length(pair: &MazePair, config: &GameConfig) -> Result<u32> {
    oracle_from(pair, config, &[config.initial_controller])
}

/// Like [`oracle_episode_length`] but minimized over both starting
/// controllers.
pub fn oracle_episode_length_any_start(pair: &MazePair, config: &GameConfig) -> Result<u32> {
    oracle_from(pair, config, &PlayerId::BOTH)
}

fn oracle_from(pair: &MazePair, config: &GameConfig, starts: &[PlayerId]) -> Result<u32> {
    let grid = pair.grid();
    config.validate(grid)?;
    let node = |s: ControllerState| grid.index(s.cell) * 2 + s.controller.index();
    let mut dist = vec![u32::MAX; grid.cell_count() * 2];
    let mut queue = VecDeque::new();
    for &c in starts {
        let s = ControllerState::new(config.init, c);
        dist[node(s)] = 0;
        queue.push_back(s);
    }
    while let Some(s) = queue.pop_front() {
        let d = dist[node(s)];
        if s.cell == config.goal {
            return Ok(d);
        }
        for a in Action::ALL {
            if let Some(t) = step(pair.side(s.controller), s, a) {
                if dist[node(t)] == u32::MAX {
                    dist[node(t)] = d + 1;
                    queue.push_back(t);
                }
            }
        }
    }
    Err(Error::Unreachable {
        init: config.init,
        goal: config.goal,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn p(c: u32, r: u32) -> GridPos {
        GridPos::new(c, r)
    }

    #[test]
    fn switch_flips_controller_only() {
        let side = MazeSide::open(2, 2);
        let s = ControllerState::new(p(0, 0), PlayerId::E);
        assert_eq!(
            step(&side, s, Action::Switch),
            Some(ControllerState::new(p(0, 0), PlayerId::H))
        );
    }

    #[test]
    fn open_move_and_blocked_move() {
        let mut side = MazeSide::open(2, 2);
        let s = ControllerState::new(p(0, 0), PlayerId::E);
        assert_eq!(
            step(&side, s, Action::Right),
            Some(ControllerState::new(p(1, 0), PlayerId::E))
        );
        side.set_passable(p(0, 0), Action::Right, false);
        assert_eq!(step(&side, s, Action::Right), None);
        assert!(!side.passable(p(1, 0), Action::Left));
    }

    #[test]
    fn border_is_never_passable() {
        let side = MazeSide::open(3, 3);
        assert!(!side.passable(p(0, 0), Action::Left));
        assert!(!side.passable(p(0, 0), Action::Down));
        assert!(!side.passable(p(2, 2), Action::Right));
        assert!(!side.passable(p(2, 2), Action::Up));
        assert_eq!(side.walls().len(), 0);
        assert_eq!(Grid::new(3, 3).edge_count(), 12);
    }

    #[test]
    fn rewards() {
        let goal = p(1, 1);
        assert_eq!(env_reward(ControllerState::new(goal, PlayerId::E), goal), 100.0);
        assert_eq!(env_reward(ControllerState::new(goal, PlayerId::H), goal), 100.0);
        assert_eq!(env_reward(ControllerState::new(p(0, 1), PlayerId::E), goal), -1.0);
    }

    #[test]
    fn terminal_conditions() {
        let goal = p(1, 1);
        let at_goal = ControllerState::new(goal, PlayerId::E);
        let away = ControllerState::new(p(0, 0), PlayerId::E);
        assert!(is_terminal(at_goal, goal, 5, 1000));
        assert!(is_terminal(away, goal, 1000, 1000));
        assert!(!is_terminal(away, goal, 999, 1000));
    }

    #[test]
    fn negation_swaps_players() {
        assert_eq!(-PlayerId::E, PlayerId::H);
        assert_eq!(-PlayerId::H, PlayerId::E);
        assert_eq!(PlayerId::H.relative_to(PlayerId::H), PlayerId::E);
        assert_eq!(PlayerId::E.relative_to(PlayerId::H), PlayerId::H);
    }

    fn two_by_two_pair() -> MazePair {
        // E: only (0,0)-(1,0). H: only (1,0)-(1,1). Plus a shared edge on the
        // far side to keep the union connected.
        let mut e = MazeSide::closed(2, 2);
        e.set_passable(p(0, 0), Action::Right, true);
        let mut h = MazeSide::closed(2, 2);
        h.set_passable(p(1, 0), Action::Up, true);
        h.set_passable(p(0, 1), Action::Right, true);
        MazePair::new(e, h).unwrap()
    }

    #[test]
    fn oracle_move_switch_move() {
        let pair = two_by_two_pair();
        let cfg = GameConfig::new(p(0, 0), p(1, 1));
        assert_eq!(oracle_episode_length(&pair, &cfg).unwrap(), 3);
        let cfg_h = GameConfig {
            initial_controller: PlayerId::H,
            ..cfg
        };
        // Starting with H: switch, move, switch, move.
        assert_eq!(oracle_episode_length(&pair, &cfg_h).unwrap(), 4);
        assert_eq!(oracle_episode_length_any_start(&pair, &cfg_h).unwrap(), 3);
    }

    #[test]
    fn oracle_single_side_distance() {
        let pair = MazePair::new(MazeSide::open(4, 4), MazeSide::closed(4, 4)).unwrap();
        let cfg = GameConfig::new(p(0, 0), p(3, 2));
        assert_eq!(oracle_episode_length(&pair, &cfg).unwrap(), 5);
    }

    #[test]
    fn disconnected_union_rejected() {
        let err = MazePair::new(MazeSide::closed(2, 2), MazeSide::closed(2, 2)).unwrap_err();
        assert!(matches!(err, Error::InvalidMaze(_)));
    }

    #[test]
    fn config_validation() {
        let grid = Grid::new(3, 3);
        assert!(GameConfig::new(p(1, 1), p(1, 1)).validate(grid).is_err());
        assert!(GameConfig::new(p(1, 1), p(3, 1)).validate(grid).is_err());
        assert!(GameConfig::new(p(0, 1), p(2, 1)).validate(grid).is_ok());
    }

    #[test]
    fn all_configs_count() {
        let pair = MazePair::new(MazeSide::open(3, 3), MazeSide::open(3, 3)).unwrap();
        assert_eq!(pair.all_configs(PlayerId::E).len(), 72);
    }

    #[test]
    fn action_parsing() {
        assert_eq!("right".parse::<Action>().unwrap(), Action::Right);
        assert_eq!("U".parse::<Action>().unwrap(), Action::Up);
        assert_eq!("Switch".parse::<Action>().unwrap(), Action::Switch);
        assert!("north".parse::<Action>().is_err());
    }

    #[test]
    fn action_set_ops() {
        let mut s: ActionSet = [Action::Left, Action::Switch].into_iter().collect();
        assert_eq!(s.len(), 2);
        assert_eq!(s.nth(0), Some(Action::Left));
        s.remove(Action::Left);
        assert_eq!(s.iter().collect::<Vec<_>>(), vec![Action::Switch]);
        assert_eq!(ActionSet::ALL.len(), 5);
    }
}
