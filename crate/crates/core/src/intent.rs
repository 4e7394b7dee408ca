//! Multi-step intents: the cells a player asks its partner to visit next.

use std::cmp::Ordering;
use std::collections::BinaryHeap;

use serde::{Deserialize, Serialize};

use crate::belief::BeliefTable;
use crate::error::{Error, Result};
use crate::game::{Action, Grid, GridPos, MazeSide};

/// Ordered chain of grid-adjacent, non-repeating cells. May be empty,
/// meaning "no intent".
#[derive(Clone, Debug, Default, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(try_from = "Vec<GridPos>", into = "Vec<GridPos>")]
pub struct IntentTrajectory {
    cells: Vec<GridPos>,
}

impl IntentTrajectory {
    pub fn new(cells: Vec<GridPos>) -> Result<Self> {
        for w in cells.windows(2) {
            if !w[0].is_adjacent(w[1]) {
                return Err(Error::InvalidIntent(format!(
                    "{} and {} are not adjacent",
                    w[0], w[1]
                )));
            }
        }
        let mut sorted = cells.clone();
        sorted.sort_unstable();
        if let Some(w) = sorted.windows(2).find(|w| w[0] == w[1]) {
            return Err(Error::InvalidIntent(format!("{} appears more than once", w[0])));
        }
        Ok(IntentTrajectory { cells })
    }

    pub fn empty() -> Self {
        Self::default()
    }

    pub fn cells(&self) -> &[GridPos] {
        &self.cells
    }

    pub fn len(&self) -> usize {
        self.cells.len()
    }

    pub fn is_empty(&self) -> bool {
        self.cells.is_empty()
    }

    pub fn first(&self) -> Option<GridPos> {
        self.cells.first().copied()
    }

    pub fn last(&self) -> Option<GridPos> {
        self.cells.last().copied()
    }

    /// 1-based position of `cell` in the trajectory.
    pub fn position(&self, cell: GridPos) -> Option<usize> {
        self.cells.iter().position(|c| *c == cell).map(|i| i + 1)
    }

    pub fn fits(&self, grid: Grid) -> bool {
        self.cells.iter().all(|c| grid.contains(*c))
    }
}

impl TryFrom<Vec<GridPos>> for IntentTrajectory {
    type Error = Error;

    fn try_from(cells: Vec<GridPos>) -> Result<Self> {
        IntentTrajectory::new(cells)
    }
}

impl From<IntentTrajectory> for Vec<GridPos> {
    fn from(t: IntentTrajectory) -> Self {
        t.cells
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct EdgeCostModel {
    pub own_move_cost: f64,
    pub wall_penalty_scale: f64,
}

impl Default for EdgeCostModel {
    fn default() -> Self {
        EdgeCostModel {
            own_move_cost: 1.0,
            wall_penalty_scale: 10.0,
        }
    }
}

impl EdgeCostModel {
    /// Cost of moving from `p` in direction `a`: the move cost, plus a
    /// penalty scaled by how unlikely the partner is to have the passage
    /// when the own side is walled.
    pub fn edge_cost(&self, own: &MazeSide, belief: &BeliefTable, p: GridPos, a: Action) -> f64 {
        if own.passable(p, a) {
            self.own_move_cost
        } else {
            self.own_move_cost + self.wall_penalty_scale * (1.0 - belief.mean(p, a))
        }
    }
}

const COST_EPS: f64 = 1e-9;

#[derive(PartialEq)]
struct Frontier(f64, usize);

impl Eq for Frontier {}

impl Ord for Frontier {
    fn cmp(&self, other: &Self) -> Ordering {
        other.0.total_cmp(&self.0).then(other.1.cmp(&self.1))
    }
}

impl PartialOrd for Frontier {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

/// Cost-to-goal for every cell under `costs`.
pub fn cost_to_goal(own: &MazeSide, belief: &BeliefTable, goal: GridPos, costs: &EdgeCostModel) -> Vec<f64> {
    let grid = own.grid();
    let mut dist = vec![f64::INFINITY; grid.cell_count()];
    let mut heap = BinaryHeap::new();
    dist[grid.index(goal)] = 0.0;
    heap.push(Frontier(0.0, grid.index(goal)));
    while let Some(Frontier(d, u)) = heap.pop() {
        if d > dist[u] {
            continue;
        }
        let up = grid.pos(u);
        // Relax every predecessor p with p --a--> u.
        for a in Action::MOVES {
            if let Some(p) = grid.neighbor(up, a.opposite()) {
                let nd = d + costs.edge_cost(own, belief, p, a);
                let pi = grid.index(p);
                if nd < dist[pi] {
                    dist[pi] = nd;
                    heap.push(Frontier(nd, pi));
                }
            }
        }
    }
    dist
}

/// Lowest-cost path from `from` to `goal`, excluding `from` and including
/// `goal`. Among equally cheap continuations the lexicographically smallest
/// next cell wins.
pub fn plan_intent(
    own: &MazeSide,
    belief: &BeliefTable,
    from: GridPos,
    goal: GridPos,
    costs: &EdgeCostModel,
) -> IntentTrajectory {
    let grid = own.grid();
    let dist = cost_to_goal(own, belief, goal, costs);
    let mut cells = Vec::new();
    let mut cur = from;
    while cur != goal {
        let here = dist[grid.index(cur)];
        let next = Action::MOVES
            .into_iter()
            .filter_map(|a| {
                let q = grid.neighbor(cur, a)?;
                let via = costs.edge_cost(own, belief, cur, a) + dist[grid.index(q)];
                (via <= here + COST_EPS * here.max(1.0)).then_some(q)
            })
            .min()
            .expect("grid adjacency graph is connected");
        cells.push(next);
        cur = next;
    }
    IntentTrajectory { cells }
}

/// Total cost of walking `path` starting at `from`.
pub fn path_cost(
    own: &MazeSide,
    belief: &BeliefTable,
    from: GridPos,
    path: &[GridPos],
    costs: &EdgeCostModel,
) -> f64 {
    let grid = own.grid();
    let mut cur = from;
    let mut total = 0.0;
    for &next in path {
        let a = Action::MOVES
            .into_iter()
            .find(|a| grid.neighbor(cur, *a) == Some(next))
            .expect("path cells are adjacent");
        total += costs.edge_cost(own, belief, cur, a);
        cur = next;
    }
    total
}

/// Drops everything up to and including `current` if it lies on the
/// trajectory.
pub fn trim_intent(intent: &IntentTrajectory, current: GridPos) -> IntentTrajectory {
    match intent.position(current) {
        Some(i) => IntentTrajectory {
            cells: intent.cells[i..].to_vec(),
        },
        None => intent.clone(),
    }
}
