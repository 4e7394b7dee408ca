//! Seeded maze-pair generator.
//!
//! A random spanning tree over the full grid is split between the two
//! sides edge by edge, so the union is always connected while each side on
//! its own is fragmented. Every remaining interior edge is then opened on
//! each side independently with probability `1 - wall_density`.

use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::error::{Error, Result};
use crate::game::{Action, GridPos, MazePair, MazeSide, PlayerId};
use crate::seed::derive_seed;

pub const MAX_ATTEMPTS: u32 = 256;

/// Generates a maze pair whose union connects every cell and where neither
/// side alone does, so that some configurations require a control switch.
pub fn generate_maze_pair(seed: u64, width: u32, height: u32, wall_density: f64) -> Result<MazePair> {
    if width < 2 || height < 2 {
        return Err(Error::Domain(format!(
            "maze must be at least 2x2, got {width}x{height}"
        )));
    }
    if !(0.0..1.0).contains(&wall_density) {
        return Err(Error::Domain(format!(
            "wall_density must lie in [0, 1), got {wall_density}"
        )));
    }
    for attempt in 0..MAX_ATTEMPTS {
        let mut rng = ChaCha8Rng::seed_from_u64(derive_seed(seed, &[u64::from(attempt)]));
        let pair = attempt_pair(&mut rng, width, height, wall_density);
        if PlayerId::BOTH.iter().all(|p| !pair.side(*p).is_connected()) {
            return Ok(pair);
        }
    }
    Err(Error::GenerationExhausted {
        seed,
        attempts: MAX_ATTEMPTS,
    })
}

fn attempt_pair(rng: &mut ChaCha8Rng, width: u32, height: u32, wall_density: f64) -> MazePair {
    let mut e = MazeSide::closed(width, height);
    let mut h = MazeSide::closed(width, height);
    let grid = e.grid();

    let mut edges: Vec<(GridPos, Action)> = grid.edges().collect();
    edges.shuffle(rng);

    // Randomized Kruskal.
    let mut parent: Vec<usize> = (0..grid.cell_count()).collect();
    fn find(parent: &mut [usize], mut x: usize) -> usize {
        while parent[x] != x {
            parent[x] = parent[parent[x]];
            x = parent[x];
        }
        x
    }

    for (p, a) in edges {
        let q = grid.neighbor(p, a).expect("interior edge");
        let (rp, rq) = (find(&mut parent, grid.index(p)), find(&mut parent, grid.index(q)));
        if rp != rq {
            parent[rp] = rq;
            if rng.random_bool(0.5) {
                e.set_passable(p, a, true);
            } else {
                h.set_passable(p, a, true);
            }
        } else {
            if rng.random::<f64>() >= wall_density {
                e.set_passable(p, a, true);
            }
            if rng.random::<f64>() >= wall_density {
                h.set_passable(p, a, true);
            }
        }
    }
    MazePair::new(e, h).expect("spanning tree keeps the union connected")
}
