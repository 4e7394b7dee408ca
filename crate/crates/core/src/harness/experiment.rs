use rand::seq::SliceRandom;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::episode::{run_episode, EpisodeRecord, PairSpec};
use super::stats::AggregateStats;
use crate::error::{Error, Result};
use crate::game::{GameConfig, MazePair, PlayerId, DEFAULT_STEP_CAP};
use crate::seed::derive_seed;

#[derive(Clone, Debug)]
pub struct NamedMaze {
    pub id: String,
    pub pair: MazePair,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum ConfigSelection {
    /// Every ordered (init, goal) pair with init != goal.
    All,
    /// K configurations per maze, drawn without replacement.
    Sample(usize),
    /// Fixed list applied to every maze.
    Explicit(Vec<GameConfig>),
}

#[derive(Clone, Debug)]
pub struct ExperimentSpec {
    pub mazes: Vec<NamedMaze>,
    pub configs: ConfigSelection,
    pub start: PlayerId,
    pub trials: u32,
    pub agents: PairSpec,
    pub cap: u32,
    pub base_seed: u64,
    /// Worker threads; 0 uses all available cores.
    pub workers: usize,
}

impl ExperimentSpec {
    pub fn new(mazes: Vec<NamedMaze>, agents: PairSpec) -> Self {
        ExperimentSpec {
            mazes,
            configs: ConfigSelection::All,
            start: PlayerId::E,
            trials: 1,
            agents,
            cap: DEFAULT_STEP_CAP,
            base_seed: 0,
            workers: 0,
        }
    }
}

#[derive(Clone, Debug)]
pub struct ExperimentResult {
    pub records: Vec<EpisodeRecord>,
    pub stats: AggregateStats,
}

fn id_hash(id: &str) -> u64 {
    // FNV-1a
    id.bytes()
        .fold(0xcbf2_9ce4_8422_2325u64, |h, b| (h ^ b as u64).wrapping_mul(0x0100_0000_01b3))
}

const SAMPLE_TAG: u64 = 0x5A4D_504C;

/// Seed of one episode. Depends only on the base seed, maze id,
/// configuration and trial, so different agents see paired episodes.
pub fn job_seed(base: u64, maze_id: &str, pair: &MazePair, config: &GameConfig, trial: u32) -> u64 {
    let grid = pair.grid();
    derive_seed(
        base,
        &[
            id_hash(maze_id),
            grid.index(config.init) as u64,
            grid.index(config.goal) as u64,
            config.initial_controller.index() as u64,
            trial as u64,
        ],
    )
}

fn select_configs(spec: &ExperimentSpec, maze: &NamedMaze) -> Result<Vec<GameConfig>> {
    match &spec.configs {
        ConfigSelection::All => Ok(maze.pair.all_configs(spec.start)),
        ConfigSelection::Sample(k) => {
            let mut all = maze.pair.all_configs(spec.start);
            if *k > all.len() {
                return Err(Error::InvalidConfig(format!(
                    "cannot sample {k} of {} configurations in maze {}",
                    all.len(),
                    maze.id
                )));
            }
            let mut rng = ChaCha8Rng::seed_from_u64(derive_seed(spec.base_seed, &[id_hash(&maze.id), SAMPLE_TAG]));
            all.shuffle(&mut rng);
            all.truncate(*k);
            Ok(all)
        }
        ConfigSelection::Explicit(list) => {
            for c in list {
                c.validate(maze.pair.grid())?;
            }
            Ok(list.clone())
        }
    }
}

struct Job<'a> {
    maze: &'a NamedMaze,
    config: GameConfig,
    seed: u64,
    label: String,
}

/// Runs every (maze, configuration, trial) job in parallel. Records come
/// back in job order regardless of scheduling.
pub fn run_experiment(spec: &ExperimentSpec) -> Result<ExperimentResult> {
    spec.agents.params.validate()?;
    if spec.trials == 0 {
        return Err(Error::InvalidConfig("trials must be positive".into()));
    }
    let mut jobs = Vec::new();
    for maze in &spec.mazes {
        for config in select_configs(spec, maze)? {
            for trial in 0..spec.trials {
                jobs.push(Job {
                    maze,
                    config,
                    seed: job_seed(spec.base_seed, &maze.id, &maze.pair, &config, trial),
                    label: format!("{} {}->{} trial {trial}", maze.id, config.init, config.goal),
                });
            }
        }
    }
    let run = |job: &Job<'_>| {
        run_episode(&job.maze.id, &job.maze.pair, &job.config, &spec.agents, spec.cap, job.seed).map_err(|e| Error::Job {
            job: job.label.clone(),
            source: Box::new(e),
        })
    };
    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(spec.workers)
        .build()
        .map_err(|e| Error::InvalidConfig(format!("thread pool: {e}")))?;
    let records = pool.install(|| jobs.par_iter().map(run).collect::<Result<Vec<_>>>())?;
    let stats = AggregateStats::from_records(&records)?;
    Ok(ExperimentResult { records, stats })
}
