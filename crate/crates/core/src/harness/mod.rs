//! Agent-to-agent experiment driver.

mod episode;
mod experiment;
mod report;
mod stats;

pub use episode::{play_episode, run_episode, EpisodeOutcome, EpisodeRecord, PairSpec, TraceEvent};
pub use experiment::{job_seed, run_experiment, ConfigSelection, ExperimentResult, ExperimentSpec, NamedMaze};
pub use report::{emit_results, read_records, GroupSummary, Summary, SUMMARY_FORMAT_VERSION};
pub use stats::{geometric_stats, AggregateStats, BucketStats, GeoSummary, SWITCH_SHIFT};
