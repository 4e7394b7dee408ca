use std::fs;
use std::path::Path;

use serde::{Deserialize, Serialize};

use super::episode::EpisodeRecord;
use super::stats::{AggregateStats, SWITCH_SHIFT};
use crate::agents::AgentKind;
use crate::error::{Error, Result};
use crate::game::GameConfig;
use crate::mcts::RewardScheme;

pub const SUMMARY_FORMAT_VERSION: u32 = 1;

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Conventions {
    pub geo_std_denominator: String,
    pub switch_shift: f64,
    pub switches_count_toward_cap: bool,
}

impl Default for Conventions {
    fn default() -> Self {
        Conventions {
            geo_std_denominator: "n-1".into(),
            switch_shift: SWITCH_SHIFT,
            switches_count_toward_cap: true,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct GroupSummary {
    pub agent_e: AgentKind,
    pub agent_h: AgentKind,
    pub scheme: RewardScheme,
    pub stats: AggregateStats,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Summary {
    pub format_version: u32,
    pub conventions: Conventions,
    pub groups: Vec<GroupSummary>,
}

impl Summary {
    /// One group per (agent_e, agent_h, scheme), in order of first appearance.
    pub fn from_records(records: &[EpisodeRecord]) -> Result<Self> {
        let mut keys: Vec<(AgentKind, AgentKind, RewardScheme)> = Vec::new();
        for r in records {
            let k = (r.agent_e, r.agent_h, r.scheme);
            if !keys.contains(&k) {
                keys.push(k);
            }
        }
        let groups = keys
            .into_iter()
            .map(|(agent_e, agent_h, scheme)| {
                let subset: Vec<EpisodeRecord> = records
                    .iter()
                    .filter(|r| (r.agent_e, r.agent_h, r.scheme) == (agent_e, agent_h, scheme))
                    .cloned()
                    .collect();
                Ok(GroupSummary {
                    agent_e,
                    agent_h,
                    scheme,
                    stats: AggregateStats::from_records(&subset)?,
                })
            })
            .collect::<Result<_>>()?;
        Ok(Summary {
            format_version: SUMMARY_FORMAT_VERSION,
            conventions: Conventions::default(),
            groups,
        })
    }
}

#[derive(Serialize, Deserialize)]
struct CsvRow {
    maze_id: String,
    init: String,
    goal: String,
    start: String,
    seed: u64,
    oracle_length: u32,
    steps: u32,
    switches: u32,
    success: bool,
    agent_e: String,
    agent_h: String,
    scheme: String,
}

impl From<&EpisodeRecord> for CsvRow {
    fn from(r: &EpisodeRecord) -> Self {
        CsvRow {
            maze_id: r.maze_id.clone(),
            init: r.config.init.to_string(),
            goal: r.config.goal.to_string(),
            start: r.config.initial_controller.to_string(),
            seed: r.seed,
            oracle_length: r.oracle_length,
            steps: r.steps,
            switches: r.switches,
            success: r.success,
            agent_e: r.agent_e.to_string(),
            agent_h: r.agent_h.to_string(),
            scheme: r.scheme.to_string(),
        }
    }
}

impl TryFrom<CsvRow> for EpisodeRecord {
    type Error = Error;

    fn try_from(row: CsvRow) -> Result<Self> {
        Ok(EpisodeRecord {
            maze_id: row.maze_id,
            config: GameConfig {
                init: row.init.parse()?,
                goal: row.goal.parse()?,
                initial_controller: row.start.parse()?,
            },
            seed: row.seed,
            oracle_length: row.oracle_length,
            steps: row.steps,
            switches: row.switches,
            success: row.success,
            agent_e: row.agent_e.parse()?,
            agent_h: row.agent_h.parse()?,
            scheme: row.scheme.parse()?,
        })
    }
}

/// Writes `records.csv` and `summary.json` into `dir`, creating it if needed.
pub fn emit_results(records: &[EpisodeRecord], summary: &Summary, dir: &Path) -> Result<()> {
    fs::create_dir_all(dir).map_err(|e| Error::io(dir, e))?;
    let csv_path = dir.join("records.csv");
    let csv_err = |e| Error::Csv {
        path: csv_path.clone(),
        source: e,
    };
    let mut w = csv::Writer::from_path(&csv_path).map_err(csv_err)?;
    for r in records {
        w.serialize(CsvRow::from(r)).map_err(csv_err)?;
    }
    w.flush().map_err(|e| Error::io(&csv_path, e))?;
    let json_path = dir.join("summary.json");
    let json = serde_json::to_string_pretty(summary)?;
    fs::write(&json_path, json + "\n").map_err(|e| Error::io(&json_path, e))
}

/// Reads back a `records.csv` written by [`emit_results`].
pub fn read_records(path: &Path) -> Result<Vec<EpisodeRecord>> {
    let csv_err = |e| Error::Csv {
        path: path.to_path_buf(),
        source: e,
    };
    let mut r = csv::Reader::from_path(path).map_err(csv_err)?;
    r.deserialize::<CsvRow>()
        .map(|row| EpisodeRecord::try_from(row.map_err(csv_err)?))
        .collect()
}
