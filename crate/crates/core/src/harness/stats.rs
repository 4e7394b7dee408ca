use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};

use super::episode::EpisodeRecord;
use crate::error::{Error, Result};

/// Switch counts may be zero, so their geometric statistics are taken over
/// `switches + SWITCH_SHIFT` and the mean is shifted back afterwards.
pub const SWITCH_SHIFT: f64 = 1.0;

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct GeoSummary {
    pub geo_mean: f64,
    /// Multiplicative spread, always >= 1.
    pub geo_std: f64,
}

/// Geometric mean and geometric standard deviation of positive values.
/// The log-space deviation uses the n-1 denominator; a single value has
/// spread 1.
pub fn geometric_stats(values: &[f64]) -> Result<GeoSummary> {
    if values.is_empty() {
        return Err(Error::Stats("no values".into()));
    }
    if let Some(v) = values.iter().find(|v| !(**v > 0.0 && v.is_finite())) {
        return Err(Error::Stats(format!("geometric statistics need positive values, got {v}")));
    }
    let n = values.len() as f64;
    let logs: Vec<f64> = values.iter().map(|v| v.ln()).collect();
    let mu = logs.iter().sum::<f64>() / n;
    let var = if values.len() > 1 {
        logs.iter().map(|l| (l - mu).powi(2)).sum::<f64>() / (n - 1.0)
    } else {
        0.0
    };
    Ok(GeoSummary {
        geo_mean: mu.exp(),
        geo_std: var.sqrt().exp(),
    })
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct BucketStats {
    pub count: usize,
    pub success_rate: f64,
    pub steps: GeoSummary,
    pub switches: GeoSummary,
}

impl BucketStats {
    fn from_records<'a>(records: impl Iterator<Item = &'a EpisodeRecord> + Clone) -> Result<Self> {
        let steps: Vec<f64> = records.clone().map(|r| r.steps as f64).collect();
        let shifted: Vec<f64> = records.clone().map(|r| r.switches as f64 + SWITCH_SHIFT).collect();
        let successes = records.filter(|r| r.success).count();
        let mut switches = geometric_stats(&shifted)?;
        switches.geo_mean -= SWITCH_SHIFT;
        Ok(BucketStats {
            count: steps.len(),
            success_rate: successes as f64 / steps.len() as f64,
            steps: geometric_stats(&steps)?,
            switches,
        })
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct AggregateStats {
    pub overall: BucketStats,
    /// Keyed by the optimal episode length of the configuration.
    pub by_oracle_length: BTreeMap<u32, BucketStats>,
}

impl AggregateStats {
    pub fn from_records(records: &[EpisodeRecord]) -> Result<Self> {
        if records.is_empty() {
            return Err(Error::Stats("no episode records".into()));
        }
        let overall = BucketStats::from_records(records.iter())?;
        let mut lengths: Vec<u32> = records.iter().map(|r| r.oracle_length).collect();
        lengths.sort_unstable();
        lengths.dedup();
        let mut by_oracle_length = BTreeMap::new();
        for len in lengths {
            let bucket = BucketStats::from_records(records.iter().filter(move |r| r.oracle_length == len))?;
            by_oracle_length.insert(len, bucket);
        }
        Ok(AggregateStats {
            overall,
            by_oracle_length,
        })
    }
}
