use std::path::PathBuf;
use std::str::FromStr;

use anyhow::{anyhow, bail, Context};
use coordplan_core::harness::ConfigSelection;
use coordplan_core::{AgentKind, RewardScheme};

#[derive(Clone, Debug, PartialEq)]
pub enum MazeSource {
    Generated { seed: u64, count: u64 },
    File(PathBuf),
}

impl FromStr for MazeSource {
    type Err = anyhow::Error;

    fn from_str(s: &str) -> anyhow::Result<Self> {
        let Some(rest) = s.strip_prefix("gen:") else {
            return Ok(MazeSource::File(PathBuf::from(s)));
        };
        let (seed, count) = rest.split_once(',').ok_or_else(|| anyhow!("expected gen:SEED,COUNT, got {s}"))?;
        Ok(MazeSource::Generated {
            seed: seed.trim().parse().with_context(|| format!("bad seed in {s}"))?,
            count: count.trim().parse().with_context(|| format!("bad count in {s}"))?,
        })
    }
}

/// `["E=heuristic", "H=mcts-none"]`, or a single bare kind for both.
pub fn parse_agents(items: &[String]) -> anyhow::Result<(AgentKind, AgentKind)> {
    if let [one] = items {
        if !one.contains('=') {
            let k: AgentKind = one.parse()?;
            return Ok((k, k));
        }
    }
    let (mut e, mut h) = (None, None);
    for item in items {
        let (who, kind) = item
            .split_once('=')
            .ok_or_else(|| anyhow!("expected E=<kind> or H=<kind>, got {item}"))?;
        let kind: AgentKind = kind.parse()?;
        match who {
            "E" => e = Some(kind),
            "H" => h = Some(kind),
            _ => bail!("unknown player {who} in {item}"),
        }
    }
    // A single E= or H= makes the pair homogeneous.
    match (e, h) {
        (Some(e), Some(h)) => Ok((e, h)),
        (Some(k), None) | (None, Some(k)) => Ok((k, k)),
        (None, None) => bail!("no agents given"),
    }
}

pub fn parse_schemes(s: &str) -> anyhow::Result<Vec<RewardScheme>> {
    let schemes = s
        .split(',')
        .map(|x| x.trim().parse::<RewardScheme>())
        .collect::<Result<Vec<_>, _>>()?;
    if schemes.is_empty() {
        bail!("no scheme given");
    }
    Ok(schemes)
}

pub fn parse_configs(s: &str) -> anyhow::Result<ConfigSelection> {
    if s == "all" {
        return Ok(ConfigSelection::All);
    }
    let k = s
        .strip_prefix("sample:")
        .ok_or_else(|| anyhow!("expected all or sample:K, got {s}"))?;
    Ok(ConfigSelection::Sample(k.parse().with_context(|| format!("bad sample size in {s}"))?))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn maze_sources() {
        assert_eq!(
            "gen:7,3".parse::<MazeSource>().unwrap(),
            MazeSource::Generated { seed: 7, count: 3 }
        );
        assert_eq!(
            "a/b.json".parse::<MazeSource>().unwrap(),
            MazeSource::File("a/b.json".into())
        );
        assert!("gen:7".parse::<MazeSource>().is_err());
    }

    #[test]
    fn agents() {
        let v = |xs: &[&str]| xs.iter().map(|s| s.to_string()).collect::<Vec<_>>();
        assert_eq!(
            parse_agents(&v(&["E=heuristic", "H=mcts-none"])).unwrap(),
            (AgentKind::Heuristic, AgentKind::NoIntentMcts)
        );
        assert_eq!(
            parse_agents(&v(&["mcts-single"])).unwrap(),
            (AgentKind::SingleStepMcts, AgentKind::SingleStepMcts)
        );
        assert!(parse_agents(&v(&["X=heuristic"])).is_err());
        assert!(parse_agents(&v(&["E=robot"])).is_err());
    }

    #[test]
    fn schemes_and_configs() {
        assert_eq!(
            parse_schemes("discounted,fso").unwrap(),
            vec![RewardScheme::Discounted, RewardScheme::FirstStepOnly]
        );
        assert!(parse_schemes("discounted,bogus").is_err());
        assert_eq!(parse_configs("sample:20").unwrap(), ConfigSelection::Sample(20));
        assert_eq!(parse_configs("all").unwrap(), ConfigSelection::All);
        assert!(parse_configs("some").is_err());
    }
}
