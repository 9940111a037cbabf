//! State sources: a JSON file (one state or an array of states) or
//! `random:<count>:<seed>`. The seed may instead come from the config file,
//! but a random source never runs without one.

use std::path::PathBuf;
use std::str::FromStr;

use anyhow::{bail, Context, Result};
use cylquant::uncertainty::{random_circle_state, random_number_state, state_rng};
use cylquant::{NumberState, State};

#[derive(Debug, Clone, PartialEq)]
pub enum StateSource {
    File(PathBuf),
    Random { count: usize, seed: Option<u64> },
}

impl StateSource {
    /// Fills a missing random seed from `fallback`; errors if there is none.
    pub fn with_seed(self, fallback: Option<u64>) -> Result<Self> {
        match self {
            Self::Random { count, seed: None } => match fallback {
                Some(seed) => Ok(Self::Random {
                    count,
                    seed: Some(seed),
                }),
                None => bail!(
                    "random states need a seed: random:<count>:<seed> or `seed` in the config file"
                ),
            },
            other => Ok(other),
        }
    }

    pub fn random_parts(&self) -> Option<(usize, u64)> {
        match self {
            Self::Random { count, seed } => {
                Some((*count, seed.expect("seed resolved by with_seed")))
            }
            Self::File(_) => None,
        }
    }
}

impl FromStr for StateSource {
    type Err = anyhow::Error;

    fn from_str(s: &str) -> Result<Self> {
        let Some(rest) = s.strip_prefix("random:") else {
            return Ok(Self::File(PathBuf::from(s)));
        };
        let (count, seed) = match rest.split_once(':') {
            Some((count, seed)) => (
                count,
                Some(seed.parse().with_context(|| format!("bad seed `{seed}`"))?),
            ),
            None => (rest, None),
        };
        Ok(Self::Random {
            count: count
                .parse()
                .with_context(|| format!("bad state count `{count}`"))?,
            seed,
        })
    }
}

fn json_items(path: &PathBuf) -> Result<Vec<String>> {
    let text = std::fs::read_to_string(path)
        .with_context(|| format!("reading states {}", path.display()))?;
    let value: serde_json::Value =
        serde_json::from_str(&text).with_context(|| format!("parsing {}", path.display()))?;
    Ok(match value {
        serde_json::Value::Array(items) => items.iter().map(|v| v.to_string()).collect(),
        other => vec![other.to_string()],
    })
}

/// Oscillator states `{"s": .., "coefficients": [[re, im], ...]}`.
pub fn number_states(source: &StateSource, s_max: usize) -> Result<Vec<NumberState>> {
    match source {
        StateSource::File(path) => json_items(path)?
            .iter()
            .map(|item| Ok(NumberState::from_json_str(item)?))
            .collect(),
        StateSource::Random { .. } => {
            let (count, seed) = source.random_parts().unwrap();
            Ok((0..count)
                .map(|i| random_number_state(&mut state_rng(seed, i as u64), s_max))
                .collect())
        }
    }
}

/// Circle states `{"lo": .., "coefficients": [[re, im], ...]}`. Random states
/// are not centered here; the caller decides.
pub fn circle_states(source: &StateSource, n_max: i64) -> Result<Vec<State>> {
    match source {
        StateSource::File(path) => json_items(path)?
            .iter()
            .map(|item| Ok(State::from_json_str(item)?))
            .collect(),
        StateSource::Random { .. } => {
            let (count, seed) = source.random_parts().unwrap();
            Ok((0..count)
                .map(|i| random_circle_state(&mut state_rng(seed, i as u64), n_max))
                .collect())
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn parses_sources() {
        assert_eq!(
            "random:10:42".parse::<StateSource>().unwrap(),
            StateSource::Random {
                count: 10,
                seed: Some(42)
            }
        );
        let unseeded = "random:10".parse::<StateSource>().unwrap();
        assert!(unseeded.clone().with_seed(None).is_err());
        assert_eq!(
            unseeded.with_seed(Some(3)).unwrap(),
            StateSource::Random {
                count: 10,
                seed: Some(3)
            }
        );
        assert!("random:x:1".parse::<StateSource>().is_err());
        assert_eq!(
            "s.json".parse::<StateSource>().unwrap(),
            StateSource::File("s.json".into())
        );
    }
}
