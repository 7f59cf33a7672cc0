//! Universe configuration: a single JSON document describing the
//! civilizations, their pairwise signal-travel distances, the delay mode
//! and engine knobs.

use crate::agent::{LlmEndpoint, ScriptedPolicy};
use crate::model::{ResourceVector, TransferMatrix, Worldview};
use crate::secretary::SecretaryMode;
use serde::{Deserialize, Serialize};
use std::collections::BTreeSet;
use std::path::{Path, PathBuf};
use thiserror::Error;

#[derive(Debug, Error)]
pub enum ConfigError {
    #[error("config io error: {0}")]
    Io(#[from] std::io::Error),
    #[error("config is not valid JSON: {0}")]
    Json(#[from] serde_json::Error),
    #[error("at least one civilization is required")]
    NoCivs,
    #[error("civilization name `{0}` appears more than once")]
    DuplicateName(String),
    #[error("distance matrix must be {expected}x{expected}, found row of length {found}")]
    DistanceShape { expected: usize, found: usize },
    #[error("distance matrix must be symmetric with a zero diagonal (entry [{i}][{j}])")]
    DistanceSymmetry { i: usize, j: usize },
    #[error("rounds must be at least 1")]
    NoRounds,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum DelayMode {
    /// Everyone sees everyone's full history and current state at once.
    RealTime,
    /// Information (and by default, strikes) travel `distance` rounds.
    Delayed,
}

/// Whether an annihilation strike itself travels like information or
/// lands the round it is declared.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum WarTravel {
    #[default]
    Delayed,
    Instant,
}

/// Relationship-map deltas applied when signals arrive.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct AppreciationDeltas {
    pub friendly: i64,
    pub rejection: i64,
    pub war: i64,
}

impl Default for AppreciationDeltas {
    fn default() -> Self {
        AppreciationDeltas {
            friendly: 1,
            rejection: -1,
            war: -100,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Default, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum BackendConfig {
    #[default]
    Doctrine,
    Llm { endpoint: LlmEndpoint },
    Replay { transcript: PathBuf },
    Scripted { policy: ScriptedPolicy },
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct CivConfig {
    pub name: String,
    pub worldview: Worldview,
    pub resources: ResourceVector,
    pub matrix: TransferMatrix,
    #[serde(default)]
    pub backend: BackendConfig,
}

fn default_window() -> u32 {
    2
}

fn default_attempts() -> u32 {
    3
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct UniverseConfig {
    pub civs: Vec<CivConfig>,
    /// Symmetric matrix of signal travel times in rounds, zero diagonal.
    pub distances: Vec<Vec<u32>>,
    pub delay_mode: DelayMode,
    pub rounds: u32,
    pub seed: u64,
    #[serde(default)]
    pub war_travel: WarTravel,
    #[serde(default = "default_window")]
    pub isolationist_window: u32,
    #[serde(default)]
    pub appreciation: AppreciationDeltas,
    #[serde(default = "default_attempts")]
    pub max_validation_attempts: u32,
    #[serde(default)]
    pub secretary: SecretaryMode,
}

impl UniverseConfig {
    pub fn load(path: &Path) -> Result<Self, ConfigError> {
        let text = std::fs::read_to_string(path)?;
        let config: UniverseConfig = serde_json::from_str(&text)?;
        config.validate()?;
        Ok(config)
    }

    pub fn validate(&self) -> Result<(), ConfigError> {
        if self.civs.is_empty() {
            return Err(ConfigError::NoCivs);
        }
        if self.rounds == 0 {
            return Err(ConfigError::NoRounds);
        }
        let mut names = BTreeSet::new();
        for civ in &self.civs {
            if !names.insert(civ.name.clone()) {
                return Err(ConfigError::DuplicateName(civ.name.clone()));
            }
        }
        let n = self.civs.len();
        if self.distances.len() != n {
            return Err(ConfigError::DistanceShape {
                expected: n,
                found: self.distances.len(),
            });
        }
        for (i, row) in self.distances.iter().enumerate() {
            if row.len() != n {
                return Err(ConfigError::DistanceShape {
                    expected: n,
                    found: row.len(),
                });
            }
            for (j, &d) in row.iter().enumerate() {
                if i == j && d != 0 {
                    return Err(ConfigError::DistanceSymmetry { i, j });
                }
                if d != self.distances[j][i] {
                    return Err(ConfigError::DistanceSymmetry { i, j });
                }
            }
        }
        Ok(())
    }

    /// Effective signal travel time: zero everywhere in real-time mode.
    pub fn effective_distance(&self, i: usize, j: usize) -> u32 {
        match self.delay_mode {
            DelayMode::RealTime => 0,
            DelayMode::Delayed => self.distances[i][j],
        }
    }

    /// Rounds an annihilation strike takes to land.
    pub fn war_travel_rounds(&self, i: usize, j: usize) -> u32 {
        match (self.delay_mode, self.war_travel) {
            (DelayMode::RealTime, _) | (_, WarTravel::Instant) => 0,
            (DelayMode::Delayed, WarTravel::Delayed) => self.distances[i][j],
        }
    }
}
