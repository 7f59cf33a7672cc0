//! Replay backend: serves completions from a recorded transcript instead
//! of a live endpoint, verifying that the prompts regenerate identically.

use super::llm::TranscriptEntry;
use super::AgentBackendError;
use std::collections::{HashMap, VecDeque};
use std::fs;
use std::path::Path;

#[derive(Debug)]
pub struct ReplayAgent {
    entries: HashMap<(u32, String), VecDeque<TranscriptEntry>>,
}

impl ReplayAgent {
    /// Loads a JSON-lines transcript. Entries are grouped per
    /// `(round, civ)` and served in recording order, so retry sequences
    /// replay exactly.
    pub fn from_file(path: &Path) -> Result<Self, AgentBackendError> {
        let text = fs::read_to_string(path).map_err(|e| AgentBackendError::TranscriptIo {
            detail: format!("{}: {e}", path.display()),
        })?;
        Self::from_text(&text)
    }

    pub fn from_text(text: &str) -> Result<Self, AgentBackendError> {
        let mut entries: HashMap<(u32, String), VecDeque<TranscriptEntry>> = HashMap::new();
        for (i, line) in text.lines().enumerate() {
            if line.trim().is_empty() {
                continue;
            }
            let entry: TranscriptEntry =
                serde_json::from_str(line).map_err(|e| AgentBackendError::TranscriptIo {
                    detail: format!("line {}: {e}", i + 1),
                })?;
            entries
                .entry((entry.round, entry.civ.clone()))
                .or_default()
                .push_back(entry);
        }
        Ok(ReplayAgent { entries })
    }

    /// Returns the next recorded completion for `(civ, round)`, checking
    /// that the live prompt matches what was recorded.
    pub fn next(
        &mut self,
        civ: &str,
        round: u32,
        live_prompt_hash: &str,
    ) -> Result<String, AgentBackendError> {
        let entry = self
            .entries
            .get_mut(&(round, civ.to_string()))
            .and_then(|queue| queue.pop_front())
            .ok_or_else(|| AgentBackendError::TranscriptExhausted {
                civ: civ.to_string(),
                round,
            })?;
        if entry.prompt_hash != live_prompt_hash {
            return Err(AgentBackendError::TranscriptMismatch {
                civ: civ.to_string(),
                round,
                recorded: entry.prompt_hash,
                live: live_prompt_hash.to_string(),
            });
        }
        Ok(entry.completion)
    }
}

/// Serializes transcript entries as JSON lines.
pub fn write_transcript(path: &Path, entries: &[TranscriptEntry]) -> std::io::Result<()> {
    let mut out = String::new();
    for entry in entries {
        out.push_str(&serde_json::to_string(entry).map_err(std::io::Error::other)?);
        out.push('\n');
    }
    fs::write(path, out)
}
