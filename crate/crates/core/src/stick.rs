//! The round-based archive ("stick") of every civilization's history, and
//! its JSON-lines persistence format.
//!
//! Each living civilization contributes exactly one [`StickRecord`] per
//! round; records of eliminated civilizations are retained but never
//! extended. Files are one JSON object per line with keys in fixed order
//! and reals serialized as their shortest round-trip decimal, so equal
//! runs produce byte-identical files.

use crate::model::{PrivateAction, PublicAction, ResourceVector, WarResult, Worldview};
use serde::{Deserialize, Serialize};
use std::collections::BTreeMap;
use std::fs;
use std::io::{BufRead, BufReader, BufWriter, Write};
use std::path::Path;
use thiserror::Error;

#[derive(Debug, Error)]
pub enum StickError {
    #[error("stick io error: {0}")]
    Io(#[from] std::io::Error),
    #[error("stick format error at line {line}: {source}")]
    Format {
        line: usize,
        source: serde_json::Error,
    },
}

/// Noteworthy engine events attached to the round they occurred in.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum StickEvent {
    /// A strike landed and was resolved; recorded on both belligerents.
    WarResolved {
        attacker: String,
        defender: String,
        outcome: WarResult,
        attacker_military_after: f64,
        defender_military_after: f64,
        loot: [f64; 5],
    },
    /// A strike arrived but one side was already eliminated.
    WarAborted {
        attacker: String,
        defender: String,
        reason: String,
    },
    /// A cooperation pact became active with the named partner.
    PactFormed { with: String },
    /// News of an aggressor's strike reached this civilization.
    Exposure { aggressor: String },
    /// The secretary fell back to the default decision after repeated
    /// rejections.
    DefaultApplied {
        attempts: u32,
        retained_matrix_valid: bool,
    },
    /// This civilization was annihilated by the named attacker.
    Eliminated { by: String },
}

/// One civilization's state at the end of one round: resources after the
/// round's growth and combat, the approved matrix and actions that
/// produced them, and any events.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct StickRecord {
    pub round: u32,
    pub resources: ResourceVector,
    pub matrix_diag: [f64; 5],
    pub worldview: Worldview,
    pub public_actions: Vec<PublicAction>,
    pub private_action: PrivateAction,
    pub events: Vec<StickEvent>,
}

/// A full run's archive, keyed by civilization name.
pub type Stick = BTreeMap<String, Vec<StickRecord>>;

/// Writes one civilization's records as JSON lines.
pub fn write_stick(path: &Path, records: &[StickRecord]) -> Result<(), StickError> {
    let file = fs::File::create(path)?;
    let mut writer = BufWriter::new(file);
    for record in records {
        serde_json::to_writer(&mut writer, record).map_err(std::io::Error::other)?;
        writer.write_all(b"\n")?;
    }
    writer.flush()?;
    Ok(())
}

/// Reads one civilization's records back; `read_stick(write_stick(x)) = x`.
pub fn read_stick(path: &Path) -> Result<Vec<StickRecord>, StickError> {
    let file = fs::File::open(path)?;
    let reader = BufReader::new(file);
    let mut records = Vec::new();
    for (i, line) in reader.lines().enumerate() {
        let line = line?;
        if line.trim().is_empty() {
            continue;
        }
        let record =
            serde_json::from_str(&line).map_err(|source| StickError::Format { line: i + 1, source })?;
        records.push(record);
    }
    Ok(records)
}

/// Writes a whole run's archive as one `<civ>.jsonl` file per civilization.
pub fn write_stick_dir(dir: &Path, stick: &Stick) -> Result<(), StickError> {
    fs::create_dir_all(dir)?;
    for (name, records) in stick {
        write_stick(&dir.join(format!("{name}.jsonl")), records)?;
    }
    Ok(())
}

/// Reads every `<civ>.jsonl` file in a stick directory.
pub fn read_stick_dir(dir: &Path) -> Result<Stick, StickError> {
    let mut stick = Stick::new();
    for entry in fs::read_dir(dir)? {
        let path = entry?.path();
        if path.extension().is_some_and(|e| e == "jsonl") {
            let name = path
                .file_stem()
                .map(|s| s.to_string_lossy().into_owned())
                .unwrap_or_default();
            stick.insert(name, read_stick(&path)?);
        }
    }
    Ok(stick)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::model::TransferMatrix;

    fn record(round: u32) -> StickRecord {
        StickRecord {
            round,
            resources: ResourceVector::new([1.8, 1.8, 1.8, 1.8, 1.8]).unwrap(),
            matrix_diag: TransferMatrix::from_diagonal([1.8; 5]).unwrap().diagonal(),
            worldview: Worldview::Pacifism,
            public_actions: vec![PublicAction::ExpressFriendliness {
                target: "Borg".into(),
            }],
            private_action: PrivateAction::DoNothing,
            events: vec![StickEvent::PactFormed { with: "Borg".into() }],
        }
    }

    #[test]
    fn round_trips_exactly() {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("Earth.jsonl");
        let records = vec![record(1), record(2)];
        write_stick(&path, &records).unwrap();
        assert_eq!(read_stick(&path).unwrap(), records);
    }

    #[test]
    fn empty_run_writes_empty_file() {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("Earth.jsonl");
        write_stick(&path, &[]).unwrap();
        assert_eq!(fs::read_to_string(&path).unwrap(), "");
        assert!(read_stick(&path).unwrap().is_empty());
    }

    #[test]
    fn corrupt_line_reports_line_number() {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("Earth.jsonl");
        let mut good = String::new();
        good.push_str(&serde_json::to_string(&record(1)).unwrap());
        good.push_str("\n{not json}\n");
        fs::write(&path, good).unwrap();
        match read_stick(&path) {
            Err(StickError::Format { line, .. }) => assert_eq!(line, 2),
            other => panic!("expected format error, got {other:?}"),
        }
    }
}
