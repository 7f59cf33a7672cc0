//! Desk-scale experiment harness: survival under militarist proximity,
//! and decision change under communication delay, plus the shared run
//! artifact writer used by the CLI.

use crate::engine::{
    export_relationship_dot, relationship_at, AppreciationDeltas, BackendConfig, CivConfig,
    DelayMode, EngineError, Universe, UniverseConfig, WarTravel,
};
use crate::model::{PublicAction, ResourceVector, TransferMatrix, Worldview};
use crate::secretary::SecretaryMode;
use crate::stick::{write_stick_dir, Stick};
use rand::Rng;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};
use std::collections::BTreeMap;
use std::fmt::Write as _;
use std::fs;
use std::path::Path;
use thiserror::Error;

#[derive(Debug, Error)]
pub enum ExperimentError {
    #[error(transparent)]
    Engine(#[from] EngineError),
    #[error("experiment io error: {0}")]
    Io(#[from] std::io::Error),
    #[error("experiment spec invalid: {0}")]
    Spec(String),
    #[error("spec is not valid JSON: {0}")]
    Json(#[from] serde_json::Error),
    #[error(transparent)]
    Stick(#[from] crate::stick::StickError),
}

fn default_repetitions() -> u32 {
    5
}

fn default_rounds() -> u32 {
    10
}

fn default_max_distance() -> u32 {
    4
}

/// A survival or delay-contrast experiment description, loaded from JSON.
#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum ExperimentSpec {
    Survival(SurvivalSpec),
    Delay(DelaySpec),
}

impl ExperimentSpec {
    pub fn load(path: &Path) -> Result<Self, ExperimentError> {
        let text = fs::read_to_string(path)?;
        Ok(serde_json::from_str(&text)?)
    }
}

/// One non-subject civilization in a survival constellation.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct MemberCiv {
    pub name: String,
    pub worldview: Worldview,
    pub resources: ResourceVector,
}

/// A constellation the subject is dropped into. Distances may be pinned;
/// otherwise they are drawn uniformly from `[1, max_distance]` per
/// repetition seed.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct Constellation {
    pub members: Vec<MemberCiv>,
    #[serde(default)]
    pub distances: Option<Vec<Vec<u32>>>,
}

fn default_subject_name() -> String {
    "Earth".to_string()
}

fn default_subject_worldview() -> Worldview {
    Worldview::Pacifism
}

/// Survival experiment: for every development stage and constellation,
/// run seeded repetitions and report the subject's survival rate.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct SurvivalSpec {
    pub base_seed: u64,
    #[serde(default = "default_repetitions")]
    pub repetitions: u32,
    #[serde(default = "default_rounds")]
    pub rounds: u32,
    #[serde(default = "default_max_distance")]
    pub max_distance: u32,
    /// Stage name to the subject's initial resources. These presets are
    /// plain configuration defaults, not calibrated values.
    pub stages: BTreeMap<String, ResourceVector>,
    #[serde(default = "default_subject_name")]
    pub subject_name: String,
    #[serde(default = "default_subject_worldview")]
    pub subject_worldview: Worldview,
    pub constellations: Vec<Constellation>,
    #[serde(default)]
    pub initial_matrix: Option<TransferMatrix>,
}

#[derive(Debug, Clone, Serialize)]
pub struct SurvivalCell {
    pub stage: String,
    pub civ_count: usize,
    pub repetitions: u32,
    pub survived: u32,
    pub failed_runs: u32,
    pub survival_rate: f64,
}

#[derive(Debug, Clone, Serialize)]
pub struct SurvivalReport {
    pub cells: Vec<SurvivalCell>,
}

impl SurvivalReport {
    pub fn to_csv(&self) -> String {
        let mut out = String::from("stage,civ_count,repetitions,survived,failed_runs,survival_rate\n");
        for cell in &self.cells {
            writeln!(
                out,
                "{},{},{},{},{},{:?}",
                cell.stage,
                cell.civ_count,
                cell.repetitions,
                cell.survived,
                cell.failed_runs,
                cell.survival_rate
            )
            .expect("writing to a String cannot fail");
        }
        out
    }
}

fn random_distances(n: usize, max_distance: u32, seed: u64) -> Vec<Vec<u32>> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut matrix = vec![vec![0u32; n]; n];
    for i in 0..n {
        for j in (i + 1)..n {
            let d = rng.random_range(1..=max_distance.max(1));
            matrix[i][j] = d;
            matrix[j][i] = d;
        }
    }
    matrix
}

fn balanced_matrix() -> TransferMatrix {
    TransferMatrix::from_diagonal(crate::agent::BALANCED_DIAG).expect("balanced matrix is valid")
}

pub fn run_experiment_survival(spec: &SurvivalSpec) -> Result<SurvivalReport, ExperimentError> {
    if spec.repetitions == 0 {
        return Err(ExperimentError::Spec("repetitions must be at least 1".into()));
    }
    for constellation in &spec.constellations {
        if !constellation
            .members
            .iter()
            .any(|m| m.worldview == Worldview::Militarism)
        {
            return Err(ExperimentError::Spec(
                "every constellation needs at least one militarist".into(),
            ));
        }
    }
    let matrix = spec.initial_matrix.unwrap_or_else(balanced_matrix);

    let mut cells = Vec::new();
    for (stage, subject_resources) in &spec.stages {
        for constellation in &spec.constellations {
            let n = constellation.members.len() + 1;
            let mut survived = 0;
            let mut failed_runs = 0;
            for rep in 0..spec.repetitions {
                let seed = spec.base_seed + u64::from(rep);
                let distances = constellation
                    .distances
                    .clone()
                    .unwrap_or_else(|| random_distances(n, spec.max_distance, seed));
                let mut civs = vec![CivConfig {
                    name: spec.subject_name.clone(),
                    worldview: spec.subject_worldview,
                    resources: *subject_resources,
                    matrix,
                    backend: BackendConfig::Doctrine,
                }];
                civs.extend(constellation.members.iter().map(|m| CivConfig {
                    name: m.name.clone(),
                    worldview: m.worldview,
                    resources: m.resources,
                    matrix,
                    backend: BackendConfig::Doctrine,
                }));
                let config = UniverseConfig {
                    civs,
                    distances,
                    delay_mode: DelayMode::Delayed,
                    rounds: spec.rounds,
                    seed,
                    war_travel: WarTravel::default(),
                    isolationist_window: 2,
                    appreciation: AppreciationDeltas::default(),
                    max_validation_attempts: 3,
                    secretary: SecretaryMode::default(),
                };
                let mut universe = Universe::new(config)?;
                match universe.run() {
                    Ok(()) => {
                        if universe.is_alive(&spec.subject_name) {
                            survived += 1;
                        }
                    }
                    Err(_) => failed_runs += 1,
                }
            }
            cells.push(SurvivalCell {
                stage: stage.clone(),
                civ_count: n,
                repetitions: spec.repetitions,
                survived,
                failed_runs,
                survival_rate: f64::from(survived) / f64::from(spec.repetitions),
            });
        }
    }
    Ok(SurvivalReport { cells })
}

/// Delay-contrast experiment: paired runs with identical config and seed,
/// one real-time and one delayed, compared decision by decision.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct DelaySpec {
    pub base_seed: u64,
    #[serde(default = "one")]
    pub repetitions: u32,
    pub rounds: u32,
    #[serde(default = "default_max_distance")]
    pub max_distance: u32,
    #[serde(default)]
    pub distances: Option<Vec<Vec<u32>>>,
    pub civs: Vec<CivConfig>,
}

fn one() -> u32 {
    1
}

#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Serialize)]
pub struct MetricsRow {
    pub compared: u64,
    pub public_changed: u64,
    pub private_changed: u64,
    pub worldview_changed: u64,
}

impl MetricsRow {
    fn pct(changed: u64, compared: u64) -> f64 {
        if compared == 0 {
            0.0
        } else {
            100.0 * changed as f64 / compared as f64
        }
    }

    pub fn public_action_change_pct(&self) -> f64 {
        Self::pct(self.public_changed, self.compared)
    }

    pub fn private_action_change_pct(&self) -> f64 {
        Self::pct(self.private_changed, self.compared)
    }

    pub fn worldview_change_pct(&self) -> f64 {
        Self::pct(self.worldview_changed, self.compared)
    }
}

/// Per-worldview decision-change percentages with their denominators.
#[derive(Debug, Clone, Default, PartialEq, Serialize)]
pub struct MetricsTable {
    pub rows: BTreeMap<Worldview, MetricsRow>,
}

impl MetricsTable {
    pub fn to_csv(&self) -> String {
        let mut out = String::from(
            "worldview,compared,public_action_changed,private_action_changed,worldview_changed,public_action_change_pct,private_action_change_pct,worldview_change_pct\n",
        );
        for (worldview, row) in &self.rows {
            writeln!(
                out,
                "{},{},{},{},{},{:?},{:?},{:?}",
                worldview,
                row.compared,
                row.public_changed,
                row.private_changed,
                row.worldview_changed,
                row.public_action_change_pct(),
                row.private_action_change_pct(),
                row.worldview_change_pct()
            )
            .expect("writing to a String cannot fail");
        }
        out
    }
}

/// Doing nothing and having nobody to act on compare as the same public
/// posture.
pub fn canonical_public_actions(actions: &[PublicAction]) -> Vec<PublicAction> {
    let mut canon: Vec<PublicAction> = actions.to_vec();
    canon.sort();
    canon.dedup();
    if canon.is_empty() {
        canon.push(PublicAction::DoNothing);
    }
    canon
}

/// Compares paired sticks decision by decision, accumulating per-worldview
/// change counts. Rows are keyed by the control run's worldview.
pub fn compare_sticks(control: &Stick, delayed: &Stick, table: &mut MetricsTable) {
    for (name, control_records) in control {
        let Some(delayed_records) = delayed.get(name) else {
            continue;
        };
        for (c, d) in control_records.iter().zip(delayed_records.iter()) {
            debug_assert_eq!(c.round, d.round);
            let row = table.rows.entry(c.worldview).or_default();
            row.compared += 1;
            if canonical_public_actions(&c.public_actions)
                != canonical_public_actions(&d.public_actions)
            {
                row.public_changed += 1;
            }
            if c.private_action != d.private_action {
                row.private_changed += 1;
            }
            if c.worldview != d.worldview {
                row.worldview_changed += 1;
            }
        }
    }
}

/// Runs the paired simulations. When `out_dir` is given, each
/// repetition's control and delayed run artifacts are written under it
/// for independent recounting.
pub fn run_experiment_delay_contrast(
    spec: &DelaySpec,
    out_dir: Option<&Path>,
) -> Result<MetricsTable, ExperimentError> {
    if spec.repetitions == 0 {
        return Err(ExperimentError::Spec("repetitions must be at least 1".into()));
    }
    let mut table = MetricsTable::default();
    for rep in 0..spec.repetitions {
        let seed = spec.base_seed + u64::from(rep);
        let distances = spec
            .distances
            .clone()
            .unwrap_or_else(|| random_distances(spec.civs.len(), spec.max_distance, seed));
        let base = UniverseConfig {
            civs: spec.civs.clone(),
            distances,
            delay_mode: DelayMode::Delayed,
            rounds: spec.rounds,
            seed,
            war_travel: WarTravel::default(),
            isolationist_window: 2,
            appreciation: AppreciationDeltas::default(),
            max_validation_attempts: 3,
            secretary: SecretaryMode::default(),
        };
        let mut delayed_config = base.clone();
        delayed_config.delay_mode = DelayMode::Delayed;
        let mut control_config = base;
        control_config.delay_mode = DelayMode::RealTime;

        let mut control = Universe::new(control_config)?;
        control.run()?;
        let mut delayed = Universe::new(delayed_config)?;
        delayed.run()?;

        if let Some(dir) = out_dir {
            let rep_dir = dir.join(format!("rep{rep:03}"));
            write_run_artifacts(&rep_dir.join("control"), &control)?;
            write_run_artifacts(&rep_dir.join("delayed"), &delayed)?;
        }
        compare_sticks(control.stick(), delayed.stick(), &mut table);
    }
    Ok(table)
}

/// Writes one run's full artifact set: the resolved config, one stick
/// file per civilization, a relationship DOT per executed round and a
/// summary. Deterministic backends make the output byte-reproducible.
pub fn write_run_artifacts(dir: &Path, universe: &Universe) -> Result<(), ExperimentError> {
    fs::create_dir_all(dir)?;
    fs::write(
        dir.join("config.json"),
        serde_json::to_string_pretty(universe.config())? + "\n",
    )?;
    write_stick_dir(&dir.join("sticks"), universe.stick())?;

    let relationship_dir = dir.join("relationship");
    fs::create_dir_all(&relationship_dir)?;
    let names: Vec<String> = universe
        .config()
        .civs
        .iter()
        .map(|c| c.name.clone())
        .collect();
    for round in 1..=universe.rounds_executed() {
        let map = relationship_at(universe.config(), universe.stick(), round);
        fs::write(
            relationship_dir.join(format!("round_{round:03}.dot")),
            export_relationship_dot(&map, &names),
        )?;
    }

    fs::write(
        dir.join("summary.json"),
        serde_json::to_string_pretty(&universe.summary())? + "\n",
    )?;
    if !universe.transcript().is_empty() {
        crate::agent::replay::write_transcript(&dir.join("transcript.jsonl"), universe.transcript())?;
    }
    Ok(())
}
