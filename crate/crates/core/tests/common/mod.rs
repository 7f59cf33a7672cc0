//! Shared fixtures and builders for integration tests.

#![allow(dead_code)]

use cosmosim::engine::{
    AppreciationDeltas, BackendConfig, CivConfig, DelayMode, UniverseConfig, WarTravel,
};
use cosmosim::model::{ResourceVector, TransferMatrix, Worldview};
use cosmosim::secretary::{CivSnapshot, SecretaryMode};
use std::collections::BTreeSet;

/// Agent-output excerpts exercised by the golden suite. The two `_FULL`
/// texts carry every template field; the `_EXCERPT` texts are partial
/// log excerpts carrying only action fields.
pub const WAR_EXCERPT: &str = include_str!("../fixtures/war_excerpt.txt");
pub const FRIENDLY_EXCERPT: &str = include_str!("../fixtures/friendly_excerpt.txt");
pub const SWIFT_WAR_FULL: &str = include_str!("../fixtures/swift_war_full.txt");
pub const DELAYED_MOBILIZATION_FULL: &str = include_str!("../fixtures/delayed_mobilization_full.txt");

pub fn resources(values: [f64; 5]) -> ResourceVector {
    ResourceVector::new(values).unwrap()
}

pub fn matrix(diag: [f64; 5]) -> TransferMatrix {
    TransferMatrix::from_diagonal(diag).unwrap()
}

pub fn doctrine_civ(name: &str, worldview: Worldview, values: [f64; 5]) -> CivConfig {
    CivConfig {
        name: name.to_string(),
        worldview,
        resources: resources(values),
        matrix: matrix([1.8; 5]),
        backend: BackendConfig::Doctrine,
    }
}

pub fn universe_config(
    civs: Vec<CivConfig>,
    distances: Vec<Vec<u32>>,
    delay_mode: DelayMode,
    rounds: u32,
    seed: u64,
) -> UniverseConfig {
    UniverseConfig {
        civs,
        distances,
        delay_mode,
        rounds,
        seed,
        war_travel: WarTravel::default(),
        isolationist_window: 2,
        appreciation: AppreciationDeltas::default(),
        max_validation_attempts: 3,
        secretary: SecretaryMode::default(),
    }
}

pub fn militarist_snapshot(discovered: &[&str]) -> CivSnapshot {
    CivSnapshot {
        name: "ThreeBody".to_string(),
        worldview: Worldview::Militarism,
        resources: resources([10.0; 5]),
        last_matrix: matrix([1.8; 5]),
        discovered: discovered.iter().map(|s| s.to_string()).collect(),
        cooperation_active: false,
        pending_offers: BTreeSet::new(),
    }
}

pub fn known(names: &[&str]) -> BTreeSet<String> {
    names.iter().map(|s| s.to_string()).collect()
}
