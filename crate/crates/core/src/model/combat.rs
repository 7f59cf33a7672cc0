//! Annihilation-war mathematics: the outcome predicate, loot transfer and
//! square-law attrition.

use super::{ResourceKind, ResourceVector, EPSILON};
use serde::{Deserialize, Serialize};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum WarResult {
    Success,
    Failure,
}

/// A strike succeeds when the attacker's military is at least twice the
/// defender's, within tolerance. Both inputs are current values at the
/// round the strike lands, not the attacker's stale observation.
pub fn war_outcome(attacker_military: f64, defender_military: f64) -> WarResult {
    debug_assert!(attacker_military >= 0.0 && defender_military >= 0.0);
    if attacker_military + EPSILON >= 2.0 * defender_military {
        WarResult::Success
    } else {
        WarResult::Failure
    }
}

/// What the victor gains: half of every resource except military, which
/// is never looted.
pub fn war_loot(defender_resources: &ResourceVector) -> ResourceVector {
    let mut values = defender_resources.values();
    for (i, value) in values.iter_mut().enumerate() {
        if ResourceKind::ALL[i] == ResourceKind::MilitaryCapability {
            *value = 0.0;
        } else {
            *value /= 2.0;
        }
    }
    ResourceVector::new(values).expect("halving non-negative values stays non-negative")
}

/// Square-law attrition with unit effectiveness: the survivor keeps the
/// square root of the difference of squared strengths, the weaker side is
/// reduced to zero. Applied whether the strike succeeds or fails.
pub fn lanchester_attrition(attacker_military: f64, defender_military: f64) -> (f64, f64) {
    debug_assert!(attacker_military >= 0.0 && defender_military >= 0.0);
    let a2 = attacker_military * attacker_military;
    let d2 = defender_military * defender_military;
    (f64::sqrt((a2 - d2).max(0.0)), f64::sqrt((d2 - a2).max(0.0)))
}
