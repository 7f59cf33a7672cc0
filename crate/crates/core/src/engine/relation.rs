//! The interplanetary relationship map and its DOT export.
//!
//! Understanding counts how many of a civilization's rounds the observer
//! has seen; appreciation moves with received signals (+1 friendly, -1
//! rejection, -100 on learning of a war). The map is recomputed from the
//! archive rather than carried as engine state, so the exporter and the
//! engine can never drift apart.

use super::config::{DelayMode, UniverseConfig};
use crate::model::PublicAction;
use crate::stick::{Stick, StickEvent};
use std::collections::BTreeMap;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Relation {
    pub distance: u32,
    pub understanding: u32,
    pub appreciation: i64,
}

/// Ordered-pair relations, keyed `(observer, observed)`.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct RelationshipMap {
    pub entries: BTreeMap<(String, String), Relation>,
}

fn last_recorded_round(stick: &Stick, name: &str) -> u32 {
    stick
        .get(name)
        .and_then(|records| records.last())
        .map(|r| r.round)
        .unwrap_or(0)
}

fn elimination_round(stick: &Stick, name: &str) -> Option<u32> {
    stick.get(name).and_then(|records| {
        records.iter().find_map(|r| {
            r.events
                .iter()
                .any(|e| matches!(e, StickEvent::Eliminated { .. }))
                .then_some(r.round)
        })
    })
}

fn alive_at(stick: &Stick, name: &str, round: u32) -> bool {
    elimination_round(stick, name).is_none_or(|re| round <= re)
}

/// Reconstructs the relationship state as it stood at the end of `round`
/// from the archive and the configured distances.
pub fn relationship_at(config: &UniverseConfig, stick: &Stick, round: u32) -> RelationshipMap {
    let names: Vec<&str> = config.civs.iter().map(|c| c.name.as_str()).collect();
    let index: BTreeMap<&str, usize> = names.iter().enumerate().map(|(i, n)| (*n, i)).collect();

    let mut discovered: BTreeMap<(usize, usize), bool> = BTreeMap::new();
    let mut appreciation: BTreeMap<(usize, usize), i64> = BTreeMap::new();

    // Discovery by light travel.
    for i in 0..names.len() {
        for j in 0..names.len() {
            if i != j && round >= config.effective_distance(i, j) {
                discovered.insert((i, j), true);
            }
        }
    }

    // Replay signal deliveries for appreciation and signal-based
    // discovery. A signal emitted in round r is received at
    // max(r + distance, r + 1): never within its own round.
    for (sender_name, records) in stick {
        let Some(&s) = index.get(sender_name.as_str()) else {
            continue;
        };
        for record in records {
            for action in &record.public_actions {
                let Some(counterparty) = action.counterparty() else {
                    continue;
                };
                let Some(&t) = index.get(counterparty) else {
                    continue;
                };
                let delta = match action {
                    PublicAction::ExpressFriendliness { .. }
                    | PublicAction::InitiateCooperation { .. } => config.appreciation.friendly,
                    PublicAction::RejectCooperation { .. } => config.appreciation.rejection,
                    _ => continue,
                };
                let receipt = (record.round + config.effective_distance(s, t)).max(record.round + 1);
                if receipt <= round && alive_at(stick, counterparty, receipt) {
                    discovered.insert((t, s), true);
                    *appreciation.entry((t, s)).or_default() += delta;
                }
            }

            // War knowledge: the defender learns at resolution, everyone
            // else when the recorded exposure reaches them.
            for event in &record.events {
                match event {
                    StickEvent::WarResolved {
                        attacker, defender, ..
                    } if sender_name == defender && record.round <= round => {
                        if let Some(&a) = index.get(attacker.as_str()) {
                            let Some(&d) = index.get(defender.as_str()) else {
                                continue;
                            };
                            discovered.insert((d, a), true);
                            *appreciation.entry((d, a)).or_default() += config.appreciation.war;
                        }
                    }
                    StickEvent::Exposure { aggressor } if record.round <= round => {
                        if let Some(&a) = index.get(aggressor.as_str()) {
                            discovered.insert((s, a), true);
                            *appreciation.entry((s, a)).or_default() += config.appreciation.war;
                        }
                    }
                    _ => {}
                }
            }
        }
    }

    let mut entries = BTreeMap::new();
    for ((i, j), _) in discovered {
        let d_eff = config.effective_distance(i, j);
        let visible = if config.delay_mode == DelayMode::RealTime {
            round
        } else {
            round.saturating_sub(d_eff)
        };
        let understanding = visible.min(last_recorded_round(stick, names[j]));
        let appreciation = appreciation.get(&(i, j)).copied().unwrap_or(0);
        entries.insert(
            (names[i].to_string(), names[j].to_string()),
            Relation {
                distance: config.distances[i][j],
                understanding,
                appreciation,
            },
        );
    }
    RelationshipMap { entries }
}

/// Renders the map as a DOT digraph: one node per civilization, one edge
/// per discovered ordered pair, nodes and edges in sorted order.
pub fn export_relationship_dot(map: &RelationshipMap, civ_names: &[String]) -> String {
    let mut names: Vec<&str> = civ_names.iter().map(String::as_str).collect();
    names.sort_unstable();

    let mut out = String::from("digraph relationships {\n");
    for name in names {
        out.push_str(&format!("  \"{name}\";\n"));
    }
    for ((observer, observed), rel) in &map.entries {
        out.push_str(&format!(
            "  \"{observer}\" -> \"{observed}\" [label=\"d={}, u={}, a={}\"];\n",
            rel.distance, rel.understanding, rel.appreciation
        ));
    }
    out.push_str("}\n");
    out
}
