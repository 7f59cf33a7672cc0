//! Deterministic rule policies, one per worldview.
//!
//! These encode each ideology's observed behavior as fixed rules over the
//! observation. A doctrine agent never changes its worldview label; under
//! attack it keeps the label but switches to a war-mobilization posture.
//!
//! Militarists judge targets differently depending on information
//! quality. With live sight (staleness zero) any civilization whose
//! military is inferior to their own is attacked, weakest first. Under
//! stale observations they only strike when their own military is at
//! least twice the last-seen value, since the target may have grown in
//! the meantime; against anything comparable they quietly mobilize
//! instead.

use super::Observation;
use crate::model::{Decision, PrivateAction, PublicAction, TransferMatrix, Worldview, EPSILON};
use std::collections::BTreeSet;

/// Even growth across all five resources; legal in the default regime.
pub const BALANCED_DIAG: [f64; 5] = [1.8, 1.8, 1.8, 1.8, 1.8];
/// War footing: military-heavy with the diagonal sum pinned at 9.0.
pub const MOBILIZATION_DIAG: [f64; 5] = [2.3, 2.3, 1.7, 1.7, 1.0];
/// Pact growth: diagonal sum 10.0 with the military coefficient kept
/// below 1.6.
pub const COOPERATION_DIAG: [f64; 5] = [1.5, 2.2, 2.2, 2.1, 2.0];

/// Computes the rule-based decision for one round. `window` is the
/// isolationist observation window in rounds.
pub fn doctrine_policy(worldview: Worldview, obs: &Observation, window: u32) -> Decision {
    let own_military = obs.resources.military();
    let mut public: Vec<PublicAction> = Vec::new();
    let mut private = PrivateAction::DoNothing;
    let mut action_notes: Vec<String> = Vec::new();

    let visible: Vec<(&String, &super::ObservedCiv)> = obs
        .others
        .iter()
        .filter(|(_, seen)| !seen.known_eliminated)
        .collect();

    match worldview {
        Worldview::Militarism => {
            private = PrivateAction::MobilizeForWar;
            if own_military > 0.0 {
                let mut weakest: Option<(f64, &str)> = None;
                for (name, seen) in &visible {
                    let Some(seen_military) = seen.last_seen_military() else {
                        continue;
                    };
                    let eligible = if seen.staleness == 0 {
                        seen_military < own_military
                    } else {
                        own_military + EPSILON >= 2.0 * seen_military
                    };
                    let weaker = weakest
                        .map(|(m, n)| (seen_military, name.as_str()) < (m, n))
                        .unwrap_or(true);
                    if eligible && weaker {
                        weakest = Some((seen_military, name));
                    }
                }
                if let Some((seen_military, target)) = weakest {
                    public.push(PublicAction::LaunchAnnihilationWar {
                        target: target.to_string(),
                    });
                    action_notes.push(format!(
                        "{target} is the weakest assessed civilization (military {seen_military:?} against our {own_military:?}); striking before it can grow"
                    ));
                }
            }
            if public.is_empty() && !visible.is_empty() {
                action_notes
                    .push("no safe target; preparing for war while the balance shifts".to_string());
            }
        }
        Worldview::Pacifism => {
            for (name, _) in &visible {
                let name = name.as_str();
                if obs.active_pacts.contains(name) {
                    continue;
                }
                if obs.pending_offers.contains(name) {
                    public.push(PublicAction::InitiateCooperation {
                        target: name.to_string(),
                    });
                    action_notes.push(format!("accepting the cooperation offer from {name}"));
                } else if obs.friendly_from.contains(name)
                    && !obs.history_mentions(name, |a| {
                        matches!(a, PublicAction::InitiateCooperation { .. })
                    })
                {
                    public.push(PublicAction::InitiateCooperation {
                        target: name.to_string(),
                    });
                    action_notes.push(format!("answering {name}'s friendly signal with cooperation"));
                } else if !obs.history_mentions(name, |a| {
                    matches!(
                        a,
                        PublicAction::ExpressFriendliness { .. }
                            | PublicAction::InitiateCooperation { .. }
                    )
                }) {
                    public.push(PublicAction::ExpressFriendliness {
                        target: name.to_string(),
                    });
                    action_notes.push(format!("greeting {name} on first contact"));
                }
            }
        }
        Worldview::Isolationism => {
            for (name, seen) in &visible {
                let name = name.as_str();
                if obs.active_pacts.contains(name) {
                    continue;
                }
                let minimal_risk = match (seen.last_seen_worldview(), seen.last_seen_military()) {
                    (Some(w), Some(m)) => {
                        w != Worldview::Militarism && m <= own_military + EPSILON
                    }
                    _ => false,
                };
                if !minimal_risk {
                    continue;
                }
                if obs.pending_offers.contains(name) {
                    public.push(PublicAction::InitiateCooperation {
                        target: name.to_string(),
                    });
                    action_notes.push(format!("quietly accepting cooperation with {name}"));
                } else if seen.observed_rounds() >= window as usize
                    && !obs.history_mentions(name, |a| {
                        matches!(
                            a,
                            PublicAction::ExpressFriendliness { .. }
                                | PublicAction::InitiateCooperation { .. }
                        )
                    })
                {
                    public.push(PublicAction::ExpressFriendliness {
                        target: name.to_string(),
                    });
                    action_notes.push(format!(
                        "{name} assessed minimal-risk after {} rounds of observation",
                        seen.observed_rounds()
                    ));
                }
            }
        }
    }

    if !obs.under_attack_by.is_empty() {
        private = PrivateAction::MobilizeForWar;
        action_notes.push("under attack: mobilizing defenses".to_string());
    }

    // The template demands a public action once anyone is discovered; pad
    // with a single Do Nothing when some discovered civilization got no
    // targeted action.
    let targeted: BTreeSet<&str> = public.iter().filter_map(|a| a.counterparty()).collect();
    if !obs.others.is_empty() && targeted.len() < obs.others.len() {
        public.push(PublicAction::DoNothing);
    }

    let initiating = public
        .iter()
        .any(|a| matches!(a, PublicAction::InitiateCooperation { .. }));
    let diag = if private == PrivateAction::MobilizeForWar {
        MOBILIZATION_DIAG
    } else if !obs.active_pacts.is_empty() || initiating {
        COOPERATION_DIAG
    } else {
        BALANCED_DIAG
    };
    let matrix_reason = match diag {
        MOBILIZATION_DIAG => "war footing: military growth prioritized, diagonal sum held at 9.0",
        COOPERATION_DIAG => "cooperation allows a diagonal sum of 10.0 with military below 1.6",
        _ => "balanced development across all five resources",
    };

    let worldview_reason = match worldview {
        Worldview::Militarism => "strength decides survival; the doctrine stands",
        Worldview::Pacifism => "mutual benefit through diplomacy remains our course",
        Worldview::Isolationism => "remaining hidden stays the safest strategy",
    };
    let action_reason = if action_notes.is_empty() {
        if obs.others.is_empty() {
            "no civilizations discovered yet".to_string()
        } else {
            "observing without commitment".to_string()
        }
    } else {
        action_notes.join("; ")
    };

    Decision {
        worldview,
        worldview_reason: worldview_reason.to_string(),
        matrix: TransferMatrix::from_diagonal(diag).expect("doctrine matrices are valid"),
        matrix_reason: matrix_reason.to_string(),
        public_actions: public,
        private_action: private,
        action_reason,
        other_info: String::new(),
        discovered_names: obs.others.keys().cloned().collect(),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::agent::{lone_observation, CurrentView, ObservedCiv};
    use crate::model::ResourceVector;

    fn observed(military: f64, worldview: Worldview, staleness: u32) -> ObservedCiv {
        let resources = ResourceVector::new([military, 1.0, 1.0, 1.0, 1.0]).unwrap();
        if staleness == 0 {
            ObservedCiv {
                records: vec![],
                current: Some(CurrentView {
                    resources,
                    worldview,
                }),
                staleness: 0,
                known_eliminated: false,
            }
        } else {
            ObservedCiv {
                records: vec![crate::stick::StickRecord {
                    round: 1,
                    resources,
                    matrix_diag: BALANCED_DIAG,
                    worldview,
                    public_actions: vec![],
                    private_action: PrivateAction::DoNothing,
                    events: vec![],
                }],
                current: None,
                staleness,
                known_eliminated: false,
            }
        }
    }

    fn militarist_obs(own: f64, seen: f64, staleness: u32) -> Observation {
        let mut obs = lone_observation(
            3,
            Worldview::Militarism,
            ResourceVector::new([own, 10.0, 10.0, 10.0, 10.0]).unwrap(),
        );
        obs.others
            .insert("Earth".into(), observed(seen, Worldview::Pacifism, staleness));
        obs
    }

    #[test]
    fn militarist_with_stale_sight_wars_only_at_double_strength() {
        let d = doctrine_policy(Worldview::Militarism, &militarist_obs(10.0, 4.0, 2), 2);
        assert!(d.public_actions.iter().any(|a| a.is_war()));
        assert_eq!(d.private_action, PrivateAction::MobilizeForWar);

        let d = doctrine_policy(Worldview::Militarism, &militarist_obs(10.0, 8.0, 2), 2);
        assert!(!d.public_actions.iter().any(|a| a.is_war()));
        assert_eq!(d.public_actions, vec![PublicAction::DoNothing]);
        assert_eq!(d.private_action, PrivateAction::MobilizeForWar);
    }

    #[test]
    fn militarist_with_live_sight_wars_on_inferior_strength() {
        let d = doctrine_policy(Worldview::Militarism, &militarist_obs(10.0, 8.0, 0), 2);
        assert_eq!(
            d.public_actions[0],
            PublicAction::LaunchAnnihilationWar {
                target: "Earth".into()
            }
        );
    }

    #[test]
    fn militarist_without_military_cannot_war() {
        let d = doctrine_policy(Worldview::Militarism, &militarist_obs(0.0, 0.0, 0), 2);
        assert!(!d.public_actions.iter().any(|a| a.is_war()));
    }

    #[test]
    fn militarist_mobilizes_with_nothing_in_sight() {
        let obs = lone_observation(
            1,
            Worldview::Militarism,
            ResourceVector::new([10.0; 5]).unwrap(),
        );
        let d = doctrine_policy(Worldview::Militarism, &obs, 2);
        assert!(d.public_actions.is_empty());
        assert_eq!(d.private_action, PrivateAction::MobilizeForWar);
        assert_eq!(d.matrix.diagonal(), MOBILIZATION_DIAG);
    }

    #[test]
    fn isolationist_waits_out_the_observation_window() {
        let mut obs = lone_observation(
            1,
            Worldview::Isolationism,
            ResourceVector::new([10.0; 5]).unwrap(),
        );
        obs.others
            .insert("Earth".into(), observed(4.0, Worldview::Pacifism, 0));
        let d = doctrine_policy(Worldview::Isolationism, &obs, 2);
        assert_eq!(d.public_actions, vec![PublicAction::DoNothing]);

        let mut seen = observed(4.0, Worldview::Pacifism, 0);
        seen.records = vec![crate::stick::StickRecord {
            round: 1,
            resources: ResourceVector::new([4.0, 1.0, 1.0, 1.0, 1.0]).unwrap(),
            matrix_diag: BALANCED_DIAG,
            worldview: Worldview::Pacifism,
            public_actions: vec![],
            private_action: PrivateAction::DoNothing,
            events: vec![],
        }];
        let mut obs2 = lone_observation(
            2,
            Worldview::Isolationism,
            ResourceVector::new([10.0; 5]).unwrap(),
        );
        obs2.others.insert("Earth".into(), seen);
        let d = doctrine_policy(Worldview::Isolationism, &obs2, 2);
        assert_eq!(
            d.public_actions[0],
            PublicAction::ExpressFriendliness {
                target: "Earth".into()
            }
        );
    }

    #[test]
    fn isolationist_accepts_offers_from_minimal_risk_civilizations() {
        let mut obs = lone_observation(
            4,
            Worldview::Isolationism,
            ResourceVector::new([10.0; 5]).unwrap(),
        );
        obs.others
            .insert("Earth".into(), observed(4.0, Worldview::Pacifism, 0));
        obs.pending_offers.insert("Earth".into());
        let d = doctrine_policy(Worldview::Isolationism, &obs, 2);
        assert_eq!(
            d.public_actions[0],
            PublicAction::InitiateCooperation {
                target: "Earth".into()
            }
        );
        assert_eq!(d.matrix.diagonal(), COOPERATION_DIAG);

        // The same offer from a militarist is ignored.
        let mut obs = lone_observation(
            4,
            Worldview::Isolationism,
            ResourceVector::new([10.0; 5]).unwrap(),
        );
        obs.others
            .insert("ThreeBody".into(), observed(4.0, Worldview::Militarism, 0));
        obs.pending_offers.insert("ThreeBody".into());
        let d = doctrine_policy(Worldview::Isolationism, &obs, 2);
        assert_eq!(d.public_actions, vec![PublicAction::DoNothing]);
    }

    #[test]
    fn isolationist_never_greets_a_militarist() {
        let mut obs = lone_observation(
            5,
            Worldview::Isolationism,
            ResourceVector::new([10.0; 5]).unwrap(),
        );
        obs.others
            .insert("ThreeBody".into(), observed(4.0, Worldview::Militarism, 0));
        let d = doctrine_policy(Worldview::Isolationism, &obs, 2);
        assert_eq!(d.public_actions, vec![PublicAction::DoNothing]);
    }

    #[test]
    fn pacifist_greets_then_cooperates() {
        let mut obs = lone_observation(
            1,
            Worldview::Pacifism,
            ResourceVector::new([8.0; 5]).unwrap(),
        );
        obs.others
            .insert("Vulcan".into(), observed(8.0, Worldview::Pacifism, 0));
        let d = doctrine_policy(Worldview::Pacifism, &obs, 2);
        assert_eq!(
            d.public_actions[0],
            PublicAction::ExpressFriendliness {
                target: "Vulcan".into()
            }
        );

        obs.friendly_from.insert("Vulcan".into());
        let d = doctrine_policy(Worldview::Pacifism, &obs, 2);
        assert_eq!(
            d.public_actions[0],
            PublicAction::InitiateCooperation {
                target: "Vulcan".into()
            }
        );
        assert_eq!(d.matrix.diagonal(), COOPERATION_DIAG);
    }

    #[test]
    fn under_attack_forces_mobilization_whatever_the_worldview() {
        let mut obs = lone_observation(
            4,
            Worldview::Pacifism,
            ResourceVector::new([8.0; 5]).unwrap(),
        );
        obs.under_attack_by.insert("ThreeBody".into());
        let d = doctrine_policy(Worldview::Pacifism, &obs, 2);
        assert_eq!(d.private_action, PrivateAction::MobilizeForWar);
        assert_eq!(d.matrix.diagonal(), MOBILIZATION_DIAG);
        assert_eq!(d.worldview, Worldview::Pacifism);
    }
}
