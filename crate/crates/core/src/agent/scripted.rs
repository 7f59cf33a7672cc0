//! Scripted probe agents for the experiment harness.

use super::Observation;
use crate::model::{Decision, PrivateAction, PublicAction, TransferMatrix};
use crate::protocol::{render_decision, RawDecisionText};
use serde::{Deserialize, Serialize};
use std::collections::BTreeSet;

/// Deterministic probe behaviors injected by experiment specs.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ScriptedPolicy {
    /// Expresses friendliness toward a counterpart as soon as at least one
    /// archived round of it is visible, and does nothing before that.
    /// Because archived history arrives later under delay, paired
    /// real-time/delayed runs flip this agent's public action in exactly
    /// the rounds where visibility differs.
    FlipProbe,
    /// Emits unparseable text every time, driving the secretary's retry
    /// and default protocol.
    AlwaysInvalid,
}

impl ScriptedPolicy {
    pub fn decide(&self, obs: &Observation) -> RawDecisionText {
        match self {
            ScriptedPolicy::AlwaysInvalid => {
                RawDecisionText::new("(deliberately unparseable output)")
            }
            ScriptedPolicy::FlipProbe => render_decision(&flip_probe_decision(obs)),
        }
    }
}

fn flip_probe_decision(obs: &Observation) -> Decision {
    let mut public: Vec<PublicAction> = Vec::new();
    for (name, seen) in &obs.others {
        if seen.known_eliminated {
            continue;
        }
        if !seen.records.is_empty() {
            public.push(PublicAction::ExpressFriendliness {
                target: name.clone(),
            });
        }
    }
    let targeted: BTreeSet<&str> = public.iter().filter_map(|a| a.counterparty()).collect();
    if !obs.others.is_empty() && targeted.len() < obs.others.len() {
        public.push(PublicAction::DoNothing);
    }

    Decision {
        worldview: obs.worldview,
        worldview_reason: "probe: worldview held fixed".to_string(),
        matrix: TransferMatrix::from_diagonal(super::doctrine::BALANCED_DIAG)
            .expect("balanced matrix is valid"),
        matrix_reason: "probe: constant balanced matrix".to_string(),
        public_actions: public,
        private_action: PrivateAction::DoNothing,
        action_reason: "probe: acting on visible archived history only".to_string(),
        other_info: String::new(),
        discovered_names: obs.others.keys().cloned().collect(),
    }
}
