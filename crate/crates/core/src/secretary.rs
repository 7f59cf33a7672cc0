//! The secretary validation pipeline.
//!
//! Every agent answer passes through, in order: parsing, the worldview
//! triad check (guaranteed by parsing), matrix compliance under the
//! action-selected regime, action admissibility against the
//! civilization's snapshot, and doctrine consistency. Failures are
//! verdicts, never panics. After `max_attempts` consecutive rejections a
//! default protocol applies: the civilization retains its previous
//! worldview and transfer matrix and refrains from strategic action.
//!
//! The programmatic pipeline is always the floor. The optional LLM
//! secretary mode asks a chat endpoint to verify first, then still runs
//! the programmatic checks on anything it approves.

use crate::agent::{llm_complete, AgentBackendError, AgentHandle, LlmEndpoint, Observation};
use crate::model::{
    check_matrix, matrix_regime, ConstraintContext, Decision, MatrixViolation, PrivateAction,
    PublicAction, ResourceVector, TransferMatrix, ValidationResult, Worldview,
};
use crate::protocol::{build_secretary_prompt, parse_decision, ParseError, RawDecisionText};
use serde::{Deserialize, Serialize};
use std::collections::BTreeSet;
use std::fmt;

/// Stable rejection vocabulary; the `Display` strings are what agents see
/// under `[Previous Rejection: ]` and what logs record.
#[derive(Debug, Clone, PartialEq)]
pub enum RejectReason {
    Parse(ParseError),
    Matrix(MatrixViolation),
    UnknownTarget { name: String },
    WarWithoutMilitary,
    WarUnderPacifism,
    RejectWithoutOffer { source: String },
    MissingPublicAction,
    LlmSecretary { reason: String },
}

impl fmt::Display for RejectReason {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            RejectReason::Parse(e) => write!(f, "{e}"),
            RejectReason::Matrix(v) => write!(f, "{v}"),
            RejectReason::UnknownTarget { name } => {
                write!(f, "action targets unknown civilization `{name}`")
            }
            RejectReason::WarWithoutMilitary => {
                write!(f, "cannot launch an annihilation war with no military capability")
            }
            RejectReason::WarUnderPacifism => {
                write!(f, "launching an annihilation war is inconsistent with pacifism")
            }
            RejectReason::RejectWithoutOffer { source } => {
                write!(f, "no pending cooperation offer from `{source}` to reject")
            }
            RejectReason::MissingPublicAction => {
                write!(f, "a public action is mandatory once civilizations are discovered")
            }
            RejectReason::LlmSecretary { reason } => write!(f, "secretary verification: {reason}"),
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub enum SecretaryVerdict {
    Approved,
    Rejected { reason: RejectReason },
}

impl SecretaryVerdict {
    pub fn is_approved(&self) -> bool {
        matches!(self, SecretaryVerdict::Approved)
    }

    /// The rejection text; empty exactly when approved.
    pub fn rejection_reason(&self) -> String {
        match self {
            SecretaryVerdict::Approved => String::new(),
            SecretaryVerdict::Rejected { reason } => reason.to_string(),
        }
    }
}

/// The validation context: what the secretary knows about its
/// civilization when judging a decision.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct CivSnapshot {
    pub name: String,
    pub worldview: Worldview,
    pub resources: ResourceVector,
    pub last_matrix: TransferMatrix,
    /// Names this civilization has discovered; never contains its own.
    pub discovered: BTreeSet<String>,
    pub cooperation_active: bool,
    /// Civilizations with an open cooperation offer toward this one.
    #[serde(default)]
    pub pending_offers: BTreeSet<String>,
}

/// Parses and fully validates raw agent text. Returns the parsed decision
/// only on approval.
pub fn validate(raw: &RawDecisionText, snapshot: &CivSnapshot) -> (SecretaryVerdict, Option<Decision>) {
    match parse_decision(raw, &snapshot.discovered) {
        Err(e) => (
            SecretaryVerdict::Rejected {
                reason: RejectReason::Parse(e),
            },
            None,
        ),
        Ok(decision) => match validate_decision(&decision, snapshot) {
            SecretaryVerdict::Approved => (SecretaryVerdict::Approved, Some(decision)),
            rejected => (rejected, None),
        },
    }
}

/// The post-parse checks: matrix compliance, action admissibility and
/// doctrine consistency.
pub fn validate_decision(decision: &Decision, snapshot: &CivSnapshot) -> SecretaryVerdict {
    let ctx = ConstraintContext {
        private_action: decision.private_action,
        public_actions: decision.public_actions.clone(),
        cooperation_active: snapshot.cooperation_active,
    };
    if let ValidationResult::Reject(violation) = check_matrix(&decision.matrix, matrix_regime(&ctx))
    {
        return SecretaryVerdict::Rejected {
            reason: RejectReason::Matrix(violation),
        };
    }

    for action in &decision.public_actions {
        if let Some(name) = action.counterparty() {
            if !snapshot.discovered.contains(name) {
                return SecretaryVerdict::Rejected {
                    reason: RejectReason::UnknownTarget {
                        name: name.to_string(),
                    },
                };
            }
        }
        match action {
            PublicAction::LaunchAnnihilationWar { .. } => {
                if snapshot.resources.military() <= 0.0 {
                    return SecretaryVerdict::Rejected {
                        reason: RejectReason::WarWithoutMilitary,
                    };
                }
                if decision.worldview == Worldview::Pacifism {
                    return SecretaryVerdict::Rejected {
                        reason: RejectReason::WarUnderPacifism,
                    };
                }
            }
            PublicAction::RejectCooperation { source }
                if !snapshot.pending_offers.contains(source) =>
            {
                return SecretaryVerdict::Rejected {
                    reason: RejectReason::RejectWithoutOffer {
                        source: source.clone(),
                    },
                };
            }
            _ => {}
        }
    }

    if !snapshot.discovered.is_empty() && decision.public_actions.is_empty() {
        return SecretaryVerdict::Rejected {
            reason: RejectReason::MissingPublicAction,
        };
    }

    SecretaryVerdict::Approved
}

/// The fallback decision after repeated rejections: previous worldview,
/// previous matrix, no strategic action.
pub fn default_decision(snapshot: &CivSnapshot) -> Decision {
    let public_actions = if snapshot.discovered.is_empty() {
        Vec::new()
    } else {
        vec![PublicAction::DoNothing]
    };
    Decision {
        worldview: snapshot.worldview,
        worldview_reason: "default protocol: retaining the previous political system".to_string(),
        matrix: snapshot.last_matrix,
        matrix_reason: "default protocol: retaining the previous transfer matrix".to_string(),
        public_actions,
        private_action: PrivateAction::DoNothing,
        action_reason: "default protocol: refraining from strategic alterations".to_string(),
        other_info: String::new(),
        discovered_names: snapshot.discovered.iter().cloned().collect(),
    }
}

/// An approved decision plus how it was obtained.
#[derive(Debug, Clone, PartialEq)]
pub struct ValidatedDecision {
    pub decision: Decision,
    pub attempts: u32,
    pub defaulted: bool,
    /// False when the default protocol retained a matrix that is invalid
    /// under the new round's regime; the engine logs a warning event.
    pub retained_matrix_valid: bool,
}

/// How verdicts are produced: by the rules engine alone, or by an LLM
/// check followed by the rules engine.
#[derive(Debug, Clone, PartialEq, Default, Serialize, Deserialize)]
#[serde(tag = "mode", rename_all = "snake_case")]
pub enum SecretaryMode {
    #[default]
    Programmatic,
    Llm { endpoint: LlmEndpoint },
}

#[derive(Debug, Clone, Default)]
pub struct Secretary {
    pub mode: SecretaryMode,
}

impl Secretary {
    pub fn new(mode: SecretaryMode) -> Self {
        Secretary { mode }
    }

    /// Validates raw text under the configured mode. Only LLM transport
    /// failures surface as errors; content problems are verdicts.
    pub fn validate(
        &self,
        raw: &RawDecisionText,
        snapshot: &CivSnapshot,
    ) -> Result<(SecretaryVerdict, Option<Decision>), AgentBackendError> {
        match &self.mode {
            SecretaryMode::Programmatic => Ok(validate(raw, snapshot)),
            SecretaryMode::Llm { endpoint } => {
                let decision = match parse_decision(raw, &snapshot.discovered) {
                    Err(e) => {
                        return Ok((
                            SecretaryVerdict::Rejected {
                                reason: RejectReason::Parse(e),
                            },
                            None,
                        ))
                    }
                    Ok(d) => d,
                };
                let prompt = build_secretary_prompt(decision.worldview, &decision);
                let response = llm_complete(endpoint, &prompt)?;
                if let SecretaryVerdict::Rejected { reason } = parse_secretary_response(&response) {
                    return Ok((SecretaryVerdict::Rejected { reason }, None));
                }
                match validate_decision(&decision, snapshot) {
                    SecretaryVerdict::Approved => Ok((SecretaryVerdict::Approved, Some(decision))),
                    rejected => Ok((rejected, None)),
                }
            }
        }
    }

    /// Queries the agent up to `max_attempts` times, feeding each
    /// rejection reason back into the next attempt's context. After the
    /// last rejection the default protocol activates.
    pub fn validate_with_retries(
        &self,
        agent: &mut AgentHandle,
        obs: &Observation,
        snapshot: &CivSnapshot,
        max_attempts: u32,
    ) -> Result<ValidatedDecision, AgentBackendError> {
        assert!(max_attempts >= 1, "at least one attempt is required");
        let mut obs = obs.clone();
        for attempt in 1..=max_attempts {
            let raw = agent.decide(&obs)?;
            match self.validate(&raw, snapshot)? {
                (SecretaryVerdict::Approved, Some(decision)) => {
                    return Ok(ValidatedDecision {
                        decision,
                        attempts: attempt,
                        defaulted: false,
                        retained_matrix_valid: true,
                    });
                }
                (verdict, _) => {
                    obs.previous_rejection = Some(verdict.rejection_reason());
                }
            }
        }

        let decision = default_decision(snapshot);
        let ctx = ConstraintContext {
            private_action: decision.private_action,
            public_actions: decision.public_actions.clone(),
            cooperation_active: snapshot.cooperation_active,
        };
        let retained_matrix_valid =
            check_matrix(&decision.matrix, matrix_regime(&ctx)).is_accept();
        Ok(ValidatedDecision {
            decision,
            attempts: max_attempts,
            defaulted: true,
            retained_matrix_valid,
        })
    }
}

/// Parses the LLM secretary's answer format: a `[Verification:]` line
/// with Yes/No and an optional `[Rejection Reason:]`.
pub fn parse_secretary_response(text: &str) -> SecretaryVerdict {
    let verdict = extract_after(text, "[Verification:")
        .map(|v| v.trim().to_ascii_lowercase())
        .unwrap_or_default();
    if verdict.starts_with("yes") {
        return SecretaryVerdict::Approved;
    }
    let reason = extract_after(text, "[Rejection Reason:")
        .map(str::trim)
        .filter(|r| !r.is_empty() && !r.eq_ignore_ascii_case("n/a"))
        .unwrap_or("no reason given")
        .to_string();
    let reason = if verdict.starts_with("no") {
        reason
    } else {
        format!("malformed secretary response: {}", crate_shorten(text))
    };
    SecretaryVerdict::Rejected {
        reason: RejectReason::LlmSecretary { reason },
    }
}

fn crate_shorten(s: &str) -> String {
    let s = s.trim();
    if s.chars().count() > 60 {
        format!("{}...", s.chars().take(57).collect::<String>())
    } else {
        s.to_string()
    }
}

fn extract_after<'a>(text: &'a str, marker: &str) -> Option<&'a str> {
    let start = text.find(marker)? + marker.len();
    let rest = text[start..].trim_start_matches(']').trim_start();
    let end = rest.find('\n').unwrap_or(rest.len());
    Some(&rest[..end])
}
