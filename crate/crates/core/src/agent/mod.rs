//! The agent abstraction and its backends.
//!
//! Every civilization is driven by an [`AgentHandle`]: a deterministic
//! doctrine policy, a chat-completion HTTP backend, a replay backend that
//! serves a recorded transcript, or a scripted probe used by the
//! experiment harness. All backends answer in the decision text template.

pub mod doctrine;
pub mod llm;
pub mod replay;
pub mod scripted;

pub use doctrine::{doctrine_policy, BALANCED_DIAG, COOPERATION_DIAG, MOBILIZATION_DIAG};
pub use llm::{llm_complete, prompt_hash, LlmEndpoint, TranscriptEntry};
pub use replay::ReplayAgent;
pub use scripted::ScriptedPolicy;

use crate::model::{ResourceVector, Worldview};
use crate::protocol::{build_cosmo_prompt, render_decision, render_history, PromptContext, RawDecisionText};
use crate::stick::{StickEvent, StickRecord};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use sha2::{Digest, Sha256};
use std::collections::{BTreeMap, BTreeSet};
use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum AgentBackendError {
    #[error("agent endpoint unreachable or timed out: {detail}")]
    Timeout { detail: String },
    #[error("agent endpoint returned HTTP {status}")]
    Http { status: u16 },
    #[error("agent response malformed: {detail}")]
    Malformed { detail: String },
    #[error("replay transcript exhausted for {civ} at round {round}")]
    TranscriptExhausted { civ: String, round: u32 },
    #[error("replay transcript mismatch for {civ} at round {round}: recorded prompt {recorded}, live prompt {live}")]
    TranscriptMismatch {
        civ: String,
        round: u32,
        recorded: String,
        live: String,
    },
    #[error("transcript unreadable: {detail}")]
    TranscriptIo { detail: String },
}

/// What one civilization can see of another: the delay-truncated history
/// excerpt, plus the live state when the delay is zero.
#[derive(Debug, Clone, PartialEq)]
pub struct ObservedCiv {
    pub records: Vec<StickRecord>,
    pub current: Option<CurrentView>,
    /// Rounds between now and the last visible round; equals the pairwise
    /// delay once history has started arriving, zero with live sight.
    pub staleness: u32,
    /// True when the visible history already shows this civilization's
    /// elimination.
    pub known_eliminated: bool,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CurrentView {
    pub resources: ResourceVector,
    pub worldview: Worldview,
}

impl ObservedCiv {
    pub fn last_seen_military(&self) -> Option<f64> {
        self.current
            .map(|c| c.resources.military())
            .or_else(|| self.records.last().map(|r| r.resources.military()))
    }

    pub fn last_seen_worldview(&self) -> Option<Worldview> {
        self.current
            .map(|c| c.worldview)
            .or_else(|| self.records.last().map(|r| r.worldview))
    }

    /// How many rounds of this civilization have been observed, counting
    /// the live view when present.
    pub fn observed_rounds(&self) -> usize {
        self.records.len() + usize::from(self.current.is_some())
    }
}

/// Everything an agent is allowed to know when deciding: its own history
/// and live state, delay-truncated views of everyone discovered, offers
/// and signals received, and active pacts and attacks.
#[derive(Debug, Clone, PartialEq)]
pub struct Observation {
    pub round: u32,
    pub worldview: Worldview,
    pub resources: ResourceVector,
    pub self_history: Vec<StickRecord>,
    pub others: BTreeMap<String, ObservedCiv>,
    /// Civilizations with a delivered, unanswered cooperation offer.
    pub pending_offers: BTreeSet<String>,
    pub active_pacts: BTreeSet<String>,
    pub under_attack_by: BTreeSet<String>,
    /// Civilizations whose friendly signal has been received.
    pub friendly_from: BTreeSet<String>,
    /// Secretary feedback from the previous rejected attempt, if any.
    pub previous_rejection: Option<String>,
}

impl Observation {
    /// Whether this civilization's own history records a given public
    /// action toward `name`. Doctrine policies use this to stay pure
    /// functions of the observation while acting once per counterpart.
    pub fn history_mentions(&self, name: &str, predicate: impl Fn(&crate::model::PublicAction) -> bool) -> bool {
        self.self_history.iter().any(|r| {
            r.public_actions
                .iter()
                .any(|a| a.counterparty() == Some(name) && predicate(a))
        })
    }
}

#[derive(Debug)]
pub enum AgentBackend {
    Doctrine { window: u32 },
    Llm(llm::LlmAgent),
    Replay(ReplayAgent),
    Scripted(ScriptedPolicy),
}

/// One civilization's decision maker. The random stream is derived from
/// `(run_seed, civ_name)` so runs are reproducible agent by agent.
#[derive(Debug)]
pub struct AgentHandle {
    civ_name: String,
    backend: AgentBackend,
    rng: ChaCha8Rng,
    transcript: Vec<TranscriptEntry>,
}

fn derive_seed(run_seed: u64, civ_name: &str) -> u64 {
    let mut hasher = Sha256::new();
    hasher.update(run_seed.to_le_bytes());
    hasher.update(civ_name.as_bytes());
    let digest = hasher.finalize();
    u64::from_le_bytes(digest[..8].try_into().expect("digest has 8+ bytes"))
}

impl AgentHandle {
    pub fn new(civ_name: impl Into<String>, backend: AgentBackend, run_seed: u64) -> Self {
        let civ_name = civ_name.into();
        let rng = ChaCha8Rng::seed_from_u64(derive_seed(run_seed, &civ_name));
        AgentHandle {
            civ_name,
            backend,
            rng,
            transcript: Vec::new(),
        }
    }

    pub fn civ_name(&self) -> &str {
        &self.civ_name
    }

    /// Deterministic per-civilization random stream, available to
    /// stochastic policies.
    pub fn rng(&mut self) -> &mut ChaCha8Rng {
        &mut self.rng
    }

    /// Produces one round's decision text from the observation.
    pub fn decide(&mut self, obs: &Observation) -> Result<RawDecisionText, AgentBackendError> {
        match &mut self.backend {
            AgentBackend::Doctrine { window } => Ok(render_decision(&doctrine_policy(
                obs.worldview,
                obs,
                *window,
            ))),
            AgentBackend::Llm(agent) => {
                let prompt = agent_prompt(obs);
                let completion = agent.complete(&prompt)?;
                self.transcript.push(TranscriptEntry {
                    round: obs.round,
                    civ: self.civ_name.clone(),
                    prompt_hash: prompt_hash(&prompt),
                    completion: completion.clone(),
                });
                Ok(RawDecisionText::new(completion))
            }
            AgentBackend::Replay(agent) => {
                let prompt = agent_prompt(obs);
                agent
                    .next(&self.civ_name, obs.round, &prompt_hash(&prompt))
                    .map(RawDecisionText::new)
            }
            AgentBackend::Scripted(policy) => Ok(policy.decide(obs)),
        }
    }

    /// Takes the request/response pairs recorded since the last drain,
    /// in the order they were issued.
    pub fn drain_transcript(&mut self) -> Vec<TranscriptEntry> {
        std::mem::take(&mut self.transcript)
    }
}

/// The full prompt an LLM (or replay verification) sees for an
/// observation, including secretary feedback after a rejection.
pub fn agent_prompt(obs: &Observation) -> String {
    let mut prompt = build_cosmo_prompt(&prompt_context(obs));
    if let Some(reason) = &obs.previous_rejection {
        prompt.push_str("\n[Previous Rejection: ] ");
        prompt.push_str(reason);
        prompt.push('\n');
    }
    prompt
}

/// Renders an observation into the prompt context: own history with the
/// live state appended, and one delay-truncated excerpt per discovered
/// civilization.
pub fn prompt_context(obs: &Observation) -> PromptContext {
    let history = render_history(&obs.self_history, Some((&obs.resources, obs.worldview)));
    let discovered = obs
        .others
        .iter()
        .map(|(name, seen)| {
            let current = seen.current.as_ref().map(|c| (&c.resources, c.worldview));
            (name.clone(), render_history(&seen.records, current))
        })
        .collect();
    PromptContext {
        history,
        worldview: obs.worldview,
        discovered,
        round: obs.round,
    }
}

/// An empty observation for a lone civilization, mostly useful in tests.
pub fn lone_observation(round: u32, worldview: Worldview, resources: ResourceVector) -> Observation {
    Observation {
        round,
        worldview,
        resources,
        self_history: Vec::new(),
        others: BTreeMap::new(),
        pending_offers: BTreeSet::new(),
        active_pacts: BTreeSet::new(),
        under_attack_by: BTreeSet::new(),
        friendly_from: BTreeSet::new(),
        previous_rejection: None,
    }
}

/// True when the visible excerpt of a civilization ends with its
/// elimination.
pub fn excerpt_shows_elimination(records: &[StickRecord]) -> bool {
    records.iter().any(|r| {
        r.events
            .iter()
            .any(|e| matches!(e, StickEvent::Eliminated { .. }))
    })
}
