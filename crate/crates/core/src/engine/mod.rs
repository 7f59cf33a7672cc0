//! The universe engine: topology and delays, discovery, delayed effect
//! delivery, cooperation pacts, war resolution and the round loop.
//!
//! Each round executes fixed phases: (1) deliver due effects and update
//! discovery, offers and attack knowledge; (2) every living civilization
//! decides, in index order, against a state frozen at the start of the
//! round; (3) approved public actions are enqueued as travelling effects;
//! (4) strikes due this round resolve in ascending (attacker index,
//! declaration round) order; (5) pacts form and break; (6) approved
//! matrices apply; (7) one stick record per living civilization is
//! appended. Identical configs and seeds with deterministic backends
//! produce byte-identical archives.

pub mod config;
pub mod relation;

pub use config::{
    AppreciationDeltas, BackendConfig, CivConfig, ConfigError, DelayMode, UniverseConfig,
    WarTravel,
};
pub use relation::{export_relationship_dot, relationship_at, Relation, RelationshipMap};

use crate::agent::{
    excerpt_shows_elimination, llm::LlmAgent, AgentBackend, AgentBackendError, AgentHandle,
    CurrentView, ObservedCiv, Observation, ReplayAgent, TranscriptEntry,
};
use crate::model::{
    apply_transfer, lanchester_attrition, war_loot, war_outcome, ModelError, PublicAction,
    ResourceKind, ResourceVector, TransferMatrix, WarResult, Worldview,
};
use crate::secretary::{CivSnapshot, Secretary, ValidatedDecision};
use crate::stick::{Stick, StickEvent, StickRecord};
use serde::Serialize;
use std::collections::{BTreeMap, BTreeSet};
use thiserror::Error;

#[derive(Debug, Error)]
pub enum EngineError {
    #[error(transparent)]
    Config(#[from] ConfigError),
    #[error("{civ} overflowed at round {round}: {source}")]
    Overflow {
        civ: String,
        round: u32,
        source: ModelError,
    },
    #[error("agent backend failed for {civ} at round {round}: {source}")]
    Agent {
        civ: String,
        round: u32,
        source: AgentBackendError,
    },
}

/// An effect in flight between two civilizations.
#[derive(Debug, Clone, PartialEq)]
pub struct PendingEffect {
    pub kind: EffectKind,
    pub from: String,
    pub to: String,
    pub emitted: u32,
    pub deliver_at: u32,
}

#[derive(Debug, Clone, PartialEq)]
pub enum EffectKind {
    Signal(PublicAction),
    WarArrival,
    Exposure,
}

#[derive(Debug, Clone)]
struct CivState {
    name: String,
    worldview: Worldview,
    resources: ResourceVector,
    last_matrix: TransferMatrix,
    alive: bool,
    eliminated_round: Option<u32>,
    discovered: BTreeSet<String>,
    pending_offers: BTreeSet<String>,
    /// Cooperation offers sent, keyed by target with the round first sent.
    outgoing_offers: BTreeMap<String, u32>,
    friendly_from: BTreeSet<String>,
    under_attack_by: BTreeSet<String>,
}

#[derive(Debug, Clone, Copy)]
struct FrozenView {
    resources: ResourceVector,
    worldview: Worldview,
    alive: bool,
}

/// What another civilization's history looks like from here.
#[derive(Debug, Clone, PartialEq)]
pub enum Visibility {
    NotDiscovered,
    Visible {
        records: Vec<StickRecord>,
        current: Option<CurrentView>,
    },
}

pub struct Universe {
    config: UniverseConfig,
    secretary: Secretary,
    civs: Vec<CivState>,
    agents: Vec<AgentHandle>,
    pending: Vec<PendingEffect>,
    pacts: BTreeSet<(String, String)>,
    stick: Stick,
    transcript: Vec<TranscriptEntry>,
    next_round: u32,
}

fn pact_key(a: &str, b: &str) -> (String, String) {
    if a <= b {
        (a.to_string(), b.to_string())
    } else {
        (b.to_string(), a.to_string())
    }
}

impl Universe {
    pub fn new(config: UniverseConfig) -> Result<Self, EngineError> {
        config.validate()?;
        let mut agents = Vec::with_capacity(config.civs.len());
        for civ in &config.civs {
            let backend = match &civ.backend {
                BackendConfig::Doctrine => AgentBackend::Doctrine {
                    window: config.isolationist_window,
                },
                BackendConfig::Llm { endpoint } => AgentBackend::Llm(
                    LlmAgent::new(endpoint.clone()).map_err(|source| EngineError::Agent {
                        civ: civ.name.clone(),
                        round: 0,
                        source,
                    })?,
                ),
                BackendConfig::Replay { transcript } => AgentBackend::Replay(
                    ReplayAgent::from_file(transcript).map_err(|source| EngineError::Agent {
                        civ: civ.name.clone(),
                        round: 0,
                        source,
                    })?,
                ),
                BackendConfig::Scripted { policy } => AgentBackend::Scripted(policy.clone()),
            };
            agents.push(AgentHandle::new(civ.name.clone(), backend, config.seed));
        }

        let civs = config
            .civs
            .iter()
            .map(|c| CivState {
                name: c.name.clone(),
                worldview: c.worldview,
                resources: c.resources,
                last_matrix: c.matrix,
                alive: true,
                eliminated_round: None,
                discovered: BTreeSet::new(),
                pending_offers: BTreeSet::new(),
                outgoing_offers: BTreeMap::new(),
                friendly_from: BTreeSet::new(),
                under_attack_by: BTreeSet::new(),
            })
            .collect();
        let stick = config
            .civs
            .iter()
            .map(|c| (c.name.clone(), Vec::new()))
            .collect();

        Ok(Universe {
            secretary: Secretary::new(config.secretary.clone()),
            civs,
            agents,
            pending: Vec::new(),
            pacts: BTreeSet::new(),
            stick,
            transcript: Vec::new(),
            next_round: 1,
            config,
        })
    }

    pub fn config(&self) -> &UniverseConfig {
        &self.config
    }

    pub fn stick(&self) -> &Stick {
        &self.stick
    }

    pub fn transcript(&self) -> &[TranscriptEntry] {
        &self.transcript
    }

    /// Rounds fully executed so far.
    pub fn rounds_executed(&self) -> u32 {
        self.next_round - 1
    }

    pub fn is_alive(&self, name: &str) -> bool {
        self.civs.iter().any(|c| c.name == name && c.alive)
    }

    fn index_of(&self, name: &str) -> Option<usize> {
        self.civs.iter().position(|c| c.name == name)
    }

    /// Runs rounds until the configured horizon or until nobody is left.
    pub fn run(&mut self) -> Result<(), EngineError> {
        while self.next_round <= self.config.rounds && self.civs.iter().any(|c| c.alive) {
            self.step_round()?;
        }
        Ok(())
    }

    /// What `observer` can see of `observed` while deciding in `round`:
    /// history up to `round - distance`, plus the live state when the
    /// effective distance is zero.
    pub fn visible_history(&self, observer: &str, observed: &str, round: u32) -> Visibility {
        let (Some(i), Some(j)) = (self.index_of(observer), self.index_of(observed)) else {
            return Visibility::NotDiscovered;
        };
        let d = self.config.effective_distance(i, j);
        if round < d && !self.civs[i].discovered.contains(observed) {
            return Visibility::NotDiscovered;
        }
        let records = self.visible_records(i, j, round);
        let current = if d == 0 && self.civs[j].alive {
            Some(CurrentView {
                resources: self.civs[j].resources,
                worldview: self.civs[j].worldview,
            })
        } else {
            None
        };
        Visibility::Visible { records, current }
    }

    fn visible_records(&self, i: usize, j: usize, round: u32) -> Vec<StickRecord> {
        let d = self.config.effective_distance(i, j);
        // During round r the archive holds rounds 1..r-1; light that left
        // j in round k arrives here in round k + d.
        let horizon = round.saturating_sub(d.max(1));
        self.stick[&self.civs[j].name]
            .iter()
            .take_while(|r| r.round <= horizon)
            .cloned()
            .collect()
    }

    fn build_observation(&self, i: usize, round: u32, frozen: &[FrozenView]) -> Observation {
        let mut others = BTreeMap::new();
        for name in &self.civs[i].discovered {
            let Some(j) = self.index_of(name) else {
                continue;
            };
            let d = self.config.effective_distance(i, j);
            let records = self.visible_records(i, j, round);
            let current = if d == 0 && frozen[j].alive {
                Some(CurrentView {
                    resources: frozen[j].resources,
                    worldview: frozen[j].worldview,
                })
            } else {
                None
            };
            let staleness = if current.is_some() {
                0
            } else {
                round - records.last().map(|r| r.round).unwrap_or(0)
            };
            let known_eliminated =
                excerpt_shows_elimination(&records) || (d == 0 && !frozen[j].alive);
            others.insert(
                name.clone(),
                ObservedCiv {
                    records,
                    current,
                    staleness,
                    known_eliminated,
                },
            );
        }

        let active_pacts = self
            .pacts
            .iter()
            .filter_map(|(a, b)| {
                if a == &self.civs[i].name {
                    Some(b.clone())
                } else if b == &self.civs[i].name {
                    Some(a.clone())
                } else {
                    None
                }
            })
            .collect();

        Observation {
            round,
            worldview: self.civs[i].worldview,
            resources: self.civs[i].resources,
            self_history: self.stick[&self.civs[i].name].clone(),
            others,
            pending_offers: self.civs[i].pending_offers.clone(),
            active_pacts,
            under_attack_by: self.civs[i].under_attack_by.clone(),
            friendly_from: self.civs[i].friendly_from.clone(),
            previous_rejection: None,
        }
    }

    fn snapshot(&self, i: usize) -> CivSnapshot {
        let civ = &self.civs[i];
        CivSnapshot {
            name: civ.name.clone(),
            worldview: civ.worldview,
            resources: civ.resources,
            last_matrix: civ.last_matrix,
            discovered: civ.discovered.clone(),
            cooperation_active: self
                .pacts
                .iter()
                .any(|(a, b)| a == &civ.name || b == &civ.name),
            pending_offers: civ.pending_offers.clone(),
        }
    }

    /// The best technology level `observer` has seen of `observed` by
    /// `round`, used for the one-time merge when a pact forms.
    fn observed_technology(&self, i: usize, j: usize, round: u32) -> Option<f64> {
        let d = self.config.effective_distance(i, j);
        if d == 0 {
            return Some(self.civs[j].resources.technology());
        }
        self.visible_records(i, j, round)
            .last()
            .map(|r| r.resources.technology())
    }

    pub fn step_round(&mut self) -> Result<(), EngineError> {
        let round = self.next_round;
        let n = self.civs.len();
        let mut events: Vec<Vec<StickEvent>> = vec![Vec::new(); n];

        // Phase 1: discovery by light travel, then effect delivery.
        for i in 0..n {
            for j in 0..n {
                if i != j && round >= self.config.effective_distance(i, j) {
                    let name = self.civs[j].name.clone();
                    self.civs[i].discovered.insert(name);
                }
            }
        }

        let due: Vec<PendingEffect> = {
            let (due, rest): (Vec<_>, Vec<_>) = std::mem::take(&mut self.pending)
                .into_iter()
                .partition(|e| e.deliver_at <= round && !matches!(e.kind, EffectKind::WarArrival));
            self.pending = rest;
            due
        };
        let mut delivered_signals: Vec<(String, String, PublicAction, u32)> = Vec::new();
        for effect in due {
            let Some(to) = self.index_of(&effect.to) else {
                continue;
            };
            if !self.civs[to].alive {
                continue;
            }
            match effect.kind {
                EffectKind::Signal(action) => {
                    self.civs[to].discovered.insert(effect.from.clone());
                    match &action {
                        PublicAction::ExpressFriendliness { .. } => {
                            self.civs[to].friendly_from.insert(effect.from.clone());
                        }
                        PublicAction::InitiateCooperation { .. } => {
                            self.civs[to].friendly_from.insert(effect.from.clone());
                            self.civs[to].pending_offers.insert(effect.from.clone());
                        }
                        PublicAction::RejectCooperation { .. } => {}
                        _ => {}
                    }
                    delivered_signals.push((effect.from, effect.to, action, effect.emitted));
                }
                EffectKind::Exposure => {
                    self.civs[to].discovered.insert(effect.from.clone());
                    events[to].push(StickEvent::Exposure {
                        aggressor: effect.from.clone(),
                    });
                }
                EffectKind::WarArrival => unreachable!("wars are delivered in phase 4"),
            }
        }

        // Strikes from earlier rounds that land today are detected as the
        // round opens; the defender can posture but its matrix only acts
        // next round.
        for effect in &self.pending {
            if effect.deliver_at <= round && matches!(effect.kind, EffectKind::WarArrival) {
                if let Some(def) = self.index_of(&effect.to) {
                    if self.civs[def].alive {
                        self.civs[def].under_attack_by.insert(effect.from.clone());
                        self.civs[def].discovered.insert(effect.from.clone());
                    }
                }
            }
        }

        // Phase 2: decisions against a start-of-round freeze.
        let frozen: Vec<FrozenView> = self
            .civs
            .iter()
            .map(|c| FrozenView {
                resources: c.resources,
                worldview: c.worldview,
                alive: c.alive,
            })
            .collect();

        let mut decided: Vec<Option<ValidatedDecision>> = (0..n).map(|_| None).collect();
        for i in 0..n {
            if !self.civs[i].alive {
                continue;
            }
            let obs = self.build_observation(i, round, &frozen);
            let snapshot = self.snapshot(i);
            let validated = self
                .secretary
                .validate_with_retries(
                    &mut self.agents[i],
                    &obs,
                    &snapshot,
                    self.config.max_validation_attempts,
                )
                .map_err(|source| EngineError::Agent {
                    civ: self.civs[i].name.clone(),
                    round,
                    source,
                })?;
            self.transcript.extend(self.agents[i].drain_transcript());

            if validated.defaulted {
                events[i].push(StickEvent::DefaultApplied {
                    attempts: validated.attempts,
                    retained_matrix_valid: validated.retained_matrix_valid,
                });
            }
            self.civs[i].worldview = validated.decision.worldview;
            for action in &validated.decision.public_actions {
                match action {
                    PublicAction::InitiateCooperation { target }
                    | PublicAction::RejectCooperation { source: target } => {
                        self.civs[i].pending_offers.remove(target);
                    }
                    _ => {}
                }
            }
            decided[i] = Some(validated);
        }

        // Phase 3: enqueue travelling effects for approved actions.
        for i in 0..n {
            let Some(validated) = &decided[i] else { continue };
            for action in &validated.decision.public_actions {
                let Some(target) = action.counterparty() else {
                    continue;
                };
                let Some(j) = self.index_of(target) else {
                    continue;
                };
                let from = self.civs[i].name.clone();
                let to = target.to_string();
                match action {
                    PublicAction::LaunchAnnihilationWar { .. } => {
                        self.pending.push(PendingEffect {
                            kind: EffectKind::WarArrival,
                            from,
                            to,
                            emitted: round,
                            deliver_at: round + self.config.war_travel_rounds(i, j),
                        });
                    }
                    _ => {
                        if let PublicAction::InitiateCooperation { .. } = action {
                            self.civs[i]
                                .outgoing_offers
                                .entry(to.clone())
                                .or_insert(round);
                        }
                        self.pending.push(PendingEffect {
                            kind: EffectKind::Signal(action.clone()),
                            from,
                            to,
                            emitted: round,
                            deliver_at: round + self.config.effective_distance(i, j),
                        });
                    }
                }
            }
        }

        // Phase 4: resolve strikes due this round.
        let mut arrivals: Vec<PendingEffect> = {
            let (wars, rest): (Vec<_>, Vec<_>) = std::mem::take(&mut self.pending)
                .into_iter()
                .partition(|e| e.deliver_at <= round && matches!(e.kind, EffectKind::WarArrival));
            self.pending = rest;
            wars
        };
        arrivals.sort_by_key(|w| (self.index_of(&w.from), w.emitted));
        let mut wars_this_round: Vec<(String, String)> = Vec::new();
        for war in arrivals {
            self.resolve_war(&war, round, &mut events, &mut wars_this_round)?;
        }

        // Phase 5: pact bookkeeping from this round's deliveries.
        for (from, to, action, emitted) in &delivered_signals {
            let (Some(s), Some(t)) = (self.index_of(from), self.index_of(to)) else {
                continue;
            };
            match action {
                PublicAction::ExpressFriendliness { .. }
                | PublicAction::InitiateCooperation { .. } => {
                    // A pact forms when this signal is a causal response
                    // to an open offer from the receiver: emitted no
                    // earlier than the sender's receipt of that offer.
                    let Some(&offer_sent) = self.civs[t].outgoing_offers.get(from) else {
                        continue;
                    };
                    let offer_receipt =
                        (offer_sent + self.config.effective_distance(t, s)).max(offer_sent + 1);
                    if *emitted >= offer_receipt
                        && self.civs[s].alive
                        && self.civs[t].alive
                        && !wars_this_round.contains(&pact_key(from, to))
                    {
                        self.form_pact(s, t, round, &mut events)?;
                    }
                }
                PublicAction::RejectCooperation { .. } => {
                    self.pacts.remove(&pact_key(from, to));
                    self.civs[t].outgoing_offers.remove(from);
                }
                _ => {}
            }
        }
        for pair in &wars_this_round {
            self.pacts.remove(pair);
        }
        let alive_names: BTreeSet<String> = self
            .civs
            .iter()
            .filter(|c| c.alive)
            .map(|c| c.name.clone())
            .collect();
        self.pacts
            .retain(|(a, b)| alive_names.contains(a) && alive_names.contains(b));

        // Phase 6: approved matrices evolve the survivors.
        for i in 0..n {
            if !self.civs[i].alive {
                continue;
            }
            let Some(validated) = &decided[i] else { continue };
            let matrix = validated.decision.matrix;
            self.civs[i].resources =
                apply_transfer(&matrix, &self.civs[i].resources).map_err(|source| {
                    EngineError::Overflow {
                        civ: self.civs[i].name.clone(),
                        round,
                        source,
                    }
                })?;
            self.civs[i].last_matrix = matrix;
        }

        // Phase 7: archive the round.
        for i in 0..n {
            let Some(validated) = decided[i].take() else {
                continue;
            };
            let decision = validated.decision;
            let record = StickRecord {
                round,
                resources: self.civs[i].resources,
                matrix_diag: decision.matrix.diagonal(),
                worldview: decision.worldview,
                public_actions: decision.public_actions,
                private_action: decision.private_action,
                events: std::mem::take(&mut events[i]),
            };
            self.stick
                .get_mut(&self.civs[i].name)
                .expect("every civ has a stick")
                .push(record);
        }

        self.next_round += 1;
        Ok(())
    }

    fn resolve_war(
        &mut self,
        war: &PendingEffect,
        round: u32,
        events: &mut [Vec<StickEvent>],
        wars_this_round: &mut Vec<(String, String)>,
    ) -> Result<(), EngineError> {
        let (Some(atk), Some(def)) = (self.index_of(&war.from), self.index_of(&war.to)) else {
            return Ok(());
        };
        if !self.civs[atk].alive {
            if self.civs[def].alive {
                events[def].push(StickEvent::WarAborted {
                    attacker: war.from.clone(),
                    defender: war.to.clone(),
                    reason: "attacker already eliminated".to_string(),
                });
            }
            return Ok(());
        }
        if !self.civs[def].alive {
            events[atk].push(StickEvent::WarAborted {
                attacker: war.from.clone(),
                defender: war.to.clone(),
                reason: "defender already eliminated".to_string(),
            });
            return Ok(());
        }

        self.civs[def].under_attack_by.insert(war.from.clone());
        self.civs[def].discovered.insert(war.from.clone());

        // Both militaries are the defenders' and attackers' current
        // values at arrival, not the attacker's stale observation.
        let attacker_military = self.civs[atk].resources.military();
        let defender_military = self.civs[def].resources.military();
        let outcome = war_outcome(attacker_military, defender_military);
        let (attacker_after, defender_after) =
            lanchester_attrition(attacker_military, defender_military);

        let overflow = |civ: &str, source: ModelError| EngineError::Overflow {
            civ: civ.to_string(),
            round,
            source,
        };
        self.civs[atk].resources = self.civs[atk]
            .resources
            .with(ResourceKind::MilitaryCapability, attacker_after)
            .map_err(|e| overflow(&war.from, e))?;
        self.civs[def].resources = self.civs[def]
            .resources
            .with(ResourceKind::MilitaryCapability, defender_after)
            .map_err(|e| overflow(&war.to, e))?;

        let loot = if outcome == WarResult::Success {
            let loot = war_loot(&self.civs[def].resources);
            let mut remainder = self.civs[def].resources.values();
            for (k, taken) in loot.values().iter().enumerate() {
                remainder[k] -= taken;
            }
            self.civs[def].resources =
                ResourceVector::new(remainder).map_err(|e| overflow(&war.to, e))?;
            self.civs[atk].resources = self.civs[atk]
                .resources
                .add(&loot)
                .map_err(|e| overflow(&war.from, e))?;
            self.civs[def].alive = false;
            self.civs[def].eliminated_round = Some(round);
            events[def].push(StickEvent::Eliminated {
                by: war.from.clone(),
            });
            loot
        } else {
            ResourceVector::zero()
        };

        let resolved = StickEvent::WarResolved {
            attacker: war.from.clone(),
            defender: war.to.clone(),
            outcome,
            attacker_military_after: attacker_after,
            defender_military_after: defender_after,
            loot: loot.values(),
        };
        events[atk].push(resolved.clone());
        events[def].push(resolved);
        wars_this_round.push(pact_key(&war.from, &war.to));

        // The strike broadcasts the aggressor's existence to the galaxy.
        for k in 0..self.civs.len() {
            if k == atk || k == def {
                continue;
            }
            self.pending.push(PendingEffect {
                kind: EffectKind::Exposure,
                from: war.from.clone(),
                to: self.civs[k].name.clone(),
                emitted: round,
                deliver_at: round + self.config.effective_distance(k, atk),
            });
        }
        Ok(())
    }

    fn form_pact(
        &mut self,
        s: usize,
        t: usize,
        round: u32,
        events: &mut [Vec<StickEvent>],
    ) -> Result<(), EngineError> {
        let key = pact_key(&self.civs[s].name, &self.civs[t].name);
        if !self.pacts.insert(key) {
            return Ok(());
        }
        // One-time technology merge: each party rises to the best level
        // it has observed of the other.
        for (x, y) in [(s, t), (t, s)] {
            let observed = self.observed_technology(x, y, round).unwrap_or(0.0);
            let merged = self.civs[x].resources.technology().max(observed);
            self.civs[x].resources = self.civs[x]
                .resources
                .with(ResourceKind::TechnologyDevelopment, merged)
                .map_err(|source| EngineError::Overflow {
                    civ: self.civs[x].name.clone(),
                    round,
                    source,
                })?;
        }
        let (a, b) = (self.civs[s].name.clone(), self.civs[t].name.clone());
        self.civs[s].outgoing_offers.remove(&b);
        self.civs[t].outgoing_offers.remove(&a);
        self.civs[s].pending_offers.remove(&b);
        self.civs[t].pending_offers.remove(&a);
        events[s].push(StickEvent::PactFormed { with: b });
        events[t].push(StickEvent::PactFormed { with: a });
        Ok(())
    }

    /// End-of-run roll-up for summary files.
    pub fn summary(&self) -> RunSummary {
        let mut wars_resolved = 0;
        let mut pacts_formed = 0;
        for (name, records) in &self.stick {
            for record in records {
                for event in &record.events {
                    match event {
                        // Counted once, on the attacker's record.
                        StickEvent::WarResolved { attacker, .. } if attacker == name => {
                            wars_resolved += 1;
                        }
                        StickEvent::PactFormed { .. } => pacts_formed += 1,
                        _ => {}
                    }
                }
            }
        }
        RunSummary {
            seed: self.config.seed,
            rounds_requested: self.config.rounds,
            rounds_executed: self.rounds_executed(),
            wars_resolved,
            pacts_formed: pacts_formed / 2,
            civs: self
                .civs
                .iter()
                .map(|c| CivSummary {
                    name: c.name.clone(),
                    worldview: c.worldview,
                    alive: c.alive,
                    eliminated_round: c.eliminated_round,
                    resources: c.resources,
                })
                .collect(),
        }
    }
}

#[derive(Debug, Clone, Serialize)]
pub struct RunSummary {
    pub seed: u64,
    pub rounds_requested: u32,
    pub rounds_executed: u32,
    pub wars_resolved: u32,
    pub pacts_formed: u32,
    pub civs: Vec<CivSummary>,
}

#[derive(Debug, Clone, Serialize)]
pub struct CivSummary {
    pub name: String,
    pub worldview: Worldview,
    pub alive: bool,
    pub eliminated_round: Option<u32>,
    pub resources: ResourceVector,
}
