//! Domain types shared by the whole simulator: the five-resource state
//! vector, the diagonal transfer matrix that evolves it, worldviews,
//! actions and the per-round decision record.
//!
//! Everything in this module is an immutable value; all operations are
//! pure functions and safe to call from any thread.

mod combat;
mod constraints;

pub use combat::{lanchester_attrition, war_loot, war_outcome, WarResult};
pub use constraints::{
    check_matrix, matrix_regime, ConstraintContext, ConstraintRegime, MatrixViolation,
    ValidationResult,
};

use serde::{Deserialize, Serialize};
use std::fmt;
use thiserror::Error;

/// Number of resource kinds; fixed by the model.
pub const RESOURCE_COUNT: usize = 5;

/// Tolerance applied to every numeric comparison in constraint and combat
/// predicates.
pub const EPSILON: f64 = 1e-9;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum ModelError {
    #[error("resource {kind} is {value}, must be finite and non-negative")]
    InvalidResource { kind: ResourceKind, value: f64 },
    #[error("transfer matrix diagonal entry {kind} is {value}, must be finite and positive")]
    InvalidDiagonal { kind: ResourceKind, value: f64 },
    #[error("resource {kind} overflowed to a non-finite value (runaway growth)")]
    Overflow { kind: ResourceKind },
}

/// The five civilization resources, in canonical index order. This order
/// is used everywhere: matrix rows, serialization and prompt rendering.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ResourceKind {
    MilitaryCapability,
    TechnologyDevelopment,
    ProductionCapability,
    Consumption,
    Storage,
}

impl ResourceKind {
    pub const ALL: [ResourceKind; RESOURCE_COUNT] = [
        ResourceKind::MilitaryCapability,
        ResourceKind::TechnologyDevelopment,
        ResourceKind::ProductionCapability,
        ResourceKind::Consumption,
        ResourceKind::Storage,
    ];

    pub fn index(self) -> usize {
        self as usize
    }

    pub fn name(self) -> &'static str {
        match self {
            ResourceKind::MilitaryCapability => "military_capability",
            ResourceKind::TechnologyDevelopment => "technology_development",
            ResourceKind::ProductionCapability => "production_capability",
            ResourceKind::Consumption => "consumption",
            ResourceKind::Storage => "storage",
        }
    }
}

impl fmt::Display for ResourceKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

/// Non-negative, finite resource levels indexed by [`ResourceKind`].
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "[f64; 5]", into = "[f64; 5]")]
pub struct ResourceVector([f64; RESOURCE_COUNT]);

impl ResourceVector {
    pub fn new(values: [f64; RESOURCE_COUNT]) -> Result<Self, ModelError> {
        for (kind, &value) in ResourceKind::ALL.iter().zip(values.iter()) {
            if !value.is_finite() || value < 0.0 {
                return Err(ModelError::InvalidResource { kind: *kind, value });
            }
        }
        Ok(ResourceVector(values))
    }

    pub fn zero() -> Self {
        ResourceVector([0.0; RESOURCE_COUNT])
    }

    pub fn get(&self, kind: ResourceKind) -> f64 {
        self.0[kind.index()]
    }

    pub fn military(&self) -> f64 {
        self.get(ResourceKind::MilitaryCapability)
    }

    pub fn technology(&self) -> f64 {
        self.get(ResourceKind::TechnologyDevelopment)
    }

    pub fn production(&self) -> f64 {
        self.get(ResourceKind::ProductionCapability)
    }

    pub fn values(&self) -> [f64; RESOURCE_COUNT] {
        self.0
    }

    /// Returns a copy with `kind` replaced by `value`.
    pub fn with(&self, kind: ResourceKind, value: f64) -> Result<Self, ModelError> {
        let mut values = self.0;
        values[kind.index()] = value;
        ResourceVector::new(values)
    }

    /// Elementwise sum, used when war loot is credited to the victor.
    pub fn add(&self, other: &ResourceVector) -> Result<Self, ModelError> {
        let mut values = self.0;
        for (v, o) in values.iter_mut().zip(other.0.iter()) {
            *v += o;
        }
        ResourceVector::new(values)
    }
}

impl TryFrom<[f64; RESOURCE_COUNT]> for ResourceVector {
    type Error = ModelError;

    fn try_from(values: [f64; RESOURCE_COUNT]) -> Result<Self, ModelError> {
        ResourceVector::new(values)
    }
}

impl From<ResourceVector> for [f64; RESOURCE_COUNT] {
    fn from(v: ResourceVector) -> Self {
        v.0
    }
}

/// A 5x5 diagonal growth operator. Only the diagonal is stored; the
/// off-diagonal is identically zero by construction.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "[f64; 5]", into = "[f64; 5]")]
pub struct TransferMatrix {
    diag: [f64; RESOURCE_COUNT],
}

impl TransferMatrix {
    pub fn from_diagonal(diag: [f64; RESOURCE_COUNT]) -> Result<Self, ModelError> {
        for (kind, &value) in ResourceKind::ALL.iter().zip(diag.iter()) {
            if !value.is_finite() || value <= 0.0 {
                return Err(ModelError::InvalidDiagonal { kind: *kind, value });
            }
        }
        Ok(TransferMatrix { diag })
    }

    pub fn diagonal(&self) -> [f64; RESOURCE_COUNT] {
        self.diag
    }

    pub fn entry(&self, kind: ResourceKind) -> f64 {
        self.diag[kind.index()]
    }

    pub fn diagonal_sum(&self) -> f64 {
        self.diag.iter().sum()
    }
}

impl TryFrom<[f64; RESOURCE_COUNT]> for TransferMatrix {
    type Error = ModelError;

    fn try_from(diag: [f64; RESOURCE_COUNT]) -> Result<Self, ModelError> {
        TransferMatrix::from_diagonal(diag)
    }
}

impl From<TransferMatrix> for [f64; RESOURCE_COUNT] {
    fn from(m: TransferMatrix) -> Self {
        m.diag
    }
}

/// One round of multiplicative resource evolution: `result[k] = diag[k] * v[k]`.
///
/// Overflow to a non-finite value is reported as an error so the engine can
/// abort the run with a diagnostic instead of propagating infinities.
pub fn apply_transfer(
    matrix: &TransferMatrix,
    v: &ResourceVector,
) -> Result<ResourceVector, ModelError> {
    let mut values = v.values();
    for (i, value) in values.iter_mut().enumerate() {
        *value *= matrix.diag[i];
        if !value.is_finite() {
            return Err(ModelError::Overflow {
                kind: ResourceKind::ALL[i],
            });
        }
    }
    ResourceVector::new(values)
}

/// A civilization's guiding ideology. Canonical names come from the
/// simulation vocabulary (`pacifism`, `militarism`, `isolationism`);
/// the prompt-facing aliases `friendly_cooperation` and `concealment`
/// are accepted on input and used when rendering decision text.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Worldview {
    Pacifism,
    Militarism,
    Isolationism,
}

impl Worldview {
    pub const ALL: [Worldview; 3] = [
        Worldview::Pacifism,
        Worldview::Militarism,
        Worldview::Isolationism,
    ];

    /// Case-insensitive parse accepting both canonical names and aliases.
    pub fn parse(s: &str) -> Option<Worldview> {
        match s.trim().trim_end_matches('.').to_ascii_lowercase().as_str() {
            "pacifism" | "friendly_cooperation" | "friendly cooperation" => {
                Some(Worldview::Pacifism)
            }
            "militarism" => Some(Worldview::Militarism),
            "isolationism" | "concealment" => Some(Worldview::Isolationism),
            _ => None,
        }
    }

    pub fn canonical_name(self) -> &'static str {
        match self {
            Worldview::Pacifism => "pacifism",
            Worldview::Militarism => "militarism",
            Worldview::Isolationism => "isolationism",
        }
    }

    /// The name used in the agent-facing decision template.
    pub fn alias(self) -> &'static str {
        match self {
            Worldview::Pacifism => "friendly_cooperation",
            Worldview::Militarism => "militarism",
            Worldview::Isolationism => "concealment",
        }
    }
}

impl fmt::Display for Worldview {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.canonical_name())
    }
}

/// Diplomacy directed at other civilizations. Targets name civilizations
/// the actor has discovered; that admissibility rule is enforced by the
/// secretary, not by this type.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(tag = "action", rename_all = "snake_case")]
pub enum PublicAction {
    ExpressFriendliness { target: String },
    InitiateCooperation { target: String },
    LaunchAnnihilationWar { target: String },
    RejectCooperation { source: String },
    DoNothing,
}

impl PublicAction {
    /// The civilization this action is directed at, if any.
    pub fn counterparty(&self) -> Option<&str> {
        match self {
            PublicAction::ExpressFriendliness { target }
            | PublicAction::InitiateCooperation { target }
            | PublicAction::LaunchAnnihilationWar { target } => Some(target),
            PublicAction::RejectCooperation { source } => Some(source),
            PublicAction::DoNothing => None,
        }
    }

    pub fn is_war(&self) -> bool {
        matches!(self, PublicAction::LaunchAnnihilationWar { .. })
    }
}

/// Internal development choices invisible to other civilizations.
///
/// Worldview changes are not a separate variant: they are expressed by the
/// [`Decision::worldview`] field differing from the previous round.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum PrivateAction {
    MobilizeForWar,
    DoNothing,
}

/// One round's validated agent output.
///
/// When `discovered_names` is non-empty the template requires at least one
/// public action; the secretary rejects decisions that omit one.
#[derive(Debug, Clone, PartialEq)]
pub struct Decision {
    pub worldview: Worldview,
    pub worldview_reason: String,
    pub matrix: TransferMatrix,
    pub matrix_reason: String,
    pub public_actions: Vec<PublicAction>,
    pub private_action: PrivateAction,
    pub action_reason: String,
    pub other_info: String,
    pub discovered_names: Vec<String>,
}
