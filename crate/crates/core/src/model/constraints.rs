//! Action-conditional validity rules for transfer matrices.
//!
//! Which rule set applies depends on the round's actions: mobilizing for
//! war buys a higher military coefficient at the price of an exact
//! diagonal sum, while cooperation raises the sum budget but caps the
//! military coefficient. Element bounds are inclusive at 1.0 and 2.5.

use super::{PrivateAction, PublicAction, ResourceKind, TransferMatrix, EPSILON};
use serde::{Deserialize, Serialize};
use std::fmt;

/// The actions that decide which matrix rule set applies this round.
#[derive(Debug, Clone, PartialEq)]
pub struct ConstraintContext {
    pub private_action: PrivateAction,
    pub public_actions: Vec<PublicAction>,
    /// True when the actor is in an accepted cooperation pact this round.
    pub cooperation_active: bool,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ConstraintRegime {
    Default,
    Mobilization,
    Cooperation,
}

impl fmt::Display for ConstraintRegime {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let name = match self {
            ConstraintRegime::Default => "default",
            ConstraintRegime::Mobilization => "mobilization",
            ConstraintRegime::Cooperation => "cooperation",
        };
        f.write_str(name)
    }
}

/// Selects the rule set for the given actions. Mobilization wins when the
/// mobilization and cooperation regimes both apply: the two military
/// bounds are contradictory and war footing dominates, so the cooperation
/// privilege is forfeited for that round.
pub fn matrix_regime(ctx: &ConstraintContext) -> ConstraintRegime {
    if ctx.private_action == PrivateAction::MobilizeForWar {
        return ConstraintRegime::Mobilization;
    }
    let initiating = ctx
        .public_actions
        .iter()
        .any(|a| matches!(a, PublicAction::InitiateCooperation { .. }));
    if ctx.cooperation_active || initiating {
        return ConstraintRegime::Cooperation;
    }
    ConstraintRegime::Default
}

/// Why a matrix failed its regime check. The `Display` strings are the
/// stable rejection vocabulary surfaced to agents and logs.
#[derive(Debug, Clone, PartialEq)]
pub enum MatrixViolation {
    EntryBelowMin { kind: ResourceKind, value: f64 },
    EntryAboveMax { kind: ResourceKind, value: f64, max: f64 },
    MilitaryNotBelow { value: f64, bound: f64 },
    SumExceeds { sum: f64, max: f64 },
    SumNotExact { sum: f64, required: f64 },
}

impl fmt::Display for MatrixViolation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            MatrixViolation::EntryBelowMin { kind, value } => {
                write!(f, "{kind} coefficient {value:.4} is below the minimum 1.0")
            }
            MatrixViolation::EntryAboveMax { kind, value, max } => {
                write!(f, "{kind} coefficient {value:.4} exceeds the maximum {max:?}")
            }
            MatrixViolation::MilitaryNotBelow { value, bound } => write!(
                f,
                "military_capability coefficient {value:.4} must be below {bound:?} under cooperation"
            ),
            MatrixViolation::SumExceeds { sum, max } => {
                write!(f, "diagonal sum {sum:.4} exceeds the maximum {max:?}")
            }
            MatrixViolation::SumNotExact { sum, required } => write!(
                f,
                "diagonal sum {sum:.4} must equal {required:?} under mobilization"
            ),
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub enum ValidationResult {
    Accept,
    Reject(MatrixViolation),
}

impl ValidationResult {
    pub fn is_accept(&self) -> bool {
        matches!(self, ValidationResult::Accept)
    }
}

/// Checks a matrix against one regime's rules. Rejection is a value, not
/// an error; every comparison carries the [`EPSILON`] tolerance.
pub fn check_matrix(matrix: &TransferMatrix, regime: ConstraintRegime) -> ValidationResult {
    let diag = matrix.diagonal();
    let sum = matrix.diagonal_sum();

    for (kind, &value) in ResourceKind::ALL.iter().zip(diag.iter()) {
        if value < 1.0 - EPSILON {
            return ValidationResult::Reject(MatrixViolation::EntryBelowMin {
                kind: *kind,
                value,
            });
        }
        let military = *kind == ResourceKind::MilitaryCapability;
        let max = match regime {
            ConstraintRegime::Mobilization if military => 3.5,
            ConstraintRegime::Cooperation if military => {
                if value >= 1.6 - EPSILON {
                    return ValidationResult::Reject(MatrixViolation::MilitaryNotBelow {
                        value,
                        bound: 1.6,
                    });
                }
                continue;
            }
            _ => 2.5,
        };
        if value > max + EPSILON {
            return ValidationResult::Reject(MatrixViolation::EntryAboveMax {
                kind: *kind,
                value,
                max,
            });
        }
    }

    match regime {
        ConstraintRegime::Default => {
            if sum > 9.0 + EPSILON {
                return ValidationResult::Reject(MatrixViolation::SumExceeds { sum, max: 9.0 });
            }
        }
        ConstraintRegime::Mobilization => {
            if (sum - 9.0).abs() > EPSILON {
                return ValidationResult::Reject(MatrixViolation::SumNotExact {
                    sum,
                    required: 9.0,
                });
            }
        }
        ConstraintRegime::Cooperation => {
            if sum > 10.0 + EPSILON {
                return ValidationResult::Reject(MatrixViolation::SumExceeds { sum, max: 10.0 });
            }
        }
    }

    ValidationResult::Accept
}
