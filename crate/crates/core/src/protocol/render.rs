//! Renders a [`Decision`] back into the bracketed-field template, the
//! inverse of the parser: `parse_decision(render_decision(d)) == d`.

use super::RawDecisionText;
use crate::model::{Decision, PrivateAction, PublicAction, TransferMatrix, RESOURCE_COUNT};

/// The 5x5 matrix block with explicit zero off-diagonals, rows separated
/// by `;` and wrapped in brackets.
pub fn render_matrix_block(matrix: &TransferMatrix) -> String {
    let diag = matrix.diagonal();
    let rows: Vec<String> = (0..RESOURCE_COUNT)
        .map(|i| {
            let cells: Vec<String> = (0..RESOURCE_COUNT)
                .map(|j| {
                    if i == j {
                        format!("{:?}", diag[i])
                    } else {
                        "0.0".to_string()
                    }
                })
                .collect();
            cells.join(", ")
        })
        .collect();
    format!("[{}]", rows.join(";\n "))
}

pub fn render_public_action(action: &PublicAction) -> String {
    match action {
        PublicAction::ExpressFriendliness { target } => {
            format!("express_friendliness towards civilization {target}")
        }
        PublicAction::InitiateCooperation { target } => {
            format!("initiate_cooperation towards civilization {target}")
        }
        PublicAction::LaunchAnnihilationWar { target } => {
            format!("launch_annihilation_war towards civilization {target}")
        }
        PublicAction::RejectCooperation { source } => {
            format!("reject_cooperation from civilization {source}")
        }
        PublicAction::DoNothing => "Do Nothing".to_string(),
    }
}

pub fn render_private_action(action: PrivateAction) -> &'static str {
    match action {
        PrivateAction::MobilizeForWar => "War mobilization",
        PrivateAction::DoNothing => "Do Nothing",
    }
}

/// Fills the full response template. The worldview is emitted in its
/// prompt-facing alias form.
pub fn render_decision(decision: &Decision) -> RawDecisionText {
    let public = decision
        .public_actions
        .iter()
        .map(render_public_action)
        .collect::<Vec<_>>()
        .join("\n");
    let text = format!(
        "[Political System: ] {}\n\
         [Political System Reason: ] {}\n\
         [Transfer Matrix: ] \n\
         {}\n\
         [Transfer Matrix Reason: ] {}\n\
         [Public Action: ] {}\n\
         [Private Action: ] {}\n\
         [Action Reason: ] {}\n\
         [Other Information: ] {}\n\
         [Discovered Civilization: ] {}\n",
        decision.worldview.alias(),
        decision.worldview_reason,
        render_matrix_block(&decision.matrix),
        decision.matrix_reason,
        public,
        render_private_action(decision.private_action),
        decision.action_reason,
        decision.other_info,
        decision.discovered_names.join(", "),
    );
    RawDecisionText::new(text)
}
