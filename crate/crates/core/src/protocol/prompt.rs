//! Prompt builders for chat-completion agents and the optional
//! LLM-backed secretary. The templates are fixed text with three
//! placeholders each; history excerpts are rendered as round-labelled
//! records, most recent last.

use super::render::{render_private_action, render_public_action};
use crate::model::{Decision, ResourceKind, ResourceVector, Worldview};
use crate::stick::StickRecord;

pub const COSMO_PROMPT_TEMPLATE: &str = include_str!("cosmo_prompt.txt");
pub const SECRETARY_PROMPT_TEMPLATE: &str = include_str!("secretary_prompt.txt");

/// Everything needed to render one civilization's decision prompt.
/// `discovered` pairs each known civilization's name with its already
/// delay-truncated history excerpt; visibility is enforced upstream.
#[derive(Debug, Clone, PartialEq)]
pub struct PromptContext {
    pub history: String,
    pub worldview: Worldview,
    pub discovered: Vec<(String, String)>,
    pub round: u32,
}

/// Renders archived records (and optionally the current, not yet archived
/// state) as one line per round, most recent last.
pub fn render_history(
    records: &[StickRecord],
    current: Option<(&ResourceVector, Worldview)>,
) -> String {
    let mut lines: Vec<String> = records.iter().map(render_record_line).collect();
    if let Some((resources, worldview)) = current {
        lines.push(format!(
            "now: {}; political system: {}",
            render_resources(resources),
            worldview.alias()
        ));
    }
    if lines.is_empty() {
        return "(no data yet)".to_string();
    }
    lines.join("\n")
}

fn render_resources(resources: &ResourceVector) -> String {
    let parts: Vec<String> = ResourceKind::ALL
        .iter()
        .map(|k| format!("{}={:?}", k.name(), resources.get(*k)))
        .collect();
    format!("resources [{}]", parts.join(", "))
}

fn render_record_line(record: &StickRecord) -> String {
    let public = if record.public_actions.is_empty() {
        "none".to_string()
    } else {
        record
            .public_actions
            .iter()
            .map(render_public_action)
            .collect::<Vec<_>>()
            .join(" / ")
    };
    format!(
        "round {}: {}; political system: {}; public: {}; private: {}",
        record.round,
        render_resources(&record.resources),
        record.worldview.alias(),
        public,
        render_private_action(record.private_action),
    )
}

/// Builds the full decision prompt by substituting the history, the
/// current political system and the discovered-civilization map into the
/// template.
pub fn build_cosmo_prompt(ctx: &PromptContext) -> String {
    let discovered = if ctx.discovered.is_empty() {
        "{}".to_string()
    } else {
        let entries: Vec<String> = ctx
            .discovered
            .iter()
            .map(|(name, excerpt)| format!("{name}: [\n{excerpt}\n]"))
            .collect();
        format!("{{\n{}\n}}", entries.join(",\n"))
    };
    COSMO_PROMPT_TEMPLATE
        .replace("{self.HISTORY}", &ctx.history)
        .replace("{self.POLITICAL_SYSTEM}", ctx.worldview.alias())
        .replace("{self.DISCOVERED_CIVILIZATION_RESOURCES}", &discovered)
}

/// Builds the verification prompt used by the LLM-backed secretary mode.
pub fn build_secretary_prompt(worldview: Worldview, decision: &Decision) -> String {
    let mut action = if decision.public_actions.is_empty() {
        "Do Nothing".to_string()
    } else {
        decision
            .public_actions
            .iter()
            .map(render_public_action)
            .collect::<Vec<_>>()
            .join(" / ")
    };
    action.push_str("; private: ");
    action.push_str(render_private_action(decision.private_action));

    SECRETARY_PROMPT_TEMPLATE
        .replace("{political_system}", worldview.alias())
        .replace("{action}", &action)
        .replace(
            "{proposed_matrix}",
            &super::render::render_matrix_block(&decision.matrix),
        )
}
