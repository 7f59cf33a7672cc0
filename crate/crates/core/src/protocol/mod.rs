//! The agent-facing decision text format and prompts.
//!
//! Agents answer in a bracketed-field template (`[Political System: ]`,
//! `[Transfer Matrix: ]`, ...). This module parses that text into a
//! [`Decision`](crate::model::Decision), renders decisions back into the
//! same template, and builds the prompts sent to chat-completion agents.
//! Parsing is total: every input yields a `Decision` or a typed
//! [`ParseError`], never a panic.

mod parse;
mod prompt;
mod render;

pub use parse::{
    parse_decision, parse_name_list, parse_private_action, parse_public_actions, scan_fields,
    DecisionFields, ParseError,
};
pub use prompt::{
    build_cosmo_prompt, build_secretary_prompt, render_history, PromptContext,
    COSMO_PROMPT_TEMPLATE, SECRETARY_PROMPT_TEMPLATE,
};
pub use render::{render_decision, render_matrix_block, render_private_action, render_public_action};

/// Raw text as returned by an agent backend. Arbitrary content; the
/// parser judges it.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct RawDecisionText(String);

impl RawDecisionText {
    pub fn new(text: impl Into<String>) -> Self {
        RawDecisionText(text.into())
    }

    pub fn as_str(&self) -> &str {
        &self.0
    }
}

impl From<&str> for RawDecisionText {
    fn from(s: &str) -> Self {
        RawDecisionText(s.to_string())
    }
}

impl From<String> for RawDecisionText {
    fn from(s: String) -> Self {
        RawDecisionText(s)
    }
}

impl std::fmt::Display for RawDecisionText {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(&self.0)
    }
}
