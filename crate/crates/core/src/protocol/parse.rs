//! Parser from raw agent text to a validated-shape [`Decision`].
//!
//! Fields may appear in any order; content runs from a field marker to the
//! next known marker. Unknown bracketed text inside reasons is left alone.
//! `[Political System: ]` and `[Transfer Matrix: ]` are mandatory; the
//! remaining fields default to empty when absent.

use super::RawDecisionText;
use crate::model::{
    Decision, PrivateAction, PublicAction, TransferMatrix, Worldview, EPSILON, RESOURCE_COUNT,
};
use regex::Regex;
use std::collections::BTreeSet;
use std::sync::OnceLock;
use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum ParseError {
    #[error("missing mandatory field [{field}: ]")]
    MissingField { field: &'static str },
    #[error("transfer matrix malformed: {detail} (at `{span}`)")]
    MatrixShape { detail: String, span: String },
    #[error("unknown political system `{span}`")]
    UnknownWorldview { span: String },
    #[error("unknown action `{span}`")]
    UnknownAction { span: String },
    #[error("action targets unknown civilization `{name}` (at `{span}`)")]
    UnknownCivilization { name: String, span: String },
}

/// Raw field contents as found in the text, before interpretation.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct DecisionFields {
    pub political_system: Option<String>,
    pub political_system_reason: Option<String>,
    pub transfer_matrix: Option<String>,
    pub transfer_matrix_reason: Option<String>,
    pub public_action: Option<String>,
    pub private_action: Option<String>,
    pub action_reason: Option<String>,
    pub other_information: Option<String>,
    pub discovered_civilization: Option<String>,
}

fn field_marker_regex() -> &'static Regex {
    static RE: OnceLock<Regex> = OnceLock::new();
    RE.get_or_init(|| {
        Regex::new(
            r"(?i)\[\s*(political system reason|political system|transfer matrix reason|transfer matrix|public action|private action|action reason|other information|discovered civilizations?)\s*:\s*\]",
        )
        .expect("field marker regex is valid")
    })
}

/// Splits text into the template's named fields, order-independently.
/// The first occurrence of a field wins; repeats are ignored.
pub fn scan_fields(text: &str) -> DecisionFields {
    let re = field_marker_regex();
    let markers: Vec<(usize, usize, String)> = re
        .captures_iter(text)
        .map(|c| {
            let m = c.get(0).expect("whole match");
            let name = c
                .get(1)
                .expect("field name group")
                .as_str()
                .to_ascii_lowercase()
                .split_whitespace()
                .collect::<Vec<_>>()
                .join(" ");
            (m.start(), m.end(), name)
        })
        .collect();

    let mut fields = DecisionFields::default();
    for (i, (_, content_start, name)) in markers.iter().enumerate() {
        let content_end = markers.get(i + 1).map_or(text.len(), |next| next.0);
        let content = text[*content_start..content_end].trim().to_string();
        let slot = match name.as_str() {
            "political system" => &mut fields.political_system,
            "political system reason" => &mut fields.political_system_reason,
            "transfer matrix" => &mut fields.transfer_matrix,
            "transfer matrix reason" => &mut fields.transfer_matrix_reason,
            "public action" => &mut fields.public_action,
            "private action" => &mut fields.private_action,
            "action reason" => &mut fields.action_reason,
            "other information" => &mut fields.other_information,
            "discovered civilization" | "discovered civilizations" => {
                &mut fields.discovered_civilization
            }
            _ => continue,
        };
        if slot.is_none() {
            *slot = Some(content);
        }
    }
    fields
}

fn shorten(s: &str) -> String {
    let s = s.trim();
    if s.chars().count() > 80 {
        let truncated: String = s.chars().take(77).collect();
        format!("{truncated}...")
    } else {
        s.to_string()
    }
}

fn parse_worldview_field(content: &str) -> Result<Worldview, ParseError> {
    if let Some(w) = Worldview::parse(content) {
        return Ok(w);
    }
    if let Some(first) = content.split_whitespace().next() {
        if let Some(w) = Worldview::parse(first) {
            return Ok(w);
        }
    }
    Err(ParseError::UnknownWorldview {
        span: shorten(content),
    })
}

/// Parses the `[Transfer Matrix: ]` body: five rows separated by `;`,
/// five comma-separated reals per row, off-diagonal entries zero.
pub(crate) fn parse_matrix_text(content: &str) -> Result<TransferMatrix, ParseError> {
    let span = shorten(content);
    let shape = |detail: &str| ParseError::MatrixShape {
        detail: detail.to_string(),
        span: span.clone(),
    };

    let body = content.trim();
    let body = body.strip_prefix('[').unwrap_or(body);
    let body = body.strip_suffix(']').unwrap_or(body);

    let rows: Vec<&str> = body
        .split(';')
        .map(str::trim)
        .filter(|r| !r.is_empty())
        .collect();
    if rows.len() != RESOURCE_COUNT {
        return Err(shape(&format!(
            "expected 5 rows separated by ';', found {}",
            rows.len()
        )));
    }

    let mut diag = [0.0; RESOURCE_COUNT];
    for (i, row) in rows.iter().enumerate() {
        let row = row.strip_prefix('[').unwrap_or(row);
        let row = row.strip_suffix(']').unwrap_or(row);
        let cells: Vec<&str> = row.split(',').map(str::trim).collect();
        if cells.len() != RESOURCE_COUNT {
            return Err(shape(&format!(
                "row {} has {} entries, expected 5",
                i + 1,
                cells.len()
            )));
        }
        for (j, cell) in cells.iter().enumerate() {
            let value: f64 = cell
                .parse()
                .map_err(|_| shape(&format!("`{cell}` is not a number")))?;
            if i == j {
                diag[i] = value;
            } else if value.abs() > EPSILON {
                return Err(shape(&format!(
                    "off-diagonal entry at row {}, column {} is {value}, must be 0.0",
                    i + 1,
                    j + 1
                )));
            }
        }
    }

    TransferMatrix::from_diagonal(diag).map_err(|e| shape(&e.to_string()))
}

/// Parses the `[Public Action: ]` body. Actions are separated by newlines
/// or `/`; one action per target, and only the first war counts.
pub fn parse_public_actions(
    content: &str,
    known_civs: &BTreeSet<String>,
) -> Result<Vec<PublicAction>, ParseError> {
    static ACTION_RE: OnceLock<Regex> = OnceLock::new();
    let towards_re = ACTION_RE.get_or_init(|| {
        Regex::new(
            r"(?i)^(express_friendliness|initiate_cooperation|launch_annihilation_war)\s+towards?\s+civilization\s+(.+)$",
        )
        .expect("action regex is valid")
    });
    static REJECT_RE: OnceLock<Regex> = OnceLock::new();
    let reject_re = REJECT_RE.get_or_init(|| {
        Regex::new(r"(?i)^reject_cooperation\s+from\s+civilization\s+(.+)$")
            .expect("reject regex is valid")
    });

    let mut actions: Vec<PublicAction> = Vec::new();
    let mut targeted: BTreeSet<String> = BTreeSet::new();
    let mut war_seen = false;
    let mut do_nothing_seen = false;

    for segment in content.split(['\n', '/']) {
        let segment = segment.trim().trim_start_matches('-').trim();
        if segment.is_empty() {
            continue;
        }
        let lowered = segment.to_ascii_lowercase();
        let lowered = lowered.trim_end_matches('.');
        if lowered == "do nothing" || lowered == "do_nothing" || lowered == "none" {
            if !do_nothing_seen {
                actions.push(PublicAction::DoNothing);
                do_nothing_seen = true;
            }
            continue;
        }

        let action = if let Some(caps) = towards_re.captures(segment) {
            let verb = caps[1].to_ascii_lowercase();
            let name = caps[2].trim().trim_end_matches('.').trim().to_string();
            check_known(&name, known_civs, segment)?;
            match verb.as_str() {
                "express_friendliness" => PublicAction::ExpressFriendliness { target: name },
                "initiate_cooperation" => PublicAction::InitiateCooperation { target: name },
                _ => PublicAction::LaunchAnnihilationWar { target: name },
            }
        } else if let Some(caps) = reject_re.captures(segment) {
            let name = caps[1].trim().trim_end_matches('.').trim().to_string();
            check_known(&name, known_civs, segment)?;
            PublicAction::RejectCooperation { source: name }
        } else {
            return Err(ParseError::UnknownAction {
                span: shorten(segment),
            });
        };

        if action.is_war() {
            if war_seen {
                continue;
            }
            war_seen = true;
        }
        let target = action.counterparty().expect("targeted action").to_string();
        if targeted.insert(target) {
            actions.push(action);
        }
    }
    Ok(actions)
}

fn check_known(
    name: &str,
    known_civs: &BTreeSet<String>,
    segment: &str,
) -> Result<(), ParseError> {
    if name.is_empty() {
        return Err(ParseError::UnknownAction {
            span: shorten(segment),
        });
    }
    if !known_civs.contains(name) {
        return Err(ParseError::UnknownCivilization {
            name: name.to_string(),
            span: shorten(segment),
        });
    }
    Ok(())
}

/// Parses the `[Private Action: ]` body, case-insensitively.
pub fn parse_private_action(content: &str) -> Result<PrivateAction, ParseError> {
    let normalized = content.trim().trim_end_matches('.').to_ascii_lowercase();
    match normalized.as_str() {
        "war mobilization" | "war_mobilization" | "mobilize_for_war" => {
            Ok(PrivateAction::MobilizeForWar)
        }
        "do nothing" | "do_nothing" | "none" | "" => Ok(PrivateAction::DoNothing),
        _ => Err(ParseError::UnknownAction {
            span: shorten(content),
        }),
    }
}

/// Splits a comma/newline-separated list of civilization names.
pub fn parse_name_list(content: &str) -> Vec<String> {
    content
        .split([',', '\n'])
        .map(|n| n.trim().trim_end_matches('.').trim())
        .filter(|n| !n.is_empty() && !n.eq_ignore_ascii_case("none"))
        .map(str::to_string)
        .collect()
}

/// Parses raw agent text into a [`Decision`]. `known_civs` is the set of
/// names the actor has discovered; actions targeting anything else are
/// rejected with [`ParseError::UnknownCivilization`].
pub fn parse_decision(
    raw: &RawDecisionText,
    known_civs: &BTreeSet<String>,
) -> Result<Decision, ParseError> {
    let fields = scan_fields(raw.as_str());

    let worldview_text = fields
        .political_system
        .ok_or(ParseError::MissingField {
            field: "Political System",
        })?;
    let worldview = parse_worldview_field(&worldview_text)?;

    let matrix_text = fields.transfer_matrix.ok_or(ParseError::MissingField {
        field: "Transfer Matrix",
    })?;
    let matrix = parse_matrix_text(&matrix_text)?;

    let public_actions = match &fields.public_action {
        Some(content) => parse_public_actions(content, known_civs)?,
        None => Vec::new(),
    };
    let private_action = match &fields.private_action {
        Some(content) => parse_private_action(content)?,
        None => PrivateAction::DoNothing,
    };
    let discovered_names = fields
        .discovered_civilization
        .as_deref()
        .map(parse_name_list)
        .unwrap_or_default();

    Ok(Decision {
        worldview,
        worldview_reason: fields.political_system_reason.unwrap_or_default(),
        matrix,
        matrix_reason: fields.transfer_matrix_reason.unwrap_or_default(),
        public_actions,
        private_action,
        action_reason: fields.action_reason.unwrap_or_default(),
        other_info: fields.other_information.unwrap_or_default(),
        discovered_names,
    })
}
