//! Deterministic multi-civilization simulation engine.
//!
//! Civilizations carry a five-resource state vector evolved each round by
//! an agent-chosen diagonal transfer matrix. A secretary validates every
//! agent answer against format, matrix-constraint and doctrine rules,
//! falling back to a default protocol after repeated rejections.
//! Information (and optionally strikes) travel between civilizations at a
//! configurable number of rounds per pair, so decisions are made on
//! delayed observations. The round-based archive ("stick"), relationship
//! map and experiment harness support reproducible studies of survival
//! and of how communication delay alters decisions.
//!
//! Agent backends: deterministic doctrine policies (one per worldview), a
//! chat-completion HTTP client with transcript recording, a replay
//! backend serving recorded transcripts, and scripted probes for the
//! harness. Runs with deterministic backends are byte-reproducible from
//! `(config, seed)`.

pub mod agent;
pub mod engine;
pub mod experiment;
pub mod model;
pub mod protocol;
pub mod secretary;
pub mod stick;
