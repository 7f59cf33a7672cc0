//! Chat-completion HTTP backend with transcript recording.
//!
//! One request per decision: a single user message, temperature from
//! config (0 by default for reproducibility). Transient transport
//! failures are retried with exponential backoff; every request/response
//! pair is recorded so a run can be replayed deterministically.

use super::AgentBackendError;
use serde::{Deserialize, Serialize};
use serde_json::json;
use sha2::{Digest, Sha256};
use std::time::Duration;

fn default_temperature() -> f64 {
    0.0
}

fn default_timeout_secs() -> u64 {
    30
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct LlmEndpoint {
    /// Base URL; requests go to `{base_url}/chat/completions`.
    pub base_url: String,
    pub model: String,
    /// Name of the environment variable holding the API key. The key
    /// itself never appears in config files or transcripts.
    #[serde(default)]
    pub api_key_env: Option<String>,
    #[serde(default = "default_temperature")]
    pub temperature: f64,
    #[serde(default = "default_timeout_secs")]
    pub timeout_secs: u64,
    /// Extra attempts after the first on transient transport failures.
    #[serde(default)]
    pub max_retries: u32,
}

/// One recorded request/response pair, stored as a JSON line.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TranscriptEntry {
    pub round: u32,
    pub civ: String,
    pub prompt_hash: String,
    pub completion: String,
}

/// Hex SHA-256 of a prompt, used to pair transcript entries with the
/// prompts that produced them.
pub fn prompt_hash(prompt: &str) -> String {
    let digest = Sha256::digest(prompt.as_bytes());
    digest.iter().map(|b| format!("{b:02x}")).collect()
}

/// Sends one chat-completion request and returns the assistant text.
pub fn llm_complete(endpoint: &LlmEndpoint, prompt: &str) -> Result<String, AgentBackendError> {
    let client = reqwest::blocking::Client::builder()
        .timeout(Duration::from_secs(endpoint.timeout_secs))
        .build()
        .map_err(|e| AgentBackendError::Malformed {
            detail: format!("http client: {e}"),
        })?;
    complete_with(&client, endpoint, prompt)
}

fn complete_with(
    client: &reqwest::blocking::Client,
    endpoint: &LlmEndpoint,
    prompt: &str,
) -> Result<String, AgentBackendError> {
    let url = format!("{}/chat/completions", endpoint.base_url.trim_end_matches('/'));
    let body = json!({
        "model": endpoint.model,
        "messages": [{"role": "user", "content": prompt}],
        "temperature": endpoint.temperature,
    });
    let api_key = endpoint
        .api_key_env
        .as_deref()
        .and_then(|var| std::env::var(var).ok())
        .filter(|k| !k.is_empty());

    let mut backoff = Duration::from_millis(200);
    let mut last_err = AgentBackendError::Timeout {
        detail: "no attempt made".to_string(),
    };
    for attempt in 0..=endpoint.max_retries {
        let mut request = client.post(&url).json(&body);
        if let Some(key) = &api_key {
            request = request.bearer_auth(key);
        }
        match request.send() {
            Ok(response) => {
                let status = response.status();
                if status.is_success() {
                    return extract_completion(response);
                }
                last_err = AgentBackendError::Http {
                    status: status.as_u16(),
                };
                if !status.is_server_error() {
                    return Err(last_err);
                }
            }
            Err(e) => {
                last_err = AgentBackendError::Timeout {
                    detail: e.to_string(),
                };
            }
        }
        if attempt < endpoint.max_retries {
            std::thread::sleep(backoff);
            backoff *= 2;
        }
    }
    Err(last_err)
}

fn extract_completion(response: reqwest::blocking::Response) -> Result<String, AgentBackendError> {
    let value: serde_json::Value =
        response.json().map_err(|e| AgentBackendError::Malformed {
            detail: format!("response is not JSON: {e}"),
        })?;
    value["choices"][0]["message"]["content"]
        .as_str()
        .map(str::to_string)
        .ok_or_else(|| AgentBackendError::Malformed {
            detail: "response lacks choices[0].message.content".to_string(),
        })
}

/// The live HTTP agent: a configured endpoint plus a reusable client.
#[derive(Debug)]
pub struct LlmAgent {
    endpoint: LlmEndpoint,
    client: reqwest::blocking::Client,
}

impl LlmAgent {
    pub fn new(endpoint: LlmEndpoint) -> Result<Self, AgentBackendError> {
        let client = reqwest::blocking::Client::builder()
            .timeout(Duration::from_secs(endpoint.timeout_secs))
            .build()
            .map_err(|e| AgentBackendError::Malformed {
                detail: format!("http client: {e}"),
            })?;
        Ok(LlmAgent { endpoint, client })
    }

    pub fn complete(&mut self, prompt: &str) -> Result<String, AgentBackendError> {
        complete_with(&self.client, &self.endpoint, prompt)
    }
}
