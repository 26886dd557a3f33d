//! Backend implementations: a remote OpenAI-compatible chat-completions
//! client and a scripted fake for tests and fixture generation.

use std::time::Duration;

use crate::error::{Error, Result};
use crate::model::BackendConfig;

use super::ChatRequest;

/// Something that can answer a chat request with text.
pub trait Backend: Send + Sync {
    fn complete(&self, request: &ChatRequest) -> Result<String>;
    fn id(&self) -> &str;
}

/// HTTP client for an OpenAI-compatible `/chat/completions` endpoint.
///
/// Credentials are read from the environment variable named in
/// [`BackendConfig::credentials_env`] and sent as a bearer token; they are
/// never stored in config files or transcripts.
pub struct RemoteBackend {
    backend_id: String,
    endpoint: String,
    api_key: String,
    agent: ureq::Agent,
}

impl RemoteBackend {
    pub fn new(config: &BackendConfig, timeout: Duration) -> Result<RemoteBackend> {
        let api_key = std::env::var(&config.credentials_env).map_err(|_| {
            Error::Config(format!(
                "environment variable {} is not set (backend credentials)",
                config.credentials_env
            ))
        })?;
        let agent = ureq::AgentBuilder::new().timeout(timeout).build();
        Ok(RemoteBackend {
            backend_id: config.backend_id.clone(),
            endpoint: config.endpoint.clone(),
            api_key,
            agent,
        })
    }
}

impl Backend for RemoteBackend {
    fn complete(&self, request: &ChatRequest) -> Result<String> {
        let body = serde_json::json!({
            "model": request.model_name,
            "messages": request.messages,
            "temperature": request.temperature,
            "max_tokens": request.max_tokens,
            "seed": request.seed,
        });
        let response = self
            .agent
            .post(&self.endpoint)
            .set("Authorization", &format!("Bearer {}", self.api_key))
            .set("Content-Type", "application/json")
            .send_json(body);
        let response = match response {
            Ok(r) => r,
            Err(ureq::Error::Status(code, resp)) => {
                let text = resp.into_string().unwrap_or_default();
                let snippet: String = text.chars().take(200).collect();
                return Err(match code {
                    401 | 403 => Error::Auth(format!("backend returned {code}: {snippet}")),
                    429 | 500..=599 => Error::Network(format!("backend returned {code}: {snippet}")),
                    _ => Error::Config(format!("backend rejected request ({code}): {snippet}")),
                });
            }
            Err(ureq::Error::Transport(t)) => {
                return Err(Error::Network(format!("transport failure: {t}")));
            }
        };
        let parsed: serde_json::Value = response
            .into_json()
            .map_err(|e| Error::Network(format!("unreadable response body: {e}")))?;
        let content = parsed
            .pointer("/choices/0/message/content")
            .and_then(|v| v.as_str())
            .ok_or_else(|| Error::Network(format!("response missing choices[0].message.content: {parsed}")))?;
        Ok(content.to_owned())
    }

    fn id(&self) -> &str {
        &self.backend_id
    }
}

/// Deterministic fake backend driven by a closure. Returning `None` from
/// the closure marks the request as unscripted and fails the call, which
/// keeps fixture generation honest.
pub struct ScriptedBackend {
    backend_id: String,
    script: Box<dyn Fn(&ChatRequest) -> Option<String> + Send + Sync>,
}

impl ScriptedBackend {
    pub fn from_fn<F>(backend_id: &str, script: F) -> ScriptedBackend
    where
        F: Fn(&ChatRequest) -> Option<String> + Send + Sync + 'static,
    {
        ScriptedBackend { backend_id: backend_id.to_owned(), script: Box::new(script) }
    }
}

impl Backend for ScriptedBackend {
    fn complete(&self, request: &ChatRequest) -> Result<String> {
        (self.script)(request).ok_or_else(|| {
            let last = request.messages.last().map(|m| m.content.as_str()).unwrap_or("");
            let head: String = last.chars().take(120).collect();
            Error::InvalidInput(format!("no scripted response for request ending {head:?}"))
        })
    }

    fn id(&self) -> &str {
        &self.backend_id
    }
}
