//! LLM access layer: chat requests, a content-addressed transcript cache,
//! and a gateway that fronts live backends with retry, bounded concurrency
//! and deterministic replay.

mod backend;
mod cache;

pub use backend::{Backend, RemoteBackend, ScriptedBackend};
pub use cache::TranscriptCache;

use std::sync::atomic::{AtomicUsize, Ordering};
use std::sync::{Condvar, Mutex};
use std::time::{Duration, SystemTime, UNIX_EPOCH};

use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

use crate::error::{Error, Result};
use crate::model::BackendConfig;

/// Chat message role.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Role {
    System,
    User,
    Assistant,
}

/// One message in a chat conversation.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ChatMessage {
    pub role: Role,
    pub content: String,
}

impl ChatMessage {
    pub fn user(content: impl Into<String>) -> ChatMessage {
        ChatMessage { role: Role::User, content: content.into() }
    }

    pub fn assistant(content: impl Into<String>) -> ChatMessage {
        ChatMessage { role: Role::Assistant, content: content.into() }
    }
}

/// A fully specified chat completion request: sampling settings plus the
/// conversation. Everything in here — and nothing else — determines the
/// transcript cache key.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ChatRequest {
    pub backend_id: String,
    pub model_name: String,
    pub seed: i64,
    pub temperature: f64,
    pub max_tokens: u32,
    pub messages: Vec<ChatMessage>,
}

impl ChatRequest {
    pub fn from_config(config: &BackendConfig, messages: Vec<ChatMessage>) -> ChatRequest {
        ChatRequest {
            backend_id: config.backend_id.clone(),
            model_name: config.model_name.clone(),
            seed: config.seed,
            temperature: config.temperature,
            max_tokens: config.max_tokens,
            messages,
        }
    }

    /// SHA-256 over the canonical JSON serialization of the request.
    ///
    /// Canonical means: the exact field order of this struct, UTF-8, no
    /// insignificant whitespace. The field order is part of the cache file
    /// contract and must not change.
    pub fn cache_key(&self) -> String {
        let canonical = serde_json::to_string(self).expect("ChatRequest always serializes");
        let mut hasher = Sha256::new();
        hasher.update(canonical.as_bytes());
        let digest = hasher.finalize();
        let mut out = String::with_capacity(64);
        for byte in digest {
            use std::fmt::Write;
            write!(out, "{byte:02x}").expect("writing to String cannot fail");
        }
        out
    }
}

/// A cached request/response pair.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Transcript {
    pub key: String,
    pub backend_id: String,
    pub model_name: String,
    pub seed: i64,
    pub temperature: f64,
    pub max_tokens: u32,
    pub messages: Vec<ChatMessage>,
    pub response_text: String,
    /// Seconds since the Unix epoch when the response was first obtained.
    pub created_at: u64,
}

impl Transcript {
    pub fn from_request(request: &ChatRequest, response_text: String, created_at: u64) -> Transcript {
        Transcript {
            key: request.cache_key(),
            backend_id: request.backend_id.clone(),
            model_name: request.model_name.clone(),
            seed: request.seed,
            temperature: request.temperature,
            max_tokens: request.max_tokens,
            messages: request.messages.clone(),
            response_text,
            created_at,
        }
    }

    /// Rebuild the request this transcript answers to (for key verification).
    pub fn request(&self) -> ChatRequest {
        ChatRequest {
            backend_id: self.backend_id.clone(),
            model_name: self.model_name.clone(),
            seed: self.seed,
            temperature: self.temperature,
            max_tokens: self.max_tokens,
            messages: self.messages.clone(),
        }
    }
}

/// Gateway tuning knobs.
#[derive(Debug, Clone)]
pub struct GatewayOptions {
    /// Maximum simultaneous in-flight backend requests.
    pub max_in_flight: usize,
    /// Maximum attempts per request (first try included).
    pub max_attempts: u32,
    /// Backoff before the second attempt; doubles per retry.
    pub initial_backoff: Duration,
    /// Upper bound on a single backoff sleep.
    pub max_backoff: Duration,
}

impl Default for GatewayOptions {
    fn default() -> Self {
        GatewayOptions {
            max_in_flight: 8,
            max_attempts: 5,
            initial_backoff: Duration::from_millis(250),
            max_backoff: Duration::from_secs(8),
        }
    }
}

/// The result of one gateway call.
#[derive(Debug, Clone, PartialEq)]
pub struct Completion {
    pub text: String,
    /// Transcript cache key of the request.
    pub key: String,
    /// Whether the response came from the cache.
    pub cached: bool,
}

/// Hit/miss counters for one gateway lifetime.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub struct GatewayStats {
    pub cache_hits: usize,
    pub backend_calls: usize,
}

/// Counting semaphore bounding in-flight backend requests.
struct Semaphore {
    permits: Mutex<usize>,
    cv: Condvar,
}

impl Semaphore {
    fn new(permits: usize) -> Semaphore {
        Semaphore { permits: Mutex::new(permits.max(1)), cv: Condvar::new() }
    }

    fn acquire(&self) -> SemaphoreGuard<'_> {
        let mut p = self.permits.lock().expect("semaphore poisoned");
        while *p == 0 {
            p = self.cv.wait(p).expect("semaphore poisoned");
        }
        *p -= 1;
        SemaphoreGuard { sem: self }
    }
}

struct SemaphoreGuard<'a> {
    sem: &'a Semaphore,
}

impl Drop for SemaphoreGuard<'_> {
    fn drop(&mut self) {
        let mut p = self.sem.permits.lock().expect("semaphore poisoned");
        *p += 1;
        self.sem.cv.notify_one();
    }
}

/// Front door for all model traffic.
///
/// Every request is first looked up in the transcript cache; only misses
/// reach the backend, under a concurrency bound and bounded exponential
/// backoff for retryable failures. A gateway without a backend is
/// replay-only: cache misses are hard errors, which makes runs exactly
/// reproducible from a transcript file.
pub struct Gateway {
    backend: Option<Box<dyn Backend>>,
    cache: TranscriptCache,
    options: GatewayOptions,
    limiter: Semaphore,
    hits: AtomicUsize,
    calls: AtomicUsize,
}

impl Gateway {
    pub fn new(backend: Box<dyn Backend>, cache: TranscriptCache, options: GatewayOptions) -> Gateway {
        let limiter = Semaphore::new(options.max_in_flight);
        Gateway { backend: Some(backend), cache, options, limiter, hits: AtomicUsize::new(0), calls: AtomicUsize::new(0) }
    }

    /// A gateway that answers from `cache` only and never goes remote.
    pub fn replay_only(cache: TranscriptCache) -> Gateway {
        let options = GatewayOptions::default();
        let limiter = Semaphore::new(options.max_in_flight);
        Gateway { backend: None, cache, options, limiter, hits: AtomicUsize::new(0), calls: AtomicUsize::new(0) }
    }

    pub fn cache(&self) -> &TranscriptCache {
        &self.cache
    }

    pub fn is_replay_only(&self) -> bool {
        self.backend.is_none()
    }

    pub fn stats(&self) -> GatewayStats {
        GatewayStats {
            cache_hits: self.hits.load(Ordering::Relaxed),
            backend_calls: self.calls.load(Ordering::Relaxed),
        }
    }

    /// Answer `request` from the cache or the backend.
    pub fn complete(&self, request: &ChatRequest) -> Result<Completion> {
        let key = request.cache_key();
        if let Some(t) = self.cache.get(&key) {
            self.hits.fetch_add(1, Ordering::Relaxed);
            return Ok(Completion { text: t.response_text, key, cached: true });
        }
        let backend = match &self.backend {
            Some(b) => b,
            None => return Err(Error::CacheMiss { key }),
        };

        let _permit = self.limiter.acquire();
        // Another worker may have filled the key while we waited.
        if let Some(t) = self.cache.get(&key) {
            self.hits.fetch_add(1, Ordering::Relaxed);
            return Ok(Completion { text: t.response_text, key, cached: true });
        }

        let mut backoff = self.options.initial_backoff;
        let mut last_err: Option<Error> = None;
        for attempt in 1..=self.options.max_attempts.max(1) {
            self.calls.fetch_add(1, Ordering::Relaxed);
            match backend.complete(request) {
                Ok(text) => {
                    if text.trim().is_empty() {
                        return Err(Error::EmptyResponse);
                    }
                    let created_at =
                        SystemTime::now().duration_since(UNIX_EPOCH).map(|d| d.as_secs()).unwrap_or(0);
                    let transcript = Transcript::from_request(request, text, created_at);
                    self.cache.insert(transcript)?;
                    // First writer wins; read back so concurrent fillers of
                    // the same key all observe identical text.
                    let winner = self
                        .cache
                        .get(&key)
                        .expect("entry present immediately after insert");
                    return Ok(Completion { text: winner.response_text, key, cached: false });
                }
                Err(e) if e.is_retryable() && attempt < self.options.max_attempts => {
                    last_err = Some(e);
                    std::thread::sleep(backoff);
                    backoff = (backoff * 2).min(self.options.max_backoff);
                }
                Err(e) => return Err(e),
            }
        }
        Err(last_err.unwrap_or_else(|| Error::Network("retries exhausted".into())))
    }
}
