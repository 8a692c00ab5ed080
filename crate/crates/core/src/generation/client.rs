//! Backends behind one async interface: the offline mock and an
//! OpenAI-compatible chat completions endpoint.

use std::fmt;
use std::sync::Arc;
use std::time::Duration;

use serde_json::{json, Value};
use tokio::sync::Semaphore;

use super::mock::MockBackend;
use super::prompt::PromptText;
use super::{GenerationConfig, GenerationError};
use crate::beautify::icons::{icon_prompt, parse_icon_reply, IconId, Lexicon};
use crate::corpus::estimate_tokens;

pub const API_KEY_ENV: &str = "WIREGEN_API_KEY";
pub const BACKEND_URL_ENV: &str = "WIREGEN_BACKEND_URL";

/// Bearer credential. Never printed: `Debug` shows a placeholder.
#[derive(Clone, PartialEq, Eq)]
pub struct ApiKey(String);

impl ApiKey {
    pub fn new(key: impl Into<String>) -> Self {
        Self(key.into())
    }

    pub fn from_env() -> Option<Self> {
        std::env::var(API_KEY_ENV)
            .ok()
            .filter(|k| !k.trim().is_empty())
            .map(ApiKey)
    }

    fn expose(&self) -> &str {
        &self.0
    }
}

impl fmt::Debug for ApiKey {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str("ApiKey(<redacted>)")
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct RetryPolicy {
    pub max_retries: u32,
    pub base_delay: Duration,
}

impl Default for RetryPolicy {
    fn default() -> Self {
        Self {
            max_retries: 3,
            base_delay: Duration::from_millis(250),
        }
    }
}

#[derive(Debug, Clone)]
pub struct RemoteClient {
    http: reqwest::Client,
    endpoint: String,
    api_key: Option<ApiKey>,
    retry: RetryPolicy,
    permits: Arc<Semaphore>,
}

impl RemoteClient {
    pub fn new(
        endpoint: impl Into<String>,
        api_key: Option<ApiKey>,
        cfg: &GenerationConfig,
    ) -> Result<Self, GenerationError> {
        let http = reqwest::Client::builder()
            .timeout(Duration::from_secs(cfg.timeout_s.max(1)))
            .build()
            .map_err(|e| GenerationError::BackendUnreachable(e.to_string()))?;
        Ok(Self {
            http,
            endpoint: endpoint.into(),
            api_key,
            retry: RetryPolicy::default(),
            permits: Arc::new(Semaphore::new(cfg.max_in_flight.max(1))),
        })
    }

    /// Endpoint from `WIREGEN_BACKEND_URL` (else the config), key from
    /// `WIREGEN_API_KEY`.
    pub fn from_env(cfg: &GenerationConfig) -> Result<Self, GenerationError> {
        let endpoint = std::env::var(BACKEND_URL_ENV).unwrap_or_else(|_| cfg.endpoint_url.clone());
        Self::new(endpoint, ApiKey::from_env(), cfg)
    }

    pub fn with_retry(mut self, retry: RetryPolicy) -> Self {
        self.retry = retry;
        self
    }

    pub fn endpoint(&self) -> &str {
        &self.endpoint
    }

    async fn complete(&self, prompt: &str, cfg: &GenerationConfig) -> Result<String, GenerationError> {
        let _permit = self
            .permits
            .acquire()
            .await
            .map_err(|_| GenerationError::BackendUnreachable("client shut down".into()))?;
        let completion_budget = cfg.max_tokens.saturating_sub(estimate_tokens(prompt)).max(1);
        let body = json!({
            "model": cfg.model_id,
            "messages": [{ "role": "user", "content": prompt }],
            "temperature": cfg.temperature,
            "max_tokens": completion_budget,
            "stop": [cfg.stop_sequence],
        });

        let mut attempt = 0;
        loop {
            match self.send(&body).await {
                Ok(text) => return Ok(text),
                Err((err, transient)) if transient && attempt < self.retry.max_retries => {
                    let delay = self.retry.base_delay * 2u32.pow(attempt);
                    tracing::warn!(attempt = attempt + 1, error = %err, "retrying backend request");
                    tokio::time::sleep(delay).await;
                    attempt += 1;
                }
                Err((err, _)) => return Err(err),
            }
        }
    }

    /// One request. The flag says whether a retry may help.
    async fn send(&self, body: &Value) -> Result<String, (GenerationError, bool)> {
        let mut request = self.http.post(&self.endpoint).json(body);
        if let Some(key) = &self.api_key {
            request = request.bearer_auth(key.expose());
        }
        let response = request.send().await.map_err(|e| {
            // reqwest errors can carry the URL but never headers
            (GenerationError::BackendUnreachable(e.without_url().to_string()), true)
        })?;
        let status = response.status();
        let text = response
            .text()
            .await
            .map_err(|e| (GenerationError::BackendUnreachable(e.without_url().to_string()), true))?;
        if !status.is_success() {
            let transient = status.as_u16() == 429 || status.is_server_error();
            let mut body: String = text.chars().take(2000).collect();
            if let Some(key) = &self.api_key {
                // some providers echo the credential back in auth errors
                body = body.replace(key.expose(), "<redacted>");
            }
            let err = GenerationError::BackendRejected {
                status: status.as_u16(),
                body,
            };
            return Err((err, transient));
        }
        let value: Value = serde_json::from_str(&text).map_err(|e| {
            (
                GenerationError::BackendRejected {
                    status: status.as_u16(),
                    body: format!("unreadable response: {e}"),
                },
                false,
            )
        })?;
        let choice = &value["choices"][0];
        let content = choice["message"]["content"]
            .as_str()
            .or_else(|| choice["text"].as_str())
            .unwrap_or_default();
        Ok(content.to_string())
    }
}

#[derive(Debug, Clone)]
pub enum Backend {
    Mock(MockBackend),
    Remote(RemoteClient),
}

impl Backend {
    pub fn mock() -> Self {
        Backend::Mock(MockBackend::default())
    }

    pub fn is_mock(&self) -> bool {
        matches!(self, Backend::Mock(_))
    }

    /// Raw completion text, before stop-sequence handling.
    pub async fn complete(&self, prompt: &str, cfg: &GenerationConfig) -> Result<String, GenerationError> {
        cfg.validate()?;
        match self {
            Backend::Mock(mock) => Ok(mock.complete(prompt, cfg.seed.unwrap_or(0), cfg.temperature)),
            Backend::Remote(client) => client.complete(prompt, cfg).await,
        }
    }

    /// Completion cut at the first stop sequence, which is then appended so
    /// the result always ends with exactly one.
    pub async fn generate(&self, prompt: &PromptText, cfg: &GenerationConfig) -> Result<String, GenerationError> {
        let raw = self.complete(&prompt.text, cfg).await?;
        finish_completion(&raw, &cfg.stop_sequence)
    }

    /// Ask the backend which icon fits `alt_text`.
    pub async fn resolve_icon(
        &self,
        alt_text: &str,
        lexicon: &Lexicon,
        cfg: &GenerationConfig,
    ) -> Result<Option<IconId>, GenerationError> {
        let reply = self.complete(&icon_prompt(alt_text, lexicon), cfg).await?;
        Ok(parse_icon_reply(&reply))
    }
}

pub fn finish_completion(raw: &str, stop: &str) -> Result<String, GenerationError> {
    let body = match raw.find(stop) {
        Some(end) => &raw[..end],
        None => raw,
    };
    if body.trim().is_empty() {
        return Err(GenerationError::EmptyCompletion);
    }
    Ok(format!("{body}{stop}"))
}
