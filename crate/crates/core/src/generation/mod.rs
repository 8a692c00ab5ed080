//! Prompt assembly and text-generation backends.

mod client;
mod mock;
mod prompt;

use serde::{Deserialize, Serialize};
use thiserror::Error;

pub use client::{finish_completion, ApiKey, Backend, RemoteClient, RetryPolicy};
pub use mock::{mock_generate, MockBackend, MOCK_SCREEN};
pub use prompt::{assemble_prompt, extract_description, PromptText, INSTRUCTION_HEADER};

use crate::dsl::STOP_SEQUENCE;

pub const DEFAULT_TEMPERATURE: f64 = 0.65;
pub const DEFAULT_MAX_TOKENS: usize = 4096;
pub const DEFAULT_MODEL: &str = "gpt-3.5-turbo";
pub const DEFAULT_ENDPOINT: &str = "https://api.openai.com/v1/chat/completions";

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case", tag = "kind")]
pub enum Mode {
    ZeroShot,
    FewShot {
        k: usize,
    },
    #[default]
    FineTuned,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct GenerationConfig {
    pub mode: Mode,
    pub temperature: f64,
    pub max_tokens: usize,
    pub stop_sequence: String,
    pub model_id: String,
    pub endpoint_url: String,
    pub timeout_s: u64,
    /// Only the offline backend honours the seed.
    pub seed: Option<u64>,
    pub max_in_flight: usize,
}

impl Default for GenerationConfig {
    fn default() -> Self {
        Self {
            mode: Mode::default(),
            temperature: DEFAULT_TEMPERATURE,
            max_tokens: DEFAULT_MAX_TOKENS,
            stop_sequence: STOP_SEQUENCE.to_string(),
            model_id: DEFAULT_MODEL.to_string(),
            endpoint_url: DEFAULT_ENDPOINT.to_string(),
            timeout_s: 60,
            seed: None,
            max_in_flight: 4,
        }
    }
}

impl GenerationConfig {
    pub fn validate(&self) -> Result<(), GenerationError> {
        let bad = |msg: String| Err(GenerationError::InvalidConfig(msg));
        if !(0.0..=1.0).contains(&self.temperature) {
            return bad(format!("temperature {} outside [0, 1]", self.temperature));
        }
        if self.max_tokens == 0 || self.max_tokens > DEFAULT_MAX_TOKENS {
            return bad(format!("max_tokens {} outside 1..=4096", self.max_tokens));
        }
        if let Mode::FewShot { k } = self.mode {
            if !(1..=2).contains(&k) {
                return bad(format!("few-shot k must be 1 or 2, got {k}"));
            }
        }
        if self.stop_sequence.is_empty() {
            return bad("empty stop sequence".into());
        }
        if self.max_in_flight == 0 {
            return bad("max_in_flight must be positive".into());
        }
        Ok(())
    }
}

#[derive(Debug, Error)]
pub enum GenerationError {
    #[error("invalid generation config: {0}")]
    InvalidConfig(String),
    #[error("few-shot prompt needs {needed} exemplars, {available} given")]
    NotEnoughExemplars { needed: usize, available: usize },
    #[error("prompt needs about {estimate} tokens, budget is {budget}")]
    PromptOverflow { estimate: usize, budget: usize },
    #[error("backend unreachable: {0}")]
    BackendUnreachable(String),
    #[error("backend rejected request with status {status}: {body}")]
    BackendRejected { status: u16, body: String },
    #[error("backend returned an empty completion")]
    EmptyCompletion,
}

impl GenerationError {
    /// Whether the failure lies with the backend rather than the request.
    pub fn is_backend(&self) -> bool {
        matches!(
            self,
            GenerationError::BackendUnreachable(_)
                | GenerationError::BackendRejected { .. }
                | GenerationError::EmptyCompletion
        )
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn defaults_follow_the_generation_contract() {
        let cfg = GenerationConfig::default();
        assert_eq!(cfg.temperature, 0.65);
        assert_eq!(cfg.max_tokens, 4096);
        assert_eq!(cfg.stop_sequence, "</html>");
        assert!(cfg.validate().is_ok());
    }

    #[test]
    fn rejects_out_of_range_values() {
        let with = |f: fn(&mut GenerationConfig)| {
            let mut cfg = GenerationConfig::default();
            f(&mut cfg);
            cfg.validate()
        };
        assert!(with(|c| c.temperature = 1.5).is_err());
        assert!(with(|c| c.max_tokens = 5000).is_err());
        assert!(with(|c| c.mode = Mode::FewShot { k: 3 }).is_err());
        assert!(with(|c| c.mode = Mode::FewShot { k: 2 }).is_ok());
    }

    #[test]
    fn mode_serde_shape() {
        let json = serde_json::to_string(&Mode::FewShot { k: 2 }).unwrap();
        assert_eq!(json, r#"{"kind":"few_shot","k":2}"#);
        let mode: Mode = serde_json::from_str(r#"{"kind":"zero_shot"}"#).unwrap();
        assert_eq!(mode, Mode::ZeroShot);
    }
}
