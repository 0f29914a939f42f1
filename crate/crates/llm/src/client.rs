use std::path::Path;
use std::sync::Mutex;
use std::thread;
use std::time::{Duration, Instant};

use serde::{Deserialize, Serialize};
use serde_json::{json, Value};
use thiserror::Error;

/// One chat-completion endpoint. Vendor differences are expressed here,
/// not in code.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct EndpointConfig {
    pub url: String,
    pub model: String,
    /// Environment variable holding the bearer token.
    pub api_key_env: String,
    pub temperature: f64,
    pub system: String,
    pub max_attempts: u32,
    pub base_delay_ms: u64,
    pub max_delay_ms: u64,
    pub timeout_secs: u64,
    /// Minimum gap between requests to this endpoint.
    pub min_interval_ms: u64,
}

impl Default for EndpointConfig {
    fn default() -> Self {
        EndpointConfig {
            url: "https://api.openai.com/v1/chat/completions".to_string(),
            model: "gpt-3.5-turbo".to_string(),
            api_key_env: "OPENAI_API_KEY".to_string(),
            temperature: 0.0,
            system: "You are a helpful assistant.".to_string(),
            max_attempts: 4,
            base_delay_ms: 500,
            max_delay_ms: 8_000,
            timeout_secs: 60,
            min_interval_ms: 0,
        }
    }
}

impl EndpointConfig {
    pub fn load(path: &Path) -> Result<Self, ClientError> {
        let text = std::fs::read_to_string(path)
            .map_err(|e| ClientError::Config(format!("{}: {e}", path.display())))?;
        toml::from_str(&text).map_err(|e| ClientError::Config(format!("{}: {e}", path.display())))
    }

    /// Delay before retry number `attempt` (0-based), doubling up to the cap.
    pub fn backoff(&self, attempt: u32) -> Duration {
        let ms = self.base_delay_ms.saturating_mul(1u64 << attempt.min(20));
        Duration::from_millis(ms.min(self.max_delay_ms))
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum ClientError {
    #[error("config: {0}")]
    Config(String),
    #[error("environment variable {0} is not set")]
    MissingKey(String),
    #[error("authentication failed (HTTP {status}): {body}")]
    Auth { status: u16, body: String },
    #[error("HTTP {status} after {attempts} attempt(s): {body}")]
    Http {
        status: u16,
        attempts: u32,
        body: String,
    },
    #[error("transport error after {attempts} attempt(s): {message}")]
    Transport { attempts: u32, message: String },
    #[error("unexpected response body: {0}")]
    BadResponse(String),
}

fn retryable(status: u16) -> bool {
    matches!(status, 408 | 409 | 429) || status >= 500
}

pub struct ChatClient {
    config: EndpointConfig,
    api_key: String,
    agent: ureq::Agent,
    last_request: Mutex<Option<Instant>>,
}

impl ChatClient {
    pub fn new(config: EndpointConfig, api_key: String) -> Self {
        let agent: ureq::Agent = ureq::Agent::config_builder()
            .timeout_global(Some(Duration::from_secs(config.timeout_secs)))
            .http_status_as_error(false)
            .build()
            .into();
        ChatClient {
            config,
            api_key,
            agent,
            last_request: Mutex::new(None),
        }
    }

    pub fn from_env(config: EndpointConfig) -> Result<Self, ClientError> {
        let key = std::env::var(&config.api_key_env)
            .map_err(|_| ClientError::MissingKey(config.api_key_env.clone()))?;
        Ok(ChatClient::new(config, key))
    }

    pub fn config(&self) -> &EndpointConfig {
        &self.config
    }

    pub fn request_body(&self, prompt: &str) -> Value {
        json!({
            "model": self.config.model,
            "temperature": self.config.temperature,
            "messages": [
                {"role": "system", "content": self.config.system},
                {"role": "user", "content": prompt},
            ],
        })
    }

    fn pace(&self) {
        let gap = Duration::from_millis(self.config.min_interval_ms);
        let mut last = self.last_request.lock().unwrap();
        if let Some(t) = *last {
            let since = t.elapsed();
            if since < gap {
                thread::sleep(gap - since);
            }
        }
        *last = Some(Instant::now());
    }

    /// Send one prompt; retries transient failures with exponential backoff.
    pub fn complete(&self, prompt: &str) -> Result<String, ClientError> {
        let body = self.request_body(prompt);
        let attempts = self.config.max_attempts.max(1);
        let mut attempt = 0;
        loop {
            attempt += 1;
            self.pace();
            let sent = self
                .agent
                .post(&self.config.url)
                .header("Authorization", &format!("Bearer {}", self.api_key))
                .send_json(&body);
            let failure = match sent {
                Ok(mut resp) => {
                    let status = resp.status().as_u16();
                    let text = resp.body_mut().read_to_string().unwrap_or_default();
                    match status {
                        200..=299 => return extract_content(&text),
                        401 | 403 => return Err(ClientError::Auth { status, body: text }),
                        s if retryable(s) => ClientError::Http {
                            status,
                            attempts: attempt,
                            body: text,
                        },
                        _ => {
                            return Err(ClientError::Http {
                                status,
                                attempts: attempt,
                                body: text,
                            })
                        }
                    }
                }
                Err(e) => ClientError::Transport {
                    attempts: attempt,
                    message: e.to_string(),
                },
            };
            if attempt >= attempts {
                return Err(failure);
            }
            thread::sleep(self.config.backoff(attempt - 1));
        }
    }
}

fn extract_content(text: &str) -> Result<String, ClientError> {
    let v: Value =
        serde_json::from_str(text).map_err(|e| ClientError::BadResponse(e.to_string()))?;
    v.pointer("/choices/0/message/content")
        .and_then(Value::as_str)
        .map(str::to_string)
        .ok_or_else(|| ClientError::BadResponse("no choices[0].message.content".to_string()))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn backoff_doubles_and_caps() {
        let c = EndpointConfig {
            base_delay_ms: 100,
            max_delay_ms: 350,
            ..Default::default()
        };
        let ms: Vec<u128> = (0..4).map(|a| c.backoff(a).as_millis()).collect();
        assert_eq!(ms, [100, 200, 350, 350]);
        assert_eq!(c.backoff(200).as_millis(), 350);
    }

    #[test]
    fn config_from_toml() {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("ep.toml");
        std::fs::write(&path, "model = \"gemini-pro\"\ntemperature = 0.7\n").unwrap();
        let c = EndpointConfig::load(&path).unwrap();
        assert_eq!(c.model, "gemini-pro");
        assert_eq!(c.temperature, 0.7);
        assert_eq!(c.max_attempts, EndpointConfig::default().max_attempts);
        std::fs::write(&path, "temperature = \"hot\"").unwrap();
        assert!(matches!(
            EndpointConfig::load(&path),
            Err(ClientError::Config(_))
        ));
    }

    #[test]
    fn content_extraction() {
        let ok = r#"{"choices":[{"message":{"role":"assistant","content":"cat(tom)."}}]}"#;
        assert_eq!(extract_content(ok).unwrap(), "cat(tom).");
        assert!(matches!(
            extract_content("{}"),
            Err(ClientError::BadResponse(_))
        ));
        assert!(matches!(
            extract_content("<html>"),
            Err(ClientError::BadResponse(_))
        ));
    }

    #[test]
    fn request_shape() {
        let c = ChatClient::new(EndpointConfig::default(), "k".into());
        let b = c.request_body("hi");
        assert_eq!(b["messages"][1]["content"], "hi");
        assert_eq!(b["messages"][0]["role"], "system");
        assert_eq!(b["model"], "gpt-3.5-turbo");
    }

    #[test]
    fn missing_key() {
        let c = EndpointConfig {
            api_key_env: "SEDAC_TEST_SURELY_UNSET_KEY".into(),
            ..Default::default()
        };
        assert!(matches!(
            ChatClient::from_env(c),
            Err(ClientError::MissingKey(_))
        ));
    }
}
