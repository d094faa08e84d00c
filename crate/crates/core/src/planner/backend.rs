//! Model backends. The scripted mock replays scenario files; the HTTP
//! backend posts the prompt to a JSON endpoint.
//!
//! HTTP request body:
//!
//! ```json
//! {
//!   "model": "name",
//!   "temperature": 0.1,
//!   "messages": [
//!     {"role": "system", "content": "<system text>"},
//!     {"role": "user", "content": [
//!       {"type": "text", "text": "<user text>"},
//!       {"type": "image", "media_type": "image/png", "data": "<base64 screenshot>"},
//!       {"type": "image", "media_type": "image/png", "data": "<base64 SoM>"}
//!     ]}
//!   ]
//! }
//! ```
//!
//! The reply is either `{"text": "..."}` or a chat-completions body with
//! `choices[0].message.content`. Credentials come from the environment
//! variable named in the config and are sent as a bearer token.

use std::time::Duration;

use base64::Engine as _;
use serde::{Deserialize, Serialize};
use serde_json::{json, Value};
use thiserror::Error;

use super::scenario::{feedback_from_prompt, resolve_with_prompt, Scenario};
use super::PromptBundle;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum BackendError {
    #[error("backend unavailable: {0}")]
    BackendUnavailable(String),
}

pub trait ModelBackend: Send {
    fn generate(&mut self, prompt: &PromptBundle) -> Result<String, BackendError>;
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum BackendKind {
    ScriptedMock,
    HttpModel,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BackendConfig {
    pub kind: BackendKind,
    pub endpoint: Option<String>,
    pub model: String,
    pub temperature: f64,
    pub demo_count: usize,
    /// Name of the environment variable holding the API key.
    pub auth: Option<String>,
}

impl Default for BackendConfig {
    fn default() -> Self {
        Self {
            kind: BackendKind::ScriptedMock,
            endpoint: None,
            model: "default".into(),
            temperature: 0.1,
            demo_count: 8,
            auth: None,
        }
    }
}

impl BackendConfig {
    pub fn validate(&self) -> Result<(), String> {
        if self.temperature.is_nan() || self.temperature < 0.0 {
            return Err(format!("temperature {} must be >= 0", self.temperature));
        }
        if self.kind == BackendKind::HttpModel && self.endpoint.is_none() {
            return Err("the http backend needs an endpoint".into());
        }
        Ok(())
    }
}

/// Replays a scenario, one entry per call.
#[derive(Debug, Clone)]
pub struct ScriptedMock {
    scenario: Scenario,
    cursor: usize,
    turn: u32,
}

impl ScriptedMock {
    pub fn new(scenario: Scenario) -> Self {
        Self {
            scenario,
            cursor: 0,
            turn: 0,
        }
    }
}

impl ModelBackend for ScriptedMock {
    fn generate(&mut self, prompt: &PromptBundle) -> Result<String, BackendError> {
        self.turn += 1;
        let feedback = feedback_from_prompt(&prompt.user);
        let Some(entry) = self.scenario.entries.get(self.cursor) else {
            return Err(BackendError::BackendUnavailable(format!(
                "scenario {:?} exhausted at turn {}",
                self.scenario.name, self.turn
            )));
        };
        if !entry.trigger.matches(feedback) {
            return Err(BackendError::BackendUnavailable(format!(
                "scenario {:?} entry {} ({:?}) does not match turn {} (feedback {:?})",
                self.scenario.name,
                self.cursor + 1,
                entry.trigger,
                self.turn,
                feedback
            )));
        }
        if !entry.repeat {
            self.cursor += 1;
        }
        Ok(resolve_with_prompt(&entry.response, &prompt.user))
    }
}

/// Wraps a backend and fails on one planner turn (1-based).
pub struct FaultyBackend<B> {
    inner: B,
    drop_turn: u32,
    turn: u32,
}

impl<B: ModelBackend> FaultyBackend<B> {
    pub fn new(inner: B, drop_turn: u32) -> Self {
        Self {
            inner,
            drop_turn,
            turn: 0,
        }
    }
}

impl<B: ModelBackend> ModelBackend for FaultyBackend<B> {
    fn generate(&mut self, prompt: &PromptBundle) -> Result<String, BackendError> {
        self.turn += 1;
        if self.turn == self.drop_turn {
            return Err(BackendError::BackendUnavailable(format!(
                "injected backend drop at turn {}",
                self.turn
            )));
        }
        self.inner.generate(prompt)
    }
}

impl ModelBackend for Box<dyn ModelBackend> {
    fn generate(&mut self, prompt: &PromptBundle) -> Result<String, BackendError> {
        (**self).generate(prompt)
    }
}

/// JSON-over-HTTP model client. Cheap to clone; clones share the
/// connection pool.
#[derive(Clone)]
pub struct HttpModel {
    agent: ureq::Agent,
    endpoint: String,
    model: String,
    temperature: f64,
    auth_var: Option<String>,
    tries: u32,
    base_delay: Duration,
}

const MAX_DELAY: Duration = Duration::from_secs(2);

impl HttpModel {
    pub fn new(cfg: &BackendConfig) -> Result<Self, String> {
        cfg.validate()?;
        let agent: ureq::Agent = ureq::Agent::config_builder()
            .timeout_global(Some(Duration::from_secs(120)))
            .http_status_as_error(false)
            .build()
            .into();
        Ok(Self {
            agent,
            endpoint: cfg.endpoint.clone().unwrap_or_default(),
            model: cfg.model.clone(),
            temperature: cfg.temperature,
            auth_var: cfg.auth.clone(),
            tries: 3,
            base_delay: Duration::from_millis(200),
        })
    }

    pub fn with_base_delay(mut self, d: Duration) -> Self {
        self.base_delay = d;
        self
    }

    pub fn request_body(&self, prompt: &PromptBundle) -> Result<Value, BackendError> {
        let b64 = base64::engine::general_purpose::STANDARD;
        let mut content = vec![json!({"type": "text", "text": prompt.user})];
        for img in &prompt.images {
            let png = img
                .to_png()
                .map_err(|e| BackendError::BackendUnavailable(format!("cannot encode image: {e}")))?;
            content.push(json!({"type": "image", "media_type": "image/png", "data": b64.encode(png)}));
        }
        Ok(json!({
            "model": self.model,
            "temperature": self.temperature,
            "messages": [
                {"role": "system", "content": prompt.system},
                {"role": "user", "content": content},
            ],
        }))
    }

    fn attempt(&self, body: &Value) -> Result<String, (bool, String)> {
        let mut req = self.agent.post(&self.endpoint);
        if let Some(var) = &self.auth_var {
            match std::env::var(var) {
                Ok(key) => req = req.header("Authorization", &format!("Bearer {key}")),
                Err(_) => return Err((false, format!("credential variable {var} is not set"))),
            }
        }
        let mut resp = req.send_json(body).map_err(|e| (true, e.to_string()))?;
        let status = resp.status().as_u16();
        if status == 429 || status >= 500 {
            return Err((true, format!("HTTP {status}")));
        }
        if status >= 400 {
            return Err((false, format!("HTTP {status}")));
        }
        let v: Value = resp
            .body_mut()
            .read_json()
            .map_err(|e| (false, format!("invalid JSON reply: {e}")))?;
        v.get("text")
            .and_then(Value::as_str)
            .or_else(|| v.pointer("/choices/0/message/content").and_then(Value::as_str))
            .map(str::to_string)
            .ok_or_else(|| (false, "reply has neither text nor choices[0].message.content".into()))
    }
}

impl ModelBackend for HttpModel {
    fn generate(&mut self, prompt: &PromptBundle) -> Result<String, BackendError> {
        let body = self.request_body(prompt)?;
        let mut last = String::new();
        for i in 0..self.tries {
            match self.attempt(&body) {
                Ok(text) => return Ok(text),
                Err((transient, msg)) => {
                    tracing::warn!(attempt = i + 1, %msg, "model request failed");
                    last = msg;
                    if !transient {
                        break;
                    }
                    if i + 1 < self.tries {
                        std::thread::sleep((self.base_delay * 2u32.pow(i)).min(MAX_DELAY));
                    }
                }
            }
        }
        Err(BackendError::BackendUnavailable(last))
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::planner::scenario::parse_scenario;

    fn prompt(user: &str) -> PromptBundle {
        PromptBundle {
            system: String::new(),
            user: user.into(),
            images: Vec::new(),
        }
    }

    #[test]
    fn scripted_lookup_and_exhaustion() {
        let s = parse_scenario("#scenario v1 happy_path\n>>> any\nfirst\n>>> no-feedback\nsecond\n").unwrap();
        let mut b = ScriptedMock::new(s);
        assert_eq!(b.generate(&prompt("")).unwrap(), "first");
        assert!(b.generate(&prompt("x\n## Feedback\nboom")).is_err());
    }

    #[test]
    fn scripted_exhausted() {
        let s = parse_scenario("#scenario v1 one\n>>> any\nonly\n").unwrap();
        let mut b = ScriptedMock::new(s);
        b.generate(&prompt("")).unwrap();
        assert!(matches!(b.generate(&prompt("")), Err(BackendError::BackendUnavailable(_))));
    }

    #[test]
    fn faulty_drops_one_turn() {
        let s = parse_scenario("#scenario v1 r\n>>> any repeat\nok\n").unwrap();
        let mut b = FaultyBackend::new(ScriptedMock::new(s), 2);
        assert!(b.generate(&prompt("")).is_ok());
        assert!(b.generate(&prompt("")).is_err());
        assert!(b.generate(&prompt("")).is_ok());
    }
}
