//! The environment interface the agent loop drives. The simulator in
//! [`crate::sim`] is the bundled implementation.

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::action::{Direction, Platform};
use crate::grounding::Raster;
use crate::sim::Check;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum MouseButton {
    Left,
    Right,
}

/// Device-level input in screen pixels.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum Input {
    MoveTo { x: i32, y: i32 },
    Click { button: MouseButton, count: u8 },
    Scroll { dist: i32 },
    Drag { x1: i32, y1: i32, x2: i32, y2: i32 },
    /// Normalized chord parts, e.g. `["ctrl", "s"]`.
    Press { keys: Vec<String> },
    Type { text: String },
    Tap { x: i32, y: i32 },
    LongTap { x: i32, y: i32 },
    Swipe { x: i32, y: i32, dir: Direction, dist: f64 },
}

#[derive(Debug, Clone, Error, PartialEq, Eq)]
pub enum EnvError {
    /// The input had no effect the environment can apply.
    #[error("{0}")]
    Effect(String),
    #[error("environment crashed: {0}")]
    Crash(String),
    #[error("environment unavailable: {0}")]
    Unavailable(String),
    #[error("reset failed: {0}")]
    ResetFailed(String),
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Verdict {
    pub pass: bool,
    /// Empty on pass; otherwise names the first failing check.
    pub feedback: String,
}

impl Verdict {
    pub fn pass() -> Self {
        Self {
            pass: true,
            feedback: String::new(),
        }
    }

    pub fn fail(feedback: impl Into<String>) -> Self {
        Self {
            pass: false,
            feedback: feedback.into(),
        }
    }
}

pub trait Environment {
    fn platform(&self) -> Platform;
    fn screen_size(&self) -> (u32, u32);
    /// Accessibility tree in the line-oriented `#a11y v1` format.
    fn accessibility_tree(&self) -> Result<String, EnvError>;
    fn screenshot(&self) -> Result<Raster, EnvError>;
    fn window_title(&self) -> String;
    fn open_windows(&self) -> Vec<String>;
    /// Applies one input. On `Err(Effect)` the state is left untouched.
    fn apply(&mut self, input: &Input) -> Result<(), EnvError>;
    fn wait(&mut self, ticks: u32);
    fn check(&mut self, checks: &[Check]) -> Verdict;
    /// Restores the pristine pre-request state.
    fn reset(&mut self) -> Result<(), EnvError>;
    /// Digest of the full mutable state.
    fn state_digest(&self) -> String;
    /// Logical clock in ticks.
    fn clock(&self) -> u64;
}
