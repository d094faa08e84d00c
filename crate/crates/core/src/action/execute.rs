use serde::{Deserialize, Serialize};
use thiserror::Error;

use super::keys::parse_chord;
use super::validate::resolve_target;
use super::{Action, ActionScript, ElementRef};
use crate::env::{EnvError, Environment, Input, MouseButton};
use crate::grounding::ScreenObservation;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "status", rename_all = "snake_case")]
pub enum ExecResult {
    Ok,
    Failed { message: String, step_index: usize },
}

impl ExecResult {
    pub fn is_ok(&self) -> bool {
        matches!(self, ExecResult::Ok)
    }
}

/// The environment itself broke while running a script.
#[derive(Debug, Clone, Error, PartialEq)]
#[error("system exception at step {step_index}: {message}")]
pub struct SystemException {
    pub message: String,
    pub step_index: usize,
}

fn to_px(p: (f64, f64), (w, h): (u32, u32)) -> (i32, i32) {
    let x = (p.0 * w as f64).floor().clamp(0.0, (w.max(1) - 1) as f64);
    let y = (p.1 * h as f64).floor().clamp(0.0, (h.max(1) - 1) as f64);
    (x as i32, y as i32)
}

fn point(r: &ElementRef, obs: &ScreenObservation) -> Result<(i32, i32), String> {
    resolve_target(r, obs)
        .map(|p| to_px(p, obs.screen_size()))
        .ok_or_else(|| match r {
            ElementRef::ById(id) => format!("invalid target: no element with id {id} on screen"),
            ElementRef::ByCoord { .. } => "invalid target".into(),
        })
}

/// Translates one action into environment input, resolving ids against
/// the observation the script was planned on.
pub fn to_input(action: &Action, obs: &ScreenObservation) -> Result<Input, String> {
    Ok(match action {
        Action::Move { target } => {
            let (x, y) = point(target, obs)?;
            Input::MoveTo { x, y }
        }
        Action::SingleClick => Input::Click {
            button: MouseButton::Left,
            count: 1,
        },
        Action::DoubleClick => Input::Click {
            button: MouseButton::Left,
            count: 2,
        },
        Action::RightClick => Input::Click {
            button: MouseButton::Right,
            count: 1,
        },
        Action::Scroll { dist } => Input::Scroll { dist: *dist },
        Action::Drag { x1, y1, x2, y2 } => Input::Drag {
            x1: *x1,
            y1: *y1,
            x2: *x2,
            y2: *y2,
        },
        Action::Press { key } => Input::Press {
            keys: parse_chord(key).ok_or_else(|| format!("unknown key {key:?}"))?,
        },
        Action::Write { text } => Input::Type { text: text.clone() },
        Action::Tap { target } => {
            let (x, y) = point(target, obs)?;
            Input::Tap { x, y }
        }
        Action::LongTap { target } => {
            let (x, y) = point(target, obs)?;
            Input::LongTap { x, y }
        }
        Action::SwipeElement { id, dir, dist } => {
            let (x, y) = point(&ElementRef::ById(*id), obs)?;
            Input::Swipe {
                x,
                y,
                dir: *dir,
                dist: *dist,
            }
        }
        Action::SwipeCoord { x, y, dir, dist } => Input::Swipe {
            x: *x,
            y: *y,
            dir: *dir,
            dist: *dist,
        },
    })
}

/// Runs the script step by step and stops at the first failing step.
/// Cursor and focus changes persist in `env` between steps.
pub fn execute<E: Environment + ?Sized>(
    script: &ActionScript,
    obs: &ScreenObservation,
    env: &mut E,
) -> Result<ExecResult, SystemException> {
    execute_observed(script, obs, env, |_, _| {})
}

/// [`execute`] with a callback after every applied step.
pub fn execute_observed<E: Environment + ?Sized>(
    script: &ActionScript,
    obs: &ScreenObservation,
    env: &mut E,
    mut applied: impl FnMut(usize, &E),
) -> Result<ExecResult, SystemException> {
    for (i, action) in script.actions().enumerate() {
        let input = match to_input(action, obs) {
            Ok(input) => input,
            Err(message) => {
                return Ok(ExecResult::Failed {
                    message,
                    step_index: i,
                })
            }
        };
        match env.apply(&input) {
            Ok(()) => applied(i, env),
            Err(EnvError::Effect(message)) => {
                let message = if message.is_empty() {
                    format!("{} had no effect", action.name())
                } else {
                    message
                };
                return Ok(ExecResult::Failed {
                    message,
                    step_index: i,
                });
            }
            Err(e) => {
                return Err(SystemException {
                    message: e.to_string(),
                    step_index: i,
                })
            }
        }
    }
    Ok(ExecResult::Ok)
}
