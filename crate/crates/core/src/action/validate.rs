use thiserror::Error;

use super::keys::parse_chord;
use super::{Action, ActionScript, ElementRef};
use crate::grounding::ScreenObservation;

#[derive(Debug, Clone, Error, PartialEq)]
pub enum ValidationError {
    #[error("invalid target: no element with id {0} on screen")]
    InvalidTarget(u32),
    #[error("step {step}: coordinates out of range")]
    OutOfRange { step: usize },
    #[error("unknown key {0:?}")]
    UnknownKey(String),
}

fn unit(v: f64) -> bool {
    (0.0..=1.0).contains(&v)
}

fn check_ref(step: usize, r: &ElementRef, obs: &ScreenObservation) -> Result<(), ValidationError> {
    match *r {
        ElementRef::ById(id) => obs
            .element(id)
            .map(|_| ())
            .ok_or(ValidationError::InvalidTarget(id)),
        ElementRef::ByCoord { x, y } if unit(x) && unit(y) => Ok(()),
        ElementRef::ByCoord { .. } => Err(ValidationError::OutOfRange { step }),
    }
}

fn check_px(step: usize, x: i32, y: i32, obs: &ScreenObservation) -> Result<(), ValidationError> {
    let (w, h) = obs.screen_size();
    if x >= 0 && y >= 0 && (x as u32) < w && (y as u32) < h {
        Ok(())
    } else {
        Err(ValidationError::OutOfRange { step })
    }
}

/// Checks every step against the observation it will run on.
pub fn validate(script: &ActionScript, obs: &ScreenObservation) -> Result<(), ValidationError> {
    for (step, action) in script.actions().enumerate() {
        match action {
            Action::Move { target } | Action::Tap { target } | Action::LongTap { target } => {
                check_ref(step, target, obs)?
            }
            Action::SwipeElement { id, .. } => check_ref(step, &ElementRef::ById(*id), obs)?,
            Action::SwipeCoord { x, y, .. } => check_px(step, *x, *y, obs)?,
            Action::Drag { x1, y1, x2, y2 } => {
                check_px(step, *x1, *y1, obs)?;
                check_px(step, *x2, *y2, obs)?;
            }
            Action::Press { key } => {
                if parse_chord(key).is_none() {
                    return Err(ValidationError::UnknownKey(key.clone()));
                }
            }
            Action::SingleClick
            | Action::DoubleClick
            | Action::RightClick
            | Action::Scroll { .. }
            | Action::Write { .. } => {}
        }
    }
    Ok(())
}

/// Normalized point for a validated reference: the box center for ids.
pub fn resolve_target(r: &ElementRef, obs: &ScreenObservation) -> Option<(f64, f64)> {
    match *r {
        ElementRef::ById(id) => obs.element(id).map(|e| e.bbox.center()),
        ElementRef::ByCoord { x, y } => Some((x, y)),
    }
}
