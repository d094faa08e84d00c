//! Code-based action space: the `computer.*` call family, its parser,
//! validation against an observation, and execution against an environment.
//!
//! Desktop calls:
//!
//! | call | arguments |
//! |---|---|
//! | `computer.mouse.move` | `id=<int>` or `x=<float>, y=<float>` (normalized) |
//! | `computer.mouse.single_click` / `double_click` / `right_click` | none |
//! | `computer.mouse.scroll` | `dist=<nonzero int>`, positive scrolls up |
//! | `computer.mouse.drag` | `x1, y1, x2, y2` pixel ints |
//! | `computer.keyboard.press` | `key=<str>`, e.g. `"ctrl+s"` |
//! | `computer.keyboard.write` | `text=<str>` |
//!
//! Smartphone calls:
//!
//! | call | arguments |
//! |---|---|
//! | `computer.touch.tap` / `long_tap` | `id=<int>` or `x=<float>, y=<float>` |
//! | `computer.touch.swipe` | `id, dir, dist` or `x, y` (pixel ints), `dir, dist` |
//! | `computer.keyboard.write` | `text=<str>` |

mod execute;
pub mod keys;
mod parser;
mod validate;

use std::fmt;

use serde::{Deserialize, Serialize};

pub use execute::{execute, execute_observed, to_input, ExecResult, SystemException};
pub use parser::{parse_action_script, ActionError};
pub use validate::{resolve_target, validate, ValidationError};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Platform {
    Desktop,
    Smartphone,
}

impl fmt::Display for Platform {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Platform::Desktop => "desktop",
            Platform::Smartphone => "smartphone",
        })
    }
}

impl std::str::FromStr for Platform {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "desktop" => Ok(Platform::Desktop),
            "smartphone" => Ok(Platform::Smartphone),
            other => Err(format!("unknown platform {other:?}")),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub enum ElementRef {
    ById(u32),
    /// Normalized screen coordinates.
    ByCoord { x: f64, y: f64 },
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Direction {
    Up,
    Down,
    Left,
    Right,
}

impl Direction {
    pub fn as_str(self) -> &'static str {
        match self {
            Direction::Up => "up",
            Direction::Down => "down",
            Direction::Left => "left",
            Direction::Right => "right",
        }
    }

    pub fn parse(s: &str) -> Option<Self> {
        match s {
            "up" => Some(Direction::Up),
            "down" => Some(Direction::Down),
            "left" => Some(Direction::Left),
            "right" => Some(Direction::Right),
            _ => None,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub enum Action {
    Move { target: ElementRef },
    SingleClick,
    DoubleClick,
    RightClick,
    Scroll { dist: i32 },
    Drag { x1: i32, y1: i32, x2: i32, y2: i32 },
    Press { key: String },
    Write { text: String },
    Tap { target: ElementRef },
    LongTap { target: ElementRef },
    SwipeElement { id: u32, dir: Direction, dist: f64 },
    /// Start point in pixels.
    SwipeCoord { x: i32, y: i32, dir: Direction, dist: f64 },
}

impl Action {
    /// Short action name as used in the call syntax.
    pub fn name(&self) -> &'static str {
        match self {
            Action::Move { .. } => "move",
            Action::SingleClick => "single_click",
            Action::DoubleClick => "double_click",
            Action::RightClick => "right_click",
            Action::Scroll { .. } => "scroll",
            Action::Drag { .. } => "drag",
            Action::Press { .. } => "press",
            Action::Write { .. } => "write",
            Action::Tap { .. } => "tap",
            Action::LongTap { .. } => "long_tap",
            Action::SwipeElement { .. } | Action::SwipeCoord { .. } => "swipe",
        }
    }

    pub fn is_smartphone_only(&self) -> bool {
        matches!(
            self,
            Action::Tap { .. }
                | Action::LongTap { .. }
                | Action::SwipeElement { .. }
                | Action::SwipeCoord { .. }
        )
    }

    pub fn is_desktop_only(&self) -> bool {
        !self.is_smartphone_only() && !matches!(self, Action::Write { .. })
    }
}

pub(crate) fn quote(s: &str) -> String {
    let mut out = String::with_capacity(s.len() + 2);
    out.push('"');
    for c in s.chars() {
        match c {
            '"' => out.push_str("\\\""),
            '\\' => out.push_str("\\\\"),
            '\n' => out.push_str("\\n"),
            '\t' => out.push_str("\\t"),
            '\r' => out.push_str("\\r"),
            c => out.push(c),
        }
    }
    out.push('"');
    out
}

fn fmt_target(f: &mut fmt::Formatter<'_>, t: &ElementRef) -> fmt::Result {
    match t {
        ElementRef::ById(id) => write!(f, "id={id}"),
        ElementRef::ByCoord { x, y } => write!(f, "x={x:?}, y={y:?}"),
    }
}

/// Canonical call syntax; re-parses to an equal action.
impl fmt::Display for Action {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Action::Move { target } => {
                f.write_str("computer.mouse.move(")?;
                fmt_target(f, target)?;
                f.write_str(")")
            }
            Action::SingleClick => f.write_str("computer.mouse.single_click()"),
            Action::DoubleClick => f.write_str("computer.mouse.double_click()"),
            Action::RightClick => f.write_str("computer.mouse.right_click()"),
            Action::Scroll { dist } => write!(f, "computer.mouse.scroll(dist={dist})"),
            Action::Drag { x1, y1, x2, y2 } => {
                write!(f, "computer.mouse.drag(x1={x1}, y1={y1}, x2={x2}, y2={y2})")
            }
            Action::Press { key } => write!(f, "computer.keyboard.press(key={})", quote(key)),
            Action::Write { text } => write!(f, "computer.keyboard.write(text={})", quote(text)),
            Action::Tap { target } => {
                f.write_str("computer.touch.tap(")?;
                fmt_target(f, target)?;
                f.write_str(")")
            }
            Action::LongTap { target } => {
                f.write_str("computer.touch.long_tap(")?;
                fmt_target(f, target)?;
                f.write_str(")")
            }
            Action::SwipeElement { id, dir, dist } => write!(
                f,
                "computer.touch.swipe(id={id}, dir={}, dist={dist:?})",
                quote(dir.as_str())
            ),
            Action::SwipeCoord { x, y, dir, dist } => write!(
                f,
                "computer.touch.swipe(x={x}, y={y}, dir={}, dist={dist:?})",
                quote(dir.as_str())
            ),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ScriptStep {
    pub action: Action,
    pub comment: Option<String>,
}

#[derive(Debug, Clone, PartialEq, Default, Serialize, Deserialize)]
pub struct ActionScript {
    pub steps: Vec<ScriptStep>,
}

impl ActionScript {
    pub fn new(actions: impl IntoIterator<Item = Action>) -> Self {
        Self {
            steps: actions
                .into_iter()
                .map(|action| ScriptStep {
                    action,
                    comment: None,
                })
                .collect(),
        }
    }

    pub fn is_empty(&self) -> bool {
        self.steps.is_empty()
    }

    pub fn len(&self) -> usize {
        self.steps.len()
    }

    pub fn actions(&self) -> impl Iterator<Item = &Action> {
        self.steps.iter().map(|s| &s.action)
    }

    /// One call per line, without comments. Used for trajectory digests.
    pub fn canonical_actions(&self) -> Vec<String> {
        self.actions().map(|a| a.to_string()).collect()
    }
}

/// Renders one call per line with `# comment` suffixes.
impl fmt::Display for ActionScript {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for (i, step) in self.steps.iter().enumerate() {
            if i > 0 {
                f.write_str("\n")?;
            }
            write!(f, "{}", step.action)?;
            if let Some(c) = &step.comment {
                write!(f, " # {c}")?;
            }
        }
        Ok(())
    }
}
