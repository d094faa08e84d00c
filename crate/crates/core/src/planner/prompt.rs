use std::fmt::Write as _;

use thiserror::Error;

use super::{ActionOutcome, ContextMemory, HistoryEntry};
use crate::grounding::geometry::display_coord;
use crate::grounding::{GroundedElement, Raster, ScreenObservation};

pub const SYSTEM_PROMPT: &str = include_str!("../../resources/system_prompt.txt");
pub const RESPONSE_FORMAT: &str = include_str!("../../resources/response_format.txt");
pub const SOPS: &str = include_str!("../../resources/sops.txt");
pub const DEMOS: &str = include_str!("../../resources/demos.txt");

#[derive(Debug, Clone, PartialEq)]
pub struct PromptConfig {
    pub demo_count: usize,
    /// Budget on system + user text, in bytes.
    pub budget: usize,
}

impl Default for PromptConfig {
    fn default() -> Self {
        Self {
            demo_count: 8,
            budget: 48_000,
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct PromptBundle {
    pub system: String,
    pub user: String,
    /// Raw screenshot, then the SoM raster.
    pub images: Vec<Raster>,
}

impl PromptBundle {
    pub fn text_len(&self) -> usize {
        self.system.len() + self.user.len()
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum PromptError {
    #[error("prompt is {size} bytes, budget is {budget}")]
    PromptTooLarge { size: usize, budget: usize },
}

pub fn demos(count: usize) -> Vec<&'static str> {
    DEMOS
        .split("=== demo\n")
        .map(str::trim_end)
        .filter(|d| !d.is_empty())
        .take(count)
        .collect()
}

/// `ID | Content | Role | Location`, one element per line.
pub fn candidate_block(elements: &[GroundedElement]) -> String {
    let mut out = String::from("ID | Content | Role | Location\n");
    for e in elements {
        let b = &e.bbox;
        let _ = writeln!(
            out,
            "{} | {} | {} | ({}, {}, {}, {})",
            e.id,
            e.label,
            e.role,
            display_coord(b.x1),
            display_coord(b.y1),
            display_coord(b.x2),
            display_coord(b.y2)
        );
    }
    out
}

fn history_line(h: &HistoryEntry, compressed: bool) -> String {
    let outcome = match &h.outcome {
        ActionOutcome::Ok => "ok".to_string(),
        ActionOutcome::Failed { message } => format!("failed: {message}"),
    };
    if compressed {
        let names: Vec<&str> = h.script.actions().map(|a| a.name()).collect();
        format!("task {}: {} -> {outcome}", h.task_index, names.join(", "))
    } else {
        format!(
            "task {}: {} -> {outcome}",
            h.task_index,
            h.script.canonical_actions().join("; ")
        )
    }
}

fn build(
    request: &str,
    memory: &ContextMemory,
    obs: &ScreenObservation,
    feedback: Option<&str>,
    cfg: &PromptConfig,
    compressed: bool,
) -> PromptBundle {
    let system = format!("{SYSTEM_PROMPT}\n{RESPONSE_FORMAT}\nStandard Operating Procedures:\n{SOPS}");
    let mut u = String::new();
    let demos = demos(cfg.demo_count);
    if !demos.is_empty() {
        u.push_str("## Demonstrations\n");
        for (i, d) in demos.iter().enumerate() {
            let _ = writeln!(u, "### Example {}\n{d}", i + 1);
        }
        u.push('\n');
    }
    let _ = writeln!(u, "## User Objective\n{request}\n");
    u.push_str("## Old Task List\n");
    if memory.old_task_lists.is_empty() {
        u.push_str("(none)\n");
    }
    for l in &memory.old_task_lists {
        let _ = writeln!(u, "{l}");
    }
    u.push_str("\n## History Actions\n");
    if memory.history_actions.is_empty() {
        u.push_str("(none)\n");
    }
    for h in &memory.history_actions {
        let _ = writeln!(u, "{}", history_line(h, compressed));
    }
    let _ = write!(u, "\n## Semantic Grounding\n{}", obs.semantic_text);
    let _ = writeln!(u, "\n## Window Title\n{}\n", obs.window_title);
    u.push_str("## All Open Windows\n");
    if obs.open_windows.is_empty() {
        u.push_str("(none)\n");
    }
    for w in &obs.open_windows {
        let _ = writeln!(u, "- {w}");
    }
    let _ = write!(u, "\n## Candidate Screen Elements\n{}", candidate_block(&obs.elements));
    if let Some(fb) = feedback {
        let _ = writeln!(u, "\n## Feedback\n{fb}");
    }
    PromptBundle {
        system,
        user: u,
        images: vec![obs.screenshot.clone(), obs.som_image.clone()],
    }
}

/// Builds the prompt: objective, old task lists, history actions, semantic
/// grounding, window title, open windows, candidate elements and feedback,
/// in that order, after the demonstrations.
pub fn assemble_prompt(
    request: &str,
    memory: &ContextMemory,
    obs: &ScreenObservation,
    feedback: Option<&str>,
    cfg: &PromptConfig,
) -> Result<PromptBundle, PromptError> {
    let p = build(request, memory, obs, feedback, cfg, false);
    if p.text_len() > cfg.budget {
        return Err(PromptError::PromptTooLarge {
            size: p.text_len(),
            budget: cfg.budget,
        });
    }
    Ok(p)
}

/// Like [`assemble_prompt`], but on `PromptTooLarge` drops the oldest task
/// lists and then compresses the history to action names before one final
/// attempt. Returns the prompt and whether truncation happened.
pub fn assemble_with_truncation(
    request: &str,
    memory: &ContextMemory,
    obs: &ScreenObservation,
    feedback: Option<&str>,
    cfg: &PromptConfig,
) -> Result<(PromptBundle, bool), PromptError> {
    match assemble_prompt(request, memory, obs, feedback, cfg) {
        Ok(p) => return Ok((p, false)),
        Err(PromptError::PromptTooLarge { .. }) => {}
    }
    let mut m = memory.clone();
    while !m.old_task_lists.is_empty() {
        m.old_task_lists.remove(0);
        let p = build(request, &m, obs, feedback, cfg, false);
        if p.text_len() <= cfg.budget {
            return Ok((p, true));
        }
    }
    let p = build(request, &m, obs, feedback, cfg, true);
    if p.text_len() > cfg.budget {
        return Err(PromptError::PromptTooLarge {
            size: p.text_len(),
            budget: cfg.budget,
        });
    }
    Ok((p, true))
}
