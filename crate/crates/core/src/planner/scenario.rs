//! Scripted scenario files for the mock backend.
//!
//! ```text
//! #scenario v1 notepad_draft-golden
//! # comment lines are allowed before the first entry
//! >>> any
//! [New Task List]
//! ...
//! >>> feedback-contains file absent
//! ...
//! >>> no-feedback repeat
//! ...
//! ```
//!
//! Entries are consumed in order, one per planner turn. The entry under the
//! cursor must match the turn: `any` always matches, `no-feedback` matches a
//! prompt without a feedback section, `feedback-contains <text>` matches
//! when the feedback contains the text. A trailing `repeat` keeps the
//! cursor on the entry. A mismatch or an exhausted script is a backend
//! failure.
//!
//! Responses may contain placeholders resolved against the prompt's
//! candidate elements: `@{Label}` or `@{role:Label}` become the ID of the
//! first matching element, or `0` when nothing matches.

use thiserror::Error;

use crate::grounding::GroundedElement;

pub const SCENARIO_HEADER: &str = "#scenario v1";

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Trigger {
    Any,
    NoFeedback,
    FeedbackContains(String),
}

impl Trigger {
    pub fn matches(&self, feedback: Option<&str>) -> bool {
        match self {
            Trigger::Any => true,
            Trigger::NoFeedback => feedback.is_none(),
            Trigger::FeedbackContains(t) => feedback.is_some_and(|f| f.contains(t.as_str())),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ScenarioEntry {
    pub trigger: Trigger,
    pub repeat: bool,
    pub response: String,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Scenario {
    pub name: String,
    pub entries: Vec<ScenarioEntry>,
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
#[error("scenario line {line}: {reason}")]
pub struct ScenarioError {
    pub line: usize,
    pub reason: String,
}

fn err<T>(line: usize, reason: impl Into<String>) -> Result<T, ScenarioError> {
    Err(ScenarioError {
        line,
        reason: reason.into(),
    })
}

fn parse_trigger(line: usize, spec: &str) -> Result<(Trigger, bool), ScenarioError> {
    let mut spec = spec.trim();
    let mut repeat = false;
    if let Some(rest) = spec.strip_suffix(" repeat").or((spec == "repeat").then_some("")) {
        repeat = true;
        spec = rest.trim();
    }
    let trigger = if spec == "any" {
        Trigger::Any
    } else if spec == "no-feedback" {
        Trigger::NoFeedback
    } else if let Some(t) = spec.strip_prefix("feedback-contains ") {
        Trigger::FeedbackContains(t.trim().to_string())
    } else {
        return err(line, format!("unknown trigger {spec:?}"));
    };
    Ok((trigger, repeat))
}

pub fn parse_scenario(text: &str) -> Result<Scenario, ScenarioError> {
    let mut lines = text.lines().enumerate().map(|(i, l)| (i + 1, l));
    let name = match lines.next() {
        Some((_, h)) if h.starts_with(SCENARIO_HEADER) => h[SCENARIO_HEADER.len()..].trim().to_string(),
        _ => return err(1, format!("expected header {SCENARIO_HEADER:?}")),
    };
    let mut entries: Vec<ScenarioEntry> = Vec::new();
    let mut body: Vec<&str> = Vec::new();
    let mut pending: Option<(Trigger, bool)> = None;
    let flush = |pending: &mut Option<(Trigger, bool)>, body: &mut Vec<&str>, entries: &mut Vec<ScenarioEntry>| {
        if let Some((trigger, repeat)) = pending.take() {
            let response = body.join("\n").trim_end_matches('\n').to_string();
            entries.push(ScenarioEntry {
                trigger,
                repeat,
                response,
            });
        }
        body.clear();
    };
    for (n, line) in lines {
        if let Some(spec) = line.strip_prefix(">>> ") {
            flush(&mut pending, &mut body, &mut entries);
            pending = Some(parse_trigger(n, spec)?);
        } else if pending.is_some() {
            body.push(line);
        } else if !(line.trim().is_empty() || line.starts_with('#')) {
            return err(n, "text before the first entry");
        }
    }
    flush(&mut pending, &mut body, &mut entries);
    if entries.is_empty() {
        return err(1, "scenario has no entries");
    }
    Ok(Scenario { name, entries })
}

pub fn render_scenario(s: &Scenario) -> String {
    let mut out = format!("{SCENARIO_HEADER} {}\n", s.name);
    for e in &s.entries {
        let t = match &e.trigger {
            Trigger::Any => "any".to_string(),
            Trigger::NoFeedback => "no-feedback".to_string(),
            Trigger::FeedbackContains(t) => format!("feedback-contains {t}"),
        };
        let rep = if e.repeat { " repeat" } else { "" };
        out.push_str(&format!(">>> {t}{rep}\n{}\n", e.response));
    }
    out
}

/// `(id, label, role)` rows of the candidate block in a prompt's user text.
pub fn candidates_from_prompt(user: &str) -> Vec<(u32, String, String)> {
    let Some(start) = user.find("## Candidate Screen Elements\n") else {
        return Vec::new();
    };
    let block = &user[start..];
    let mut out = Vec::new();
    for line in block.lines().skip(2) {
        if line.is_empty() || line.starts_with("## ") {
            break;
        }
        let parts: Vec<&str> = line.split(" | ").collect();
        if parts.len() < 4 {
            continue;
        }
        let Ok(id) = parts[0].parse() else { continue };
        let role = parts[parts.len() - 2].to_string();
        let label = parts[1..parts.len() - 2].join(" | ");
        out.push((id, label, role));
    }
    out
}

/// The feedback section of a prompt, if present.
pub fn feedback_from_prompt(user: &str) -> Option<&str> {
    user.find("\n## Feedback\n")
        .map(|i| user[i + "\n## Feedback\n".len()..].trim_end())
}

/// Replaces `@{Label}` / `@{role:Label}` with element IDs.
pub fn resolve_placeholders<'a, I>(text: &str, candidates: I) -> String
where
    I: IntoIterator<Item = (u32, &'a str, &'a str)> + Clone,
{
    let mut out = String::with_capacity(text.len());
    let mut rest = text;
    while let Some(i) = rest.find("@{") {
        out.push_str(&rest[..i]);
        let after = &rest[i + 2..];
        let Some(end) = after.find('}') else {
            out.push_str(&rest[i..]);
            return out;
        };
        let key = &after[..end];
        let (role, label) = match key.split_once(':') {
            Some((r, l)) if !r.is_empty() && r.chars().all(|c| c.is_ascii_lowercase()) => (Some(r), l),
            _ => (None, key),
        };
        let find = |role: Option<&str>, label: &str| {
            candidates
                .clone()
                .into_iter()
                .find(|(_, l, r)| *l == label && role.is_none_or(|want| want == *r))
                .map(|(id, _, _)| id)
        };
        // A label that itself contains a colon still matches verbatim.
        let id = find(role, label)
            .or_else(|| role.and_then(|_| find(None, key)))
            .unwrap_or(0);
        out.push_str(&id.to_string());
        rest = &after[end + 1..];
    }
    out.push_str(rest);
    out
}

/// Placeholder resolution against grounded elements.
pub fn resolve_with_elements(text: &str, elements: &[GroundedElement]) -> String {
    resolve_placeholders(
        text,
        elements.iter().map(|e| (e.id, e.label.as_str(), e.role.as_str())),
    )
}

/// Placeholder resolution against a prompt's candidate block.
pub fn resolve_with_prompt(text: &str, user: &str) -> String {
    let c = candidates_from_prompt(user);
    resolve_placeholders(text, c.iter().map(|(id, l, r)| (*id, l.as_str(), r.as_str())))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn parse_and_render() {
        let text = "#scenario v1 demo\n# note\n>>> any\nline one\nline two\n>>> feedback-contains absent repeat\nretry\n";
        let s = parse_scenario(text).unwrap();
        assert_eq!(s.name, "demo");
        assert_eq!(s.entries.len(), 2);
        assert_eq!(s.entries[0].response, "line one\nline two");
        assert!(s.entries[1].repeat);
        assert_eq!(s.entries[1].trigger, Trigger::FeedbackContains("absent".into()));
        assert_eq!(parse_scenario(&render_scenario(&s)).unwrap(), s);
    }

    #[test]
    fn bad_scenarios() {
        assert!(parse_scenario("").is_err());
        assert!(parse_scenario("#scenario v1 x\n").is_err());
        assert!(parse_scenario("#scenario v1 x\n>>> sometimes\nx").is_err());
        assert!(parse_scenario("#scenario v1 x\nstray\n>>> any\nx").is_err());
    }

    #[test]
    fn placeholders() {
        let c = [(3, "Save", "button"), (7, "Save", "menuitem"), (9, "a:b", "text")];
        let r = |t: &str| resolve_placeholders(t, c.iter().copied());
        assert_eq!(r("move(id=@{Save})"), "move(id=3)");
        assert_eq!(r("move(id=@{menuitem:Save})"), "move(id=7)");
        assert_eq!(r("@{a:b} @{Nope}"), "9 0");
        assert_eq!(r("no placeholder"), "no placeholder");
    }

    #[test]
    fn prompt_sections() {
        let user = "## Candidate Screen Elements\nID | Content | Role | Location\n4 | Vol + | button | (0.1, 0.1, 0.2, 0.2)\n\n## Feedback\nboom\n";
        assert_eq!(candidates_from_prompt(user), vec![(4, "Vol +".into(), "button".into())]);
        assert_eq!(feedback_from_prompt(user), Some("boom"));
        assert_eq!(resolve_with_prompt("@{button:Vol +}", user), "4");
    }
}
