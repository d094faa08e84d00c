//! The structured planner response:
//!
//! ~~~text
//! [Screen Annotation]
//! The desktop is visible; the Start button is at the bottom.
//! [New Task List]
//! 1. Open Notepad.
//! 2. Type "This is a draft."
//! [Current Task] 1/2 Open Notepad.
//! [Decision] COMMAND
//! [Action]
//! ```python
//! computer.mouse.move(id=14)
//! computer.mouse.single_click()
//! ```
//! [Memory]
//! Opening Notepad from the Start menu.
//! ~~~
//!
//! Text outside the sections is ignored. The first fenced block outside
//! the annotation, list and memory sections is the action code; it is
//! required for `COMMAND` and dropped otherwise.

use thiserror::Error;

use super::{Decision, PlanResponse, TaskList};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
#[error("malformed response: {0}")]
pub struct MalformedResponse(pub String);

fn bad<T>(reason: impl Into<String>) -> Result<T, MalformedResponse> {
    Err(MalformedResponse(reason.into()))
}

#[derive(Clone, Copy, PartialEq, Eq, Debug)]
enum Section {
    Preamble,
    Annotation,
    TaskList,
    Action,
    Memory,
}

fn header(line: &str) -> Option<(&'static str, &str)> {
    const HEADERS: [&str; 6] = [
        "[Screen Annotation]",
        "[New Task List]",
        "[Current Task]",
        "[Decision]",
        "[Action]",
        "[Memory]",
    ];
    let t = line.trim_start();
    HEADERS
        .iter()
        .find(|h| t.starts_with(**h))
        .map(|h| (*h, t[h.len()..].trim()))
}

/// Parses a raw model reply.
pub fn parse_plan_response(raw: &str) -> Result<PlanResponse, MalformedResponse> {
    let mut section = Section::Preamble;
    let mut annotation: Vec<&str> = Vec::new();
    let mut memory: Vec<&str> = Vec::new();
    let mut tasks: Vec<String> = Vec::new();
    let mut saw_list = false;
    let mut current: Option<(usize, usize)> = None;
    let mut decision: Option<Decision> = None;
    let mut code: Option<Vec<&str>> = None;
    let mut in_fence = false;
    let mut fence_done = false;

    for line in raw.lines() {
        if in_fence {
            if line.trim() == "```" {
                in_fence = false;
                fence_done = true;
            } else if let Some(c) = code.as_mut() {
                c.push(line);
            }
            continue;
        }
        if let Some((h, rest)) = header(line) {
            match h {
                "[Screen Annotation]" => section = Section::Annotation,
                "[New Task List]" => {
                    if saw_list {
                        return bad("more than one [New Task List]");
                    }
                    saw_list = true;
                    section = Section::TaskList;
                }
                "[Current Task]" => {
                    if current.is_some() {
                        return bad("more than one [Current Task]");
                    }
                    let ptr = rest.split_whitespace().next().unwrap_or("");
                    let parsed = ptr
                        .split_once('/')
                        .and_then(|(k, n)| Some((k.parse().ok()?, n.parse().ok()?)));
                    match parsed {
                        Some(p) => current = Some(p),
                        None => return bad(format!("[Current Task] needs k/n, got {rest:?}")),
                    }
                    section = Section::Preamble;
                }
                "[Decision]" => {
                    let tok = rest.split_whitespace().next().unwrap_or("");
                    decision = Some(match tok {
                        "COMMAND" => Decision::Command,
                        "DONE" => Decision::Done,
                        "WAIT" => Decision::Wait,
                        "" => return bad("[Decision] is empty"),
                        other => return bad(format!("unknown decision {other:?}")),
                    });
                    section = Section::Preamble;
                }
                "[Action]" => section = Section::Action,
                "[Memory]" => section = Section::Memory,
                _ => unreachable!(),
            }
            continue;
        }
        match section {
            Section::Annotation => annotation.push(line),
            Section::Memory => memory.push(line),
            Section::TaskList => {
                let t = line.trim();
                if t.is_empty() {
                    continue;
                }
                let Some((num, desc)) = t.split_once(". ") else {
                    continue;
                };
                let Ok(num) = num.parse::<usize>() else {
                    continue;
                };
                if num != tasks.len() + 1 {
                    return bad(format!("task numbering jumps to {num} after {}", tasks.len()));
                }
                tasks.push(desc.trim().to_string());
            }
            Section::Preamble | Section::Action => {
                let t = line.trim();
                if !fence_done && (t == "```python" || t == "```py" || t == "```") {
                    in_fence = true;
                    code = Some(Vec::new());
                }
            }
        }
    }
    if in_fence {
        return bad("unterminated code block");
    }
    if !saw_list || tasks.is_empty() {
        return bad("missing or empty [New Task List]");
    }
    let Some((k, n)) = current else {
        return bad("missing [Current Task]");
    };
    if n != tasks.len() {
        return bad(format!("[Current Task] says {n} tasks, list has {}", tasks.len()));
    }
    let task_list = TaskList::new(tasks, k).map_err(|e| MalformedResponse(e.to_string()))?;
    let Some(decision) = decision else {
        return bad("missing [Decision]");
    };
    let action_code = code.map(|c| c.join("\n"));
    let action_code = match decision {
        Decision::Command => match action_code {
            Some(c) => Some(c),
            None => return bad("COMMAND without a code block"),
        },
        _ => None,
    };
    Ok(PlanResponse {
        screen_annotation: annotation.join("\n").trim().to_string(),
        task_list,
        decision,
        action_code,
        memory_update: memory.join("\n").trim().to_string(),
    })
}

/// Renders a response in the format [`parse_plan_response`] reads.
pub fn render_plan_response(r: &PlanResponse) -> String {
    let mut out = String::new();
    out.push_str("[Screen Annotation]\n");
    out.push_str(&r.screen_annotation);
    out.push('\n');
    out.push_str(&r.task_list.to_string());
    out.push('\n');
    out.push_str(&format!("[Decision] {}\n", r.decision.as_str()));
    if let Some(code) = &r.action_code {
        out.push_str("[Action]\n```python\n");
        out.push_str(code);
        out.push_str("\n```\n");
    }
    out.push_str("[Memory]\n");
    out.push_str(&r.memory_update);
    out.push('\n');
    out
}
