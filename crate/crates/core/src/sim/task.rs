//! Task files: TOML documents describing an initial machine state, the
//! checks that decide success, and one or more reference solutions.
//!
//! ```toml
//! version = 1
//! id = "notepad_draft"
//! instruction = "Create a new file named draft.txt ..."
//! difficulty = "easy"          # easy | medium | hard
//! domain = "OS"                # OS | Office | Daily | Prof | Multi
//! platform = "desktop"         # desktop | smartphone (default desktop)
//!
//! [initial]
//! folders = ["/docs"]
//! files = { "/docs/notes.txt" = "first line" }
//! settings = { theme = "light" }
//! clipboard = ""
//! open = [{ app = "files", path = "/docs" }]
//!
//! [[verify]]
//! kind = "file_equals"         # file_equals | file_contains | setting_equals
//! path = "/docs/draft.txt"     # | window_shows_text | window_open
//! expected = "This is a draft."
//!
//! [[solution]]
//! name = "start-menu"
//! tasks = ["Open Notepad.", "Type the text.", "Save the file."]
//! [[solution.step]]
//! task = 1
//! code = "computer.mouse.move(id=@{button:Start})\ncomputer.mouse.single_click()"
//! ```
//!
//! Window title patterns are literal unless they contain `*` or `?`.

use std::collections::BTreeMap;
use std::fmt;
use std::path::Path;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::action::Platform;

use super::desktop::{AppKind, MockDesktop};

pub const TASK_FORMAT_VERSION: u32 = 1;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum SchemaError {
    #[error("{field}: {reason}")]
    Field { field: String, reason: String },
    #[error("cannot read {path}: {reason}")]
    Io { path: String, reason: String },
}

fn schema(field: impl Into<String>, reason: impl Into<String>) -> SchemaError {
    SchemaError::Field {
        field: field.into(),
        reason: reason.into(),
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Difficulty {
    Easy,
    Medium,
    Hard,
}

impl fmt::Display for Difficulty {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Difficulty::Easy => "easy",
            Difficulty::Medium => "medium",
            Difficulty::Hard => "hard",
        })
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum Domain {
    OS,
    Office,
    Daily,
    Prof,
    Multi,
}

impl fmt::Display for Domain {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{self:?}")
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum Check {
    FileEquals { path: String, expected: String },
    FileContains { path: String, needle: String },
    SettingEquals { key: String, value: String },
    WindowShowsText { title_pattern: String, needle: String },
    WindowOpen { title_pattern: String },
}

impl fmt::Display for Check {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Check::FileEquals { path, .. } => write!(f, "FileEquals {path}"),
            Check::FileContains { path, .. } => write!(f, "FileContains {path}"),
            Check::SettingEquals { key, .. } => write!(f, "SettingEquals {key}"),
            Check::WindowShowsText { title_pattern, .. } => {
                write!(f, "WindowShowsText {title_pattern}")
            }
            Check::WindowOpen { title_pattern } => write!(f, "WindowOpen {title_pattern}"),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct OpenApp {
    pub app: AppKind,
    pub path: Option<String>,
}

#[derive(Debug, Clone, PartialEq, Eq, Default, Serialize, Deserialize)]
pub struct InitialState {
    pub folders: Vec<String>,
    pub files: BTreeMap<String, String>,
    pub settings: BTreeMap<String, String>,
    pub clipboard: String,
    pub open: Vec<OpenApp>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct SolutionStep {
    /// 1-based index into the solution's task list.
    pub task: usize,
    pub code: String,
}

/// A reference action sequence, one planner turn per step.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Solution {
    pub name: String,
    pub tasks: Vec<String>,
    pub steps: Vec<SolutionStep>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct TaskSpec {
    pub id: String,
    pub instruction: String,
    pub difficulty: Difficulty,
    pub domain: Domain,
    pub platform: Platform,
    pub initial: InitialState,
    pub verify: Vec<Check>,
    pub solutions: Vec<Solution>,
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct RawTask {
    version: Option<u32>,
    id: Option<String>,
    instruction: Option<String>,
    difficulty: Option<String>,
    domain: Option<String>,
    platform: Option<String>,
    initial: Option<RawInitial>,
    verify: Option<Vec<RawCheck>>,
    solution: Option<Vec<RawSolution>>,
}

#[derive(Deserialize, Default)]
#[serde(deny_unknown_fields)]
struct RawInitial {
    folders: Option<Vec<String>>,
    files: Option<BTreeMap<String, String>>,
    settings: Option<BTreeMap<String, String>>,
    clipboard: Option<String>,
    open: Option<Vec<RawOpen>>,
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct RawOpen {
    app: Option<String>,
    path: Option<String>,
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct RawCheck {
    kind: Option<String>,
    path: Option<String>,
    expected: Option<String>,
    needle: Option<String>,
    key: Option<String>,
    value: Option<String>,
    title: Option<String>,
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct RawSolution {
    name: Option<String>,
    tasks: Option<Vec<String>>,
    step: Option<Vec<RawStep>>,
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct RawStep {
    task: Option<usize>,
    code: Option<String>,
}

fn need<T>(v: Option<T>, field: &str) -> Result<T, SchemaError> {
    v.ok_or_else(|| schema(field, "missing required field"))
}

fn check_path(p: &str, field: &str) -> Result<(), SchemaError> {
    if p.starts_with('/') {
        Ok(())
    } else {
        Err(schema(field, format!("{p:?} is not an absolute path")))
    }
}

fn convert_check(i: usize, c: RawCheck) -> Result<Check, SchemaError> {
    let f = |name: &str| format!("verify[{i}].{name}");
    let kind = need(c.kind, &f("kind"))?;
    let check = match kind.as_str() {
        "file_equals" => Check::FileEquals {
            path: need(c.path, &f("path"))?,
            expected: need(c.expected, &f("expected"))?,
        },
        "file_contains" => Check::FileContains {
            path: need(c.path, &f("path"))?,
            needle: need(c.needle, &f("needle"))?,
        },
        "setting_equals" => Check::SettingEquals {
            key: need(c.key, &f("key"))?,
            value: need(c.value, &f("value"))?,
        },
        "window_shows_text" => Check::WindowShowsText {
            title_pattern: need(c.title, &f("title"))?,
            needle: need(c.needle, &f("needle"))?,
        },
        "window_open" => Check::WindowOpen {
            title_pattern: need(c.title, &f("title"))?,
        },
        other => return Err(schema(f("kind"), format!("unknown check kind {other:?}"))),
    };
    if let Check::FileEquals { path, .. } | Check::FileContains { path, .. } = &check {
        check_path(path, &f("path"))?;
    }
    Ok(check)
}

/// Parses and validates a task document.
pub fn parse_task(text: &str) -> Result<TaskSpec, SchemaError> {
    let raw: RawTask = toml::from_str(text).map_err(|e| {
        let msg = e.message().to_string();
        let field = msg
            .split('`')
            .nth(1)
            .filter(|_| msg.contains("field"))
            .unwrap_or("document")
            .to_string();
        schema(field, msg)
    })?;
    let version = need(raw.version, "version")?;
    if version != TASK_FORMAT_VERSION {
        return Err(schema("version", format!("unsupported version {version}")));
    }
    let id = need(raw.id, "id")?;
    if id.is_empty() || !id.chars().all(|c| c.is_ascii_alphanumeric() || c == '_' || c == '-') {
        return Err(schema("id", "must be non-empty [A-Za-z0-9_-]"));
    }
    let instruction = need(raw.instruction, "instruction")?;
    if instruction.trim().is_empty() {
        return Err(schema("instruction", "must not be empty"));
    }
    let difficulty = match need(raw.difficulty, "difficulty")?.as_str() {
        "easy" => Difficulty::Easy,
        "medium" => Difficulty::Medium,
        "hard" => Difficulty::Hard,
        other => return Err(schema("difficulty", format!("{other:?} is not easy/medium/hard"))),
    };
    let domain = match need(raw.domain, "domain")?.as_str() {
        "OS" => Domain::OS,
        "Office" => Domain::Office,
        "Daily" => Domain::Daily,
        "Prof" => Domain::Prof,
        "Multi" => Domain::Multi,
        other => return Err(schema("domain", format!("{other:?} is not OS/Office/Daily/Prof/Multi"))),
    };
    let platform = match raw.platform.as_deref() {
        None => Platform::Desktop,
        Some(p) => p.parse().map_err(|e: String| schema("platform", e))?,
    };
    let ri = raw.initial.unwrap_or_default();
    let mut initial = InitialState {
        folders: ri.folders.unwrap_or_default(),
        files: ri.files.unwrap_or_default(),
        settings: ri.settings.unwrap_or_default(),
        clipboard: ri.clipboard.unwrap_or_default(),
        open: Vec::new(),
    };
    for f in &initial.folders {
        check_path(f, "initial.folders")?;
    }
    for f in initial.files.keys() {
        check_path(f, "initial.files")?;
    }
    for (i, o) in ri.open.unwrap_or_default().into_iter().enumerate() {
        let field = format!("initial.open[{i}].app");
        let name = need(o.app, &field)?;
        let app = AppKind::from_key(&name)
            .filter(|a| AppKind::LAUNCHABLE.contains(a))
            .ok_or_else(|| schema(&field, format!("unknown app {name:?}")))?;
        initial.open.push(OpenApp { app, path: o.path });
    }
    let verify = need(raw.verify, "verify")?;
    if verify.is_empty() {
        return Err(schema("verify", "at least one check is required"));
    }
    let verify = verify
        .into_iter()
        .enumerate()
        .map(|(i, c)| convert_check(i, c))
        .collect::<Result<Vec<_>, _>>()?;
    let mut solutions = Vec::new();
    for (i, s) in raw.solution.unwrap_or_default().into_iter().enumerate() {
        let f = |name: &str| format!("solution[{i}].{name}");
        let tasks = need(s.tasks, &f("tasks"))?;
        if tasks.is_empty() {
            return Err(schema(f("tasks"), "must not be empty"));
        }
        let mut steps = Vec::new();
        for (j, st) in need(s.step, &f("step"))?.into_iter().enumerate() {
            let sf = format!("solution[{i}].step[{j}]");
            let task = need(st.task, &format!("{sf}.task"))?;
            if task == 0 || task > tasks.len() {
                return Err(schema(format!("{sf}.task"), format!("{task} is outside 1..={}", tasks.len())));
            }
            steps.push(SolutionStep {
                task,
                code: need(st.code, &format!("{sf}.code"))?,
            });
        }
        if steps.windows(2).any(|w| w[1].task < w[0].task) {
            return Err(schema(f("step"), "task indices must not decrease"));
        }
        solutions.push(Solution {
            name: s.name.unwrap_or_else(|| format!("solution-{}", i + 1)),
            tasks,
            steps,
        });
    }
    let spec = TaskSpec {
        id,
        instruction,
        difficulty,
        domain,
        platform,
        initial,
        verify,
        solutions,
    };
    spec.initial_desktop(0)
        .map_err(|e| schema("initial.open", e))?;
    Ok(spec)
}

impl TaskSpec {
    /// Builds the pristine machine state for this task.
    pub fn initial_desktop(&self, seed: u64) -> Result<MockDesktop, String> {
        let mut d = MockDesktop::new(self.platform, seed);
        for f in &self.initial.folders {
            d.ensure_folder(f);
        }
        for (path, content) in &self.initial.files {
            d.ensure_folder(super::desktop::parent_folder(path));
            d.files.insert(path.clone(), content.clone());
        }
        for (k, v) in &self.initial.settings {
            d.settings.insert(k.clone(), v.clone());
        }
        d.clipboard = self.initial.clipboard.clone();
        for o in &self.initial.open {
            d.launch(o.app, o.path.as_deref())?;
        }
        Ok(d)
    }
}

/// Reads and parses a task file, returning the spec and its initial state.
pub fn load_task(path: &Path, seed: u64) -> Result<(TaskSpec, MockDesktop), SchemaError> {
    let text = std::fs::read_to_string(path).map_err(|e| SchemaError::Io {
        path: path.display().to_string(),
        reason: e.to_string(),
    })?;
    let spec = parse_task(&text)?;
    let desk = spec
        .initial_desktop(seed)
        .map_err(|e| schema("initial", e))?;
    Ok((spec, desk))
}

#[cfg(test)]
mod tests {
    use super::*;

    const MIN: &str = r#"
version = 1
id = "t"
instruction = "do it"
difficulty = "easy"
domain = "OS"
[[verify]]
kind = "window_open"
title = "Notepad*"
"#;

    #[test]
    fn minimal_task() {
        let t = parse_task(MIN).unwrap();
        assert_eq!(t.platform, Platform::Desktop);
        assert_eq!(
            t.verify,
            vec![Check::WindowOpen {
                title_pattern: "Notepad*".into()
            }]
        );
    }

    fn field_of(text: &str) -> String {
        match parse_task(text) {
            Err(SchemaError::Field { field, .. }) => field,
            other => panic!("expected schema error, got {other:?}"),
        }
    }

    #[test]
    fn schema_errors_name_the_field() {
        let no_verify = MIN.split("[[verify]]").next().unwrap();
        assert_eq!(field_of(no_verify), "verify");
        assert_eq!(field_of(&MIN.replace("easy", "trivial")), "difficulty");
        assert_eq!(field_of(&MIN.replace("window_open", "window_gone")), "verify[0].kind");
        assert_eq!(field_of(&MIN.replace("version = 1", "version = 9")), "version");
        assert_eq!(field_of(&MIN.replace("id = \"t\"\n", "")), "id");
        assert_eq!(field_of(&format!("{MIN}\n[initial]\nopen = [{{ app = \"paint\" }}]\n")), "initial.open[0].app");
    }

    #[test]
    fn step_task_index_in_range() {
        let text = format!(
            "{MIN}\n[[solution]]\ntasks = [\"a\"]\n[[solution.step]]\ntask = 2\ncode = \"x\"\n"
        );
        assert_eq!(field_of(&text), "solution[0].step[0].task");
    }
}
