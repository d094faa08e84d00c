//! Two-level planning: task lists, context memory, prompt assembly, the
//! structured response format, task-granular re-planning and the model
//! backends.

pub mod backend;
mod prompt;
pub(crate) mod replan;
mod response;
pub mod scenario;

use std::fmt;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::action::ActionScript;
use crate::util::{canonical_text, sha256_hex};

pub use backend::{
    BackendConfig, BackendError, BackendKind, FaultyBackend, HttpModel, ModelBackend, ScriptedMock,
};
pub use prompt::{
    assemble_prompt, assemble_with_truncation, candidate_block, PromptBundle, PromptConfig,
    PromptError, DEMOS, SOPS, SYSTEM_PROMPT,
};
pub use replan::{detect_redundant_replan, replan_task, PrefixCorrection, ReplanOutcome};
pub use response::{parse_plan_response, render_plan_response, MalformedResponse};
pub use scenario::{parse_scenario, resolve_placeholders, Scenario, ScenarioEntry, Trigger};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum TaskStatus {
    Pending,
    Current,
    Done,
    Failed,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Task {
    pub index: usize,
    pub description: String,
    pub status: TaskStatus,
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum TaskListError {
    #[error("task list is empty")]
    Empty,
    #[error("current task {current} is outside 1..={len}")]
    CurrentOutOfRange { current: usize, len: usize },
}

/// An ordered task list with a 1-based pointer to the current task.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct TaskList {
    pub tasks: Vec<Task>,
    pub current: usize,
}

impl TaskList {
    /// Builds a list whose statuses follow the pointer: done before it,
    /// pending after it.
    pub fn new<S: Into<String>>(
        descriptions: impl IntoIterator<Item = S>,
        current: usize,
    ) -> Result<Self, TaskListError> {
        let tasks: Vec<Task> = descriptions
            .into_iter()
            .enumerate()
            .map(|(i, d)| Task {
                index: i + 1,
                description: d.into(),
                status: TaskStatus::Pending,
            })
            .collect();
        if tasks.is_empty() {
            return Err(TaskListError::Empty);
        }
        if current == 0 || current > tasks.len() {
            return Err(TaskListError::CurrentOutOfRange {
                current,
                len: tasks.len(),
            });
        }
        let mut list = Self { tasks, current };
        list.sync_statuses();
        Ok(list)
    }

    fn sync_statuses(&mut self) {
        let cur = self.current;
        for t in &mut self.tasks {
            t.status = match t.index.cmp(&cur) {
                std::cmp::Ordering::Less => TaskStatus::Done,
                std::cmp::Ordering::Equal => TaskStatus::Current,
                std::cmp::Ordering::Greater => TaskStatus::Pending,
            };
        }
    }

    pub fn len(&self) -> usize {
        self.tasks.len()
    }

    pub fn is_empty(&self) -> bool {
        self.tasks.is_empty()
    }

    pub fn descriptions(&self) -> Vec<&str> {
        self.tasks.iter().map(|t| t.description.as_str()).collect()
    }

    pub fn current_task(&self) -> &Task {
        &self.tasks[self.current - 1]
    }

    /// Tasks with status done, in order.
    pub fn done_prefix(&self) -> &[Task] {
        let n = self
            .tasks
            .iter()
            .take_while(|t| t.status == TaskStatus::Done)
            .count();
        &self.tasks[..n]
    }

    /// Marks the current task failed (after a verification failure).
    pub fn mark_current_failed(&mut self) {
        let i = self.current - 1;
        self.tasks[i].status = TaskStatus::Failed;
    }

    /// Canonical digest: lowercased, whitespace-collapsed descriptions
    /// joined in order.
    pub fn digest(&self) -> String {
        task_list_digest(self.descriptions())
    }
}

pub fn task_list_digest<'a>(descriptions: impl IntoIterator<Item = &'a str>) -> String {
    let joined: Vec<String> = descriptions.into_iter().map(canonical_text).collect();
    sha256_hex(joined.join("\n").as_bytes())
}

/// The `[New Task List]` + `[Current Task]` rendering.
impl fmt::Display for TaskList {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "[New Task List]")?;
        for t in &self.tasks {
            writeln!(f, "{}. {}", t.index, t.description)?;
        }
        write!(
            f,
            "[Current Task] {}/{} {}",
            self.current,
            self.len(),
            self.current_task().description
        )
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Decision {
    #[serde(rename = "COMMAND")]
    Command,
    #[serde(rename = "DONE")]
    Done,
    #[serde(rename = "WAIT")]
    Wait,
}

impl Decision {
    pub fn as_str(self) -> &'static str {
        match self {
            Decision::Command => "COMMAND",
            Decision::Done => "DONE",
            Decision::Wait => "WAIT",
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct PlanResponse {
    pub screen_annotation: String,
    pub task_list: TaskList,
    pub decision: Decision,
    pub action_code: Option<String>,
    pub memory_update: String,
}

/// How an executed script ended, as remembered by the planner.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "status", rename_all = "snake_case")]
pub enum ActionOutcome {
    Ok,
    Failed { message: String },
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct HistoryEntry {
    pub task_index: usize,
    pub script: ActionScript,
    pub outcome: ActionOutcome,
    /// Verification attempt the script belongs to (0-based).
    pub attempt: u32,
}

/// What the planner remembers within one episode.
#[derive(Debug, Clone, PartialEq, Default, Serialize, Deserialize)]
pub struct ContextMemory {
    pub old_task_lists: Vec<TaskList>,
    pub history_actions: Vec<HistoryEntry>,
    pub verification_feedback: Vec<String>,
    /// One entry per verification failure, in order; may repeat.
    pub failed_task_list_digests: Vec<String>,
    /// Trajectory digests of failed attempts that executed anything.
    pub failed_trajectory_digests: Vec<String>,
    /// Free-text `[Memory]` sections returned by the model.
    pub notes: Vec<String>,
    /// The list the planner is currently following.
    pub current: Option<TaskList>,
    /// Number of verification failures so far.
    pub attempt: u32,
}

impl ContextMemory {
    pub fn record_actions(&mut self, task_index: usize, script: ActionScript, outcome: ActionOutcome) {
        self.history_actions.push(HistoryEntry {
            task_index,
            script,
            outcome,
            attempt: self.attempt,
        });
    }

    /// Adopts a (possibly spliced) list as current; the previous one moves
    /// to the old lists when it differs.
    pub fn adopt(&mut self, list: TaskList) {
        if let Some(prev) = self.current.take() {
            if prev != list {
                self.old_task_lists.push(prev);
            } else {
                self.current = Some(prev);
                return;
            }
        }
        self.current = Some(list);
    }

    /// Canonical action rendering per task for the current attempt,
    /// concatenated. `None` when the attempt executed nothing.
    pub fn trajectory_digest(&self) -> Option<String> {
        let mut lines = Vec::new();
        for h in self.history_actions.iter().filter(|h| h.attempt == self.attempt) {
            for a in h.script.canonical_actions() {
                lines.push(format!("{}:{a}", h.task_index));
            }
        }
        (!lines.is_empty()).then(|| sha256_hex(lines.join("\n").as_bytes()))
    }

    /// Records a verification failure: one feedback entry and one task-list
    /// digest (of the list being followed, or of the empty list).
    pub fn record_verify_fail(&mut self, feedback: &str) -> (String, Option<String>) {
        self.verification_feedback.push(feedback.to_string());
        let digest = match &mut self.current {
            Some(l) => {
                l.mark_current_failed();
                l.digest()
            }
            None => task_list_digest([]),
        };
        self.failed_task_list_digests.push(digest.clone());
        let traj = self.trajectory_digest();
        if let Some(t) = &traj {
            self.failed_trajectory_digests.push(t.clone());
        }
        self.attempt += 1;
        (digest, traj)
    }
}

/// The per-episode planner: a backend plus the episode's memory.
pub struct Planner {
    backend: Box<dyn ModelBackend>,
    pub memory: ContextMemory,
    pub prompt: PromptConfig,
}

impl Planner {
    pub fn new(backend: Box<dyn ModelBackend>, prompt: PromptConfig) -> Self {
        Self {
            backend,
            memory: ContextMemory::default(),
            prompt,
        }
    }

    pub fn assemble(
        &self,
        request: &str,
        obs: &crate::grounding::ScreenObservation,
        feedback: Option<&str>,
    ) -> Result<(PromptBundle, bool), PromptError> {
        assemble_with_truncation(request, &self.memory, obs, feedback, &self.prompt)
    }

    pub fn generate(&mut self, prompt: &PromptBundle) -> Result<String, BackendError> {
        self.backend.generate(prompt)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn statuses_follow_pointer() {
        let l = TaskList::new(["a", "b", "c"], 2).unwrap();
        let s: Vec<_> = l.tasks.iter().map(|t| t.status).collect();
        assert_eq!(s, [TaskStatus::Done, TaskStatus::Current, TaskStatus::Pending]);
        assert_eq!(l.done_prefix().len(), 1);
        assert!(TaskList::new(Vec::<String>::new(), 1).is_err());
        assert!(TaskList::new(["a"], 2).is_err());
    }

    #[test]
    fn display_matches_prompt_example() {
        let l = TaskList::new(
            ["Open Notepad.", "Type \"This is a draft.\"", "Save the document as \"draft.txt.\""],
            1,
        )
        .unwrap();
        assert!(l.to_string().ends_with("[Current Task] 1/3 Open Notepad."));
    }

    #[test]
    fn verify_fail_grows_digests_by_one() {
        let mut m = ContextMemory::default();
        m.adopt(TaskList::new(["a"], 1).unwrap());
        m.record_verify_fail("x");
        m.record_verify_fail("y");
        assert_eq!(m.failed_task_list_digests.len(), 2);
        assert_eq!(m.verification_feedback.len(), 2);
        assert_eq!(m.failed_task_list_digests[0], m.failed_task_list_digests[1]);
    }
}
