//! Episode traces and their line-delimited JSON form.
//!
//! A trace file holds one JSON object per line. The first line has
//! `"type": "header"`, the last `"type": "summary"`; in between come, in
//! the order they happened:
//!
//! | type | fields |
//! |---|---|
//! | `transition` | `from`, `event {kind, message?}`, `to`, `wall_time`, `attempt_index`, `note?` |
//! | `prompt` | `turn`, `system_sha256`, `user`, `image_sha256[]`, `truncated` |
//! | `response` | `turn`, `raw` |
//! | `invalid_action` | `turn`, `attempt`, `reason`, `streak` |
//! | `task_list` | `turn`, `attempt`, `list`, `correction?` |
//! | `replan` | `turn`, `attempt`, `digest`, `redundant` |
//! | `script` | `turn`, `attempt`, `task_index`, `code`, `actions[]`, `outcome`, `steps_applied`, `step_digests[]` |
//! | `wait` | `turn`, `ticks` |
//! | `verify` | `attempt`, `pass`, `feedback`, `task_list_digest?`, `trajectory_digest?`, `redundant_trajectory`, `synthetic` |
//! | `notify` | `final_state`, `message` |
//! | `reset` | `ok`, `message` |

use std::fmt;
use std::io::{BufRead, Write};

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::action::{ExecResult, Platform};
use crate::grounding::GroundingProvider;
use crate::planner::{PrefixCorrection, TaskList};
use crate::sim::{Difficulty, Domain};
use crate::state_machine::TransitionEntry;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum FinalState {
    Success,
    Fail,
    Error,
}

impl fmt::Display for FinalState {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{self:?}")
    }
}

/// Why the episode ended.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum TerminalCause {
    Verified,
    AttemptsExhausted,
    StepLimit,
    /// An invalid action ended the episode because recovery was off.
    InvalidAction,
    /// A DONE failed verification and verification recovery was off.
    FalseCompletion,
    SystemException,
    ResetFailed,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TraceHeader {
    pub task_id: String,
    pub run: u32,
    pub seed: u64,
    pub instruction: String,
    pub platform: Platform,
    pub domain: Option<Domain>,
    pub difficulty: Option<Difficulty>,
    pub scenario: Option<String>,
    pub provider: GroundingProvider,
    pub max_attempts: u32,
    pub max_steps: u32,
    pub exec_recovery: bool,
    pub verify_recovery: bool,
}

impl TraceHeader {
    /// File stem used for the per-episode trace file.
    pub fn file_stem(&self) -> String {
        format!("run{}_{}", self.run, self.task_id)
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TraceSummary {
    pub final_state: FinalState,
    pub cause: TerminalCause,
    pub steps_total: u32,
    pub steps_on_successful_path: u32,
    pub attempts_used: u32,
    pub turns: u32,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "type", rename_all = "snake_case")]
pub enum TraceRecord {
    Transition(TransitionEntry),
    Prompt {
        turn: u32,
        system_sha256: String,
        user: String,
        image_sha256: Vec<String>,
        truncated: bool,
    },
    Response {
        turn: u32,
        raw: String,
    },
    InvalidAction {
        turn: u32,
        attempt: u32,
        reason: String,
        streak: u32,
    },
    TaskList {
        turn: u32,
        attempt: u32,
        list: TaskList,
        #[serde(default, skip_serializing_if = "Option::is_none")]
        correction: Option<PrefixCorrection>,
    },
    Replan {
        turn: u32,
        attempt: u32,
        digest: String,
        redundant: bool,
    },
    Script {
        turn: u32,
        attempt: u32,
        task_index: usize,
        code: String,
        actions: Vec<String>,
        outcome: ExecResult,
        steps_applied: u32,
        step_digests: Vec<String>,
    },
    Wait {
        turn: u32,
        ticks: u32,
    },
    Verify {
        attempt: u32,
        pass: bool,
        feedback: String,
        task_list_digest: Option<String>,
        trajectory_digest: Option<String>,
        redundant_trajectory: bool,
        synthetic: bool,
    },
    Notify {
        final_state: FinalState,
        message: String,
    },
    Reset {
        ok: bool,
        message: String,
    },
}

#[derive(Serialize, Deserialize)]
#[serde(tag = "type", rename_all = "snake_case")]
enum Line {
    Header(TraceHeader),
    Summary(TraceSummary),
    #[serde(untagged)]
    Record(TraceRecord),
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EpisodeTrace {
    pub header: TraceHeader,
    pub records: Vec<TraceRecord>,
    pub summary: TraceSummary,
}

#[derive(Debug, Error)]
pub enum TraceError {
    #[error("trace line {line}: {reason}")]
    Parse { line: usize, reason: String },
    #[error(transparent)]
    Io(#[from] std::io::Error),
}

/// One `verify` record, flattened.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct VerifyEvent {
    pub attempt: u32,
    pub pass: bool,
    pub feedback: String,
    pub task_list_digest: Option<String>,
    pub trajectory_digest: Option<String>,
    pub redundant_trajectory: bool,
    pub synthetic: bool,
}

/// One `script` record, flattened.
#[derive(Debug, Clone, PartialEq)]
pub struct ScriptEvent {
    pub turn: u32,
    pub attempt: u32,
    pub task_index: usize,
    pub code: String,
    pub actions: Vec<String>,
    pub outcome: ExecResult,
    pub steps_applied: u32,
    pub step_digests: Vec<String>,
}

pub fn header_line(h: &TraceHeader) -> String {
    serde_json::to_string(&Line::Header(h.clone())).expect("header serializes")
}

pub fn record_line(r: &TraceRecord) -> String {
    serde_json::to_string(r).expect("record serializes")
}

pub fn summary_line(s: &TraceSummary) -> String {
    serde_json::to_string(&Line::Summary(s.clone())).expect("summary serializes")
}

impl EpisodeTrace {
    pub fn to_jsonl(&self) -> String {
        let mut out = header_line(&self.header);
        out.push('\n');
        for r in &self.records {
            out.push_str(&record_line(r));
            out.push('\n');
        }
        out.push_str(&summary_line(&self.summary));
        out.push('\n');
        out
    }

    pub fn write_jsonl(&self, w: &mut impl Write) -> std::io::Result<()> {
        w.write_all(self.to_jsonl().as_bytes())
    }

    pub fn from_jsonl(text: &str) -> Result<Self, TraceError> {
        Self::read_jsonl(text.as_bytes())
    }

    pub fn read_jsonl(r: impl BufRead) -> Result<Self, TraceError> {
        let mut header = None;
        let mut summary = None;
        let mut records = Vec::new();
        for (i, line) in r.lines().enumerate() {
            let line = line?;
            if line.trim().is_empty() {
                continue;
            }
            let parsed: Line = serde_json::from_str(&line).map_err(|e| TraceError::Parse {
                line: i + 1,
                reason: e.to_string(),
            })?;
            let misplaced = |what: &str| TraceError::Parse {
                line: i + 1,
                reason: format!("unexpected {what}"),
            };
            match parsed {
                Line::Header(h) if header.is_none() && records.is_empty() => header = Some(h),
                Line::Header(_) => return Err(misplaced("header")),
                _ if header.is_none() => return Err(misplaced("record before the header")),
                _ if summary.is_some() => return Err(misplaced("line after the summary")),
                Line::Summary(s) => summary = Some(s),
                Line::Record(r) => records.push(r),
            }
        }
        let header = header.ok_or(TraceError::Parse {
            line: 1,
            reason: "missing header".into(),
        })?;
        let summary = summary.ok_or(TraceError::Parse {
            line: records.len() + 2,
            reason: "missing summary".into(),
        })?;
        Ok(Self {
            header,
            records,
            summary,
        })
    }

    pub fn task_id(&self) -> &str {
        &self.header.task_id
    }

    pub fn final_state(&self) -> FinalState {
        self.summary.final_state
    }

    pub fn transitions(&self) -> Vec<&TransitionEntry> {
        self.records
            .iter()
            .filter_map(|r| match r {
                TraceRecord::Transition(t) => Some(t),
                _ => None,
            })
            .collect()
    }

    pub fn prompts(&self) -> Vec<&str> {
        self.records
            .iter()
            .filter_map(|r| match r {
                TraceRecord::Prompt { user, .. } => Some(user.as_str()),
                _ => None,
            })
            .collect()
    }

    pub fn scripts(&self) -> Vec<ScriptEvent> {
        self.records
            .iter()
            .filter_map(|r| match r {
                TraceRecord::Script {
                    turn,
                    attempt,
                    task_index,
                    code,
                    actions,
                    outcome,
                    steps_applied,
                    step_digests,
                } => Some(ScriptEvent {
                    turn: *turn,
                    attempt: *attempt,
                    task_index: *task_index,
                    code: code.clone(),
                    actions: actions.clone(),
                    outcome: outcome.clone(),
                    steps_applied: *steps_applied,
                    step_digests: step_digests.clone(),
                }),
                _ => None,
            })
            .collect()
    }

    pub fn task_list_history(&self) -> Vec<&TaskList> {
        self.records
            .iter()
            .filter_map(|r| match r {
                TraceRecord::TaskList { list, .. } => Some(list),
                _ => None,
            })
            .collect()
    }

    pub fn prefix_corrections(&self) -> Vec<&PrefixCorrection> {
        self.records
            .iter()
            .filter_map(|r| match r {
                TraceRecord::TaskList {
                    correction: Some(c), ..
                } => Some(c),
                _ => None,
            })
            .collect()
    }

    pub fn verify_events(&self) -> Vec<VerifyEvent> {
        self.records
            .iter()
            .filter_map(|r| match r {
                TraceRecord::Verify {
                    attempt,
                    pass,
                    feedback,
                    task_list_digest,
                    trajectory_digest,
                    redundant_trajectory,
                    synthetic,
                } => Some(VerifyEvent {
                    attempt: *attempt,
                    pass: *pass,
                    feedback: feedback.clone(),
                    task_list_digest: task_list_digest.clone(),
                    trajectory_digest: trajectory_digest.clone(),
                    redundant_trajectory: *redundant_trajectory,
                    synthetic: *synthetic,
                }),
                _ => None,
            })
            .collect()
    }

    pub fn notifications(&self) -> usize {
        self.records
            .iter()
            .filter(|r| matches!(r, TraceRecord::Notify { .. }))
            .count()
    }

    pub fn steps_total(&self) -> u32 {
        self.summary.steps_total
    }

    pub fn steps_on_successful_path(&self) -> u32 {
        self.summary.steps_on_successful_path
    }
}
