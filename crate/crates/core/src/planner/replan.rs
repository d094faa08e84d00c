use serde::{Deserialize, Serialize};

use super::{ContextMemory, PlanResponse, TaskList};

/// A proposed list that rewrote completed tasks, and what was kept instead.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct PrefixCorrection {
    pub preserved: Vec<String>,
    pub proposed: Vec<String>,
    /// `(proposed, enforced)` when the pointer moved back into the prefix.
    pub current_clamped: Option<(usize, usize)>,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ReplanOutcome {
    pub task_list: TaskList,
    pub correction: Option<PrefixCorrection>,
    /// The enforced list was already marked as a verification failure.
    pub redundant: bool,
}

/// Keeps the done prefix of `prior` in front of `proposed`.
pub(crate) fn enforce_prefix(
    prior: Option<&TaskList>,
    proposed: &TaskList,
) -> (TaskList, Option<PrefixCorrection>) {
    let Some(prior) = prior else {
        return (proposed.clone(), None);
    };
    let done: Vec<&str> = prior.done_prefix().iter().map(|t| t.description.as_str()).collect();
    let k = done.len();
    let new = proposed.descriptions();
    let kept_prefix = new.len() > k && new[..k] == done[..];
    let descriptions: Vec<String> = if kept_prefix {
        new.iter().map(|s| s.to_string()).collect()
    } else {
        let tail: Vec<&str> = if new.len() > k {
            new[k..].to_vec()
        } else {
            prior.descriptions()[k..].to_vec()
        };
        done.iter().chain(tail.iter()).map(|s| s.to_string()).collect()
    };
    let clamped = (proposed.current <= k).then_some((proposed.current, k + 1));
    let current = if let Some((_, c)) = clamped { c } else { proposed.current.min(descriptions.len()) };
    let list = TaskList::new(descriptions, current).expect("spliced list keeps a task after the prefix");
    let correction = (!kept_prefix || clamped.is_some()).then(|| PrefixCorrection {
        preserved: done.iter().map(|s| s.to_string()).collect(),
        proposed: new.iter().map(|s| s.to_string()).collect(),
        current_clamped: clamped,
    });
    (list, correction)
}

/// Applies a response's task list after a verification failure. Completed
/// tasks of the list being followed survive unchanged; only the failed task
/// and its successors may change. The failed list's digest is recorded by
/// [`ContextMemory::record_verify_fail`] when the failure happens.
pub fn replan_task(memory: &ContextMemory, failed_feedback: &str, new_response: &PlanResponse) -> ReplanOutcome {
    let (task_list, correction) = enforce_prefix(memory.current.as_ref(), &new_response.task_list);
    if let Some(c) = &correction {
        tracing::info!(feedback = failed_feedback, ?c, "re-plan rewrote completed tasks; prefix restored");
    }
    let redundant = detect_redundant_replan(memory, &task_list);
    ReplanOutcome {
        task_list,
        correction,
        redundant,
    }
}

/// True iff the candidate's canonical digest was already recorded as a
/// verification failure.
pub fn detect_redundant_replan(memory: &ContextMemory, candidate: &TaskList) -> bool {
    let d = candidate.digest();
    memory.failed_task_list_digests.contains(&d)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::planner::{Decision, TaskStatus};

    fn resp(tasks: &[&str], current: usize) -> PlanResponse {
        PlanResponse {
            screen_annotation: String::new(),
            task_list: TaskList::new(tasks.iter().copied(), current).unwrap(),
            decision: Decision::Done,
            action_code: None,
            memory_update: String::new(),
        }
    }

    fn memory_after_fail() -> ContextMemory {
        let mut m = ContextMemory::default();
        m.adopt(TaskList::new(["A", "B", "C"], 2).unwrap());
        m.record_verify_fail("B did not stick");
        m
    }

    #[test]
    fn changed_tail_is_accepted() {
        let m = memory_after_fail();
        assert_eq!(m.current.as_ref().unwrap().tasks[1].status, TaskStatus::Failed);
        let out = replan_task(&m, "", &resp(&["A", "B2", "C2"], 2));
        assert_eq!(out.task_list.descriptions(), ["A", "B2", "C2"]);
        assert_eq!(out.task_list.current, 2);
        assert!(out.correction.is_none());
        assert!(!out.redundant);
    }

    #[test]
    fn rewritten_prefix_is_spliced() {
        let m = memory_after_fail();
        let out = replan_task(&m, "", &resp(&["A''", "B2", "C2"], 2));
        assert_eq!(out.task_list.descriptions(), ["A", "B2", "C2"]);
        assert!(out.correction.is_some());
    }

    #[test]
    fn pointer_into_prefix_is_clamped() {
        let m = memory_after_fail();
        let out = replan_task(&m, "", &resp(&["A", "B2"], 1));
        assert_eq!(out.task_list.current, 2);
        assert_eq!(out.correction.unwrap().current_clamped, Some((1, 2)));
    }

    #[test]
    fn identical_list_is_redundant() {
        let m = memory_after_fail();
        let out = replan_task(&m, "", &resp(&["A", "B", "C"], 2));
        assert!(out.redundant);
    }

    #[test]
    fn digest_ignores_case_and_spacing() {
        let mut m = ContextMemory::default();
        m.adopt(TaskList::new(["open app", "type text", "save"], 1).unwrap());
        m.record_verify_fail("x");
        let c = TaskList::new(["Open  App", "type text", "save"], 1).unwrap();
        assert!(detect_redundant_replan(&m, &c));
        let c = TaskList::new(["Open App", "type other text", "save"], 1).unwrap();
        assert!(!detect_redundant_replan(&m, &c));
        assert!(!detect_redundant_replan(&ContextMemory::default(), &c));
    }
}
