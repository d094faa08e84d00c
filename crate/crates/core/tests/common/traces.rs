use osagent_core::action::{ExecResult, Platform};
use osagent_core::grounding::GroundingProvider;
use osagent_core::metrics::{EpisodeTrace, FinalState, TerminalCause, TraceHeader, TraceRecord, TraceSummary};
use osagent_core::sim::{Difficulty, Domain};
use osagent_core::state_machine::{AgentState, TransitionEntry, TransitionEvent};

/// `(applied, planned)` steps per script, one slice per attempt.
pub type Attempts = &'static [&'static [(u32, u32)]];

pub fn header(task: &str, run: u32) -> TraceHeader {
    TraceHeader {
        task_id: task.into(),
        run,
        seed: 0,
        instruction: String::new(),
        platform: Platform::Desktop,
        domain: Some(Domain::OS),
        difficulty: Some(Difficulty::Easy),
        scenario: None,
        provider: GroundingProvider::A11yTree,
        max_attempts: 4,
        max_steps: 30,
        exec_recovery: true,
        verify_recovery: true,
    }
}

pub fn transition(from: AgentState, event: TransitionEvent, to: AgentState, attempt: u32) -> TraceRecord {
    TraceRecord::Transition(TransitionEntry {
        from,
        event,
        to,
        wall_time: 0,
        attempt_index: attempt,
        note: None,
    })
}

pub fn script(attempt: u32, applied: u32, planned: u32) -> TraceRecord {
    let outcome = if applied == planned {
        ExecResult::Ok
    } else {
        ExecResult::Failed {
            message: "no effect".into(),
            step_index: applied as usize,
        }
    };
    TraceRecord::Script {
        turn: 0,
        attempt,
        task_index: 1,
        code: String::new(),
        actions: vec!["computer.mouse.single_click()".into(); planned as usize],
        outcome,
        steps_applied: applied,
        step_digests: vec![String::new(); applied as usize],
    }
}

/// `attempts[k]` lists `(applied, planned)` per script of attempt k; every
/// attempt but the last ends in a verification failure.
pub fn built(final_state: FinalState, cause: TerminalCause, attempts: &[&[(u32, u32)]]) -> EpisodeTrace {
    let mut records = vec![transition(AgentState::Init, TransitionEvent::UserRequest, AgentState::Observe, 0)];
    let mut total = 0;
    for (k, scripts) in attempts.iter().enumerate() {
        for &(applied, planned) in *scripts {
            records.push(script(k as u32, applied, planned));
            total += applied;
        }
        if k + 1 < attempts.len() {
            records.push(transition(
                AgentState::Verify,
                TransitionEvent::VerifyFail("file missing".into()),
                AgentState::Plan,
                k as u32 + 1,
            ));
        }
    }
    let last = attempts.len() as u32 - 1;
    match final_state {
        FinalState::Success => records.push(transition(
            AgentState::Verify,
            TransitionEvent::VerifyPass,
            AgentState::Success,
            last,
        )),
        _ => records.push(transition(
            AgentState::Verify,
            TransitionEvent::VerifyFail("file missing".into()),
            AgentState::Fail,
            last + 1,
        )),
    }
    EpisodeTrace {
        header: header("t", 0),
        records,
        summary: TraceSummary {
            final_state,
            cause,
            steps_total: total,
            steps_on_successful_path: 0,
            attempts_used: last,
            turns: 0,
        },
    }
}

pub fn success(attempts: &[&[(u32, u32)]]) -> EpisodeTrace {
    built(FinalState::Success, TerminalCause::Verified, attempts)
}
