use osagent_core::env::Environment;
use osagent_core::harness::{golden_scenario, golden_with_flaky_recovery};
use osagent_core::metrics::{
    proxy_matching_score, replan_count, EpisodeTrace, FinalState, TerminalCause, TraceHeader, TraceRecord,
};
use osagent_core::planner::scenario::{parse_scenario, Scenario, ScenarioEntry, Trigger};
use osagent_core::planner::{Planner, PromptConfig, ScriptedMock};
use osagent_core::sim::{bundled_suite, FaultInjection, SimEnv, TaskSpec};
use osagent_core::state_machine::{run_episode, AgentState, EpisodeConfig, MemorySink, TransitionEvent, Verifier};

fn task(id: &str) -> TaskSpec {
    bundled_suite().into_iter().find(|t| t.id == id).unwrap()
}

fn header(spec: &TaskSpec) -> TraceHeader {
    let c = EpisodeConfig::default();
    TraceHeader {
        task_id: spec.id.clone(),
        run: 0,
        seed: 7,
        instruction: spec.instruction.clone(),
        platform: spec.platform,
        domain: Some(spec.domain),
        difficulty: Some(spec.difficulty),
        scenario: None,
        provider: c.provider,
        max_attempts: c.max_attempts,
        max_steps: c.max_steps,
        exec_recovery: c.exec_recovery,
        verify_recovery: c.verify_recovery,
    }
}

fn episode(spec: &TaskSpec, scenario: Scenario, faults: Vec<FaultInjection>, config: &EpisodeConfig) -> (EpisodeTrace, SimEnv) {
    let mut env = SimEnv::for_task(spec, 7).unwrap().with_faults(faults);
    let mut planner = Planner::new(Box::new(ScriptedMock::new(scenario)), PromptConfig::default());
    let t = run_episode(
        &spec.instruction,
        &mut env,
        &mut planner,
        config,
        Verifier::Checks(&spec.verify),
        header(spec),
        None,
    );
    (t, env)
}

fn check_invariants(t: &EpisodeTrace) {
    let tr = t.transitions();
    assert_eq!(tr[0].from, AgentState::Init);
    for w in tr.windows(2) {
        assert_eq!(w[0].to, w[1].from, "broken chain in {}", t.task_id());
        assert!(w[0].attempt_index <= w[1].attempt_index);
    }
    let last = tr.last().unwrap();
    assert_eq!(last.to, AgentState::Init, "episode returns to Init");
    assert_eq!(t.notifications(), 1);
    assert!(t.steps_on_successful_path() <= t.steps_total());
    if t.final_state() == FinalState::Success {
        assert!(t.verify_events().last().unwrap().pass);
    }
    let lists = t.task_list_history();
    for w in lists.windows(2) {
        let done = &w[0].descriptions()[..w[0].current - 1];
        assert_eq!(&w[1].descriptions()[..done.len()], done, "done prefix lost in {}", t.task_id());
    }
    let applied: u32 = t.scripts().iter().map(|s| s.steps_applied).sum();
    assert_eq!(applied, t.steps_total());
}

#[test]
fn golden_notepad_draft() {
    let spec = task("notepad_draft");
    let (t, _) = episode(&spec, golden_scenario(&spec), vec![], &EpisodeConfig::default());
    check_invariants(&t);
    assert_eq!(t.final_state(), FinalState::Success);
    assert_eq!(replan_count(&t), 0);
    assert_eq!(proxy_matching_score(&t), Ok(1.0));
    assert_eq!(t.steps_on_successful_path(), t.steps_total());
    assert!(t.prefix_corrections().is_empty());
}

#[test]
fn one_injected_verify_failure_costs_one_replan() {
    let spec = task("notepad_draft");
    let (t, _) = episode(
        &spec,
        golden_with_flaky_recovery(&spec, 1),
        vec![FaultInjection::VerifyFlakyFail { count: 1 }],
        &EpisodeConfig::default(),
    );
    check_invariants(&t);
    assert_eq!(t.final_state(), FinalState::Success);
    assert_eq!(replan_count(&t), 1);
    let v = t.verify_events();
    assert_eq!(v.len(), 2);
    assert!(!v[0].pass && v[1].pass);
}

#[test]
fn episode_resets_environment() {
    let spec = task("rename_report");
    let pristine = SimEnv::for_task(&spec, 7).unwrap().state_digest();
    let (t, env) = episode(&spec, golden_scenario(&spec), vec![], &EpisodeConfig::default());
    assert_eq!(t.final_state(), FinalState::Success);
    assert_eq!(env.state_digest(), pristine);
    assert!(matches!(t.records.last(), Some(TraceRecord::Reset { ok: true, .. })));
}

#[test]
fn crash_ends_in_error_and_resets() {
    let spec = task("notepad_draft");
    let (t, env) = episode(
        &spec,
        golden_scenario(&spec),
        vec![FaultInjection::CrashOnAction { step: 2 }],
        &EpisodeConfig::default(),
    );
    check_invariants(&t);
    assert_eq!(t.final_state(), FinalState::Error);
    assert_eq!(t.summary.cause, TerminalCause::SystemException);
    let kinds: Vec<&str> = t.transitions().iter().map(|e| e.event.name()).collect();
    assert!(kinds.ends_with(&["SystemException", "Notified", "ResetDone"]));
    assert!(env.accessibility_tree().is_ok());
}

#[test]
fn three_malformed_responses_spend_an_attempt() {
    let spec = task("dark_mode");
    let mut s = golden_scenario(&spec);
    for _ in 0..3 {
        s.entries.insert(
            0,
            ScenarioEntry {
                trigger: Trigger::Any,
                repeat: false,
                response: "no structure at all".into(),
            },
        );
    }
    let (t, _) = episode(&spec, s, vec![], &EpisodeConfig::default());
    check_invariants(&t);
    assert_eq!(t.final_state(), FinalState::Success);
    let v = t.verify_events();
    assert!(v[0].synthetic && !v[0].pass);
    assert_eq!(replan_count(&t), 1);
    let streaks: Vec<u32> = t
        .records
        .iter()
        .filter_map(|r| match r {
            TraceRecord::InvalidAction { streak, .. } => Some(*streak),
            _ => None,
        })
        .collect();
    assert_eq!(streaks, [1, 2, 3]);
}

#[test]
fn wait_advances_the_clock() {
    let spec = task("dark_mode");
    let mut s = golden_scenario(&spec);
    let wait = s.entries[0].response.replace("[Decision] COMMAND", "[Decision] WAIT");
    s.entries.insert(
        0,
        ScenarioEntry {
            trigger: Trigger::Any,
            repeat: false,
            response: wait,
        },
    );
    let config = EpisodeConfig {
        wait_ticks: 5,
        ..EpisodeConfig::default()
    };
    let (t, _) = episode(&spec, s, vec![], &config);
    check_invariants(&t);
    assert_eq!(t.final_state(), FinalState::Success);
    assert!(t.records.iter().any(|r| matches!(r, TraceRecord::Wait { ticks: 5, .. })));
    let after_wait = t
        .transitions()
        .iter()
        .find(|e| e.event == TransitionEvent::ExecOk)
        .unwrap()
        .wall_time;
    assert_eq!(after_wait, 5);
}

#[test]
fn exec_failure_feeds_back_and_replans_the_turn() {
    let spec = task("dark_mode");
    let mut s = golden_scenario(&spec);
    let bad = s.entries[0]
        .response
        .lines()
        .map(|l| if l.starts_with("computer.") { "computer.mouse.move(id=999)" } else { l })
        .collect::<Vec<_>>()
        .join("\n");
    let bad = bad.replace("computer.mouse.move(id=999)\ncomputer.mouse.move(id=999)", "computer.mouse.move(id=999)");
    s.entries.insert(
        0,
        ScenarioEntry {
            trigger: Trigger::NoFeedback,
            repeat: false,
            response: bad,
        },
    );
    s.entries[1].trigger = Trigger::FeedbackContains("999".into());
    let (t, _) = episode(&spec, s, vec![], &EpisodeConfig::default());
    check_invariants(&t);
    assert_eq!(t.final_state(), FinalState::Success);
    assert_eq!(replan_count(&t), 0);
}

#[test]
fn step_limit_is_enforced_before_execution() {
    let spec = task("dark_mode");
    let s = parse_scenario(
        "#scenario v1 loop\n>>> any repeat\n[New Task List]\n1. Wander.\n[Current Task] 1/1 Wander.\n[Decision] COMMAND\n[Action]\n```python\ncomputer.mouse.move(x=0.5, y=0.5)\ncomputer.mouse.move(x=0.4, y=0.5)\n```\n",
    )
    .unwrap();
    let config = EpisodeConfig {
        max_steps: 5,
        ..EpisodeConfig::default()
    };
    let (t, _) = episode(&spec, s, vec![], &config);
    check_invariants(&t);
    assert_eq!(t.summary.cause, TerminalCause::StepLimit);
    assert_eq!(t.steps_total(), 4);
}

#[test]
fn accept_done_without_verifier() {
    let spec = task("dark_mode");
    let s = parse_scenario("#scenario v1 d\n>>> any\n[New Task List]\n1. Nothing.\n[Current Task] 1/1 Nothing.\n[Decision] DONE\n").unwrap();
    let mut env = SimEnv::for_task(&spec, 7).unwrap();
    let mut planner = Planner::new(Box::new(ScriptedMock::new(s)), PromptConfig::default());
    let t = run_episode("do nothing", &mut env, &mut planner, &EpisodeConfig::default(), Verifier::AcceptDone, header(&spec), None);
    assert_eq!(t.final_state(), FinalState::Success);
}

#[test]
fn jsonl_stream_equals_serialized_trace() {
    let spec = task("copy_notes");
    let sink = MemorySink::default();
    let mut env = SimEnv::for_task(&spec, 7).unwrap();
    let mut planner = Planner::new(Box::new(ScriptedMock::new(golden_scenario(&spec))), PromptConfig::default());
    let h = header(&spec);
    let key = h.file_stem();
    let t = run_episode(
        &spec.instruction,
        &mut env,
        &mut planner,
        &EpisodeConfig::default(),
        Verifier::Checks(&spec.verify),
        h,
        Some(&sink),
    );
    let streamed = sink.lines(&key).join("\n") + "\n";
    assert_eq!(streamed, t.to_jsonl());
    assert_eq!(EpisodeTrace::from_jsonl(&streamed).unwrap(), t);
}

#[test]
fn malformed_trace_files_are_rejected() {
    assert!(EpisodeTrace::from_jsonl("").is_err());
    assert!(EpisodeTrace::from_jsonl("{\"type\":\"notify\",\"final_state\":\"Fail\",\"message\":\"\"}\n").is_err());
    assert!(EpisodeTrace::from_jsonl("not json\n").is_err());
}
