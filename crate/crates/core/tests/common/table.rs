use osagent_core::state_machine::AgentState as S;

/// Expected successor by (state, event name), written out row by row.
/// VerifyFail depends on the attempt budget; `None` here means "see
/// verify_fail_successor".
pub fn table(state: S, event: &str) -> Option<Option<S>> {
    let rows: &[(S, &str, Option<S>)] = &[
        (S::Init, "UserRequest", Some(S::Observe)),
        (S::Observe, "ObservationReady", Some(S::Plan)),
        (S::Plan, "PlanMoreActions", Some(S::Execute)),
        (S::Plan, "PlanComplete", Some(S::Verify)),
        (S::Execute, "ExecFailed", Some(S::Plan)),
        (S::Execute, "ExecOk", Some(S::Observe)),
        (S::Verify, "VerifyPass", Some(S::Success)),
        (S::Verify, "VerifyFail", None),
        (S::Verify, "AttemptsExhausted", Some(S::Fail)),
        (S::Plan, "SystemException", Some(S::Error)),
        (S::Execute, "SystemException", Some(S::Error)),
        (S::Verify, "SystemException", Some(S::Error)),
        (S::Success, "Notified", Some(S::Init)),
        (S::Fail, "Notified", Some(S::Reset)),
        (S::Error, "Notified", Some(S::Reset)),
        (S::Reset, "ResetDone", Some(S::Init)),
    ];
    rows.iter()
        .find(|(s, e, _)| *s == state && *e == event)
        .map(|(_, _, to)| *to)
}

/// With budget `max`, failure number `used + 1` still allows another plan
/// only while fewer than `max` failures have happened.
pub fn verify_fail_successor(used: u32, max: u32) -> S {
    if used + 1 >= max {
        S::Fail
    } else {
        S::Plan
    }
}
