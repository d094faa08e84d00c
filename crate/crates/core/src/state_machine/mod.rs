//! The agent control loop as an explicit finite state machine.
//!
//! | from | event | to |
//! |---|---|---|
//! | Init | UserRequest | Observe |
//! | Observe | ObservationReady | Plan |
//! | Plan | PlanMoreActions | Execute |
//! | Plan | PlanComplete | Verify |
//! | Execute | ExecFailed | Plan |
//! | Execute | ExecOk | Observe |
//! | Verify | VerifyPass | Success |
//! | Verify | VerifyFail | Plan, or Fail once the attempt budget is spent |
//! | Verify | AttemptsExhausted | Fail |
//! | Plan, Execute, Verify | SystemException | Error |
//! | Success | Notified | Init |
//! | Fail, Error | Notified | Reset |
//! | Reset | ResetDone | Init |
//!
//! Every other pair is an [`IllegalTransition`].

mod episode;
pub mod sink;

use std::fmt;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::grounding::GroundingProvider;
use crate::planner::PromptConfig;

pub use episode::{reset_environment, run_episode, Verifier};
pub use sink::{JsonlDirSink, MemorySink, TraceSink};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum AgentState {
    Init,
    Observe,
    Plan,
    Execute,
    Verify,
    Success,
    Fail,
    Reset,
    Error,
}

impl AgentState {
    pub const ALL: [AgentState; 9] = [
        AgentState::Init,
        AgentState::Observe,
        AgentState::Plan,
        AgentState::Execute,
        AgentState::Verify,
        AgentState::Success,
        AgentState::Fail,
        AgentState::Reset,
        AgentState::Error,
    ];

    /// Success, Fail and Error end an episode.
    pub fn is_terminal(self) -> bool {
        matches!(self, AgentState::Success | AgentState::Fail | AgentState::Error)
    }
}

impl fmt::Display for AgentState {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{self:?}")
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(tag = "kind", content = "message", rename_all = "snake_case")]
pub enum TransitionEvent {
    UserRequest,
    ObservationReady,
    PlanMoreActions,
    PlanComplete,
    ExecOk,
    ExecFailed(String),
    VerifyPass,
    VerifyFail(String),
    AttemptsExhausted,
    SystemException(String),
    ResetDone,
    Notified,
}

impl TransitionEvent {
    /// One representative of each of the twelve event kinds.
    pub fn kinds() -> [TransitionEvent; 12] {
        [
            TransitionEvent::UserRequest,
            TransitionEvent::ObservationReady,
            TransitionEvent::PlanMoreActions,
            TransitionEvent::PlanComplete,
            TransitionEvent::ExecOk,
            TransitionEvent::ExecFailed("error".into()),
            TransitionEvent::VerifyPass,
            TransitionEvent::VerifyFail("feedback".into()),
            TransitionEvent::AttemptsExhausted,
            TransitionEvent::SystemException("crash".into()),
            TransitionEvent::ResetDone,
            TransitionEvent::Notified,
        ]
    }

    pub fn name(&self) -> &'static str {
        match self {
            TransitionEvent::UserRequest => "UserRequest",
            TransitionEvent::ObservationReady => "ObservationReady",
            TransitionEvent::PlanMoreActions => "PlanMoreActions",
            TransitionEvent::PlanComplete => "PlanComplete",
            TransitionEvent::ExecOk => "ExecOk",
            TransitionEvent::ExecFailed(_) => "ExecFailed",
            TransitionEvent::VerifyPass => "VerifyPass",
            TransitionEvent::VerifyFail(_) => "VerifyFail",
            TransitionEvent::AttemptsExhausted => "AttemptsExhausted",
            TransitionEvent::SystemException(_) => "SystemException",
            TransitionEvent::ResetDone => "ResetDone",
            TransitionEvent::Notified => "Notified",
        }
    }

    /// The carried message, if the event has one.
    pub fn message(&self) -> Option<&str> {
        match self {
            TransitionEvent::ExecFailed(m)
            | TransitionEvent::VerifyFail(m)
            | TransitionEvent::SystemException(m) => Some(m),
            _ => None,
        }
    }
}

impl fmt::Display for TransitionEvent {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self.message() {
            Some(m) => write!(f, "{}({m:?})", self.name()),
            None => f.write_str(self.name()),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
#[error("illegal transition: {event} in state {state}")]
pub struct IllegalTransition {
    pub state: AgentState,
    pub event: TransitionEvent,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EpisodeConfig {
    /// Verification-failure budget.
    pub max_attempts: u32,
    /// Cap on applied actions.
    pub max_steps: u32,
    pub seed: u64,
    pub provider: GroundingProvider,
    /// Ticks a WAIT decision dwells.
    pub wait_ticks: u32,
    /// Invalid actions retried in a row before one counts as a failed
    /// verification attempt.
    pub max_invalid_retries: u32,
    pub exec_recovery: bool,
    pub verify_recovery: bool,
    /// Reset the environment after Success too, so suite episodes are
    /// independent.
    pub benchmark_mode: bool,
    #[serde(skip)]
    pub prompt: PromptConfig,
}

impl Default for EpisodeConfig {
    fn default() -> Self {
        Self {
            max_attempts: 4,
            max_steps: 30,
            seed: 0,
            provider: GroundingProvider::A11yTree,
            wait_ticks: 1,
            max_invalid_retries: 2,
            exec_recovery: true,
            verify_recovery: true,
            benchmark_mode: true,
            prompt: PromptConfig::default(),
        }
    }
}

impl EpisodeConfig {
    pub fn validate(&self) -> Result<(), String> {
        if self.max_attempts < 1 {
            return Err("max_attempts must be >= 1".into());
        }
        if self.max_steps < 1 {
            return Err("max_steps must be >= 1".into());
        }
        Ok(())
    }

    /// Budget the transition table applies; disabling verification
    /// recovery leaves a single attempt.
    pub fn effective_max_attempts(&self) -> u32 {
        if self.verify_recovery {
            self.max_attempts
        } else {
            1
        }
    }
}

/// The successor of `current` under `event`.
pub fn step(
    current: AgentState,
    event: &TransitionEvent,
    attempts_used: u32,
    config: &EpisodeConfig,
) -> Result<AgentState, IllegalTransition> {
    use AgentState as S;
    use TransitionEvent as E;
    let next = match (current, event) {
        (S::Init, E::UserRequest) => S::Observe,
        (S::Observe, E::ObservationReady) => S::Plan,
        (S::Plan, E::PlanMoreActions) => S::Execute,
        (S::Plan, E::PlanComplete) => S::Verify,
        (S::Execute, E::ExecFailed(_)) => S::Plan,
        (S::Execute, E::ExecOk) => S::Observe,
        (S::Verify, E::VerifyPass) => S::Success,
        (S::Verify, E::VerifyFail(_)) => {
            if attempts_used + 1 < config.effective_max_attempts() {
                S::Plan
            } else {
                S::Fail
            }
        }
        (S::Verify, E::AttemptsExhausted) => S::Fail,
        (S::Plan | S::Execute | S::Verify, E::SystemException(_)) => S::Error,
        (S::Success, E::Notified) => S::Init,
        (S::Fail | S::Error, E::Notified) => S::Reset,
        (S::Reset, E::ResetDone) => S::Init,
        _ => {
            return Err(IllegalTransition {
                state: current,
                event: event.clone(),
            })
        }
    };
    Ok(next)
}

/// One row of the transition log.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct TransitionEntry {
    pub from: AgentState,
    pub event: TransitionEvent,
    pub to: AgentState,
    /// Logical clock of the environment.
    pub wall_time: u64,
    pub attempt_index: u32,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub note: Option<String>,
}

#[cfg(test)]
mod tests {
    use super::*;

    fn cfg() -> EpisodeConfig {
        EpisodeConfig::default()
    }

    #[test]
    fn examples() {
        let c = cfg();
        assert_eq!(step(AgentState::Plan, &TransitionEvent::PlanMoreActions, 0, &c), Ok(AgentState::Execute));
        assert_eq!(
            step(AgentState::Execute, &TransitionEvent::ExecFailed("NameError".into()), 0, &c),
            Ok(AgentState::Plan)
        );
        assert_eq!(
            step(AgentState::Verify, &TransitionEvent::VerifyFail("file missing".into()), 3, &c),
            Ok(AgentState::Fail)
        );
        assert_eq!(
            step(AgentState::Verify, &TransitionEvent::VerifyFail("file missing".into()), 2, &c),
            Ok(AgentState::Plan)
        );
        assert_eq!(step(AgentState::Success, &TransitionEvent::Notified, 0, &c), Ok(AgentState::Init));
        assert!(step(AgentState::Init, &TransitionEvent::ExecOk, 0, &c).is_err());
    }

    #[test]
    fn verify_recovery_off_leaves_one_attempt() {
        let c = EpisodeConfig {
            verify_recovery: false,
            ..cfg()
        };
        assert_eq!(
            step(AgentState::Verify, &TransitionEvent::VerifyFail("x".into()), 0, &c),
            Ok(AgentState::Fail)
        );
    }

    #[test]
    fn event_serialization() {
        let e = TransitionEvent::ExecFailed("boom".into());
        let j = serde_json::to_string(&e).unwrap();
        assert_eq!(j, r#"{"kind":"exec_failed","message":"boom"}"#);
        assert_eq!(serde_json::from_str::<TransitionEvent>(&j).unwrap(), e);
        assert_eq!(serde_json::to_string(&TransitionEvent::Notified).unwrap(), r#"{"kind":"notified"}"#);
    }
}
