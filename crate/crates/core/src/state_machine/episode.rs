use crate::action::{execute_observed, parse_action_script, validate, ExecResult};
use crate::env::{EnvError, Environment, Verdict};
use crate::grounding::{observe, ElementFilter, ScreenObservation};
use crate::metrics::trace::{
    header_line, record_line, summary_line, EpisodeTrace, FinalState, TerminalCause, TraceHeader,
    TraceRecord, TraceSummary,
};
use crate::planner::replan::enforce_prefix;
use crate::planner::{
    parse_plan_response, replan_task, ActionOutcome, Decision, Planner, PlanResponse,
};
use crate::sim::Check;
use crate::util::sha256_hex;

use super::sink::TraceSink;
use super::{step, AgentState, EpisodeConfig, TransitionEntry, TransitionEvent};

/// How a DONE decision is checked.
#[derive(Debug, Clone, Copy)]
pub enum Verifier<'a> {
    Checks(&'a [Check]),
    /// No verifier available: DONE is accepted as is.
    AcceptDone,
}

/// Restores the environment's pristine state.
pub fn reset_environment<E: Environment + ?Sized>(env: &mut E) -> Result<(), EnvError> {
    env.reset()
}

struct Recorder<'s> {
    key: String,
    records: Vec<TraceRecord>,
    sink: Option<&'s dyn TraceSink>,
}

impl Recorder<'_> {
    fn push(&mut self, r: TraceRecord) {
        if let Some(s) = self.sink {
            s.emit(&self.key, &record_line(&r));
        }
        self.records.push(r);
    }
}

struct Run<'a, 's, E: ?Sized> {
    request: &'a str,
    env: &'a mut E,
    planner: &'a mut Planner,
    config: &'a EpisodeConfig,
    verifier: Verifier<'a>,
    filter: ElementFilter,
    rec: Recorder<'s>,
    state: AgentState,
    attempts: u32,
    turn: u32,
    steps_total: u32,
    invalid_streak: u32,
    feedback: Option<String>,
    obs: Option<ScreenObservation>,
    after_verify_fail: bool,
    cause: Option<TerminalCause>,
}

impl<E: Environment + ?Sized> Run<'_, '_, E> {
    fn go(&mut self, event: TransitionEvent, note: Option<String>) {
        let to = step(self.state, &event, self.attempts, self.config)
            .expect("the episode driver only fires legal transitions");
        if matches!(event, TransitionEvent::VerifyFail(_)) {
            self.attempts += 1;
        }
        let entry = TransitionEntry {
            from: self.state,
            event,
            to,
            wall_time: self.env.clock(),
            attempt_index: self.attempts,
            note,
        };
        self.rec.push(TraceRecord::Transition(entry));
        self.state = to;
    }

    fn error(&mut self, message: String, cause: TerminalCause) {
        tracing::warn!(%message, "system exception");
        self.go(TransitionEvent::SystemException(message), None);
        self.cause = Some(cause);
    }

    fn observe_now(&mut self) -> Result<(), String> {
        match observe(self.config.provider, &*self.env, &self.filter) {
            Ok(o) => {
                self.obs = Some(o);
                Ok(())
            }
            Err(e) => Err(e.to_string()),
        }
    }

    /// From Plan: routes through Verify to Fail without checking.
    fn give_up(&mut self, note: &str, cause: TerminalCause) {
        self.go(TransitionEvent::PlanComplete, Some(note.to_string()));
        self.go(TransitionEvent::AttemptsExhausted, Some(note.to_string()));
        self.cause = Some(cause);
    }

    /// From Verify: records a failed verification and follows the table.
    fn verify_failed(&mut self, feedback: String, synthetic: bool) {
        let feedback = if feedback.trim().is_empty() {
            "verification failed".to_string()
        } else {
            feedback
        };
        let had_list = self.planner.memory.current.is_some();
        let earlier = self.planner.memory.failed_trajectory_digests.clone();
        let (digest, traj) = self.planner.memory.record_verify_fail(&feedback);
        let redundant_trajectory = traj.as_ref().is_some_and(|t| earlier.contains(t));
        self.rec.push(TraceRecord::Verify {
            attempt: self.attempts,
            pass: false,
            feedback: feedback.clone(),
            task_list_digest: had_list.then_some(digest),
            trajectory_digest: traj,
            redundant_trajectory,
            synthetic,
        });
        self.go(TransitionEvent::VerifyFail(feedback.clone()), None);
        if self.state == AgentState::Fail {
            self.cause = Some(if self.config.verify_recovery {
                TerminalCause::AttemptsExhausted
            } else if synthetic {
                TerminalCause::InvalidAction
            } else {
                TerminalCause::FalseCompletion
            });
        } else {
            self.feedback = Some(feedback);
            self.after_verify_fail = true;
        }
    }

    /// Plan -> Execute -> Plan for a script that never ran.
    fn invalid_action(&mut self, reason: String) {
        self.invalid_streak += 1;
        self.rec.push(TraceRecord::InvalidAction {
            turn: self.turn,
            attempt: self.attempts,
            reason: reason.clone(),
            streak: self.invalid_streak,
        });
        self.go(TransitionEvent::PlanMoreActions, Some("invalid action".into()));
        self.go(TransitionEvent::ExecFailed(reason.clone()), None);
        if !self.config.exec_recovery {
            self.give_up("execution recovery disabled", TerminalCause::InvalidAction);
        } else if self.invalid_streak > self.config.max_invalid_retries {
            self.invalid_streak = 0;
            self.go(
                TransitionEvent::PlanComplete,
                Some("invalid-action retries exhausted".into()),
            );
            self.verify_failed(format!("invalid action: {reason}"), true);
        } else {
            self.feedback = Some(reason);
        }
    }

    fn plan(&mut self) {
        self.turn += 1;
        if self.turn > 4 * self.config.max_steps {
            return self.give_up("planner turn limit reached", TerminalCause::StepLimit);
        }
        let obs = self.obs.as_ref().expect("Plan always follows an observation");
        let feedback = self.feedback.take();
        let (prompt, truncated) = match self.planner.assemble(self.request, obs, feedback.as_deref()) {
            Ok(p) => p,
            Err(e) => return self.error(e.to_string(), TerminalCause::SystemException),
        };
        self.rec.push(TraceRecord::Prompt {
            turn: self.turn,
            system_sha256: sha256_hex(prompt.system.as_bytes()),
            user: prompt.user.clone(),
            image_sha256: prompt.images.iter().map(|i| i.digest()).collect(),
            truncated,
        });
        let raw = match self.planner.generate(&prompt) {
            Ok(r) => r,
            Err(e) => return self.error(e.to_string(), TerminalCause::SystemException),
        };
        self.rec.push(TraceRecord::Response {
            turn: self.turn,
            raw: raw.clone(),
        });
        let resp = match parse_plan_response(&raw) {
            Ok(r) => r,
            Err(e) => return self.invalid_action(e.to_string()),
        };
        self.adopt(&resp, feedback.as_deref());
        match resp.decision {
            Decision::Done => self.go(TransitionEvent::PlanComplete, None),
            Decision::Wait => {
                self.go(TransitionEvent::PlanMoreActions, Some("wait".into()));
                self.env.wait(self.config.wait_ticks);
                self.rec.push(TraceRecord::Wait {
                    turn: self.turn,
                    ticks: self.config.wait_ticks,
                });
                self.go(TransitionEvent::ExecOk, Some("wait".into()));
            }
            Decision::Command => self.command(&resp),
        }
    }

    fn adopt(&mut self, resp: &PlanResponse, feedback: Option<&str>) {
        let memory = &self.planner.memory;
        let (list, correction) = if self.after_verify_fail {
            let out = replan_task(memory, feedback.unwrap_or(""), resp);
            self.rec.push(TraceRecord::Replan {
                turn: self.turn,
                attempt: self.attempts,
                digest: out.task_list.digest(),
                redundant: out.redundant,
            });
            (out.task_list, out.correction)
        } else {
            enforce_prefix(memory.current.as_ref(), &resp.task_list)
        };
        self.after_verify_fail = false;
        self.rec.push(TraceRecord::TaskList {
            turn: self.turn,
            attempt: self.attempts,
            list: list.clone(),
            correction,
        });
        let memory = &mut self.planner.memory;
        memory.adopt(list);
        if !resp.memory_update.is_empty() {
            memory.notes.push(resp.memory_update.clone());
        }
    }

    fn command(&mut self, resp: &PlanResponse) {
        let code = resp.action_code.clone().unwrap_or_default();
        let platform = self.env.platform();
        let script = match parse_action_script(&code, platform) {
            Ok(s) => s,
            Err(e) => return self.invalid_action(e.to_string()),
        };
        let obs = self.obs.take().expect("Plan always follows an observation");
        if let Err(e) = validate(&script, &obs) {
            self.obs = Some(obs);
            return self.invalid_action(e.to_string());
        }
        if self.steps_total + script.len() as u32 > self.config.max_steps {
            self.obs = Some(obs);
            return self.give_up("step limit reached", TerminalCause::StepLimit);
        }
        self.go(TransitionEvent::PlanMoreActions, None);
        let mut digests = Vec::new();
        let result = execute_observed(&script, &obs, &mut *self.env, |_, env| {
            digests.push(env.state_digest())
        });
        let applied = digests.len() as u32;
        self.steps_total += applied;
        let task_index = self
            .planner
            .memory
            .current
            .as_ref()
            .map_or(0, |l| l.current);
        let outcome = match &result {
            Ok(r) => r.clone(),
            Err(e) => ExecResult::Failed {
                message: e.to_string(),
                step_index: e.step_index,
            },
        };
        self.rec.push(TraceRecord::Script {
            turn: self.turn,
            attempt: self.attempts,
            task_index,
            code,
            actions: script.canonical_actions(),
            outcome: outcome.clone(),
            steps_applied: applied,
            step_digests: digests,
        });
        let remembered = match &outcome {
            ExecResult::Ok => ActionOutcome::Ok,
            ExecResult::Failed { message, .. } => ActionOutcome::Failed {
                message: message.clone(),
            },
        };
        self.planner.memory.record_actions(task_index, script, remembered);
        match result {
            Err(e) => self.error(e.message, TerminalCause::SystemException),
            Ok(ExecResult::Ok) => {
                self.invalid_streak = 0;
                self.go(TransitionEvent::ExecOk, None);
            }
            Ok(ExecResult::Failed { message, step_index }) => {
                self.go(
                    TransitionEvent::ExecFailed(message.clone()),
                    Some(format!("action {step_index}")),
                );
                if !self.config.exec_recovery {
                    return self.give_up("execution recovery disabled", TerminalCause::InvalidAction);
                }
                self.feedback = Some(message);
                if let Err(e) = self.observe_now() {
                    self.error(e, TerminalCause::SystemException);
                }
            }
        }
    }

    fn verify(&mut self) {
        let verdict = match self.verifier {
            Verifier::Checks(checks) => self.env.check(checks),
            Verifier::AcceptDone => {
                tracing::warn!("no verifier configured; accepting DONE without checking");
                Verdict::pass()
            }
        };
        if verdict.pass {
            self.rec.push(TraceRecord::Verify {
                attempt: self.attempts,
                pass: true,
                feedback: String::new(),
                task_list_digest: self.planner.memory.current.as_ref().map(|l| l.digest()),
                trajectory_digest: self.planner.memory.trajectory_digest(),
                redundant_trajectory: false,
                synthetic: false,
            });
            self.go(TransitionEvent::VerifyPass, None);
            self.cause = Some(TerminalCause::Verified);
        } else {
            self.verify_failed(verdict.feedback, false);
        }
    }
}

/// Drives one request from Init to Success, Fail or Error, then notifies
/// and resets. Never panics on environment or backend failures; they end
/// the episode in Error.
pub fn run_episode<E: Environment + ?Sized>(
    request: &str,
    env: &mut E,
    planner: &mut Planner,
    config: &EpisodeConfig,
    verifier: Verifier<'_>,
    header: TraceHeader,
    sink: Option<&dyn TraceSink>,
) -> EpisodeTrace {
    let key = header.file_stem();
    if let Some(s) = sink {
        s.emit(&key, &header_line(&header));
    }
    let mut run = Run {
        request,
        env,
        planner,
        config,
        verifier,
        filter: ElementFilter::default(),
        rec: Recorder {
            key,
            records: Vec::new(),
            sink,
        },
        state: AgentState::Init,
        attempts: 0,
        turn: 0,
        steps_total: 0,
        invalid_streak: 0,
        feedback: None,
        obs: None,
        after_verify_fail: false,
        cause: None,
    };
    run.go(TransitionEvent::UserRequest, None);
    while !run.state.is_terminal() {
        match run.state {
            AgentState::Observe => match run.observe_now() {
                Ok(()) => run.go(TransitionEvent::ObservationReady, None),
                Err(e) => {
                    run.go(
                        TransitionEvent::ObservationReady,
                        Some(format!("observation failed: {e}")),
                    );
                    run.error(e, TerminalCause::SystemException);
                }
            },
            AgentState::Plan => run.plan(),
            AgentState::Verify => run.verify(),
            other => unreachable!("driver never rests in {other}"),
        }
    }
    let final_state = match run.state {
        AgentState::Success => FinalState::Success,
        AgentState::Fail => FinalState::Fail,
        _ => FinalState::Error,
    };
    let mut cause = run.cause.unwrap_or(TerminalCause::SystemException);
    let message = match final_state {
        FinalState::Success => "task completed and verified".to_string(),
        FinalState::Fail => format!("task failed ({cause:?}) after {} attempt(s)", run.attempts),
        FinalState::Error => "task aborted by a system exception".to_string(),
    };
    run.rec.push(TraceRecord::Notify {
        final_state,
        message,
    });
    run.go(TransitionEvent::Notified, None);
    let mut final_state = final_state;
    if run.state == AgentState::Reset || config.benchmark_mode {
        let reset = reset_environment(&mut *run.env);
        run.rec.push(TraceRecord::Reset {
            ok: reset.is_ok(),
            message: reset.as_ref().err().map(|e| e.to_string()).unwrap_or_default(),
        });
        match reset {
            Ok(()) if run.state == AgentState::Reset => run.go(TransitionEvent::ResetDone, None),
            Ok(()) => {}
            Err(e) => {
                tracing::error!(%e, "environment reset failed; operator attention required");
                final_state = FinalState::Error;
                cause = TerminalCause::ResetFailed;
            }
        }
    }
    let final_attempt = run.planner.memory.attempt;
    let on_path = if final_state == FinalState::Success {
        run.rec
            .records
            .iter()
            .map(|r| match r {
                TraceRecord::Script {
                    attempt,
                    steps_applied,
                    ..
                } if *attempt == final_attempt => *steps_applied,
                _ => 0,
            })
            .sum()
    } else {
        0
    };
    let summary = TraceSummary {
        final_state,
        cause,
        steps_total: run.steps_total,
        steps_on_successful_path: on_path,
        attempts_used: run.attempts,
        turns: run.turn,
    };
    if let Some(s) = sink {
        s.emit(&run.rec.key, &summary_line(&summary));
        s.finish(&run.rec.key);
    }
    EpisodeTrace {
        header,
        records: run.rec.records,
        summary,
    }
}
