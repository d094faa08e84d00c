//! Scripted scenarios built from task specs: the golden scenario that
//! replays a reference solution, and the adversarial mix used for failure
//! analysis.

use std::fmt;

use serde::{Deserialize, Serialize};

use crate::action::Platform;
use crate::planner::scenario::{Scenario, ScenarioEntry, Trigger};
use crate::planner::{render_plan_response, Decision, PlanResponse, TaskList};
use crate::sim::{FaultInjection, Solution, TaskSpec};

/// Behaviour of the scripted model on one task of the adversarial suite.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum AdversarialKind {
    /// The reference solution.
    Golden,
    /// One unparseable response, then the reference solution.
    MalformedOnce,
    /// DONE after the first step, then the rest of the solution.
    PrematureDone,
    /// The reference solution under a verifier that fails once.
    FlakyVerify,
    /// A new, useless plan every attempt.
    Hopeless,
    /// The same useless plan every attempt.
    Repeat,
    /// Unparseable responses forever.
    MalformedForever,
    /// A harmless action forever.
    StepLimit,
}

impl AdversarialKind {
    /// The mix of the 20-task suite, by task position.
    pub const PATTERN: [AdversarialKind; 20] = {
        use AdversarialKind::*;
        [
            Golden,
            Hopeless,
            MalformedOnce,
            Hopeless,
            PrematureDone,
            Hopeless,
            FlakyVerify,
            Hopeless,
            Repeat,
            Hopeless,
            MalformedForever,
            Hopeless,
            StepLimit,
            Hopeless,
            Golden,
            Hopeless,
            MalformedOnce,
            Repeat,
            FlakyVerify,
            MalformedForever,
        ]
    };

    pub fn for_index(i: usize) -> Self {
        Self::PATTERN[i % Self::PATTERN.len()]
    }

    pub fn short(self) -> &'static str {
        match self {
            AdversarialKind::Golden => "G",
            AdversarialKind::MalformedOnce => "M",
            AdversarialKind::PrematureDone => "P",
            AdversarialKind::FlakyVerify => "F",
            AdversarialKind::Hopeless => "H",
            AdversarialKind::Repeat => "R",
            AdversarialKind::MalformedForever => "MF",
            AdversarialKind::StepLimit => "S",
        }
    }
}

impl fmt::Display for AdversarialKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.short())
    }
}

const MALFORMED: &str = "I am not sure what to do here.\n[Decision] MAYBE\n";
const FLAKED: &str = "flaked";

fn response(
    note: &str,
    tasks: &[String],
    current: usize,
    decision: Decision,
    code: Option<String>,
) -> String {
    let task_list = TaskList::new(tasks.iter().cloned(), current)
        .expect("scenario task lists are non-empty and the pointer is in range");
    render_plan_response(&PlanResponse {
        screen_annotation: note.to_string(),
        task_list,
        decision,
        action_code: code,
        memory_update: String::new(),
    })
}

fn entry(trigger: Trigger, repeat: bool, response: String) -> ScenarioEntry {
    ScenarioEntry {
        trigger,
        repeat,
        response,
    }
}

fn golden_entries(solution: &Solution) -> Vec<ScenarioEntry> {
    let mut out: Vec<ScenarioEntry> = solution
        .steps
        .iter()
        .enumerate()
        .map(|(i, s)| {
            let r = response(
                &format!("Step {} of the reference solution.", i + 1),
                &solution.tasks,
                s.task,
                Decision::Command,
                Some(s.code.clone()),
            );
            entry(Trigger::Any, false, r)
        })
        .collect();
    out.push(done_entry(solution, Trigger::Any));
    out
}

fn done_entry(solution: &Solution, trigger: Trigger) -> ScenarioEntry {
    let r = response(
        "All tasks are complete.",
        &solution.tasks,
        solution.tasks.len(),
        Decision::Done,
        None,
    );
    entry(trigger, false, r)
}

/// Plays the task's first reference solution one step per turn, then
/// declares DONE.
pub fn golden_scenario(spec: &TaskSpec) -> Scenario {
    let solution = &spec.solutions[0];
    Scenario {
        name: format!("{}-golden", spec.id),
        entries: golden_entries(solution),
    }
}

/// [`golden_scenario`] followed by DONE answers to the feedback of a
/// flaky verifier, so the episode survives `flaky` injected failures.
pub fn golden_with_flaky_recovery(spec: &TaskSpec, flaky: u32) -> Scenario {
    let mut s = golden_scenario(spec);
    let solution = &spec.solutions[0];
    for _ in 0..flaky {
        s.entries
            .push(done_entry(solution, Trigger::FeedbackContains(FLAKED.into())));
    }
    s.name = format!("{}-golden-flaky", spec.id);
    s
}

fn harmless(platform: Platform, k: usize) -> String {
    let v = (k % 9 + 1) as f64 / 10.0;
    match platform {
        Platform::Desktop => format!("computer.mouse.move(x={v:?}, y=0.5) # Look at the screen."),
        Platform::Smartphone => {
            format!("computer.touch.swipe(x={v:?}, y=0.5, dir=\"up\", dist=0.1) # Look at the screen.")
        }
    }
}

fn useless_attempt(platform: Platform, k: usize, first: &str, second: &str) -> [ScenarioEntry; 2] {
    let tasks = [first.to_string(), second.to_string()];
    [
        entry(
            Trigger::Any,
            false,
            response("The screen.", &tasks, 1, Decision::Command, Some(harmless(platform, k))),
        ),
        entry(
            Trigger::Any,
            false,
            response("The screen.", &tasks, 2, Decision::Done, None),
        ),
    ]
}

/// Scenario and injected faults for one task of the adversarial suite.
/// `attempts` bounds how many verification attempts the scripted model
/// answers.
pub fn adversarial_scenario(
    spec: &TaskSpec,
    kind: AdversarialKind,
    attempts: u32,
) -> (Scenario, Vec<FaultInjection>) {
    let solution = &spec.solutions[0];
    let mut faults = Vec::new();
    let entries = match kind {
        AdversarialKind::Golden => golden_entries(solution),
        AdversarialKind::MalformedOnce => {
            let mut e = vec![entry(Trigger::Any, false, MALFORMED.to_string())];
            e.extend(golden_entries(solution));
            e
        }
        AdversarialKind::PrematureDone => {
            let mut g = golden_entries(solution);
            let first = solution.steps.first().map_or(1, |s| s.task);
            let early = response(
                "The task looks complete.",
                &solution.tasks,
                first,
                Decision::Done,
                None,
            );
            g.insert(1.min(g.len()), entry(Trigger::Any, false, early));
            g
        }
        AdversarialKind::FlakyVerify => {
            faults.push(FaultInjection::VerifyFlakyFail { count: 1 });
            golden_with_flaky_recovery(spec, 1).entries
        }
        AdversarialKind::Hopeless => (1..=attempts as usize)
            .flat_map(|k| {
                let first = if k == 1 {
                    "Look around the screen."
                } else {
                    "Look around the screen first."
                };
                let second = format!("Finish the request, approach {k}.");
                useless_attempt(spec.platform, k, first, &second)
            })
            .collect(),
        AdversarialKind::Repeat => (1..=attempts as usize)
            .flat_map(|_| {
                useless_attempt(spec.platform, 5, "Look around the screen.", "Finish the request.")
            })
            .collect(),
        AdversarialKind::MalformedForever => vec![entry(Trigger::Any, true, MALFORMED.to_string())],
        AdversarialKind::StepLimit => {
            let tasks = [spec.instruction.clone()];
            let r = response(
                "The screen.",
                &tasks,
                1,
                Decision::Command,
                Some(harmless(spec.platform, 4)),
            );
            vec![entry(Trigger::Any, true, r)]
        }
    };
    let scenario = Scenario {
        name: format!("{}-{}", spec.id, kind.short()),
        entries,
    };
    (scenario, faults)
}
