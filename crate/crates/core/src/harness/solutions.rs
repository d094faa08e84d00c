//! Running reference solutions directly, and the static-trajectory check
//! that compares an action sequence against a single golden sequence.

use crate::action::{execute, parse_action_script, validate, ExecResult};
use crate::env::{Environment, Verdict};
use crate::grounding::{observe, ElementFilter, GroundingProvider};
use crate::planner::scenario::resolve_with_elements;
use crate::sim::{SimEnv, Solution, TaskSpec};

#[derive(Debug, Clone, PartialEq)]
pub struct SolutionRun {
    pub verdict: Verdict,
    /// Canonical calls actually executed, IDs resolved.
    pub actions: Vec<String>,
    /// First step that could not run, with the reason.
    pub failure: Option<(usize, String)>,
}

/// Executes every step of `solution` on a fresh environment, re-observing
/// before each step, then runs the task's verifier.
pub fn run_solution(
    spec: &TaskSpec,
    solution: &Solution,
    seed: u64,
    provider: GroundingProvider,
) -> Result<SolutionRun, String> {
    let mut env = SimEnv::for_task(spec, seed)?;
    let filter = ElementFilter::default();
    let mut actions = Vec::new();
    let mut failure = None;
    for (i, step) in solution.steps.iter().enumerate() {
        let obs = observe(provider, &env, &filter).map_err(|e| e.to_string())?;
        let code = resolve_with_elements(&step.code, &obs.elements);
        let script = match parse_action_script(&code, spec.platform) {
            Ok(s) => s,
            Err(e) => {
                failure = Some((i, e.to_string()));
                break;
            }
        };
        if let Err(e) = validate(&script, &obs) {
            failure = Some((i, e.to_string()));
            break;
        }
        actions.extend(script.canonical_actions());
        match execute(&script, &obs, &mut env).map_err(|e| e.to_string())? {
            ExecResult::Ok => {}
            ExecResult::Failed { message, step_index } => {
                failure = Some((i, format!("action {step_index}: {message}")));
                break;
            }
        }
    }
    let verdict = env.check(&spec.verify);
    Ok(SolutionRun {
        verdict,
        actions,
        failure,
    })
}

/// Static evaluation: a trajectory passes only if it equals the golden
/// one action for action.
pub fn static_trajectory_match(golden: &[String], candidate: &[String]) -> bool {
    golden == candidate
}
