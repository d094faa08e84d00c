//! Running a task suite and replaying traces.

use std::path::{Path, PathBuf};
use std::sync::atomic::{AtomicUsize, Ordering};
use std::sync::Mutex;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use thiserror::Error;

use super::scenarios::{adversarial_scenario, golden_scenario, AdversarialKind};
use crate::action::{execute_observed, parse_action_script, ExecResult};
use crate::env::{Environment, Verdict};
use crate::grounding::{observe, ElementFilter};
use crate::metrics::{aggregate, EpisodeTrace, SuiteStats, TraceHeader, TraceRecord};
use crate::planner::scenario::{parse_scenario, Scenario};
use crate::planner::{BackendConfig, FaultyBackend, HttpModel, ModelBackend, Planner, ScriptedMock};
use crate::sim::{FaultInjection, SimEnv, TaskSpec};
use crate::state_machine::{run_episode, EpisodeConfig, JsonlDirSink, TraceSink, Verifier};

#[derive(Debug, Clone)]
pub enum BackendChoice {
    /// Scripted replay of each task's first reference solution.
    Golden,
    /// The scripted failure-analysis mix.
    Adversarial,
    /// `<dir>/<task_id>.scenario` per task.
    ScenarioDir(PathBuf),
    Http(BackendConfig),
}

/// A fault for every task, or for one task id.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct FaultSpec {
    pub task: Option<String>,
    pub fault: FaultInjection,
}

impl FaultSpec {
    /// `[task_id:]kind:n`
    pub fn parse(s: &str) -> Result<Self, String> {
        let parts: Vec<&str> = s.splitn(3, ':').collect();
        match parts.as_slice() {
            [task, kind, n] => Ok(Self {
                task: Some(task.to_string()),
                fault: FaultInjection::parse(&format!("{kind}:{n}"))?,
            }),
            _ => Ok(Self {
                task: None,
                fault: FaultInjection::parse(s)?,
            }),
        }
    }

    fn applies_to(&self, task: &str) -> bool {
        self.task.as_deref().is_none_or(|t| t == task)
    }
}

#[derive(Debug, Clone)]
pub struct SuiteOptions {
    pub runs: u32,
    pub seed: u64,
    pub episode: EpisodeConfig,
    pub backend: BackendChoice,
    pub faults: Vec<FaultSpec>,
    /// Traces go to `<out>/traces/`, reports to `<out>/report.{json,txt}`.
    pub out: Option<PathBuf>,
    pub workers: usize,
    /// Replaces every task's instruction and accepts DONE without
    /// checking; there is no verifier for a free-form request.
    pub request: Option<String>,
}

impl Default for SuiteOptions {
    fn default() -> Self {
        Self {
            runs: 1,
            seed: 0,
            episode: EpisodeConfig::default(),
            backend: BackendChoice::Golden,
            faults: Vec::new(),
            out: None,
            workers: 1,
            request: None,
        }
    }
}

#[derive(Debug, Error)]
pub enum HarnessError {
    #[error("invalid configuration: {0}")]
    Config(String),
    #[error("{0}: {1}")]
    Io(PathBuf, std::io::Error),
}

#[derive(Debug, Clone)]
pub struct SuiteResult {
    /// Ordered by run, then by task position.
    pub traces: Vec<EpisodeTrace>,
    pub stats: SuiteStats,
}

impl SuiteResult {
    pub fn any_error(&self) -> bool {
        self.stats.errors > 0
    }
}

fn scenario_for(
    backend: &BackendChoice,
    spec: &TaskSpec,
    index: usize,
    attempts: u32,
) -> Result<Option<(Scenario, Vec<FaultInjection>)>, HarnessError> {
    Ok(match backend {
        BackendChoice::Golden => Some((golden_scenario(spec), Vec::new())),
        BackendChoice::Adversarial => Some(adversarial_scenario(
            spec,
            AdversarialKind::for_index(index),
            attempts,
        )),
        BackendChoice::ScenarioDir(dir) => {
            let path = dir.join(format!("{}.scenario", spec.id));
            let text = std::fs::read_to_string(&path).map_err(|e| HarnessError::Io(path.clone(), e))?;
            let s = parse_scenario(&text)
                .map_err(|e| HarnessError::Config(format!("{}: {e}", path.display())))?;
            Some((s, Vec::new()))
        }
        BackendChoice::Http(_) => None,
    })
}

struct Job {
    run: u32,
    index: usize,
    seed: u64,
    scenario: Option<(Scenario, Vec<FaultInjection>)>,
}

fn run_job(
    job: Job,
    spec: &TaskSpec,
    opts: &SuiteOptions,
    http: Option<&HttpModel>,
    sink: Option<&dyn TraceSink>,
) -> EpisodeTrace {
    let mut faults: Vec<FaultInjection> = opts
        .faults
        .iter()
        .filter(|f| f.applies_to(&spec.id))
        .map(|f| f.fault)
        .collect();
    let (backend, scenario_name): (Box<dyn ModelBackend>, Option<String>) = match (job.scenario, http) {
        (Some((s, extra)), _) => {
            faults.extend(extra);
            let name = s.name.clone();
            (Box::new(ScriptedMock::new(s)), Some(name))
        }
        (None, Some(h)) => (Box::new(h.clone()), None),
        (None, None) => unreachable!("http jobs always carry a client"),
    };
    let backend = match faults.iter().find_map(|f| match f {
        FaultInjection::BackendDrop { turn } => Some(*turn),
        _ => None,
    }) {
        Some(turn) => Box::new(FaultyBackend::new(backend, turn)),
        None => backend,
    };
    let config = EpisodeConfig {
        seed: job.seed,
        ..opts.episode.clone()
    };
    let instruction = opts.request.clone().unwrap_or_else(|| spec.instruction.clone());
    let verifier = match opts.request {
        Some(_) => Verifier::AcceptDone,
        None => Verifier::Checks(&spec.verify),
    };
    let header = TraceHeader {
        task_id: spec.id.clone(),
        run: job.run,
        seed: job.seed,
        instruction: instruction.clone(),
        platform: spec.platform,
        domain: Some(spec.domain),
        difficulty: Some(spec.difficulty),
        scenario: scenario_name,
        provider: config.provider,
        max_attempts: config.max_attempts,
        max_steps: config.max_steps,
        exec_recovery: config.exec_recovery,
        verify_recovery: config.verify_recovery,
    };
    let mut env = match SimEnv::for_task(spec, job.seed) {
        Ok(e) => e.with_faults(faults),
        Err(e) => panic!("task {} was validated but cannot build: {e}", spec.id),
    };
    let mut planner = Planner::new(backend, config.prompt.clone());
    run_episode(
        &instruction,
        &mut env,
        &mut planner,
        &config,
        verifier,
        header,
        sink,
    )
}

/// Runs `runs × tasks` episodes. Per-episode failures never abort the
/// suite; configuration problems are reported before anything runs.
pub fn run_suite(tasks: &[TaskSpec], opts: &SuiteOptions) -> Result<SuiteResult, HarnessError> {
    if opts.runs < 1 {
        return Err(HarnessError::Config("runs must be >= 1".into()));
    }
    if tasks.is_empty() {
        return Err(HarnessError::Config("the suite has no tasks".into()));
    }
    opts.episode.validate().map_err(HarnessError::Config)?;
    for t in tasks {
        SimEnv::for_task(t, opts.seed).map_err(|e| HarnessError::Config(format!("task {}: {e}", t.id)))?;
        if t.solutions.is_empty() && matches!(opts.backend, BackendChoice::Golden | BackendChoice::Adversarial) {
            return Err(HarnessError::Config(format!("task {} has no reference solution", t.id)));
        }
    }
    let http = match &opts.backend {
        BackendChoice::Http(cfg) => Some(HttpModel::new(cfg).map_err(HarnessError::Config)?),
        _ => None,
    };
    let mut rng = ChaCha8Rng::seed_from_u64(opts.seed);
    let mut jobs = Vec::new();
    for run in 0..opts.runs {
        for (index, spec) in tasks.iter().enumerate() {
            jobs.push(Job {
                run,
                index,
                seed: rng.random(),
                scenario: scenario_for(&opts.backend, spec, index, opts.episode.effective_max_attempts())?,
            });
        }
    }
    let sink = match &opts.out {
        Some(dir) => {
            let d = dir.join("traces");
            Some(JsonlDirSink::new(&d).map_err(|e| HarnessError::Io(d, e))?)
        }
        None => None,
    };
    let sink_ref = sink.as_ref().map(|s| s as &dyn TraceSink);
    let total = jobs.len();
    let queue = Mutex::new(jobs.into_iter().map(Some).collect::<Vec<_>>());
    let next = AtomicUsize::new(0);
    let results: Mutex<Vec<Option<EpisodeTrace>>> = Mutex::new(vec![None; total]);
    std::thread::scope(|scope| {
        for _ in 0..opts.workers.max(1).min(total) {
            scope.spawn(|| loop {
                let i = next.fetch_add(1, Ordering::SeqCst);
                if i >= total {
                    break;
                }
                let job = queue.lock().expect("queue lock")[i].take().expect("each job runs once");
                let spec = &tasks[job.index];
                tracing::info!(task = %spec.id, run = job.run, "episode start");
                let trace = run_job(job, spec, opts, http.as_ref(), sink_ref);
                tracing::info!(task = %spec.id, final_state = %trace.final_state(), "episode end");
                results.lock().expect("results lock")[i] = Some(trace);
            });
        }
    });
    let traces: Vec<EpisodeTrace> = results
        .into_inner()
        .expect("results lock")
        .into_iter()
        .map(|t| t.expect("every job produced a trace"))
        .collect();
    if let Some(s) = &sink {
        if let Some(e) = s.errors().first() {
            return Err(HarnessError::Config(format!("writing traces failed: {e}")));
        }
    }
    let stats = aggregate(&traces, opts.runs);
    if let Some(dir) = &opts.out {
        write_reports(&stats, dir)?;
    }
    Ok(SuiteResult { traces, stats })
}

pub fn write_reports(stats: &SuiteStats, dir: &Path) -> Result<(), HarnessError> {
    let json = dir.join("report.json");
    std::fs::write(&json, stats.to_json()).map_err(|e| HarnessError::Io(json, e))?;
    let txt = dir.join("report.txt");
    std::fs::write(&txt, stats.to_table()).map_err(|e| HarnessError::Io(txt, e))
}

/// Where a replay first disagreed with the recorded trace.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Divergence {
    /// 0-based index among the trace's scripts.
    pub script: usize,
    /// 0-based action index within the script.
    pub action: usize,
    /// 1-based count over all applied actions.
    pub global_step: usize,
    pub reason: String,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ReplayOutcome {
    /// Pass/fail of the last recorded verification, if any.
    pub recorded_pass: Option<bool>,
    pub replayed: Verdict,
    pub divergence: Option<Divergence>,
}

impl ReplayOutcome {
    pub fn reproduced(&self) -> bool {
        self.divergence.is_none() && self.recorded_pass.is_none_or(|p| p == self.replayed.pass)
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum ReplayError {
    #[error("unknown task id {0:?}")]
    UnknownTask(String),
    #[error("cannot build the environment: {0}")]
    Environment(String),
}

/// Re-executes the recorded scripts (and waits) on a fresh environment and
/// compares the state after every action with the recorded digests.
pub fn replay(trace: &EpisodeTrace, tasks: &[TaskSpec]) -> Result<ReplayOutcome, ReplayError> {
    let h = &trace.header;
    let spec = tasks
        .iter()
        .find(|t| t.id == h.task_id)
        .ok_or_else(|| ReplayError::UnknownTask(h.task_id.clone()))?;
    let mut env = SimEnv::for_task(spec, h.seed).map_err(ReplayError::Environment)?;
    let filter = ElementFilter::default();
    let mut divergence = None;
    let mut script_i = 0;
    let mut global = 0;
    'records: for r in &trace.records {
        match r {
            TraceRecord::Wait { ticks, .. } => env.wait(*ticks),
            TraceRecord::Script {
                actions,
                step_digests,
                ..
            } => {
                let here = |action: usize, reason: String| Divergence {
                    script: script_i,
                    action,
                    global_step: global + action + 1,
                    reason,
                };
                let obs = match observe(h.provider, &env, &filter) {
                    Ok(o) => o,
                    Err(e) => {
                        divergence = Some(here(0, format!("observation failed: {e}")));
                        break 'records;
                    }
                };
                let script = match parse_action_script(&actions.join("\n"), h.platform) {
                    Ok(s) => s,
                    Err(e) => {
                        divergence = Some(here(0, format!("recorded actions do not parse: {e}")));
                        break 'records;
                    }
                };
                let mut got = Vec::new();
                let res = execute_observed(&script, &obs, &mut env, |_, e| got.push(e.state_digest()));
                for (i, want) in step_digests.iter().enumerate() {
                    match got.get(i) {
                        Some(g) if g == want => {}
                        Some(_) => {
                            divergence = Some(here(i, "state differs after this action".into()));
                            break 'records;
                        }
                        None => {
                            let why = match &res {
                                Ok(ExecResult::Failed { message, .. }) => message.clone(),
                                Err(e) => e.to_string(),
                                Ok(ExecResult::Ok) => "action was not applied".into(),
                            };
                            divergence = Some(here(i, why));
                            break 'records;
                        }
                    }
                }
                if got.len() > step_digests.len() {
                    divergence = Some(here(
                        step_digests.len(),
                        "replay applied an action the recording did not".into(),
                    ));
                    break 'records;
                }
                global += got.len();
                script_i += 1;
            }
            _ => {}
        }
    }
    let recorded_pass = trace.verify_events().last().map(|v| v.pass);
    let replayed = env.check(&spec.verify);
    Ok(ReplayOutcome {
        recorded_pass,
        replayed,
        divergence,
    })
}
