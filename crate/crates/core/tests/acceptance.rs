//! One PASS/FAIL line per acceptance criterion. Exits non-zero on any FAIL.

mod common;

use std::collections::BTreeMap;
use std::panic::{catch_unwind, AssertUnwindSafe};
use std::path::Path;
use std::time::Instant;

use common::strategies::{desktop_action, phone_action, plan_response, script};
use common::table::{table, verify_fail_successor};
use common::traces::{success, Attempts};
use osagent_core::action::{parse_action_script, Platform};
use osagent_core::grounding::{ground_fixture, ElementFilter, GroundingProvider};
use osagent_core::harness::{
    golden_scenario, golden_with_flaky_recovery, run_solution, run_suite, static_trajectory_match, AdversarialKind,
    BackendChoice, SuiteOptions,
};
use osagent_core::metrics::{
    classify_failure, proxy_matching_score, replan_count, EpisodeTrace, FailureClass, FinalState, TraceHeader,
    TraceRecord,
};
use osagent_core::planner::scenario::Scenario;
use osagent_core::planner::{parse_plan_response, render_plan_response, Planner, PromptConfig, ScriptedMock};
use osagent_core::sim::{bundled_suite, FaultInjection, SimEnv, TaskSpec};
use osagent_core::state_machine::{run_episode, step, AgentState, EpisodeConfig, TransitionEvent, Verifier};
use proptest::strategy::Strategy;
use proptest::test_runner::{Config, TestCaseError, TestRunner};

type Outcome = Result<String, String>;
type Check = (&'static str, fn() -> Outcome);

macro_rules! ensure {
    ($cond:expr, $($fmt:tt)+) => {
        let ok: bool = $cond;
        if !ok {
            return Err(format!($($fmt)+));
        }
    };
}

fn adversarial(recovery: bool) -> SuiteOptions {
    SuiteOptions {
        backend: BackendChoice::Adversarial,
        episode: EpisodeConfig {
            exec_recovery: recovery,
            verify_recovery: recovery,
            ..EpisodeConfig::default()
        },
        ..SuiteOptions::default()
    }
}

fn transition_table() -> Outcome {
    let start = Instant::now();
    let cfg = EpisodeConfig::default();
    let (mut legal, mut illegal) = (0, 0);
    for state in AgentState::ALL {
        for event in TransitionEvent::kinds() {
            let got = step(state, &event, 0, &cfg);
            match table(state, event.name()) {
                Some(to) => {
                    let to = to.unwrap_or_else(|| verify_fail_successor(0, cfg.max_attempts));
                    ensure!(got == Ok(to), "{state} + {event}: {got:?}");
                    legal += 1;
                }
                None => {
                    ensure!(got.is_err(), "{state} + {event} should be illegal");
                    illegal += 1;
                }
            }
        }
    }
    let t = start.elapsed().as_secs_f64();
    ensure!(legal + illegal == 108 && legal == 16, "{legal} legal of {}", legal + illegal);
    ensure!(t < 1.0, "took {t:.3}s");
    Ok(format!("{legal} legal, {illegal} illegal pairs in {t:.3}s"))
}

fn failure_classes() -> Outcome {
    let start = Instant::now();
    let tasks = bundled_suite();
    let on = run_suite(&tasks, &adversarial(true)).map_err(|e| e.to_string())?;
    let off = run_suite(&tasks, &adversarial(false)).map_err(|e| e.to_string())?;
    let t = start.elapsed().as_secs_f64();
    let f = &on.stats.failure_classes;
    ensure!(f.fc == 0 && f.ia == 0, "recovery on: FC {} IA {}", f.fc, f.ia);
    let failures = on.traces.iter().filter(|t| t.final_state() != FinalState::Success).count();
    ensure!(f.rsl == failures && failures > 0, "RSL {} of {failures} failures", f.rsl);
    let g = &off.stats.failure_classes;
    ensure!(g.fc >= 1 && g.ia >= 1, "recovery off: FC {} IA {}", g.fc, g.ia);
    ensure!(t < 30.0, "took {t:.1}s");
    Ok(format!(
        "on: FC 0 IA 0 RSL {}/{failures}; off: FC {} IA {} RSL {}; {t:.2}s",
        f.rsl, g.fc, g.ia, g.rsl
    ))
}

fn prefix_preservation() -> Outcome {
    let tasks = bundled_suite();
    let (mut traces, mut splices, mut replans) = (0, 0, 0);
    for opts in [SuiteOptions::default(), adversarial(true), adversarial(false)] {
        let r = run_suite(&tasks, &opts).map_err(|e| e.to_string())?;
        for t in &r.traces {
            traces += 1;
            let mut prior: Option<&osagent_core::planner::TaskList> = None;
            for rec in &t.records {
                match rec {
                    TraceRecord::TaskList { list, correction, .. } => {
                        if let Some(p) = prior {
                            let done = &p.descriptions()[..p.current - 1];
                            ensure!(
                                list.descriptions().starts_with(done),
                                "{}: done prefix lost",
                                t.task_id()
                            );
                            if let Some(c) = correction {
                                ensure!(c.preserved == done, "{}: splice logged wrong prefix", t.task_id());
                                splices += 1;
                            }
                        }
                        prior = Some(list);
                    }
                    TraceRecord::Replan { .. } => replans += 1,
                    _ => {}
                }
            }
        }
    }
    ensure!(splices > 0, "no splice was exercised");
    Ok(format!("{traces} traces, {replans} re-plans, {splices} splices logged, 0 violations"))
}

fn redundant_replans() -> Outcome {
    let r = run_suite(&bundled_suite(), &adversarial(true)).map_err(|e| e.to_string())?;
    for (i, t) in r.traces.iter().enumerate() {
        let kind = AdversarialKind::for_index(i);
        if kind == AdversarialKind::Repeat {
            ensure!(
                classify_failure(t) == Ok(FailureClass::RSL { rr: true }),
                "{}: repeat scenario not flagged",
                t.task_id()
            );
        }
    }
    let f = &r.stats.failure_classes;
    let ratio = f.rr_ratio().unwrap_or(0.0);
    ensure!(f.rr == 2 && f.rsl == 13, "RR {} of RSL {}", f.rr, f.rsl);
    ensure!(format!("{:.1}", ratio * 100.0) == "15.4", "ratio {ratio}");
    Ok(format!("RR {} of {} failures = {:.1}%", f.rr, f.rsl, ratio * 100.0))
}

fn proxy_oracle() -> Outcome {
    let cases: [(Attempts, f64); 5] = [
        (&[&[(3, 3)], &[(2, 2), (3, 3)]], 5.0 / 8.0),
        (&[&[(2, 2), (4, 4)]], 1.0),
        (&[&[(3, 3)], &[(1, 1), (3, 3)]], 4.0 / 7.0),
        (&[&[(2, 2)], &[(3, 3)], &[(5, 5)]], 5.0 / 10.0),
        (&[&[(2, 4), (1, 1)], &[(2, 2)]], 2.0 / 5.0),
    ];
    for (attempts, want) in cases {
        let got = proxy_matching_score(&success(attempts)).map_err(|e| e.to_string())?;
        ensure!((got - want).abs() < 1e-9, "{attempts:?}: {got} != {want}");
    }
    Ok("5 hand-marked traces within 1e-9 (4/7 -> 0.5714285714)".into())
}

fn grounding_golden() -> Outcome {
    let obs = ground_fixture(include_str!("fixtures/start_button.a11y"), &ElementFilter::default())
        .map_err(|e| e.to_string())?;
    let line = "(ID: 14, Label: Start, X1: 0.35, Y1: 0.95, X2: 0.38, Y2: 1.00)";
    ensure!(obs.semantic_text.lines().any(|l| l == line), "Start line missing");
    ensure!(
        obs.som_image.to_ppm() == include_bytes!("fixtures/start_button.som.ppm"),
        "SoM raster differs from golden"
    );
    Ok("Start line and SoM PPM byte-exact".into())
}

fn multiple_solutions() -> Outcome {
    let mut n = 0;
    for spec in bundled_suite().iter().filter(|s| s.solutions.len() >= 2) {
        let run = |i: usize| run_solution(spec, &spec.solutions[i], 7, GroundingProvider::A11yTree);
        let (a, b) = (run(0).map_err(|e| e.to_string())?, run(1).map_err(|e| e.to_string())?);
        ensure!(a.verdict.pass && b.verdict.pass, "{}: a solution fails", spec.id);
        ensure!(a.actions != b.actions, "{}: solutions identical", spec.id);
        ensure!(static_trajectory_match(&a.actions, &a.actions), "{}: golden rejected", spec.id);
        ensure!(!static_trajectory_match(&a.actions, &b.actions), "{}: alternate accepted", spec.id);
        n += 1;
    }
    ensure!(n >= 3, "only {n} tasks with two solutions");
    Ok(format!("{n} tasks: both solutions verify, static match rejects the alternate"))
}

fn files(dir: &Path) -> BTreeMap<String, Vec<u8>> {
    let mut out = BTreeMap::new();
    for sub in ["", "traces"] {
        for e in std::fs::read_dir(dir.join(sub)).unwrap() {
            let p = e.unwrap().path();
            if p.is_file() {
                out.insert(format!("{sub}/{}", p.file_name().unwrap().to_string_lossy()), std::fs::read(p).unwrap());
            }
        }
    }
    out
}

fn determinism() -> Outcome {
    let tasks = bundled_suite();
    let dirs = [tempfile::tempdir().unwrap(), tempfile::tempdir().unwrap()];
    for d in &dirs {
        let opts = SuiteOptions {
            runs: 2,
            seed: 1234,
            out: Some(d.path().to_path_buf()),
            ..adversarial(true)
        };
        run_suite(&tasks, &opts).map_err(|e| e.to_string())?;
    }
    let (a, b) = (files(dirs[0].path()), files(dirs[1].path()));
    ensure!(a == b, "output directories differ");
    Ok(format!("{} files byte-identical", a.len()))
}

fn round_trips() -> Outcome {
    let mut runner = TestRunner::new(Config {
        cases: 1000,
        failure_persistence: None,
        ..Config::default()
    });
    for platform in [Platform::Desktop, Platform::Smartphone] {
        let strat = match platform {
            Platform::Desktop => script(desktop_action()).boxed(),
            Platform::Smartphone => script(phone_action()).boxed(),
        };
        runner
            .run(&strat, |s| {
                let back = parse_action_script(&s.to_string(), platform).map_err(|e| TestCaseError::fail(e.to_string()))?;
                if back != s {
                    return Err(TestCaseError::fail(format!("{s}")));
                }
                Ok(())
            })
            .map_err(|e| format!("{platform:?} script: {e}"))?;
    }
    runner
        .run(&plan_response(), |r| {
            let back = parse_plan_response(&render_plan_response(&r)).map_err(|e| TestCaseError::fail(e.to_string()))?;
            if back != r {
                return Err(TestCaseError::fail("plan response changed"));
            }
            Ok(())
        })
        .map_err(|e| format!("plan response: {e}"))?;
    Ok("3 x 1000 generated fixtures".into())
}

fn episode(spec: &TaskSpec, scenario: Scenario, faults: Vec<FaultInjection>) -> EpisodeTrace {
    let c = EpisodeConfig::default();
    let header = TraceHeader {
        task_id: spec.id.clone(),
        run: 0,
        seed: 7,
        instruction: spec.instruction.clone(),
        platform: spec.platform,
        domain: Some(spec.domain),
        difficulty: Some(spec.difficulty),
        scenario: Some(scenario.name.clone()),
        provider: c.provider,
        max_attempts: c.max_attempts,
        max_steps: c.max_steps,
        exec_recovery: c.exec_recovery,
        verify_recovery: c.verify_recovery,
    };
    let mut env = SimEnv::for_task(spec, 7).unwrap().with_faults(faults);
    let mut planner = Planner::new(Box::new(ScriptedMock::new(scenario)), PromptConfig::default());
    run_episode(&spec.instruction, &mut env, &mut planner, &c, Verifier::Checks(&spec.verify), header, None)
}

fn golden_notepad() -> Outcome {
    let start = Instant::now();
    let spec = bundled_suite()
        .into_iter()
        .find(|t| t.id == "notepad_draft")
        .ok_or("notepad_draft missing")?;
    let t = episode(&spec, golden_scenario(&spec), vec![]);
    ensure!(t.final_state() == FinalState::Success, "golden ended {:?}", t.final_state());
    ensure!(replan_count(&t) == 0, "golden re-planned");
    ensure!(proxy_matching_score(&t) == Ok(1.0), "proxy {:?}", proxy_matching_score(&t));
    let f = episode(
        &spec,
        golden_with_flaky_recovery(&spec, 1),
        vec![FaultInjection::VerifyFlakyFail { count: 1 }],
    );
    ensure!(f.final_state() == FinalState::Success, "flaky ended {:?}", f.final_state());
    ensure!(replan_count(&f) == 1, "flaky re-planned {} times", replan_count(&f));
    let s = start.elapsed().as_secs_f64();
    ensure!(s < 5.0, "took {s:.2}s");
    Ok(format!("golden: 0 re-plans, proxy 1.0; one flaky verify: 1 re-plan; {s:.2}s"))
}

fn main() {
    let checks: [Check; 10] = [
        ("transition table", transition_table),
        ("failure classes", failure_classes),
        ("re-plan prefix preservation", prefix_preservation),
        ("redundant re-plan detection", redundant_replans),
        ("proxy matching oracle", proxy_oracle),
        ("grounding golden files", grounding_golden),
        ("multiple solutions", multiple_solutions),
        ("determinism", determinism),
        ("round trips", round_trips),
        ("golden notepad_draft", golden_notepad),
    ];
    let mut failed = 0;
    for (i, (name, check)) in checks.iter().enumerate() {
        let result = catch_unwind(AssertUnwindSafe(check)).unwrap_or_else(|p| {
            Err(p
                .downcast_ref::<String>()
                .cloned()
                .or_else(|| p.downcast_ref::<&str>().map(|s| s.to_string()))
                .unwrap_or_else(|| "panicked".into()))
        });
        match result {
            Ok(detail) => println!("PASS criterion {}: {name}: {detail}", i + 1),
            Err(why) => {
                failed += 1;
                println!("FAIL criterion {}: {name}: {why}", i + 1);
            }
        }
    }
    if failed > 0 {
        std::process::exit(1);
    }
}
