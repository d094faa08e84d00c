use std::collections::BTreeMap;
use std::path::Path;

use osagent_core::harness::{run_suite, AdversarialKind, BackendChoice, SuiteOptions};
use osagent_core::metrics::{classify_failure, FailureClass, FinalState, TraceRecord};
use osagent_core::sim::bundled_suite;
use osagent_core::state_machine::EpisodeConfig;

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

#[test]
fn golden_suite_succeeds_everywhere() {
    let r = run_suite(&bundled_suite(), &SuiteOptions::default()).unwrap();
    assert_eq!(r.stats.success_rate, Some(1.0));
    assert_eq!(r.stats.mean_proxy_score, Some(1.0));
    assert_eq!(r.stats.replan_histogram.get(&0), Some(&20));
}

#[test]
fn recovery_leaves_only_step_limit_failures() {
    let tasks = bundled_suite();
    let r = run_suite(&tasks, &adversarial(true)).unwrap();
    let f = &r.stats.failure_classes;
    assert_eq!((f.fc, f.ia, f.rsl, f.rr), (0, 0, 13, 2));
    assert!((f.rr_ratio().unwrap() - 2.0 / 13.0).abs() < 1e-12);
    for (i, t) in r.traces.iter().enumerate() {
        let kind = AdversarialKind::for_index(i);
        let expect_success = matches!(
            kind,
            AdversarialKind::Golden
                | AdversarialKind::MalformedOnce
                | AdversarialKind::PrematureDone
                | AdversarialKind::FlakyVerify
        );
        assert_eq!(t.final_state() == FinalState::Success, expect_success, "{} ({kind})", t.task_id());
        if !expect_success {
            let rr = kind == AdversarialKind::Repeat;
            assert_eq!(classify_failure(t), Ok(FailureClass::RSL { rr }), "{}", t.task_id());
        }
    }
}

#[test]
fn disabling_recovery_exposes_fc_and_ia() {
    let r = run_suite(&bundled_suite(), &adversarial(false)).unwrap();
    let mut by_kind: BTreeMap<&str, Vec<FailureClass>> = BTreeMap::new();
    for (i, t) in r.traces.iter().enumerate() {
        if let Ok(c) = classify_failure(t) {
            by_kind.entry(AdversarialKind::for_index(i).short()).or_default().push(c);
        }
    }
    assert!(r.stats.failure_classes.fc >= 1);
    assert!(r.stats.failure_classes.ia >= 1);
    assert!(by_kind["M"].iter().all(|c| *c == FailureClass::IA));
    assert!(by_kind["P"].iter().all(|c| *c == FailureClass::FC));
    assert!(by_kind["F"].iter().all(|c| *c == FailureClass::FC));
}

#[test]
fn done_prefix_survives_every_replan() {
    for opts in [SuiteOptions::default(), adversarial(true), adversarial(false)] {
        let r = run_suite(&bundled_suite(), &opts).unwrap();
        for t in &r.traces {
            let mut prior: Option<&osagent_core::planner::TaskList> = None;
            for rec in &t.records {
                if let TraceRecord::TaskList { list, correction, .. } = rec {
                    if let Some(p) = prior {
                        let done = &p.descriptions()[..p.current - 1];
                        assert_eq!(&list.descriptions()[..done.len()], done, "{}", t.task_id());
                        if let Some(c) = correction {
                            assert_eq!(c.preserved, done, "{}", t.task_id());
                        }
                    }
                    prior = Some(list);
                }
            }
        }
    }
}

#[test]
fn hopeless_replans_log_their_splices() {
    let r = run_suite(&bundled_suite(), &adversarial(true)).unwrap();
    let hopeless = r
        .traces
        .iter()
        .enumerate()
        .find(|(i, _)| AdversarialKind::for_index(*i) == AdversarialKind::Hopeless)
        .unwrap()
        .1;
    let c = hopeless.prefix_corrections();
    assert!(!c.is_empty());
    assert!(c.iter().all(|c| c.preserved == ["Look around the screen."]));
}

#[test]
fn repeated_failed_list_is_flagged() {
    let r = run_suite(&bundled_suite(), &adversarial(true)).unwrap();
    for (i, t) in r.traces.iter().enumerate() {
        let flagged = t.records.iter().any(|r| matches!(r, TraceRecord::Replan { redundant: true, .. }));
        match AdversarialKind::for_index(i) {
            AdversarialKind::Repeat => assert!(flagged, "{}", t.task_id()),
            AdversarialKind::Hopeless | AdversarialKind::MalformedForever => {
                assert!(!flagged, "{}", t.task_id())
            }
            _ => {}
        }
    }
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

#[test]
fn equal_seeds_give_identical_files() {
    let tasks = bundled_suite();
    let a = tempfile::tempdir().unwrap();
    let b = tempfile::tempdir().unwrap();
    for (dir, workers) in [(a.path(), 1), (b.path(), 3)] {
        let opts = SuiteOptions {
            runs: 2,
            seed: 42,
            out: Some(dir.to_path_buf()),
            workers,
            ..adversarial(true)
        };
        run_suite(&tasks, &opts).unwrap();
    }
    let (fa, fb) = (files(a.path()), files(b.path()));
    assert_eq!(fa.len(), 2 + 40);
    assert_eq!(fa, fb);
}
