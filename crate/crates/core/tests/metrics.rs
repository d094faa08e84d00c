mod common;

use common::traces::{built, header, success, Attempts};
use osagent_core::metrics::{
    aggregate, classify_failure, proxy_matching_score, replan_count, EpisodeTrace, FailureClass, FinalState,
    MetricError, TerminalCause, TraceRecord,
};
use proptest::prelude::*;

#[test]
fn proxy_on_hand_marked_traces() {
    let cases: [(Attempts, f64); 5] = [
        // 3 steps invalidated, 5 on the path
        (&[&[(3, 3)], &[(2, 2), (3, 3)]], 5.0 / 8.0),
        (&[&[(2, 2), (4, 4)]], 1.0),
        // 3-step first attempt invalidated, 4-step retry
        (&[&[(3, 3)], &[(1, 1), (3, 3)]], 4.0 / 7.0),
        (&[&[(2, 2)], &[(3, 3)], &[(5, 5)]], 5.0 / 10.0),
        // a script that failed after 2 of 4 actions still counts its prefix
        (&[&[(2, 4), (1, 1)], &[(2, 2)]], 2.0 / 5.0),
    ];
    for (attempts, want) in cases {
        let got = proxy_matching_score(&success(attempts)).unwrap();
        assert!((got - want).abs() < 1e-9, "{attempts:?}: {got} != {want}");
    }
    let seven = proxy_matching_score(&success(&[&[(3, 3)], &[(1, 1), (3, 3)]])).unwrap();
    assert_eq!(format!("{seven:.10}"), "0.5714285714");
}

#[test]
fn proxy_errors() {
    let failed = built(FinalState::Fail, TerminalCause::AttemptsExhausted, &[&[(1, 1)]]);
    assert_eq!(proxy_matching_score(&failed), Err(MetricError::NotApplicable(FinalState::Fail)));
    assert_eq!(proxy_matching_score(&success(&[&[]])), Err(MetricError::DegenerateTrace));
}

#[test]
fn replan_counts() {
    assert_eq!(replan_count(&success(&[&[(1, 1)], &[(1, 1)], &[(1, 1)]])), 2);
    assert_eq!(replan_count(&success(&[&[(1, 1)]])), 0);
    let exhausted = built(
        FinalState::Fail,
        TerminalCause::AttemptsExhausted,
        &[&[(1, 1)], &[(1, 1)], &[(1, 1)], &[(1, 1)]],
    );
    assert_eq!(replan_count(&exhausted), 4);
}

#[test]
fn classification() {
    let mut t = built(
        FinalState::Fail,
        TerminalCause::AttemptsExhausted,
        &[&[(1, 1)], &[(1, 1)], &[(1, 1)], &[(1, 1)]],
    );
    assert_eq!(classify_failure(&t), Ok(FailureClass::RSL { rr: false }));
    t.records.push(TraceRecord::Replan {
        turn: 3,
        attempt: 2,
        digest: "d".into(),
        redundant: true,
    });
    assert_eq!(classify_failure(&t), Ok(FailureClass::RSL { rr: true }));
    t.summary.cause = TerminalCause::InvalidAction;
    assert_eq!(classify_failure(&t), Ok(FailureClass::IA));
    t.summary.cause = TerminalCause::FalseCompletion;
    assert_eq!(classify_failure(&t), Ok(FailureClass::FC));
    assert!(classify_failure(&success(&[&[(1, 1)]])).is_err());
}

fn with(task: &str, run: u32, replans: usize, ok: bool) -> EpisodeTrace {
    let attempts: Vec<&[(u32, u32)]> = vec![&[(1, 1)]; replans + 1];
    let mut t = if ok {
        success(&attempts)
    } else {
        built(FinalState::Fail, TerminalCause::AttemptsExhausted, &attempts)
    };
    t.header = header(task, run);
    t
}

#[test]
fn aggregate_examples() {
    // 4 runs x 10 tasks, 24 successes
    let mut traces = Vec::new();
    for run in 0..4 {
        for task in 0..10 {
            traces.push(with(&format!("t{task}"), run, 0, task < 6));
        }
    }
    let s = aggregate(&traces, 4);
    assert!((s.success_rate.unwrap() - 0.6).abs() < 1e-12);
    assert_eq!(s.successes, 24);
    assert_eq!(s.replan_histogram.values().sum::<usize>(), 24);

    let empty = aggregate(&[], 1);
    assert_eq!(empty.success_rate, None);
    assert!(empty.success_rate_by_domain.is_empty());
    assert_eq!(empty.mean_proxy_score, None);

    let h = aggregate(
        &[with("a", 0, 0, true), with("b", 0, 0, true), with("c", 0, 1, true), with("d", 0, 2, true)],
        1,
    );
    let got: Vec<(u32, usize)> = h.replan_histogram.into_iter().collect();
    assert_eq!(got, [(0, 2), (1, 1), (2, 1)]);
}

proptest! {
    #[test]
    fn aggregate_ignores_order(
        spec in proptest::collection::vec((0u32..3, 0usize..4, any::<bool>()), 0..25),
        seed in any::<u64>(),
    ) {
        let traces: Vec<EpisodeTrace> = spec
            .iter()
            .enumerate()
            .map(|(i, (run, replans, ok))| with(&format!("t{i}"), *run, *replans, *ok))
            .collect();
        let mut shuffled = traces.clone();
        let n = shuffled.len();
        let mut x = seed;
        for i in (1..n).rev() {
            x = x.wrapping_mul(6364136223846793005).wrapping_add(1442695040888963407);
            shuffled.swap(i, (x >> 33) as usize % (i + 1));
        }
        let a = aggregate(&traces, 3);
        let b = aggregate(&shuffled, 3);
        prop_assert_eq!(&a, &b);
        for r in a.success_rate.iter().chain(a.success_rate_by_domain.values()) {
            prop_assert!((0.0..=1.0).contains(r));
        }
        prop_assert_eq!(a.replan_histogram.values().sum::<usize>(), a.successes);
    }

    #[test]
    fn zero_replan_success_scores_one(steps in proptest::collection::vec(1u32..6, 1..6)) {
        let scripts: Vec<(u32, u32)> = steps.iter().map(|s| (*s, *s)).collect();
        prop_assert_eq!(proxy_matching_score(&success(&[&scripts])).unwrap(), 1.0);
    }

    #[test]
    fn classification_is_total(cause_i in 0usize..6, rr: bool, ok_error: bool) {
        let causes = [
            TerminalCause::AttemptsExhausted,
            TerminalCause::StepLimit,
            TerminalCause::InvalidAction,
            TerminalCause::FalseCompletion,
            TerminalCause::SystemException,
            TerminalCause::ResetFailed,
        ];
        let fs = if ok_error { FinalState::Error } else { FinalState::Fail };
        let mut t = built(fs, causes[cause_i], &[&[(1, 1)]]);
        if rr {
            t.records.push(TraceRecord::Replan { turn: 1, attempt: 1, digest: "d".into(), redundant: true });
        }
        prop_assert!(classify_failure(&t).is_ok());
    }
}
