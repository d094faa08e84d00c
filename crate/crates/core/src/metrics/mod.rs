//! Instance-level analysis of episode traces and suite aggregates.

pub mod trace;

use std::collections::BTreeMap;
use std::fmt::Write as _;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::state_machine::TransitionEvent;

pub use trace::{
    EpisodeTrace, FinalState, ScriptEvent, TerminalCause, TraceError, TraceHeader, TraceRecord,
    TraceSummary, VerifyEvent,
};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum MetricError {
    #[error("metric not applicable to a {0} trace")]
    NotApplicable(FinalState),
    #[error("trace executed no actions")]
    DegenerateTrace,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(tag = "class")]
pub enum FailureClass {
    FC,
    RSL { rr: bool },
    IA,
}

/// Number of VerifyFail transitions.
pub fn replan_count(trace: &EpisodeTrace) -> u32 {
    trace
        .transitions()
        .iter()
        .filter(|t| matches!(t.event, TransitionEvent::VerifyFail(_)))
        .count() as u32
}

/// Successful-path steps over all applied steps, recomputed from the
/// script records. Only scripts of the final (verified) attempt count as
/// the path.
pub fn proxy_matching_score(trace: &EpisodeTrace) -> Result<f64, MetricError> {
    let fs = trace.final_state();
    if fs != FinalState::Success {
        return Err(MetricError::NotApplicable(fs));
    }
    let final_attempt = replan_count(trace);
    let (mut path, mut total) = (0u64, 0u64);
    for s in trace.scripts() {
        total += u64::from(s.steps_applied);
        if s.attempt == final_attempt {
            path += u64::from(s.steps_applied);
        }
    }
    if total == 0 {
        return Err(MetricError::DegenerateTrace);
    }
    Ok(path as f64 / total as f64)
}

/// True when a re-plan repeated a failed task list or an attempt repeated
/// a failed action trajectory.
pub fn redundant_replan(trace: &EpisodeTrace) -> bool {
    trace.records.iter().any(|r| {
        matches!(
            r,
            TraceRecord::Replan { redundant: true, .. }
                | TraceRecord::Verify {
                    redundant_trajectory: true,
                    ..
                }
        )
    })
}

pub fn classify_failure(trace: &EpisodeTrace) -> Result<FailureClass, MetricError> {
    let s = &trace.summary;
    if s.final_state == FinalState::Success && s.cause != TerminalCause::StepLimit {
        return Err(MetricError::NotApplicable(FinalState::Success));
    }
    Ok(match s.cause {
        TerminalCause::FalseCompletion => FailureClass::FC,
        TerminalCause::InvalidAction => FailureClass::IA,
        _ => FailureClass::RSL {
            rr: redundant_replan(trace),
        },
    })
}

#[derive(Debug, Clone, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct FailureCounts {
    pub fc: usize,
    pub rsl: usize,
    /// Subset of `rsl`.
    pub rr: usize,
    pub ia: usize,
}

impl FailureCounts {
    pub fn total(&self) -> usize {
        self.fc + self.rsl + self.ia
    }

    /// RR share of all failures; absent when nothing failed.
    pub fn rr_ratio(&self) -> Option<f64> {
        let t = self.total();
        (t > 0).then(|| self.rr as f64 / t as f64)
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SuiteStats {
    pub runs: u32,
    pub episodes: usize,
    pub successes: usize,
    pub errors: usize,
    /// Absent when there are no traces.
    pub success_rate: Option<f64>,
    pub success_rate_by_domain: BTreeMap<String, f64>,
    pub success_rate_by_difficulty: BTreeMap<String, f64>,
    /// replan count -> number of successful episodes.
    pub replan_histogram: BTreeMap<u32, usize>,
    pub mean_proxy_score: Option<f64>,
    pub failure_classes: FailureCounts,
}

/// Mean of per-run rates, over the runs that contain the group.
fn rate_over_runs<'a>(
    traces: &[&'a EpisodeTrace],
    key: impl Fn(&'a EpisodeTrace) -> Option<String>,
) -> BTreeMap<String, f64> {
    let mut per: BTreeMap<String, BTreeMap<u32, (usize, usize)>> = BTreeMap::new();
    for t in traces {
        if let Some(k) = key(t) {
            let e = per.entry(k).or_default().entry(t.header.run).or_default();
            e.1 += 1;
            if t.final_state() == FinalState::Success {
                e.0 += 1;
            }
        }
    }
    per.into_iter()
        .map(|(k, runs)| {
            let n = runs.len() as f64;
            let sum: f64 = runs.values().map(|&(s, t)| s as f64 / t as f64).sum();
            (k, sum / n)
        })
        .collect()
}

fn sorted_mean(mut xs: Vec<f64>) -> Option<f64> {
    if xs.is_empty() {
        return None;
    }
    xs.sort_by(f64::total_cmp);
    Some(xs.iter().sum::<f64>() / xs.len() as f64)
}

/// Suite statistics; the result does not depend on trace order.
pub fn aggregate(traces: &[EpisodeTrace], runs: u32) -> SuiteStats {
    let all: Vec<&EpisodeTrace> = traces.iter().collect();
    let success_rate = rate_over_runs(&all, |_| Some(String::new())).remove("");
    let by_domain = rate_over_runs(&all, |t| t.header.domain.map(|d| d.to_string()));
    let by_difficulty = rate_over_runs(&all, |t| t.header.difficulty.map(|d| d.to_string()));
    let mut histogram = BTreeMap::new();
    let mut proxies = Vec::new();
    let mut classes = FailureCounts::default();
    let (mut successes, mut errors) = (0, 0);
    for t in traces {
        match t.final_state() {
            FinalState::Success => {
                successes += 1;
                *histogram.entry(replan_count(t)).or_insert(0) += 1;
                if let Ok(p) = proxy_matching_score(t) {
                    proxies.push(p);
                }
            }
            FinalState::Error => errors += 1,
            FinalState::Fail => {}
        }
        match classify_failure(t) {
            Ok(FailureClass::FC) => classes.fc += 1,
            Ok(FailureClass::IA) => classes.ia += 1,
            Ok(FailureClass::RSL { rr }) => {
                classes.rsl += 1;
                classes.rr += usize::from(rr);
            }
            Err(_) => {}
        }
    }
    SuiteStats {
        runs,
        episodes: traces.len(),
        successes,
        errors,
        success_rate,
        success_rate_by_domain: by_domain,
        success_rate_by_difficulty: by_difficulty,
        replan_histogram: histogram,
        mean_proxy_score: sorted_mean(proxies),
        failure_classes: classes,
    }
}

fn pct(x: Option<f64>) -> String {
    x.map_or_else(|| "n/a".to_string(), |v| format!("{:.1}%", v * 100.0))
}

impl SuiteStats {
    pub fn to_json(&self) -> String {
        let mut s = serde_json::to_string_pretty(self).expect("stats serialize");
        s.push('\n');
        s
    }

    /// Plain-text table for people.
    pub fn to_table(&self) -> String {
        let mut o = String::new();
        let _ = writeln!(o, "runs            {}", self.runs);
        let _ = writeln!(o, "episodes        {}", self.episodes);
        let _ = writeln!(o, "successes       {}", self.successes);
        let _ = writeln!(o, "errors          {}", self.errors);
        let _ = writeln!(o, "success rate    {}", pct(self.success_rate));
        let _ = writeln!(
            o,
            "mean proxy      {}",
            self.mean_proxy_score
                .map_or_else(|| "n/a".to_string(), |v| format!("{v:.4}"))
        );
        let _ = writeln!(o, "\ndomain          SR");
        for (k, v) in &self.success_rate_by_domain {
            let _ = writeln!(o, "{k:<15} {}", pct(Some(*v)));
        }
        let _ = writeln!(o, "\ndifficulty      SR");
        for (k, v) in &self.success_rate_by_difficulty {
            let _ = writeln!(o, "{k:<15} {}", pct(Some(*v)));
        }
        let _ = writeln!(o, "\nreplans         successes");
        for (k, v) in &self.replan_histogram {
            let _ = writeln!(o, "{k:<15} {v}");
        }
        let f = &self.failure_classes;
        let share = |n: usize| pct((f.total() > 0).then(|| n as f64 / f.total() as f64));
        let _ = writeln!(o, "\nfailure class   count  share");
        let _ = writeln!(o, "FC              {:<6} {}", f.fc, share(f.fc));
        let _ = writeln!(o, "IA              {:<6} {}", f.ia, share(f.ia));
        let _ = writeln!(o, "RSL             {:<6} {}", f.rsl, share(f.rsl));
        let _ = writeln!(o, "  RR            {:<6} {}", f.rr, share(f.rr));
        o
    }
}
