//! Suite execution: scenario construction, episode runs, traces on disk,
//! replay and reference-solution checks.

pub mod scenarios;
pub mod solutions;
mod suite;

pub use scenarios::{adversarial_scenario, golden_scenario, golden_with_flaky_recovery, AdversarialKind};
pub use solutions::{run_solution, static_trajectory_match, SolutionRun};
pub use suite::{
    replay, run_suite, write_reports, BackendChoice, Divergence, FaultSpec, HarnessError, ReplayError,
    ReplayOutcome, SuiteOptions, SuiteResult,
};
