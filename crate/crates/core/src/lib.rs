//! Runtime for a state-machine driven GUI agent: grounding, planning,
//! action scripts, a simulated desktop and episode metrics.

pub mod action;
pub mod env;
pub mod grounding;
pub mod sim;
pub mod util;
pub mod planner;
pub mod harness;
pub mod metrics;
pub mod state_machine;
