//! Deterministic mock operating system: windows, files, settings, effect
//! rules, execution-based verification, snapshots and fault injection.

pub mod desktop;
pub mod effects;
pub mod layout;
pub mod pages;
pub mod render;
pub mod shell;
pub mod suite;
pub mod task;

use serde::{Deserialize, Serialize};

use crate::action::Platform;
use crate::env::{EnvError, Environment, Input, Verdict};
use crate::grounding::Raster;
use crate::util::{glob_match, sha256_hex};

pub use desktop::{AppData, AppKind, MockDesktop, Window};
pub use suite::{bundled_suite, load_suite, BUNDLED_TASK_IDS};
pub use task::{
    load_task, parse_task, Check, Difficulty, Domain, InitialState, SchemaError, Solution,
    SolutionStep, TaskSpec,
};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum FaultInjection {
    /// The `step`-th applied input (1-based, counted over the env's life)
    /// crashes the environment.
    CrashOnAction { step: u32 },
    /// The first `count` verifications fail regardless of state.
    VerifyFlakyFail { count: u32 },
    /// The model backend fails on planner turn `turn` (1-based). Handled by
    /// the backend wrapper, ignored by the simulator.
    BackendDrop { turn: u32 },
}

impl FaultInjection {
    pub fn parse(s: &str) -> Result<Self, String> {
        let (kind, n) = s
            .split_once(':')
            .ok_or_else(|| format!("fault {s:?}: expected <kind>:<n>"))?;
        let n: u32 = n
            .parse()
            .ok()
            .filter(|n| *n >= 1)
            .ok_or_else(|| format!("fault {s:?}: count must be an integer >= 1"))?;
        match kind {
            "crash_on_action" => Ok(Self::CrashOnAction { step: n }),
            "verify_flaky_fail" => Ok(Self::VerifyFlakyFail { count: n }),
            "backend_drop" => Ok(Self::BackendDrop { turn: n }),
            other => Err(format!("unknown fault kind {other:?}")),
        }
    }
}

/// Opaque serialized desktop state.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Snapshot(Vec<u8>);

impl Snapshot {
    pub fn as_bytes(&self) -> &[u8] {
        &self.0
    }
}

/// Evaluates one check; `Err` carries the feedback line.
pub fn evaluate_check(d: &MockDesktop, check: &Check) -> Result<(), String> {
    let fail = |what: String| Err(format!("{check}: {what}"));
    match check {
        Check::FileEquals { path, expected } => match d.files.get(path) {
            None => fail("file absent".into()),
            Some(c) if c == expected => Ok(()),
            Some(c) => fail(format!("content is {c:?}, expected {expected:?}")),
        },
        Check::FileContains { path, needle } => match d.files.get(path) {
            None => fail("file absent".into()),
            Some(c) if c.contains(needle.as_str()) => Ok(()),
            Some(_) => fail(format!("{needle:?} not found")),
        },
        Check::SettingEquals { key, value } => match d.settings.get(key) {
            None => fail("setting absent".into()),
            Some(v) if v == value => Ok(()),
            Some(v) => fail(format!("value is {v:?}, expected {value:?}")),
        },
        Check::WindowOpen { title_pattern } => {
            if d.windows.iter().any(|w| glob_match(title_pattern, &w.title)) {
                Ok(())
            } else {
                fail("no matching window".into())
            }
        }
        Check::WindowShowsText {
            title_pattern,
            needle,
        } => {
            let view = layout::screen_view(d);
            let matching: Vec<_> = view
                .windows
                .iter()
                .filter(|w| glob_match(title_pattern, &w.title))
                .collect();
            if matching.is_empty() {
                return fail("no matching window".into());
            }
            if matching.iter().any(|w| w.visible_text().contains(needle.as_str())) {
                Ok(())
            } else {
                fail(format!("{needle:?} not shown"))
            }
        }
    }
}

/// All checks in order; the verdict names the first failing one.
pub fn verify_desktop(d: &MockDesktop, checks: &[Check]) -> Verdict {
    for c in checks {
        if let Err(feedback) = evaluate_check(d, c) {
            return Verdict::fail(feedback);
        }
    }
    Verdict::pass()
}

/// The simulator behind the [`Environment`] interface.
#[derive(Debug, Clone)]
pub struct SimEnv {
    pristine: MockDesktop,
    state: MockDesktop,
    faults: Vec<FaultInjection>,
    inputs_seen: u32,
    verifications: u32,
    crashed: bool,
}

impl SimEnv {
    pub fn new(desktop: MockDesktop) -> Self {
        Self {
            pristine: desktop.clone(),
            state: desktop,
            faults: Vec::new(),
            inputs_seen: 0,
            verifications: 0,
            crashed: false,
        }
    }

    pub fn for_task(spec: &TaskSpec, seed: u64) -> Result<Self, String> {
        spec.initial_desktop(seed).map(Self::new)
    }

    pub fn with_faults(mut self, faults: impl IntoIterator<Item = FaultInjection>) -> Self {
        self.faults.extend(faults);
        self
    }

    pub fn desktop(&self) -> &MockDesktop {
        &self.state
    }

    pub fn desktop_mut(&mut self) -> &mut MockDesktop {
        &mut self.state
    }

    pub fn snapshot(&self) -> Snapshot {
        Snapshot(serde_json::to_vec(&self.state).expect("desktop serializes"))
    }

    pub fn restore(&mut self, snap: &Snapshot) {
        self.state = serde_json::from_slice(&snap.0).expect("snapshot was produced by snapshot()");
    }

    pub fn view(&self) -> layout::ScreenView {
        layout::screen_view(&self.state)
    }

    /// Verifies against a task's `verify` checks.
    pub fn verify(&mut self, spec: &TaskSpec) -> Verdict {
        self.check(&spec.verify)
    }
}

impl Environment for SimEnv {
    fn platform(&self) -> Platform {
        self.state.platform
    }

    fn screen_size(&self) -> (u32, u32) {
        self.state.screen
    }

    fn accessibility_tree(&self) -> Result<String, EnvError> {
        if self.crashed {
            return Err(EnvError::Unavailable("the simulator crashed".into()));
        }
        Ok(render::a11y_text(&self.view()))
    }

    fn screenshot(&self) -> Result<Raster, EnvError> {
        if self.crashed {
            return Err(EnvError::Unavailable("the simulator crashed".into()));
        }
        Ok(render::render(&self.view()))
    }

    fn window_title(&self) -> String {
        self.state
            .front()
            .map(|w| w.title.clone())
            .unwrap_or_else(|| "Desktop".into())
    }

    fn open_windows(&self) -> Vec<String> {
        self.state.windows.iter().map(|w| w.title.clone()).collect()
    }

    fn apply(&mut self, input: &Input) -> Result<(), EnvError> {
        if self.crashed {
            return Err(EnvError::Crash("the simulator crashed".into()));
        }
        self.inputs_seen += 1;
        let n = self.inputs_seen;
        if self
            .faults
            .iter()
            .any(|f| matches!(f, FaultInjection::CrashOnAction { step } if *step == n))
        {
            self.crashed = true;
            return Err(EnvError::Crash(format!("injected crash at input {n}")));
        }
        effects::apply(&mut self.state, input).map_err(EnvError::Effect)
    }

    fn wait(&mut self, ticks: u32) {
        self.state.tick += ticks as u64;
    }

    fn check(&mut self, checks: &[Check]) -> Verdict {
        self.verifications += 1;
        let flaky = self.faults.iter().any(
            |f| matches!(f, FaultInjection::VerifyFlakyFail { count } if self.verifications <= *count),
        );
        if flaky {
            return Verdict::fail("verification environment flaked (injected fault); state not inspected");
        }
        verify_desktop(&self.state, checks)
    }

    fn reset(&mut self) -> Result<(), EnvError> {
        self.state = self.pristine.clone();
        self.crashed = false;
        Ok(())
    }

    fn state_digest(&self) -> String {
        sha256_hex(&serde_json::to_vec(&self.state).expect("desktop serializes"))
    }

    fn clock(&self) -> u64 {
        self.state.tick
    }
}
