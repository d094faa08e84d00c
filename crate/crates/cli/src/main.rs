use std::path::{Path, PathBuf};
use std::process::ExitCode;

use anyhow::{bail, Context};
use clap::{Args, Parser, Subcommand, ValueEnum};
use osagent_core::grounding::{ground_fixture, ElementFilter, GroundingProvider};
use osagent_core::harness::{replay, run_suite, BackendChoice, FaultSpec, SuiteOptions};
use osagent_core::metrics::EpisodeTrace;
use osagent_core::planner::{BackendConfig, BackendKind};
use osagent_core::sim::{bundled_suite, load_suite, TaskSpec};
use osagent_core::state_machine::EpisodeConfig;

#[derive(Parser)]
#[command(name = "osagent", version, about = "Run, replay and inspect GUI agent episodes")]
struct Cli {
    #[command(subcommand)]
    cmd: Cmd,
}

#[derive(Subcommand)]
enum Cmd {
    /// Run a task suite (or one task) and write traces plus a report.
    Run(Box<RunArgs>),
    /// Re-execute a trace on a fresh environment and check it reproduces.
    Replay(ReplayArgs),
    /// Write the screenshot, SoM overlay and semantic text for a fixture.
    Grounding(GroundingArgs),
}

#[derive(Clone, Copy, ValueEnum)]
enum BackendArg {
    Golden,
    Adversarial,
    Scenario,
    Http,
}

#[derive(Clone, Copy, ValueEnum)]
enum ProviderArg {
    A11y,
    Ocr,
}

#[derive(Args)]
struct RunArgs {
    #[arg(long, value_enum, default_value = "golden")]
    backend: BackendArg,
    /// Directory of task files; the bundled suite when omitted.
    #[arg(long)]
    suite: Option<PathBuf>,
    /// Only run these task ids.
    #[arg(long)]
    task: Vec<String>,
    #[arg(long, default_value_t = 1)]
    runs: u32,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    #[arg(long, default_value_t = 4)]
    max_attempts: u32,
    #[arg(long, default_value_t = 30)]
    max_steps: u32,
    #[arg(long, value_enum, default_value = "a11y")]
    provider: ProviderArg,
    #[arg(long)]
    no_exec_recovery: bool,
    #[arg(long)]
    no_verify_recovery: bool,
    #[arg(long, default_value = "out")]
    out: PathBuf,
    /// `[task_id:]kind:n`, e.g. `notepad_draft:backend_drop:1`.
    #[arg(long)]
    fault: Vec<String>,
    /// Scenario files named `<task_id>.scenario` (backend `scenario`).
    #[arg(long)]
    scenario_dir: Option<PathBuf>,
    /// Model endpoint URL (backend `http`).
    #[arg(long)]
    endpoint: Option<String>,
    #[arg(long, default_value = "default")]
    model: String,
    #[arg(long, default_value_t = 0.1)]
    temperature: f64,
    #[arg(long, default_value_t = 8)]
    demos: usize,
    /// Name of the environment variable that holds the API key.
    #[arg(long)]
    auth_env: Option<String>,
    #[arg(long, default_value_t = 1)]
    workers: usize,
    /// Free-form request run on the selected tasks' desktops. DONE is
    /// accepted without verification.
    #[arg(long)]
    request: Option<String>,
}

#[derive(Args)]
struct ReplayArgs {
    trace: PathBuf,
    /// Directory of task files; the bundled suite when omitted.
    #[arg(long)]
    suite: Option<PathBuf>,
}

#[derive(Args)]
struct GroundingArgs {
    fixture: PathBuf,
    #[arg(long, default_value = "grounding-out")]
    out: PathBuf,
    /// Also write som.png.
    #[arg(long)]
    png: bool,
}

/// Failures that map to exit code 2.
#[derive(Debug)]
struct Usage(anyhow::Error);

type CmdResult = Result<ExitCode, Usage>;

impl<E: Into<anyhow::Error>> From<E> for Usage {
    fn from(e: E) -> Self {
        Usage(e.into())
    }
}

fn load_tasks(suite: Option<&Path>) -> anyhow::Result<Vec<TaskSpec>> {
    match suite {
        Some(dir) => {
            if !dir.is_dir() {
                bail!("suite directory {} does not exist", dir.display());
            }
            load_suite(dir).with_context(|| format!("loading suite {}", dir.display()))
        }
        None => Ok(bundled_suite()),
    }
}

fn cmd_run(a: RunArgs) -> CmdResult {
    let mut tasks = load_tasks(a.suite.as_deref())?;
    if !a.task.is_empty() {
        for id in &a.task {
            if !tasks.iter().any(|t| &t.id == id) {
                return Err(Usage(anyhow::anyhow!("unknown task id {id:?}")));
            }
        }
        tasks.retain(|t| a.task.contains(&t.id));
    }
    let backend = match a.backend {
        BackendArg::Golden => BackendChoice::Golden,
        BackendArg::Adversarial => BackendChoice::Adversarial,
        BackendArg::Scenario => BackendChoice::ScenarioDir(
            a.scenario_dir
                .clone()
                .context("--backend scenario needs --scenario-dir")?,
        ),
        BackendArg::Http => BackendChoice::Http(BackendConfig {
            kind: BackendKind::HttpModel,
            endpoint: Some(a.endpoint.clone().context("--backend http needs --endpoint")?),
            model: a.model.clone(),
            temperature: a.temperature,
            demo_count: a.demos,
            auth: a.auth_env.clone(),
        }),
    };
    let faults = a
        .fault
        .iter()
        .map(|f| FaultSpec::parse(f).map_err(anyhow::Error::msg))
        .collect::<anyhow::Result<Vec<_>>>()?;
    let mut episode = EpisodeConfig {
        max_attempts: a.max_attempts,
        max_steps: a.max_steps,
        seed: a.seed,
        provider: match a.provider {
            ProviderArg::A11y => GroundingProvider::A11yTree,
            ProviderArg::Ocr => GroundingProvider::DetectionOcr,
        },
        exec_recovery: !a.no_exec_recovery,
        verify_recovery: !a.no_verify_recovery,
        ..EpisodeConfig::default()
    };
    episode.prompt.demo_count = a.demos;
    if a.request.is_some() {
        eprintln!("WARNING: free-form request mode: DONE is accepted WITHOUT verification");
    }
    let opts = SuiteOptions {
        runs: a.runs,
        seed: a.seed,
        episode,
        backend,
        faults,
        out: Some(a.out.clone()),
        workers: a.workers,
        request: a.request,
    };
    let result = run_suite(&tasks, &opts)?;
    print!("{}", result.stats.to_table());
    println!(
        "\ntraces: {}\nreport: {}",
        a.out.join("traces").display(),
        a.out.join("report.json").display()
    );
    Ok(if result.any_error() {
        ExitCode::from(1)
    } else {
        ExitCode::SUCCESS
    })
}

fn cmd_replay(a: ReplayArgs) -> CmdResult {
    let tasks = load_tasks(a.suite.as_deref())?;
    let text = std::fs::read_to_string(&a.trace).with_context(|| format!("reading {}", a.trace.display()))?;
    let trace = EpisodeTrace::from_jsonl(&text)?;
    let out = replay(&trace, &tasks)?;
    if let Some(d) = &out.divergence {
        println!(
            "diverged at step {} (script {}, action {}): {}",
            d.global_step,
            d.script + 1,
            d.action + 1,
            d.reason
        );
    }
    let verdict = if out.replayed.pass { "pass" } else { "fail" };
    match out.recorded_pass {
        Some(p) => println!(
            "recorded verify: {}, replayed verify: {verdict}",
            if p { "pass" } else { "fail" }
        ),
        None => println!("no recorded verification; replayed verify: {verdict}"),
    }
    if out.reproduced() {
        println!("reproduced");
        Ok(ExitCode::SUCCESS)
    } else {
        println!("not reproduced");
        Ok(ExitCode::from(1))
    }
}

fn cmd_grounding(a: GroundingArgs) -> CmdResult {
    let text = std::fs::read_to_string(&a.fixture).with_context(|| format!("reading {}", a.fixture.display()))?;
    let obs = ground_fixture(&text, &ElementFilter::default())?;
    std::fs::create_dir_all(&a.out).with_context(|| format!("creating {}", a.out.display()))?;
    let write = |name: &str, bytes: &[u8]| -> anyhow::Result<()> {
        let p = a.out.join(name);
        std::fs::write(&p, bytes).with_context(|| format!("writing {}", p.display()))
    };
    write("screenshot.ppm", &obs.screenshot.to_ppm())?;
    write("som.ppm", &obs.som_image.to_ppm())?;
    write("semantic.txt", obs.semantic_text.as_bytes())?;
    if a.png {
        write("som.png", &obs.som_image.to_png()?)?;
    }
    println!("{} elements -> {}", obs.elements.len(), a.out.display());
    Ok(ExitCode::SUCCESS)
}

fn main() -> ExitCode {
    tracing_subscriber::fmt()
        .with_env_filter(
            tracing_subscriber::EnvFilter::try_from_default_env()
                .unwrap_or_else(|_| tracing_subscriber::EnvFilter::new("warn")),
        )
        .with_writer(std::io::stderr)
        .init();
    let cli = Cli::parse();
    let res = match cli.cmd {
        Cmd::Run(a) => cmd_run(*a),
        Cmd::Replay(a) => cmd_replay(a),
        Cmd::Grounding(a) => cmd_grounding(a),
    };
    match res {
        Ok(code) => code,
        Err(Usage(e)) => {
            eprintln!("error: {e:#}");
            ExitCode::from(2)
        }
    }
}
