use std::hint::black_box;

use criterion::{criterion_group, criterion_main, Criterion};
use osagent_core::action::{parse_action_script, Platform};
use osagent_core::grounding::{ground_fixture, observe, parse_a11y_document, ElementFilter, GroundingProvider};
use osagent_core::harness::{golden_scenario, run_suite, SuiteOptions};
use osagent_core::planner::parse_plan_response;
use osagent_core::sim::{bundled_suite, SimEnv};

const FIXTURE: &str = include_str!("../../core/tests/fixtures/start_button.a11y");

const SCRIPT: &str = "computer.mouse.move(id=14)\ncomputer.mouse.single_click()\n\
computer.keyboard.write(text=\"notepad\")\ncomputer.keyboard.press(key=\"enter\")\n\
computer.mouse.move(x=0.5, y=0.5)  # centre\ncomputer.mouse.scroll(dist=-3)\n";

fn grounding(c: &mut Criterion) {
    let filter = ElementFilter::default();
    c.bench_function("parse_a11y", |b| b.iter(|| parse_a11y_document(black_box(FIXTURE)).unwrap()));
    c.bench_function("ground_fixture", |b| b.iter(|| ground_fixture(black_box(FIXTURE), &filter).unwrap()));
    let spec = &bundled_suite()[0];
    let env = SimEnv::for_task(spec, 7).unwrap();
    for provider in [GroundingProvider::A11yTree, GroundingProvider::DetectionOcr] {
        c.bench_function(&format!("observe_{provider:?}"), |b| {
            b.iter(|| observe(provider, &env, &filter).unwrap())
        });
    }
}

fn parsing(c: &mut Criterion) {
    c.bench_function("parse_action_script", |b| {
        b.iter(|| parse_action_script(black_box(SCRIPT), Platform::Desktop).unwrap())
    });
    let spec = bundled_suite().into_iter().find(|t| t.id == "notepad_draft").unwrap();
    let response = golden_scenario(&spec).entries[0].response.clone();
    c.bench_function("parse_plan_response", |b| b.iter(|| parse_plan_response(black_box(&response)).unwrap()));
}

fn episodes(c: &mut Criterion) {
    let tasks = bundled_suite();
    let one = &tasks[..1];
    let opts = SuiteOptions::default();
    c.bench_function("golden_episode", |b| b.iter(|| run_suite(one, &opts).unwrap()));
}

criterion_group!(benches, grounding, parsing, episodes);
criterion_main!(benches);
