use osagent_core::grounding::{ground_fixture, ElementFilter};

const FIXTURE: &str = include_str!("fixtures/start_button.a11y");
const START_LINE: &str = "(ID: 14, Label: Start, X1: 0.35, Y1: 0.95, X2: 0.38, Y2: 1.00)";

#[test]
fn start_button_semantic_line() {
    let obs = ground_fixture(FIXTURE, &ElementFilter::default()).unwrap();
    assert_eq!(obs.semantic_text.lines().nth(13), Some(START_LINE));
    assert_eq!(obs.semantic_text, include_str!("fixtures/start_button.semantic.txt"));
}

#[test]
fn start_button_som_matches_golden_ppm() {
    let obs = ground_fixture(FIXTURE, &ElementFilter::default()).unwrap();
    let golden: &[u8] = include_bytes!("fixtures/start_button.som.ppm");
    assert!(obs.som_image.to_ppm() == golden, "SoM raster differs from the golden PPM");
}

#[test]
fn empty_fixture_leaves_the_frame_alone() {
    let obs = ground_fixture(include_str!("fixtures/empty.a11y"), &ElementFilter::default()).unwrap();
    assert!(obs.elements.is_empty());
    assert_eq!(obs.semantic_text, "");
    assert_eq!(obs.som_image, obs.screenshot);
}

#[test]
fn grounding_is_repeatable() {
    let a = ground_fixture(FIXTURE, &ElementFilter::default()).unwrap();
    let b = ground_fixture(FIXTURE, &ElementFilter::default()).unwrap();
    assert_eq!(a.som_image.to_ppm(), b.som_image.to_ppm());
    assert_eq!(a.semantic_text, b.semantic_text);
}
