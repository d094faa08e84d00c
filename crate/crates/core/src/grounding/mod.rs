//! Dual-grounding observation: accessibility-tree extraction, normalized
//! geometry, Set-of-Mark rendering and the semantic element listing.

pub mod a11y;
pub mod detector;
pub mod font;
pub mod geometry;
pub mod raster;
pub mod semantic;
pub mod som;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::env::Environment;
pub use a11y::{
    extract_elements, parse_a11y_document, parse_a11y_tree, serialize_a11y_tree, A11yDocument,
    A11yError, A11yNode, ElementFilter, PixelBox, PixelElement,
};
pub use geometry::{normalize_bounds, GeometryError, NormBox};
pub use raster::{Raster, Rgb};
pub use semantic::textualize_semantics;
pub use som::render_som;

/// One marked UI element as presented to the planner.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GroundedElement {
    pub id: u32,
    pub label: String,
    pub bbox: NormBox,
    pub role: String,
    pub source_path: String,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum GroundingProvider {
    A11yTree,
    DetectionOcr,
}

impl GroundingProvider {
    pub fn other(self) -> Self {
        match self {
            GroundingProvider::A11yTree => GroundingProvider::DetectionOcr,
            GroundingProvider::DetectionOcr => GroundingProvider::A11yTree,
        }
    }
}

impl std::str::FromStr for GroundingProvider {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "a11y" | "a11y_tree" => Ok(Self::A11yTree),
            "ocr" | "detection_ocr" => Ok(Self::DetectionOcr),
            other => Err(format!("unknown provider {other:?} (expected a11y or ocr)")),
        }
    }
}

#[derive(Debug, Clone)]
pub struct ScreenObservation {
    pub screenshot: Raster,
    pub elements: Vec<GroundedElement>,
    pub som_image: Raster,
    pub semantic_text: String,
    pub window_title: String,
    pub open_windows: Vec<String>,
    pub provider: GroundingProvider,
}

impl ScreenObservation {
    pub fn screen_size(&self) -> (u32, u32) {
        (self.screenshot.width(), self.screenshot.height())
    }

    pub fn element(&self, id: u32) -> Option<&GroundedElement> {
        self.elements.iter().find(|e| e.id == id)
    }

    /// Bundles a frame with its elements, rendering the SoM overlay and the
    /// semantic listing.
    pub fn assemble(
        screenshot: Raster,
        elements: Vec<GroundedElement>,
        window_title: String,
        open_windows: Vec<String>,
        provider: GroundingProvider,
    ) -> Self {
        let som_image = render_som(&screenshot, &elements);
        let semantic_text = textualize_semantics(&elements);
        Self {
            screenshot,
            elements,
            som_image,
            semantic_text,
            window_title,
            open_windows,
            provider,
        }
    }
}

#[derive(Debug, Error)]
pub enum ObservationError {
    #[error("observation failed: {primary}; fallback failed: {fallback}")]
    ObservationFailed { primary: String, fallback: String },
}

/// Normalizes extracted elements against the screen size.
pub fn ground(
    elements: Vec<PixelElement>,
    width: u32,
    height: u32,
) -> Result<Vec<GroundedElement>, GeometryError> {
    elements
        .into_iter()
        .map(|e| {
            Ok(GroundedElement {
                id: e.id,
                label: e.label,
                bbox: normalize_bounds(e.bounds_px, width, height)?,
                role: e.role,
                source_path: e.source_path,
            })
        })
        .collect()
}

fn provider_elements<E: Environment + ?Sized>(
    provider: GroundingProvider,
    env: &E,
    frame: &Raster,
    filter: &ElementFilter,
) -> Result<Vec<GroundedElement>, String> {
    let (w, h) = (frame.width(), frame.height());
    let pixel = match provider {
        GroundingProvider::A11yTree => {
            let text = env.accessibility_tree().map_err(|e| e.to_string())?;
            let root = parse_a11y_tree(&text).map_err(|e| e.to_string())?;
            extract_elements(&root, filter)
        }
        GroundingProvider::DetectionOcr => detector::detect_elements(frame),
    };
    ground(pixel, w, h).map_err(|e| e.to_string())
}

/// Captures the screen and grounds it with `provider`, falling back to the
/// other provider when the first one fails.
pub fn observe<E: Environment + ?Sized>(
    provider: GroundingProvider,
    env: &E,
    filter: &ElementFilter,
) -> Result<ScreenObservation, ObservationError> {
    let frame = env
        .screenshot()
        .map_err(|e| ObservationError::ObservationFailed {
            primary: e.to_string(),
            fallback: "no frame to ground".into(),
        })?;
    let (used, elements) = match provider_elements(provider, env, &frame, filter) {
        Ok(els) => (provider, els),
        Err(primary) => {
            tracing::warn!(?provider, %primary, "grounding provider failed, trying fallback");
            let fallback = provider.other();
            match provider_elements(fallback, env, &frame, filter) {
                Ok(els) => (fallback, els),
                Err(fb) => {
                    return Err(ObservationError::ObservationFailed {
                        primary,
                        fallback: fb,
                    })
                }
            }
        }
    };
    Ok(ScreenObservation::assemble(
        frame,
        elements,
        env.window_title(),
        env.open_windows(),
        used,
    ))
}

#[derive(Debug, Error)]
pub enum FixtureError {
    #[error(transparent)]
    Parse(#[from] A11yError),
    #[error(transparent)]
    Geometry(#[from] GeometryError),
    #[error("fixture has no screen size and its root has empty bounds")]
    NoScreen,
}

/// Grounds a standalone accessibility fixture: renders its frame, then
/// the SoM overlay and semantic listing. The screen size comes from the
/// header, or from the root bounds when the header has none.
pub fn ground_fixture(text: &str, filter: &ElementFilter) -> Result<ScreenObservation, FixtureError> {
    let doc = parse_a11y_document(text)?;
    let (w, h) = match doc.screen {
        Some(s) => s,
        None => {
            let b = doc.root.bounds_px;
            if b.x2 <= 0 || b.y2 <= 0 {
                return Err(FixtureError::NoScreen);
            }
            (b.x2 as u32, b.y2 as u32)
        }
    };
    let frame = render_tree(&doc.root, w, h, filter);
    let elements = ground(extract_elements(&doc.root, filter), w, h)?;
    Ok(ScreenObservation::assemble(
        frame,
        elements,
        doc.root.name.clone(),
        Vec::new(),
        GroundingProvider::A11yTree,
    ))
}

/// Renders an accessibility tree as a plain frame: every node is drawn as a
/// widget (interactable roles with their outline colour, containers as
/// panels). Used to produce screenshots for standalone tree fixtures.
pub fn render_tree(root: &A11yNode, width: u32, height: u32, filter: &ElementFilter) -> Raster {
    let mut r = Raster::new(width, height, Rgb(0, 96, 128));
    fn go(r: &mut Raster, n: &A11yNode, filter: &ElementFilter, pruned: bool) {
        let pruned = pruned || n.states.iter().any(|s| filter.prune_states.contains(s));
        let b = n.bounds_px;
        if filter.roles.contains(&n.role) {
            let active = !pruned && filter.accepts(n);
            detector::WidgetStyle::draw_widget(r, &n.role, &n.name, b, active);
        } else {
            r.fill_rect(b.x1 as i64, b.y1 as i64, b.x2 as i64, b.y2 as i64, Rgb(210, 210, 210));
            r.outline_rect(b.x1 as i64, b.y1 as i64, b.x2 as i64, b.y2 as i64, Rgb(100, 100, 100));
        }
        for c in &n.children {
            go(r, c, filter, pruned);
        }
    }
    go(&mut r, root, filter, false);
    r
}
