//! Set-of-Mark overlay: a red 2-px box per element plus its ID tag.

use super::font::{draw_text, text_width, GLYPH_H};
use super::raster::{Raster, Rgb};
use super::GroundedElement;

pub const STROKE: i64 = 2;
pub const MARK_COLOR: Rgb = Rgb::RED;
pub const TAG_TEXT: Rgb = Rgb::WHITE;

/// Pixel rectangle (inclusive corners) an element's mark is drawn on.
pub fn mark_rect(el: &GroundedElement, width: u32, height: u32) -> (i64, i64, i64, i64) {
    let px = |v: f64, dim: u32| ((v * dim as f64).round() as i64).clamp(0, dim as i64 - 1);
    (
        px(el.bbox.x1, width),
        px(el.bbox.y1, height),
        px(el.bbox.x2, width),
        px(el.bbox.y2, height),
    )
}

/// Tag rectangle (half-open) anchored at the mark's top-left corner.
pub fn tag_rect(el: &GroundedElement, width: u32, height: u32) -> (i64, i64, i64, i64) {
    let (x1, y1, _, _) = mark_rect(el, width, height);
    let w = text_width(&el.id.to_string()) as i64 + 2;
    (x1, y1, x1 + w, y1 + GLYPH_H as i64 + 2)
}

/// Returns a copy of `screenshot` with every element marked. Elements are
/// drawn in list order, so later IDs end up on top.
pub fn render_som(screenshot: &Raster, elements: &[GroundedElement]) -> Raster {
    let mut out = screenshot.clone();
    let (w, h) = (out.width(), out.height());
    if w == 0 || h == 0 {
        return out;
    }
    for el in elements {
        let (x1, y1, x2, y2) = mark_rect(el, w, h);
        for s in 0..STROKE {
            for x in x1..=x2 {
                out.put(x, y1 + s, MARK_COLOR);
                out.put(x, y2 - s, MARK_COLOR);
            }
            for y in y1..=y2 {
                out.put(x1 + s, y, MARK_COLOR);
                out.put(x2 - s, y, MARK_COLOR);
            }
        }
        let (tx1, ty1, tx2, ty2) = tag_rect(el, w, h);
        out.fill_rect(tx1, ty1, tx2, ty2, MARK_COLOR);
        draw_text(&mut out, tx1 + 1, ty1 + 1, &el.id.to_string(), TAG_TEXT);
    }
    out
}
