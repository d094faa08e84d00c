//! Synthetic detection + OCR over rendered frames.
//!
//! Stands in for a learned detector: it finds 1-px element outlines drawn in
//! a role colour and reads the label with the 5x7 font. It only works on
//! frames that follow [`WidgetStyle`], which the simulator and the fixture
//! renderer both use.

use super::a11y::{PixelBox, PixelElement};
use super::font::{draw_text, read_glyph, ADVANCE, GLYPH_H, GLYPH_W};
use super::raster::{Raster, Rgb};

/// Outline colour per interactable role. Roles absent here are drawn
/// without an outline and are invisible to the detector.
pub const ROLE_COLORS: [(&str, Rgb); 8] = [
    ("button", Rgb(10, 10, 200)),
    ("textfield", Rgb(10, 150, 10)),
    ("menuitem", Rgb(150, 10, 150)),
    ("checkbox", Rgb(10, 150, 150)),
    ("link", Rgb(20, 20, 120)),
    ("icon", Rgb(200, 120, 0)),
    ("listitem", Rgb(90, 60, 30)),
    ("tab", Rgb(60, 90, 200)),
];

/// Outline for widgets that are disabled or sit in an inactive window.
pub const INACTIVE_OUTLINE: Rgb = Rgb(160, 160, 160);
pub const WIDGET_FILL: Rgb = Rgb::WHITE;
pub const INK: Rgb = Rgb::BLACK;
pub const TEXT_INSET: i64 = 4;

pub fn role_color(role: &str) -> Option<Rgb> {
    ROLE_COLORS.iter().find(|(r, _)| *r == role).map(|(_, c)| *c)
}

fn role_for_color(c: Rgb) -> Option<&'static str> {
    ROLE_COLORS.iter().find(|(_, rc)| *rc == c).map(|(r, _)| *r)
}

/// Drawing convention shared by renderers and the detector.
pub struct WidgetStyle;

impl WidgetStyle {
    /// Minimum box width that fits `label`.
    pub fn min_width(label: &str) -> i32 {
        super::font::text_width(label) as i32 + 2 * TEXT_INSET as i32
    }

    fn text_origin(b: PixelBox) -> (i64, i64) {
        (
            b.x1 as i64 + TEXT_INSET,
            b.y1 as i64 + ((b.height() as i64 - GLYPH_H as i64) / 2).max(1),
        )
    }

    /// Filled widget with outline and label. `active == false` draws the
    /// neutral outline the detector ignores.
    pub fn draw_widget(r: &mut Raster, role: &str, label: &str, b: PixelBox, active: bool) {
        let (x1, y1, x2, y2) = (b.x1 as i64, b.y1 as i64, b.x2 as i64, b.y2 as i64);
        r.fill_rect(x1, y1, x2, y2, WIDGET_FILL);
        let outline = if active {
            role_color(role).unwrap_or(INACTIVE_OUTLINE)
        } else {
            INACTIVE_OUTLINE
        };
        r.outline_rect(x1, y1, x2, y2, outline);
        let max_chars = ((b.width() as i64 - 2 * TEXT_INSET + 1) / ADVANCE as i64).max(0) as usize;
        let shown: String = label.chars().take(max_chars).collect();
        let (tx, ty) = Self::text_origin(b);
        draw_text(r, tx, ty, &shown, INK);
    }
}

fn is_corner(r: &Raster, x: u32, y: u32, c: Rgb) -> bool {
    let left = x == 0 || r.get(x - 1, y) != c;
    let up = y == 0 || r.get(x, y - 1) != c;
    let right = x + 1 < r.width() && r.get(x + 1, y) == c;
    let down = y + 1 < r.height() && r.get(x, y + 1) == c;
    left && up && right && down
}

fn trace_box(r: &Raster, x: u32, y: u32, c: Rgb) -> Option<PixelBox> {
    let mut x2 = x;
    while x2 + 1 < r.width() && r.get(x2 + 1, y) == c {
        x2 += 1;
    }
    let mut y2 = y;
    while y2 + 1 < r.height() && r.get(x, y2 + 1) == c {
        y2 += 1;
    }
    if x2 - x < 2 || y2 - y < 2 {
        return None;
    }
    let closed = (x..=x2).all(|i| r.get(i, y2) == c) && (y..=y2).all(|j| r.get(x2, j) == c);
    closed.then(|| PixelBox::new(x as i32, y as i32, x2 as i32 + 1, y2 as i32 + 1))
}

fn read_label(r: &Raster, b: PixelBox) -> String {
    let (tx, ty) = WidgetStyle::text_origin(b);
    let mut out = String::new();
    let mut x = tx;
    while x + (GLYPH_W as i64) < b.x2 as i64 {
        out.push(read_glyph(r, x as u32, ty as u32, INK).unwrap_or('?'));
        x += ADVANCE as i64;
    }
    out.trim_end().to_string()
}

/// Scans the frame top-to-bottom, left-to-right; IDs follow scan order.
pub fn detect_elements(r: &Raster) -> Vec<PixelElement> {
    let mut out = Vec::new();
    for y in 0..r.height() {
        for x in 0..r.width() {
            let c = r.get(x, y);
            let Some(role) = role_for_color(c) else {
                continue;
            };
            if !is_corner(r, x, y, c) {
                continue;
            }
            if let Some(b) = trace_box(r, x, y, c) {
                out.push(PixelElement {
                    id: out.len() as u32 + 1,
                    label: read_label(r, b),
                    role: role.to_string(),
                    bounds_px: b,
                    source_path: format!("detector/{}", out.len()),
                });
            }
        }
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn finds_drawn_widgets_with_labels() {
        let mut r = Raster::new(200, 80, Rgb(0, 96, 128));
        let b1 = PixelBox::new(10, 10, 10 + WidgetStyle::min_width("Save"), 26);
        let b2 = PixelBox::new(100, 40, 190, 60);
        WidgetStyle::draw_widget(&mut r, "button", "Save", b1, true);
        WidgetStyle::draw_widget(&mut r, "textfield", "File name", b2, true);
        WidgetStyle::draw_widget(&mut r, "button", "Hidden", PixelBox::new(10, 50, 80, 70), false);
        let found = detect_elements(&r);
        assert_eq!(found.len(), 2);
        assert_eq!((found[0].role.as_str(), found[0].label.as_str()), ("button", "Save"));
        assert_eq!(found[0].bounds_px, b1);
        assert_eq!((found[1].role.as_str(), found[1].label.as_str()), ("textfield", "File name"));
        assert_eq!(found[1].bounds_px, b2);
    }

    #[test]
    fn blank_frame_has_no_elements() {
        assert!(detect_elements(&Raster::new(50, 50, Rgb::WHITE)).is_empty());
    }
}
