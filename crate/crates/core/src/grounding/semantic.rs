use std::fmt::Write as _;

use super::geometry::display_coord;
use super::GroundedElement;

/// One `(ID: .., Label: .., X1: .., Y1: .., X2: .., Y2: ..)` line.
pub fn semantic_line(el: &GroundedElement) -> String {
    format!(
        "(ID: {}, Label: {}, X1: {}, Y1: {}, X2: {}, Y2: {})",
        el.id,
        el.label,
        display_coord(el.bbox.x1),
        display_coord(el.bbox.y1),
        display_coord(el.bbox.x2),
        display_coord(el.bbox.y2)
    )
}

/// Semantic grounding block: one line per element in ascending ID order,
/// each terminated by a newline. An empty list yields an empty string.
pub fn textualize_semantics(elements: &[GroundedElement]) -> String {
    let mut sorted: Vec<&GroundedElement> = elements.iter().collect();
    sorted.sort_by_key(|e| e.id);
    let mut out = String::new();
    for el in sorted {
        let _ = writeln!(out, "{}", semantic_line(el));
    }
    out
}
