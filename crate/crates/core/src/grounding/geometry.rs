use serde::{Deserialize, Serialize};
use thiserror::Error;

use super::a11y::PixelBox;

#[derive(Debug, Error, PartialEq, Eq)]
pub enum GeometryError {
    #[error("degenerate screen {width}x{height}")]
    DegenerateScreen { width: u32, height: u32 },
}

/// Screen-relative box with every coordinate in `[0, 1]`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct NormBox {
    pub x1: f64,
    pub y1: f64,
    pub x2: f64,
    pub y2: f64,
}

impl NormBox {
    pub fn center(&self) -> (f64, f64) {
        ((self.x1 + self.x2) / 2.0, (self.y1 + self.y2) / 2.0)
    }

    /// Maps back to pixels by rounding each coordinate.
    pub fn to_pixels(&self, width: u32, height: u32) -> PixelBox {
        PixelBox::new(
            (self.x1 * width as f64).round() as i32,
            (self.y1 * height as f64).round() as i32,
            (self.x2 * width as f64).round() as i32,
            (self.y2 * height as f64).round() as i32,
        )
    }
}

/// Rounds half away from zero to `places` decimals.
pub fn round_to(v: f64, places: i32) -> f64 {
    let f = 10f64.powi(places);
    (v * f).round() / f
}

/// Clamps each coordinate to the screen, divides by the matching screen
/// dimension and rounds to 4 decimals.
pub fn normalize_bounds(b: PixelBox, width: u32, height: u32) -> Result<NormBox, GeometryError> {
    if width == 0 || height == 0 {
        return Err(GeometryError::DegenerateScreen { width, height });
    }
    let nx = |x: i32| round_to(x.clamp(0, width as i32) as f64 / width as f64, 4);
    let ny = |y: i32| round_to(y.clamp(0, height as i32) as f64 / height as f64, 4);
    Ok(NormBox {
        x1: nx(b.x1),
        y1: ny(b.y1),
        x2: nx(b.x2),
        y2: ny(b.y2),
    })
}

/// Two-decimal display form of a normalized coordinate.
pub fn display_coord(v: f64) -> String {
    format!("{:.2}", round_to(v, 2))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn start_button_box() {
        let n = normalize_bounds(PixelBox::new(672, 1026, 730, 1080), 1920, 1080).unwrap();
        assert_eq!((n.x1, n.y1, n.x2, n.y2), (0.35, 0.95, 0.3802, 1.0));
        let shown: Vec<String> = [n.x1, n.y1, n.x2, n.y2].iter().map(|v| display_coord(*v)).collect();
        assert_eq!(shown, ["0.35", "0.95", "0.38", "1.00"]);
    }

    #[test]
    fn full_screen_is_unit_box() {
        let n = normalize_bounds(PixelBox::new(0, 0, 1920, 1080), 1920, 1080).unwrap();
        assert_eq!((n.x1, n.y1, n.x2, n.y2), (0.0, 0.0, 1.0, 1.0));
    }

    #[test]
    fn clamps_before_dividing() {
        let n = normalize_bounds(PixelBox::new(-5, 10, 30, 20), 100, 100).unwrap();
        assert_eq!((n.x1, n.y1, n.x2, n.y2), (0.0, 0.1, 0.3, 0.2));
    }

    #[test]
    fn zero_sized_screen_rejected() {
        assert_eq!(
            normalize_bounds(PixelBox::new(0, 0, 1, 1), 0, 10),
            Err(GeometryError::DegenerateScreen { width: 0, height: 10 })
        );
    }
}
