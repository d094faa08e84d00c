//! Minimal RGB raster with binary PPM (P6) I/O.

use std::io::Cursor;

use thiserror::Error;

/// 8-bit RGB colour.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct Rgb(pub u8, pub u8, pub u8);

impl Rgb {
    pub const BLACK: Rgb = Rgb(0, 0, 0);
    pub const WHITE: Rgb = Rgb(255, 255, 255);
    pub const RED: Rgb = Rgb(255, 0, 0);
}

#[derive(Debug, Error)]
pub enum RasterError {
    #[error("invalid PPM: {0}")]
    InvalidPpm(String),
    #[error("png encoding failed: {0}")]
    Png(String),
}

/// Row-major RGB image, 3 bytes per pixel.
#[derive(Clone, PartialEq, Eq)]
pub struct Raster {
    width: u32,
    height: u32,
    data: Vec<u8>,
}

impl std::fmt::Debug for Raster {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.debug_struct("Raster")
            .field("width", &self.width)
            .field("height", &self.height)
            .finish_non_exhaustive()
    }
}

impl Raster {
    pub fn new(width: u32, height: u32, fill: Rgb) -> Self {
        let mut data = Vec::with_capacity(width as usize * height as usize * 3);
        for _ in 0..(width as usize * height as usize) {
            data.extend_from_slice(&[fill.0, fill.1, fill.2]);
        }
        Self { width, height, data }
    }

    pub fn width(&self) -> u32 {
        self.width
    }

    pub fn height(&self) -> u32 {
        self.height
    }

    pub fn as_bytes(&self) -> &[u8] {
        &self.data
    }

    fn offset(&self, x: u32, y: u32) -> usize {
        (y as usize * self.width as usize + x as usize) * 3
    }

    pub fn get(&self, x: u32, y: u32) -> Rgb {
        let o = self.offset(x, y);
        Rgb(self.data[o], self.data[o + 1], self.data[o + 2])
    }

    /// Out-of-bounds writes are ignored.
    pub fn put(&mut self, x: i64, y: i64, c: Rgb) {
        if x < 0 || y < 0 || x >= self.width as i64 || y >= self.height as i64 {
            return;
        }
        let o = self.offset(x as u32, y as u32);
        self.data[o] = c.0;
        self.data[o + 1] = c.1;
        self.data[o + 2] = c.2;
    }

    /// Fills the half-open rectangle `[x1, x2) x [y1, y2)`, clipped to the raster.
    pub fn fill_rect(&mut self, x1: i64, y1: i64, x2: i64, y2: i64, c: Rgb) {
        let x1 = x1.max(0);
        let y1 = y1.max(0);
        let x2 = x2.min(self.width as i64);
        let y2 = y2.min(self.height as i64);
        for y in y1..y2 {
            for x in x1..x2 {
                self.put(x, y, c);
            }
        }
    }

    /// One-pixel outline of the half-open rectangle `[x1, x2) x [y1, y2)`.
    pub fn outline_rect(&mut self, x1: i64, y1: i64, x2: i64, y2: i64, c: Rgb) {
        if x2 <= x1 || y2 <= y1 {
            return;
        }
        for x in x1..x2 {
            self.put(x, y1, c);
            self.put(x, y2 - 1, c);
        }
        for y in y1..y2 {
            self.put(x1, y, c);
            self.put(x2 - 1, y, c);
        }
    }

    pub fn to_ppm(&self) -> Vec<u8> {
        let mut out = format!("P6\n{} {}\n255\n", self.width, self.height).into_bytes();
        out.extend_from_slice(&self.data);
        out
    }

    pub fn from_ppm(bytes: &[u8]) -> Result<Self, RasterError> {
        // header: magic, width, height, maxval separated by whitespace, then one
        // whitespace byte before the pixel data
        let mut fields = Vec::new();
        let mut pos = 0;
        while fields.len() < 4 {
            while pos < bytes.len() && bytes[pos].is_ascii_whitespace() {
                pos += 1;
            }
            if pos < bytes.len() && bytes[pos] == b'#' {
                while pos < bytes.len() && bytes[pos] != b'\n' {
                    pos += 1;
                }
                continue;
            }
            let start = pos;
            while pos < bytes.len() && !bytes[pos].is_ascii_whitespace() {
                pos += 1;
            }
            if start == pos {
                return Err(RasterError::InvalidPpm("truncated header".into()));
            }
            fields.push(String::from_utf8_lossy(&bytes[start..pos]).into_owned());
        }
        pos += 1;
        if fields[0] != "P6" {
            return Err(RasterError::InvalidPpm(format!("bad magic {:?}", fields[0])));
        }
        let parse = |s: &str| {
            s.parse::<u32>()
                .map_err(|_| RasterError::InvalidPpm(format!("bad number {s:?}")))
        };
        let width = parse(&fields[1])?;
        let height = parse(&fields[2])?;
        if parse(&fields[3])? != 255 {
            return Err(RasterError::InvalidPpm("only maxval 255 is supported".into()));
        }
        let len = width as usize * height as usize * 3;
        if bytes.len() < pos + len {
            return Err(RasterError::InvalidPpm("truncated pixel data".into()));
        }
        Ok(Self {
            width,
            height,
            data: bytes[pos..pos + len].to_vec(),
        })
    }

    pub fn to_png(&self) -> Result<Vec<u8>, RasterError> {
        let img = image::RgbImage::from_raw(self.width, self.height, self.data.clone())
            .ok_or_else(|| RasterError::Png("buffer size mismatch".into()))?;
        let mut out = Cursor::new(Vec::new());
        img.write_to(&mut out, image::ImageFormat::Png)
            .map_err(|e| RasterError::Png(e.to_string()))?;
        Ok(out.into_inner())
    }

    /// Hex SHA-256 of the PPM encoding.
    pub fn digest(&self) -> String {
        crate::util::sha256_hex(&self.to_ppm())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn ppm_round_trip() {
        let mut r = Raster::new(7, 3, Rgb(1, 2, 3));
        r.put(6, 2, Rgb::RED);
        let back = Raster::from_ppm(&r.to_ppm()).unwrap();
        assert_eq!(back, r);
    }

    #[test]
    fn ppm_rejects_wrong_magic() {
        assert!(Raster::from_ppm(b"P3\n1 1\n255\n000").is_err());
        assert!(Raster::from_ppm(b"P6\n2 2\n255\n\x00").is_err());
    }

    #[test]
    fn outline_is_half_open() {
        let mut r = Raster::new(10, 10, Rgb::WHITE);
        r.outline_rect(2, 2, 5, 5, Rgb::BLACK);
        assert_eq!(r.get(2, 2), Rgb::BLACK);
        assert_eq!(r.get(4, 4), Rgb::BLACK);
        assert_eq!(r.get(3, 3), Rgb::WHITE);
        assert_eq!(r.get(5, 5), Rgb::WHITE);
    }

    #[test]
    fn png_export_has_signature() {
        let png = Raster::new(4, 4, Rgb::WHITE).to_png().unwrap();
        assert_eq!(&png[..4], b"\x89PNG");
    }
}
