//! Grayscale images and binary PGM (P5) I/O.

use std::fs;
use std::path::Path;

use crate::error::{invalid, Error, Result};

/// Row-major grayscale image of `f64` samples.
///
/// Images read from or written to disk hold values in `[0, 1]`; filter
/// intermediates may leave that range.
#[derive(Clone, Debug, PartialEq)]
pub struct Image {
    width: usize,
    height: usize,
    pixels: Vec<f64>,
}

impl Image {
    pub fn from_raw(width: usize, height: usize, pixels: Vec<f64>) -> Result<Self> {
        if width == 0 || height == 0 {
            return Err(invalid(format!("empty image {width}x{height}")));
        }
        if width.checked_mul(height) != Some(pixels.len()) {
            return Err(Error::DimensionMismatch {
                expected: width.saturating_mul(height),
                actual: pixels.len(),
            });
        }
        Ok(Self {
            width,
            height,
            pixels,
        })
    }

    pub fn filled(width: usize, height: usize, value: f64) -> Self {
        Self::from_raw(width, height, vec![value; width * height]).expect("non-empty image")
    }

    pub fn from_fn(width: usize, height: usize, mut f: impl FnMut(usize, usize) -> f64) -> Self {
        let mut pixels = Vec::with_capacity(width * height);
        for y in 0..height {
            for x in 0..width {
                pixels.push(f(x, y));
            }
        }
        Self::from_raw(width, height, pixels).expect("non-empty image")
    }

    pub fn width(&self) -> usize {
        self.width
    }

    pub fn height(&self) -> usize {
        self.height
    }

    pub fn len(&self) -> usize {
        self.pixels.len()
    }

    pub fn is_empty(&self) -> bool {
        self.pixels.is_empty()
    }

    pub fn pixels(&self) -> &[f64] {
        &self.pixels
    }

    pub fn get(&self, x: usize, y: usize) -> f64 {
        self.pixels[y * self.width + x]
    }

    pub fn row(&self, y: usize) -> &[f64] {
        &self.pixels[y * self.width..(y + 1) * self.width]
    }

    pub fn into_pixels(self) -> Vec<f64> {
        self.pixels
    }

    /// Image with rows and columns swapped.
    pub fn transposed(&self) -> Self {
        Self::from_fn(self.height, self.width, |x, y| self.get(y, x))
    }

    /// Decodes a binary PGM with maxval up to 65535; samples map to
    /// `value / maxval`. Returns the image and its maxval.
    pub fn decode_pgm(data: &[u8]) -> Result<(Self, u16)> {
        let mut cur = HeaderCursor { data, pos: 0 };
        if data.get(..2) != Some(b"P5") {
            return Err(Error::Pgm("missing P5 magic".into()));
        }
        cur.pos = 2;
        let width = cur.number()?;
        let height = cur.number()?;
        let maxval = cur.number()?;
        // exactly one whitespace byte separates the header from the raster
        match data.get(cur.pos) {
            Some(b) if b.is_ascii_whitespace() => cur.pos += 1,
            _ => return Err(Error::Pgm("no whitespace after maxval".into())),
        }
        if width == 0 || height == 0 {
            return Err(Error::Pgm(format!("empty image {width}x{height}")));
        }
        if maxval == 0 || maxval > 65535 {
            return Err(Error::Pgm(format!("maxval {maxval} out of range")));
        }
        let bytes_per = if maxval > 255 { 2 } else { 1 };
        let count = width
            .checked_mul(height)
            .ok_or_else(|| Error::Pgm("dimensions overflow".into()))?;
        let raster = &data[cur.pos..];
        if raster.len() < count * bytes_per {
            return Err(Error::Pgm(format!(
                "raster truncated: need {} bytes, have {}",
                count * bytes_per,
                raster.len()
            )));
        }
        let scale = 1.0 / maxval as f64;
        let pixels: Vec<f64> = if bytes_per == 1 {
            raster[..count].iter().map(|&b| b as f64 * scale).collect()
        } else {
            raster[..2 * count]
                .chunks_exact(2)
                .map(|b| u16::from_be_bytes([b[0], b[1]]) as f64 * scale)
                .collect()
        };
        Ok((Self::from_raw(width, height, pixels)?, maxval as u16))
    }

    /// Encodes as binary PGM, rounding `value · maxval` to the nearest level
    /// after clamping to `[0, 1]`.
    pub fn encode_pgm(&self, maxval: u16) -> Result<Vec<u8>> {
        if maxval == 0 {
            return Err(invalid("maxval must be positive"));
        }
        let mut out = format!("P5\n{} {}\n{}\n", self.width, self.height, maxval).into_bytes();
        let m = maxval as f64;
        let quant = |v: f64| (v.clamp(0.0, 1.0) * m).round() as u16;
        if maxval > 255 {
            out.reserve(2 * self.len());
            for &v in &self.pixels {
                out.extend_from_slice(&quant(v).to_be_bytes());
            }
        } else {
            out.extend(self.pixels.iter().map(|&v| quant(v) as u8));
        }
        Ok(out)
    }

    pub fn read_pgm(path: impl AsRef<Path>) -> Result<(Self, u16)> {
        Self::decode_pgm(&fs::read(path)?)
    }

    pub fn write_pgm(&self, path: impl AsRef<Path>, maxval: u16) -> Result<()> {
        fs::write(path, self.encode_pgm(maxval)?)?;
        Ok(())
    }
}

struct HeaderCursor<'a> {
    data: &'a [u8],
    pos: usize,
}

impl HeaderCursor<'_> {
    fn skip_space_and_comments(&mut self) {
        while let Some(&b) = self.data.get(self.pos) {
            if b == b'#' {
                while let Some(&c) = self.data.get(self.pos) {
                    self.pos += 1;
                    if c == b'\n' || c == b'\r' {
                        break;
                    }
                }
            } else if b.is_ascii_whitespace() {
                self.pos += 1;
            } else {
                break;
            }
        }
    }

    fn number(&mut self) -> Result<usize> {
        self.skip_space_and_comments();
        let start = self.pos;
        while self.data.get(self.pos).is_some_and(u8::is_ascii_digit) {
            self.pos += 1;
        }
        if start == self.pos {
            return Err(Error::Pgm(format!("expected a number at byte {start}")));
        }
        std::str::from_utf8(&self.data[start..self.pos])
            .ok()
            .and_then(|s| s.parse().ok())
            .ok_or_else(|| Error::Pgm(format!("number too large at byte {start}")))
    }
}
