//! Grayscale and binary rasters.
//!
//! Rasters are row-major, with `(0, 0)` at the top-left corner. The only
//! required interchange format is 8-bit PGM (`P2` plain or `P5` raw, maxval
//! 255); 8-bit grayscale PNG is also accepted on load and decodes to the same
//! [`GrayRaster`] content. Color images are rejected.

use std::fmt;
use std::fs;
use std::io::Cursor;
use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// An 8-bit grayscale image.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct GrayRaster {
    width: usize,
    height: usize,
    samples: Vec<u8>,
}

impl GrayRaster {
    pub fn new(width: usize, height: usize, samples: Vec<u8>) -> Result<Self> {
        check_dims(width, height, samples.len())?;
        Ok(Self {
            width,
            height,
            samples,
        })
    }

    pub fn width(&self) -> usize {
        self.width
    }

    pub fn height(&self) -> usize {
        self.height
    }

    pub fn samples(&self) -> &[u8] {
        &self.samples
    }

    pub fn get(&self, x: usize, y: usize) -> u8 {
        self.samples[y * self.width + x]
    }

    /// Sub-image at `rect`, intensities preserved.
    pub fn crop(&self, rect: Rect) -> Result<GrayRaster> {
        rect.check_within(self.width, self.height)?;
        let samples = rect_rows(rect, self.width)
            .flat_map(|row| self.samples[row].iter().copied())
            .collect();
        GrayRaster::new(rect.w, rect.h, samples)
    }
}

/// Occupancy grid: `true` marks a pixel belonging to the object (drawn white).
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct BinaryRaster {
    width: usize,
    height: usize,
    occupied: Vec<bool>,
}

impl BinaryRaster {
    pub fn new(width: usize, height: usize, occupied: Vec<bool>) -> Result<Self> {
        check_dims(width, height, occupied.len())?;
        Ok(Self {
            width,
            height,
            occupied,
        })
    }

    /// Builds a raster by evaluating `f(x, y)` at every pixel.
    pub fn from_fn(
        width: usize,
        height: usize,
        mut f: impl FnMut(usize, usize) -> bool,
    ) -> Result<Self> {
        check_dims(width, height, width.saturating_mul(height))?;
        let mut occupied = Vec::with_capacity(width * height);
        for y in 0..height {
            for x in 0..width {
                occupied.push(f(x, y));
            }
        }
        Ok(Self {
            width,
            height,
            occupied,
        })
    }

    /// A raster with no occupied pixel.
    pub fn empty(width: usize, height: usize) -> Result<Self> {
        Self::new(width, height, vec![false; width.saturating_mul(height)])
    }

    pub fn width(&self) -> usize {
        self.width
    }

    pub fn height(&self) -> usize {
        self.height
    }

    pub fn occupied(&self) -> &[bool] {
        &self.occupied
    }

    pub fn is_occupied(&self, x: usize, y: usize) -> bool {
        self.occupied[y * self.width + x]
    }

    pub fn set(&mut self, x: usize, y: usize, value: bool) {
        self.occupied[y * self.width + x] = value;
    }

    /// Coordinates of every occupied pixel in row-major order.
    pub fn occupied_pixels(&self) -> impl Iterator<Item = (usize, usize)> + '_ {
        let w = self.width;
        self.occupied
            .iter()
            .enumerate()
            .filter(|(_, &o)| o)
            .map(move |(i, _)| (i % w, i / w))
    }

    pub fn occupancy_count(&self) -> usize {
        occupancy_count(self)
    }

    /// Maps occupied pixels to 255 and empty ones to 0.
    pub fn to_gray(&self) -> GrayRaster {
        GrayRaster {
            width: self.width,
            height: self.height,
            samples: self
                .occupied
                .iter()
                .map(|&o| if o { 255 } else { 0 })
                .collect(),
        }
    }
}

/// Axis-aligned pixel rectangle.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct Rect {
    pub x0: usize,
    pub y0: usize,
    pub w: usize,
    pub h: usize,
}

impl Rect {
    pub fn new(x0: usize, y0: usize, w: usize, h: usize) -> Self {
        Self { x0, y0, w, h }
    }

    fn check_within(&self, width: usize, height: usize) -> Result<()> {
        let fits = self.w >= 1
            && self.h >= 1
            && self.x0.checked_add(self.w).is_some_and(|e| e <= width)
            && self.y0.checked_add(self.h).is_some_and(|e| e <= height);
        if fits {
            Ok(())
        } else {
            Err(Error::OutOfBounds {
                rect: self.to_string(),
                width,
                height,
            })
        }
    }
}

impl fmt::Display for Rect {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}x{}+{}+{}", self.w, self.h, self.x0, self.y0)
    }
}

fn rect_rows(rect: Rect, stride: usize) -> impl Iterator<Item = std::ops::Range<usize>> {
    (rect.y0..rect.y0 + rect.h).map(move |y| {
        let start = y * stride + rect.x0;
        start..start + rect.w
    })
}

fn check_dims(width: usize, height: usize, len: usize) -> Result<()> {
    if width == 0 || height == 0 {
        return Err(Error::InvalidRaster(format!(
            "dimensions must be positive, got {width}x{height}"
        )));
    }
    match width.checked_mul(height) {
        Some(n) if n == len => Ok(()),
        _ => Err(Error::InvalidRaster(format!(
            "{width}x{height} raster needs {} samples, got {len}",
            width.saturating_mul(height)
        ))),
    }
}

/// Which side of the threshold counts as occupied.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Polarity {
    /// Occupied iff intensity >= threshold.
    #[default]
    LightIsOccupied,
    /// Occupied iff intensity < threshold.
    DarkIsOccupied,
}

pub fn binarize(gray: &GrayRaster, threshold: u8, polarity: Polarity) -> BinaryRaster {
    let occupied = gray
        .samples
        .iter()
        .map(|&v| match polarity {
            Polarity::LightIsOccupied => v >= threshold,
            Polarity::DarkIsOccupied => v < threshold,
        })
        .collect();
    BinaryRaster {
        width: gray.width,
        height: gray.height,
        occupied,
    }
}

pub fn crop(raster: &BinaryRaster, rect: Rect) -> Result<BinaryRaster> {
    rect.check_within(raster.width, raster.height)?;
    let occupied = rect_rows(rect, raster.width)
        .flat_map(|row| raster.occupied[row].iter().copied())
        .collect();
    BinaryRaster::new(rect.w, rect.h, occupied)
}

pub fn occupancy_count(raster: &BinaryRaster) -> usize {
    raster.occupied.iter().filter(|&&o| o).count()
}

/// Reads a PGM (`P2`/`P5`) or 8-bit grayscale PNG file.
pub fn load_gray(path: impl AsRef<Path>) -> Result<GrayRaster> {
    let path = path.as_ref();
    let bytes = fs::read(path).map_err(|source| Error::Io {
        path: path.to_path_buf(),
        source,
    })?;
    if bytes.starts_with(b"\x89PNG") {
        decode_png(&bytes)
    } else {
        decode_pgm(&bytes)
    }
}

/// PGM flavour used when writing.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum PgmFormat {
    /// `P2`, ASCII samples.
    Plain,
    /// `P5`, one byte per sample.
    #[default]
    Raw,
}

pub fn encode_pgm(gray: &GrayRaster, format: PgmFormat) -> Vec<u8> {
    match format {
        PgmFormat::Raw => {
            let mut out = format!("P5\n{} {}\n255\n", gray.width, gray.height).into_bytes();
            out.extend_from_slice(&gray.samples);
            out
        }
        PgmFormat::Plain => {
            let mut out = format!("P2\n{} {}\n255\n", gray.width, gray.height);
            for row in gray.samples.chunks(gray.width) {
                let line: Vec<String> = row.iter().map(u8::to_string).collect();
                out.push_str(&line.join(" "));
                out.push('\n');
            }
            out.into_bytes()
        }
    }
}

pub fn write_pgm(path: impl AsRef<Path>, gray: &GrayRaster, format: PgmFormat) -> Result<()> {
    let path = path.as_ref();
    fs::write(path, encode_pgm(gray, format)).map_err(|source| Error::Io {
        path: path.to_path_buf(),
        source,
    })
}

struct HeaderReader<'a> {
    bytes: &'a [u8],
    pos: usize,
}

impl<'a> HeaderReader<'a> {
    fn skip_space_and_comments(&mut self) {
        while let Some(&c) = self.bytes.get(self.pos) {
            if c == b'#' {
                while let Some(&c) = self.bytes.get(self.pos) {
                    self.pos += 1;
                    if c == b'\n' || c == b'\r' {
                        break;
                    }
                }
            } else if c.is_ascii_whitespace() {
                self.pos += 1;
            } else {
                break;
            }
        }
    }

    fn next_uint(&mut self, what: &str) -> Result<usize> {
        self.skip_space_and_comments();
        let start = self.pos;
        while self.bytes.get(self.pos).is_some_and(u8::is_ascii_digit) {
            self.pos += 1;
        }
        if start == self.pos {
            return Err(Error::MalformedImage(format!("expected {what}")));
        }
        std::str::from_utf8(&self.bytes[start..self.pos])
            .ok()
            .and_then(|s| s.parse().ok())
            .ok_or_else(|| Error::MalformedImage(format!("{what} out of range")))
    }
}

/// Decodes a `P2` or `P5` PGM with maxval 255.
pub fn decode_pgm(bytes: &[u8]) -> Result<GrayRaster> {
    let raw = match bytes.get(..2) {
        Some(b"P2") => false,
        Some(b"P5") => true,
        Some(m) if m[0] == b'P' => {
            return Err(Error::UnsupportedImage(format!(
                "netpbm variant {} (only grayscale P2/P5)",
                String::from_utf8_lossy(m)
            )))
        }
        _ => return Err(Error::MalformedImage("missing PGM magic number".into())),
    };
    let mut rd = HeaderReader { bytes, pos: 2 };
    let width = rd.next_uint("width")?;
    let height = rd.next_uint("height")?;
    let maxval = rd.next_uint("maxval")?;
    if width == 0 || height == 0 {
        return Err(Error::MalformedImage(format!(
            "zero dimension {width}x{height}"
        )));
    }
    if maxval != 255 {
        return Err(Error::UnsupportedImage(format!(
            "maxval {maxval} (only 8-bit maxval 255)"
        )));
    }
    let n = width
        .checked_mul(height)
        .ok_or_else(|| Error::MalformedImage("dimensions overflow".into()))?;

    let samples = if raw {
        // Exactly one whitespace byte separates maxval from the raster.
        match bytes.get(rd.pos) {
            Some(c) if c.is_ascii_whitespace() => rd.pos += 1,
            _ => return Err(Error::MalformedImage("missing separator after maxval".into())),
        }
        let body = &bytes[rd.pos..];
        if body.len() < n {
            return Err(Error::MalformedImage(format!(
                "truncated raster: expected {n} bytes, found {}",
                body.len()
            )));
        }
        body[..n].to_vec()
    } else {
        let mut samples = Vec::with_capacity(n);
        for i in 0..n {
            let v = rd.next_uint("sample").map_err(|_| {
                Error::MalformedImage(format!("truncated raster: expected {n} samples, found {i}"))
            })?;
            let v = u8::try_from(v)
                .map_err(|_| Error::MalformedImage(format!("sample {v} exceeds maxval 255")))?;
            samples.push(v);
        }
        samples
    };
    GrayRaster::new(width, height, samples)
}

fn decode_png(bytes: &[u8]) -> Result<GrayRaster> {
    let decoder = png::Decoder::new(Cursor::new(bytes));
    let mut reader = decoder
        .read_info()
        .map_err(|e| Error::MalformedImage(format!("png: {e}")))?;
    let info = reader.info();
    let (width, height) = (info.width as usize, info.height as usize);
    if info.color_type != png::ColorType::Grayscale {
        return Err(Error::UnsupportedImage(format!(
            "png color type {:?} (only 8-bit grayscale)",
            info.color_type
        )));
    }
    if info.bit_depth != png::BitDepth::Eight {
        return Err(Error::UnsupportedImage(format!(
            "png bit depth {:?} (only 8-bit grayscale)",
            info.bit_depth
        )));
    }
    let size = reader
        .output_buffer_size()
        .ok_or_else(|| Error::MalformedImage("png: image too large".into()))?;
    let mut buf = vec![0; size];
    let frame = reader
        .next_frame(&mut buf)
        .map_err(|e| Error::MalformedImage(format!("png: {e}")))?;
    let stride = frame.line_size;
    let samples = buf
        .chunks(stride)
        .take(height)
        .flat_map(|row| row[..width].iter().copied())
        .collect();
    GrayRaster::new(width, height, samples)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn checker4() -> BinaryRaster {
        BinaryRaster::from_fn(4, 4, |x, y| (x + y) % 2 == 0).unwrap()
    }

    #[test]
    fn decodes_plain_pgm() {
        let g = decode_pgm(b"P2\n2 2\n255\n0 255\n255 0\n").unwrap();
        assert_eq!(g, GrayRaster::new(2, 2, vec![0, 255, 255, 0]).unwrap());
    }

    #[test]
    fn decodes_minimal_pgm_with_comments() {
        let g = decode_pgm(b"P2 # comment\n# another\n1 1 255\n128\n").unwrap();
        assert_eq!(g.samples(), &[128]);
        assert_eq!((g.width(), g.height()), (1, 1));
    }

    #[test]
    fn decodes_raw_pgm() {
        let mut bytes = b"P5\n3 1\n255\n".to_vec();
        bytes.extend_from_slice(&[1, 2, 3]);
        assert_eq!(decode_pgm(&bytes).unwrap().samples(), &[1, 2, 3]);
    }

    #[test]
    fn truncated_bodies_are_malformed() {
        assert!(matches!(
            decode_pgm(b"P2\n2 2\n255\n0 255 255\n"),
            Err(Error::MalformedImage(_))
        ));
        assert!(matches!(
            decode_pgm(b"P5\n2 2\n255\n\x00\x01"),
            Err(Error::MalformedImage(_))
        ));
        assert!(matches!(decode_pgm(b"P2\n2"), Err(Error::MalformedImage(_))));
        assert!(matches!(decode_pgm(b"hello"), Err(Error::MalformedImage(_))));
    }

    #[test]
    fn rejects_other_depths_and_color() {
        assert!(matches!(
            decode_pgm(b"P2\n1 1\n65535\n7\n"),
            Err(Error::UnsupportedImage(_))
        ));
        assert!(matches!(
            decode_pgm(b"P3\n1 1\n255\n1 2 3\n"),
            Err(Error::UnsupportedImage(_))
        ));
    }

    #[test]
    fn pgm_encodings_round_trip() {
        let g = GrayRaster::new(3, 2, vec![0, 17, 255, 128, 9, 64]).unwrap();
        for format in [PgmFormat::Plain, PgmFormat::Raw] {
            assert_eq!(decode_pgm(&encode_pgm(&g, format)).unwrap(), g);
        }
    }

    #[test]
    fn png_decodes_like_pgm() {
        let g = GrayRaster::new(3, 2, vec![0, 17, 255, 128, 9, 64]).unwrap();
        let mut bytes = Vec::new();
        {
            let mut enc = png::Encoder::new(&mut bytes, 3, 2);
            enc.set_color(png::ColorType::Grayscale);
            enc.set_depth(png::BitDepth::Eight);
            let mut w = enc.write_header().unwrap();
            w.write_image_data(g.samples()).unwrap();
        }
        assert_eq!(decode_png(&bytes).unwrap(), g);

        let mut rgb = Vec::new();
        {
            let mut enc = png::Encoder::new(&mut rgb, 1, 1);
            enc.set_color(png::ColorType::Rgb);
            enc.set_depth(png::BitDepth::Eight);
            let mut w = enc.write_header().unwrap();
            w.write_image_data(&[1, 2, 3]).unwrap();
        }
        assert!(matches!(decode_png(&rgb), Err(Error::UnsupportedImage(_))));
    }

    #[test]
    fn load_reports_missing_path() {
        let err = load_gray("/nonexistent/missing.pgm").unwrap_err();
        assert!(err.to_string().contains("missing.pgm"));
    }

    #[test]
    fn binarize_examples() {
        let g = GrayRaster::new(2, 2, vec![0, 255, 255, 0]).unwrap();
        assert_eq!(
            binarize(&g, 128, Polarity::LightIsOccupied).occupied(),
            &[false, true, true, false]
        );
        assert_eq!(
            binarize(&g, 128, Polarity::DarkIsOccupied).occupied(),
            &[true, false, false, true]
        );
        let all = binarize(&g, 0, Polarity::LightIsOccupied);
        assert_eq!(occupancy_count(&all), 4);
    }

    #[test]
    fn crop_examples() {
        let b = checker4();
        assert_eq!(crop(&b, Rect::new(0, 0, 4, 4)).unwrap(), b);
        let inner = crop(&b, Rect::new(1, 1, 2, 2)).unwrap();
        assert_eq!(inner.occupied(), &[true, false, false, true]);
        assert!(matches!(
            crop(&b, Rect::new(3, 3, 2, 2)),
            Err(Error::OutOfBounds { .. })
        ));
        assert!(crop(&b, Rect::new(0, 0, 0, 1)).is_err());
    }

    #[test]
    fn gray_crop_keeps_intensities() {
        let g = GrayRaster::new(3, 3, (0..9).collect()).unwrap();
        assert_eq!(g.crop(Rect::new(1, 1, 2, 2)).unwrap().samples(), &[4, 5, 7, 8]);
    }

    #[test]
    fn occupancy_examples() {
        assert_eq!(occupancy_count(&BinaryRaster::empty(3, 3).unwrap()), 0);
        let full = BinaryRaster::from_fn(3, 3, |_, _| true).unwrap();
        assert_eq!(occupancy_count(&full), 9);
        let checker = BinaryRaster::from_fn(2, 2, |x, y| (x + y) % 2 == 0).unwrap();
        assert_eq!(occupancy_count(&checker), 2);
    }

    #[test]
    fn raster_invariants_enforced() {
        assert!(BinaryRaster::new(2, 2, vec![true; 3]).is_err());
        assert!(GrayRaster::new(0, 2, vec![]).is_err());
    }

    mod props {
        use super::*;
        use proptest::prelude::*;

        fn gray() -> impl Strategy<Value = GrayRaster> {
            (1usize..12, 1usize..12).prop_flat_map(|(w, h)| {
                proptest::collection::vec(any::<u8>(), w * h)
                    .prop_map(move |s| GrayRaster::new(w, h, s).unwrap())
            })
        }

        proptest! {
            #[test]
            fn rethreshold_is_idempotent(g in gray(), t in any::<u8>(), dark in any::<bool>()) {
                let pol = if dark { Polarity::DarkIsOccupied } else { Polarity::LightIsOccupied };
                let once = binarize(&g, t, pol);
                let mut back = once.to_gray();
                if dark {
                    back = GrayRaster::new(back.width(), back.height(),
                        back.samples().iter().map(|v| 255 - v).collect()).unwrap();
                }
                let again = binarize(&back, t, pol);
                prop_assert_eq!(&again, &once);
            }

            #[test]
            fn zero_threshold_occupies_everything(g in gray()) {
                let b = binarize(&g, 0, Polarity::LightIsOccupied);
                prop_assert_eq!(occupancy_count(&b), g.width() * g.height());
            }

            #[test]
            fn full_frame_crop_is_identity(g in gray(), t in any::<u8>()) {
                let b = binarize(&g, t, Polarity::LightIsOccupied);
                let r = Rect::new(0, 0, b.width(), b.height());
                prop_assert_eq!(crop(&b, r).unwrap(), b);
            }
        }
    }
}
