//! Rasters with analytically known dimension.
//!
//! The self-similar sets are rendered by per-pixel digit tests rather than by
//! iterating a function system, so every pixel is exact and independently
//! checkable:
//!
//! * Sierpinski triangle of side `2^k`: `(x, y)` occupied iff `x & y == 0`.
//!   Occupancy is `3^k`, dimension `ln 3 / ln 2`.
//! * Sierpinski carpet of side `3^k`: occupied iff no base-3 digit position
//!   has a `1` in both coordinates. Occupancy is `8^k`, dimension `ln 8 / ln 3`.
//!
//! [`random_density`] draws one uniform variate per pixel, in row-major order,
//! from the 64-bit linear congruential generator
//!
//! ```text
//! state <- state * 6364136223846793005 + 1442695040888963407   (mod 2^64)
//! u      = (state >> 11) / 2^53
//! ```
//!
//! seeded with `state = seed`; the pixel is occupied iff `u < p`. Any
//! implementation of this recurrence reproduces the same bits.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::raster::BinaryRaster;

/// Description of a synthetic raster.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "kebab-case")]
pub enum SynthSpec {
    SierpinskiTriangle { n: usize },
    SierpinskiCarpet { depth: u32 },
    FilledRect { width: usize, height: usize },
    Line { length: usize },
    Disk { radius: usize },
    RandomDensity { width: usize, height: usize, p: f64, seed: u64 },
}

impl SynthSpec {
    pub fn render(&self) -> Result<BinaryRaster> {
        match *self {
            SynthSpec::SierpinskiTriangle { n } => sierpinski_triangle(n),
            SynthSpec::SierpinskiCarpet { depth } => sierpinski_carpet(depth),
            SynthSpec::FilledRect { width, height } => filled_rect(width, height),
            SynthSpec::Line { length } => line(length),
            SynthSpec::Disk { radius } => disk(radius),
            SynthSpec::RandomDensity {
                width,
                height,
                p,
                seed,
            } => random_density(width, height, p, seed),
        }
    }

    /// Similarity dimension where one is defined.
    pub fn known_dimension(&self) -> Option<f64> {
        match self {
            SynthSpec::SierpinskiTriangle { .. } => Some(3f64.ln() / 2f64.ln()),
            SynthSpec::SierpinskiCarpet { .. } => Some(8f64.ln() / 3f64.ln()),
            SynthSpec::FilledRect { .. } | SynthSpec::Disk { .. } => Some(2.0),
            SynthSpec::Line { .. } => Some(1.0),
            SynthSpec::RandomDensity { .. } => None,
        }
    }
}

pub fn sierpinski_triangle(n: usize) -> Result<BinaryRaster> {
    if !n.is_power_of_two() {
        return Err(Error::InvalidParameter(format!(
            "triangle side {n} is not a power of two"
        )));
    }
    BinaryRaster::from_fn(n, n, |x, y| x & y == 0)
}

pub fn sierpinski_carpet(depth: u32) -> Result<BinaryRaster> {
    if depth == 0 {
        return Err(Error::InvalidParameter("carpet depth must be >= 1".into()));
    }
    let side = 3usize
        .checked_pow(depth)
        .filter(|s| s.checked_mul(*s).is_some())
        .ok_or_else(|| Error::InvalidParameter(format!("carpet depth {depth} too large")))?;
    BinaryRaster::from_fn(side, side, |mut x, mut y| {
        while x > 0 || y > 0 {
            if x % 3 == 1 && y % 3 == 1 {
                return false;
            }
            x /= 3;
            y /= 3;
        }
        true
    })
}

pub fn filled_rect(width: usize, height: usize) -> Result<BinaryRaster> {
    BinaryRaster::from_fn(width, height, |_, _| true)
}

/// A one-pixel-wide horizontal line spanning the middle row of a square
/// `length x length` frame.
pub fn line(length: usize) -> Result<BinaryRaster> {
    let row = length / 2;
    BinaryRaster::from_fn(length, length, |_, y| y == row)
}

/// Pixels within `radius` of the center of a `(2r + 1)`-square frame.
pub fn disk(radius: usize) -> Result<BinaryRaster> {
    if radius == 0 {
        return Err(Error::InvalidParameter("disk radius must be positive".into()));
    }
    let side = 2 * radius + 1;
    let r2 = (radius * radius) as i64;
    let c = radius as i64;
    BinaryRaster::from_fn(side, side, |x, y| {
        let (dx, dy) = (x as i64 - c, y as i64 - c);
        dx * dx + dy * dy <= r2
    })
}

/// Fixed-constant 64-bit LCG; see the module docs.
#[derive(Debug, Clone)]
pub struct Lcg64 {
    state: u64,
}

impl Lcg64 {
    pub const MULTIPLIER: u64 = 6364136223846793005;
    pub const INCREMENT: u64 = 1442695040888963407;

    pub fn new(seed: u64) -> Self {
        Self { state: seed }
    }

    pub fn next_u64(&mut self) -> u64 {
        self.state = self
            .state
            .wrapping_mul(Self::MULTIPLIER)
            .wrapping_add(Self::INCREMENT);
        self.state
    }

    /// Uniform in `[0, 1)` with 53 bits of resolution.
    pub fn next_f64(&mut self) -> f64 {
        (self.next_u64() >> 11) as f64 / (1u64 << 53) as f64
    }
}

pub fn random_density(width: usize, height: usize, p: f64, seed: u64) -> Result<BinaryRaster> {
    if !(0.0..=1.0).contains(&p) {
        return Err(Error::InvalidParameter(format!(
            "density {p} outside [0, 1]"
        )));
    }
    let mut rng = Lcg64::new(seed);
    BinaryRaster::from_fn(width, height, |_, _| rng.next_f64() < p)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn occupied_set(b: &BinaryRaster) -> Vec<(usize, usize)> {
        b.occupied_pixels().collect()
    }

    #[test]
    fn small_triangles() {
        let t = sierpinski_triangle(2).unwrap();
        assert_eq!(occupied_set(&t), vec![(0, 0), (1, 0), (0, 1)]);
        assert_eq!(sierpinski_triangle(4).unwrap().occupancy_count(), 9);
        assert!(sierpinski_triangle(12).is_err());
        assert!(sierpinski_triangle(0).is_err());
    }

    #[test]
    fn triangle_occupancy_is_power_of_three() {
        for k in 0..=10u32 {
            let t = sierpinski_triangle(1 << k).unwrap();
            assert_eq!(t.occupancy_count(), 3usize.pow(k));
        }
    }

    #[test]
    fn carpet_occupancy_is_power_of_eight() {
        let c1 = sierpinski_carpet(1).unwrap();
        assert_eq!(c1.occupancy_count(), 8);
        assert!(!c1.is_occupied(1, 1));
        for k in 1..=6u32 {
            assert_eq!(sierpinski_carpet(k).unwrap().occupancy_count(), 8usize.pow(k));
        }
        assert!(sierpinski_carpet(0).is_err());
    }

    #[test]
    fn simple_shapes() {
        assert_eq!(filled_rect(4, 4).unwrap().occupancy_count(), 16);
        let l = line(8).unwrap();
        assert_eq!(l.occupancy_count(), 8);
        assert!((0..8).all(|x| l.is_occupied(x, 4)));
        let d = disk(1).unwrap();
        assert_eq!(d.occupancy_count(), 5);
    }

    #[test]
    fn random_density_extremes_and_reproducibility() {
        assert_eq!(random_density(10, 10, 0.0, 5).unwrap().occupancy_count(), 0);
        assert_eq!(random_density(10, 10, 1.0, 5).unwrap().occupancy_count(), 100);
        let a = random_density(33, 17, 0.4, 42).unwrap();
        assert_eq!(a, random_density(33, 17, 0.4, 42).unwrap());
        assert_ne!(a, random_density(33, 17, 0.4, 43).unwrap());
        assert!(random_density(3, 3, 1.5, 0).is_err());
    }

    #[test]
    fn lcg_first_outputs_are_pinned() {
        let mut rng = Lcg64::new(0);
        assert_eq!(rng.next_u64(), 1442695040888963407);
        assert_eq!(
            rng.next_u64(),
            1442695040888963407u64
                .wrapping_mul(6364136223846793005)
                .wrapping_add(1442695040888963407)
        );
    }

    #[test]
    fn random_density_matches_requested_fraction() {
        let b = random_density(200, 200, 0.3, 7).unwrap();
        let frac = b.occupancy_count() as f64 / 40000.0;
        assert!((frac - 0.3).abs() < 0.01, "{frac}");
    }

    #[test]
    fn spec_render_dispatch() {
        let s = SynthSpec::SierpinskiCarpet { depth: 2 };
        assert_eq!(s.render().unwrap().occupancy_count(), 64);
        assert!((s.known_dimension().unwrap() - 1.892789).abs() < 1e-6);
    }
}
