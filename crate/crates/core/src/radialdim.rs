//! Radial (mass) dimension around a counting center.
//!
//! `N(R)` is the number of occupied pixels whose center lies within Euclidean
//! distance `R` (inclusive) of the counting center, and the dimension is the
//! slope of `ln N` against `ln R`. Radii larger than the distance from the
//! center to the nearest raster edge would sweep in area outside the image, so
//! such schedules are rejected rather than clamped.

use serde::{Deserialize, Serialize};

use crate::boxdim::{estimate_from_counts, log_log, DimensionEstimate, ScaleCount};
use crate::error::{Error, Result};
use crate::raster::BinaryRaster;
use crate::regress::LogLogSeries;

/// How the counting center is chosen.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum CenterMode {
    /// Center of the frame, `((w - 1) / 2, (h - 1) / 2)`.
    #[default]
    Geometric,
    /// Mean coordinate of the occupied pixels.
    MassCentroid,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Center {
    pub x: f64,
    pub y: f64,
}

impl Center {
    pub fn new(x: f64, y: f64) -> Self {
        Self { x, y }
    }
}

pub fn counting_center(raster: &BinaryRaster, mode: CenterMode) -> Result<Center> {
    match mode {
        CenterMode::Geometric => Ok(Center::new(
            (raster.width() as f64 - 1.0) / 2.0,
            (raster.height() as f64 - 1.0) / 2.0,
        )),
        CenterMode::MassCentroid => {
            let (mut sx, mut sy, mut n) = (0.0, 0.0, 0u64);
            for (x, y) in raster.occupied_pixels() {
                sx += x as f64;
                sy += y as f64;
                n += 1;
            }
            if n == 0 {
                return Err(Error::EmptyRaster);
            }
            Ok(Center::new(sx / n as f64, sy / n as f64))
        }
    }
}

/// Distance from `center` to the nearest raster edge.
///
/// Pixel `(x, y)` covers `[x - 0.5, x + 0.5] x [y - 0.5, y + 0.5]`, so the
/// edges sit at `-0.5` and `w - 0.5`. The center must lie within the hull
/// of pixel centers.
pub fn max_valid_radius(raster: &BinaryRaster, center: Center) -> Result<f64> {
    let (w, h) = (raster.width() as f64, raster.height() as f64);
    let inside = center.x.is_finite()
        && center.y.is_finite()
        && (0.0..=w - 1.0).contains(&center.x)
        && (0.0..=h - 1.0).contains(&center.y);
    if !inside {
        return Err(Error::InvalidParameter(format!(
            "counting center ({}, {}) lies outside the {}x{} raster",
            center.x,
            center.y,
            raster.width(),
            raster.height()
        )));
    }
    Ok((center.x + 0.5)
        .min(w - 0.5 - center.x)
        .min(center.y + 0.5)
        .min(h - 0.5 - center.y))
}

/// Strictly increasing radii about a fixed center, all within the frame.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RadialSchedule {
    radii: Vec<f64>,
    center: Center,
}

impl RadialSchedule {
    pub fn new(raster: &BinaryRaster, center: Center, radii: Vec<f64>) -> Result<Self> {
        let limit = max_valid_radius(raster, center)?;
        if radii.is_empty() {
            return Err(Error::InvalidSchedule("no radii given".into()));
        }
        if radii.iter().any(|r| !(r.is_finite() && *r > 0.0)) {
            return Err(Error::InvalidSchedule("radii must be positive".into()));
        }
        if !radii.windows(2).all(|w| w[0] < w[1]) {
            return Err(Error::InvalidSchedule(
                "radii must be strictly increasing".into(),
            ));
        }
        let largest = radii[radii.len() - 1];
        if largest > limit {
            return Err(Error::InvalidSchedule(format!(
                "radius {largest} exceeds the largest in-frame radius {limit} about ({}, {})",
                center.x, center.y
            )));
        }
        Ok(Self { radii, center })
    }

    pub fn radii(&self) -> &[f64] {
        &self.radii
    }

    pub fn center(&self) -> Center {
        self.center
    }
}

/// Minimum number of radii in a default schedule.
pub const MIN_DEFAULT_RADII: usize = 6;

/// Radii `4 * sqrt(2)^k` up to the largest in-frame radius.
pub fn default_radial_schedule(raster: &BinaryRaster, center: Center) -> Result<RadialSchedule> {
    let limit = max_valid_radius(raster, center)?;
    let radii: Vec<f64> = (0..)
        .map(|k| 4.0 * std::f64::consts::SQRT_2.powi(k))
        .take_while(|&r| r <= limit)
        .collect();
    if radii.len() < MIN_DEFAULT_RADII {
        return Err(Error::InvalidSchedule(format!(
            "only {} default radii fit within radius {limit}; need {MIN_DEFAULT_RADII}",
            radii.len()
        )));
    }
    RadialSchedule::new(raster, center, radii)
}

/// Occupied-pixel counts per radius, zero counts dropped.
pub fn radial_count_table(
    raster: &BinaryRaster,
    schedule: &RadialSchedule,
) -> Result<Vec<ScaleCount>> {
    let c = schedule.center;
    let rmax = schedule.radii[schedule.radii.len() - 1];
    let mut dist2: Vec<f64> = raster
        .occupied_pixels()
        .map(|(x, y)| {
            let (dx, dy) = (x as f64 - c.x, y as f64 - c.y);
            dx * dx + dy * dy
        })
        .filter(|&d| d <= rmax * rmax)
        .collect();
    dist2.sort_by(f64::total_cmp);
    let counts: Vec<ScaleCount> = schedule
        .radii
        .iter()
        .map(|&r| ScaleCount {
            scale: r,
            count: dist2.partition_point(|&d| d <= r * r) as u64,
        })
        .filter(|c| c.count > 0)
        .collect();
    if counts.is_empty() {
        return Err(Error::EmptyRaster);
    }
    Ok(counts)
}

/// `(ln R, ln N(R))` for each radius with `N > 0`.
pub fn radial_counts(raster: &BinaryRaster, schedule: &RadialSchedule) -> Result<LogLogSeries> {
    log_log(&radial_count_table(raster, schedule)?)
}

pub fn estimate_radial_dimension(
    raster: &BinaryRaster,
    schedule: &RadialSchedule,
) -> Result<DimensionEstimate> {
    estimate_from_counts(radial_count_table(raster, schedule)?)
}
