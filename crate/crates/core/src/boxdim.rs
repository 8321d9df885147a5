//! Box-counting dimension.
//!
//! The raster is covered by a grid of `size x size` cells anchored at the
//! top-left corner; partial cells along the right and bottom edges count like
//! any other cell. `N(size)` is the number of cells holding at least one
//! occupied pixel, and the dimension is minus the slope of `ln N` against
//! `ln size`.

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::raster::BinaryRaster;
use crate::regress::{ols_fit, LineFit, LogLogSeries};

/// Box side lengths in pixels, strictly decreasing.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct BoxSchedule {
    sizes: Vec<usize>,
}

impl BoxSchedule {
    pub fn new(sizes: Vec<usize>) -> Result<Self> {
        if sizes.len() < 3 {
            return Err(Error::InvalidSchedule(format!(
                "need at least 3 box sizes, got {}",
                sizes.len()
            )));
        }
        if sizes.contains(&0) {
            return Err(Error::InvalidSchedule("box sizes must be >= 1".into()));
        }
        if !sizes.windows(2).all(|w| w[0] > w[1]) {
            return Err(Error::InvalidSchedule(
                "box sizes must be strictly decreasing".into(),
            ));
        }
        Ok(Self { sizes })
    }

    pub fn sizes(&self) -> &[usize] {
        &self.sizes
    }
}

/// Powers of two from `2^floor(log2(min(w, h) / 2))` down to 1.
pub fn default_schedule(raster: &BinaryRaster) -> Result<BoxSchedule> {
    let side = raster.width().min(raster.height());
    if side < 8 {
        return Err(Error::InvalidSchedule(format!(
            "raster side {side} is below the minimum of 8 pixels"
        )));
    }
    let top = (side / 2).ilog2();
    BoxSchedule::new((0..=top).rev().map(|k| 1usize << k).collect())
}

/// One measured scale: a box size or a radius, with its occupied count.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ScaleCount {
    pub scale: f64,
    pub count: u64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DimensionEstimate {
    pub dimension: f64,
    pub fit: LineFit,
    pub samples: LogLogSeries,
    /// Raw counts behind `samples`, scales with zero count omitted.
    pub counts: Vec<ScaleCount>,
}

/// Number of `size x size` grid cells containing an occupied pixel.
pub fn count_boxes(raster: &BinaryRaster, size: usize) -> u64 {
    assert!(size >= 1, "box size must be positive");
    let (w, h) = (raster.width(), raster.height());
    let cols = w.div_ceil(size);
    let mut cells = vec![false; cols * h.div_ceil(size)];
    for (y, row) in raster.occupied().chunks(w).enumerate() {
        let base = (y / size) * cols;
        for (x, _) in row.iter().enumerate().filter(|(_, &o)| o) {
            cells[base + x / size] = true;
        }
    }
    cells.iter().filter(|&&c| c).count() as u64
}

/// Counts for every size in the schedule, dropping sizes with no occupied cell.
pub fn box_count_table(raster: &BinaryRaster, schedule: &BoxSchedule) -> Result<Vec<ScaleCount>> {
    let counts: Vec<ScaleCount> = schedule
        .sizes
        .par_iter()
        .map(|&size| ScaleCount {
            scale: size as f64,
            count: count_boxes(raster, size),
        })
        .collect::<Vec<_>>()
        .into_iter()
        .filter(|c| c.count > 0)
        .collect();
    if counts.is_empty() {
        return Err(Error::EmptyRaster);
    }
    Ok(counts)
}

pub(crate) fn log_log(counts: &[ScaleCount]) -> Result<LogLogSeries> {
    LogLogSeries::new(
        counts
            .iter()
            .map(|c| (c.scale.ln(), (c.count as f64).ln()))
            .collect(),
    )
}

/// `(ln size, ln N(size))` for each schedule size with `N > 0`.
pub fn box_counts(raster: &BinaryRaster, schedule: &BoxSchedule) -> Result<LogLogSeries> {
    log_log(&box_count_table(raster, schedule)?)
}

pub(crate) fn estimate_from_counts(counts: Vec<ScaleCount>) -> Result<DimensionEstimate> {
    if counts.len() < 3 {
        return Err(Error::TooFewPoints {
            needed: 3,
            got: counts.len(),
        });
    }
    let samples = log_log(&counts)?;
    let fit = ols_fit(&samples)?;
    let dimension = fit.slope.abs();
    Ok(DimensionEstimate {
        dimension,
        fit,
        samples,
        counts,
    })
}

pub fn estimate_box_dimension(
    raster: &BinaryRaster,
    schedule: &BoxSchedule,
) -> Result<DimensionEstimate> {
    estimate_from_counts(box_count_table(raster, schedule)?)
}
