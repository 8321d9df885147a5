//! Curvature of fitted population segments and the ratios used to compare
//! the growth shapes of two regions.
//!
//! A segment `P(t)` is treated as the planar curve `(t, P(t))`, whose
//! curvature is `|P''| / (1 + P'^2)^(3/2)`. The average curvature of a
//! segment is the mean of that quantity over its own year range, integrated
//! with composite Simpson's rule.
//!
//! The ratio for period `i` is `A(prev) / A(i)`, where `prev` is the nearest
//! earlier exponential period. Linear periods carry no curvature and are
//! skipped, so with periods `1, 2, 3, L, 5` the ratios are indexed `2, 3, 5`
//! and the last one compares period 3 with period 5.

use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::population::{PiecewiseModel, Segment, SegmentKind};

pub const DEFAULT_PANELS: usize = 1024;

pub fn pointwise_curvature(seg: &Segment, t: f64) -> Result<f64> {
    if !seg.contains(t) {
        return Err(Error::InvalidParameter(format!(
            "t = {t} outside segment [{}, {}]",
            seg.t_start, seg.t_end
        )));
    }
    Ok(curvature_at(seg, t))
}

fn curvature_at(seg: &Segment, t: f64) -> f64 {
    let (d1, d2) = seg.derivatives(t);
    d2.abs() / (1.0 + d1 * d1).powf(1.5)
}

/// Mean curvature over `[t0, t1]` by composite Simpson's rule with `panels`
/// (even) subintervals.
pub fn average_curvature(seg: &Segment, t0: f64, t1: f64, panels: usize) -> Result<f64> {
    if !(t0 < t1) || !seg.contains(t0) || !seg.contains(t1) {
        return Err(Error::InvalidParameter(format!(
            "interval [{t0}, {t1}] is empty or outside segment [{}, {}]",
            seg.t_start, seg.t_end
        )));
    }
    if panels < 2 || !panels.is_multiple_of(2) {
        return Err(Error::InvalidParameter(format!(
            "panel count {panels} must be even and at least 2"
        )));
    }
    if seg.kind == SegmentKind::Linear {
        return Ok(0.0);
    }
    let h = (t1 - t0) / panels as f64;
    let mut sum = curvature_at(seg, t0) + curvature_at(seg, t1);
    for i in 1..panels {
        let w = if i % 2 == 1 { 4.0 } else { 2.0 };
        sum += w * curvature_at(seg, t0 + i as f64 * h);
    }
    Ok(sum * h / 3.0 / (t1 - t0))
}

/// Average curvature over the segment's own range with the default panels.
pub fn segment_average_curvature(seg: &Segment) -> f64 {
    average_curvature(seg, seg.t_start, seg.t_end, DEFAULT_PANELS)
        .expect("segment range is valid by construction")
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SegmentCurvature {
    /// 1-based period index.
    pub period: usize,
    pub kind: SegmentKind,
    pub t_start: f64,
    pub t_end: f64,
    pub average_curvature: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CurvatureReport {
    pub segments: Vec<SegmentCurvature>,
    /// Ratio keyed by the 1-based index of its denominator period.
    pub alphas: BTreeMap<usize, f64>,
}

pub fn curvature_report(model: &PiecewiseModel) -> Result<CurvatureReport> {
    let segments: Vec<SegmentCurvature> = model
        .segments()
        .iter()
        .enumerate()
        .map(|(i, s)| SegmentCurvature {
            period: i + 1,
            kind: s.kind,
            t_start: s.t_start,
            t_end: s.t_end,
            average_curvature: segment_average_curvature(s),
        })
        .collect();
    let bearing: Vec<&SegmentCurvature> = segments
        .iter()
        .filter(|s| s.kind == SegmentKind::Exponential)
        .collect();
    if bearing.len() < 2 {
        return Err(Error::InvalidParameter(format!(
            "need at least 2 exponential periods for curvature ratios, got {}",
            bearing.len()
        )));
    }
    let mut alphas = BTreeMap::new();
    for pair in bearing.windows(2) {
        let (prev, cur) = (pair[0], pair[1]);
        if cur.average_curvature == 0.0 {
            return Err(Error::ZeroCurvature(cur.period));
        }
        alphas.insert(cur.period, prev.average_curvature / cur.average_curvature);
    }
    Ok(CurvatureReport { segments, alphas })
}

pub fn alpha_ratios(model: &PiecewiseModel) -> Result<BTreeMap<usize, f64>> {
    curvature_report(model).map(|r| r.alphas)
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct AlphaComparison {
    pub index: usize,
    pub alpha_a: f64,
    pub alpha_b: f64,
    /// `|ln(alpha_a / alpha_b)|`
    pub log_ratio: f64,
    pub similar: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SimilarityReport {
    pub tolerance: f64,
    pub comparisons: Vec<AlphaComparison>,
    pub all_similar: bool,
}

/// Index-by-index comparison of two models' ratios. An index is similar when
/// `|ln(alpha_a / alpha_b)| <= ln(1 + tolerance)`.
pub fn compare_similarity(
    a: &PiecewiseModel,
    b: &PiecewiseModel,
    tolerance: f64,
) -> Result<SimilarityReport> {
    if !(tolerance > 0.0 && tolerance.is_finite()) {
        return Err(Error::InvalidParameter(format!(
            "tolerance {tolerance} must be positive"
        )));
    }
    compare_alphas(&alpha_ratios(a)?, &alpha_ratios(b)?, tolerance)
}

pub fn compare_alphas(
    a: &BTreeMap<usize, f64>,
    b: &BTreeMap<usize, f64>,
    tolerance: f64,
) -> Result<SimilarityReport> {
    if !a.keys().eq(b.keys()) {
        return Err(Error::MismatchedIndices(
            a.keys().copied().collect(),
            b.keys().copied().collect(),
        ));
    }
    let bound = tolerance.ln_1p();
    let comparisons: Vec<AlphaComparison> = a
        .iter()
        .zip(b.values())
        .map(|((&index, &alpha_a), &alpha_b)| {
            let log_ratio = (alpha_a.ln() - alpha_b.ln()).abs();
            AlphaComparison {
                index,
                alpha_a,
                alpha_b,
                log_ratio,
                similar: log_ratio <= bound,
            }
        })
        .collect();
    Ok(SimilarityReport {
        tolerance,
        all_similar: comparisons.iter().all(|c| c.similar),
        comparisons,
    })
}
