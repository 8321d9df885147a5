//! Ordinary least-squares line fitting.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Paired `(ln scale, ln count)` samples.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct LogLogSeries {
    points: Vec<(f64, f64)>,
}

impl LogLogSeries {
    /// Requires at least two finite points with strictly monotone `x`.
    pub fn new(points: Vec<(f64, f64)>) -> Result<Self> {
        if points.len() < 2 {
            return Err(Error::TooFewPoints {
                needed: 2,
                got: points.len(),
            });
        }
        if points.iter().any(|(x, y)| !x.is_finite() || !y.is_finite()) {
            return Err(Error::InvalidSeries("non-finite log-log point".into()));
        }
        let increasing = points.windows(2).all(|w| w[0].0 < w[1].0);
        let decreasing = points.windows(2).all(|w| w[0].0 > w[1].0);
        if !increasing && !decreasing {
            return Err(Error::InvalidSeries(
                "log-scale values must be strictly monotone".into(),
            ));
        }
        Ok(Self { points })
    }

    pub fn points(&self) -> &[(f64, f64)] {
        &self.points
    }

    pub fn len(&self) -> usize {
        self.points.len()
    }

    pub fn is_empty(&self) -> bool {
        self.points.is_empty()
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct LineFit {
    pub slope: f64,
    pub intercept: f64,
    pub r_squared: f64,
    pub stderr_slope: f64,
}

impl LineFit {
    pub fn predict(&self, x: f64) -> f64 {
        self.slope * x + self.intercept
    }
}

pub fn ols_fit(series: &LogLogSeries) -> Result<LineFit> {
    fit_line(series.points())
}

/// Unweighted least-squares line through arbitrary `(x, y)` pairs.
///
/// Sums are taken about the means, so large offsets in `x` (calendar years)
/// do not cost precision. `r_squared` is 1 when `y` is constant and
/// `stderr_slope` is 0 for two points.
pub fn fit_line(points: &[(f64, f64)]) -> Result<LineFit> {
    let n = points.len();
    if n < 2 {
        return Err(Error::TooFewPoints { needed: 2, got: n });
    }
    let nf = n as f64;
    let mx = points.iter().map(|p| p.0).sum::<f64>() / nf;
    let my = points.iter().map(|p| p.1).sum::<f64>() / nf;
    let (mut sxx, mut sxy, mut syy) = (0.0, 0.0, 0.0);
    for &(x, y) in points {
        let (dx, dy) = (x - mx, y - my);
        sxx += dx * dx;
        sxy += dx * dy;
        syy += dy * dy;
    }
    if sxx == 0.0 || !sxx.is_finite() {
        return Err(Error::DegenerateX);
    }
    let slope = sxy / sxx;
    let intercept = my - slope * mx;
    let ss_res: f64 = points
        .iter()
        .map(|&(x, y)| {
            let r = y - (slope * (x - mx) + my);
            r * r
        })
        .sum();
    let r_squared = if syy == 0.0 {
        1.0
    } else {
        (1.0 - ss_res / syy).clamp(0.0, 1.0)
    };
    let stderr_slope = if n > 2 {
        (ss_res / (nf - 2.0) / sxx).sqrt()
    } else {
        0.0
    };
    Ok(LineFit {
        slope,
        intercept,
        r_squared,
        stderr_slope,
    })
}
