//! Piecewise exponential / linear models of population counts.
//!
//! Each period is fitted independently: exponential periods by least squares
//! on `(t, ln P)`, linear ones on `(t, P)`. Periods are supplied by the
//! caller and may leave gaps between them.

use std::fmt;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::regress::fit_line;

/// Yearly population counts.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PopulationSeries {
    samples: Vec<(f64, f64)>,
}

impl PopulationSeries {
    pub fn new(samples: Vec<(f64, f64)>) -> Result<Self> {
        if samples.iter().any(|(t, p)| !t.is_finite() || !p.is_finite()) {
            return Err(Error::InvalidSeries("non-finite population sample".into()));
        }
        if !samples.windows(2).all(|w| w[0].0 < w[1].0) {
            return Err(Error::InvalidSeries("years must be strictly increasing".into()));
        }
        if let Some((t, p)) = samples.iter().find(|s| s.1 <= 0.0) {
            return Err(Error::InvalidSeries(format!(
                "population {p} in year {t} is not positive"
            )));
        }
        Ok(Self { samples })
    }

    pub fn samples(&self) -> &[(f64, f64)] {
        &self.samples
    }

    /// Samples with `t_start <= t <= t_end`.
    pub fn within(&self, t_start: f64, t_end: f64) -> impl Iterator<Item = (f64, f64)> + '_ {
        self.samples
            .iter()
            .copied()
            .filter(move |&(t, _)| t >= t_start && t <= t_end)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum SegmentKind {
    /// `P(t) = a * b^t`
    Exponential,
    /// `P(t) = a + b * t`
    Linear,
}

impl fmt::Display for SegmentKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            SegmentKind::Exponential => "exponential",
            SegmentKind::Linear => "linear",
        })
    }
}

/// One fitted period. For exponential segments `b` is the per-year base, for
/// linear ones the slope; `a` is the scale or intercept respectively.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Segment {
    pub kind: SegmentKind,
    pub t_start: f64,
    pub t_end: f64,
    pub a: f64,
    pub b: f64,
}

impl Segment {
    pub fn new(kind: SegmentKind, t_start: f64, t_end: f64, a: f64, b: f64) -> Result<Self> {
        if !(t_start.is_finite() && t_end.is_finite() && t_start < t_end) {
            return Err(Error::InvalidParameter(format!(
                "segment range [{t_start}, {t_end}] is empty"
            )));
        }
        if !(a.is_finite() && b.is_finite()) {
            return Err(Error::InvalidParameter("segment coefficients must be finite".into()));
        }
        if kind == SegmentKind::Exponential && !(a > 0.0 && b > 0.0) {
            return Err(Error::InvalidParameter(format!(
                "exponential segment needs a > 0 and b > 0, got a = {a}, b = {b}"
            )));
        }
        Ok(Self {
            kind,
            t_start,
            t_end,
            a,
            b,
        })
    }

    pub fn contains(&self, t: f64) -> bool {
        t >= self.t_start && t <= self.t_end
    }

    pub fn value(&self, t: f64) -> f64 {
        match self.kind {
            SegmentKind::Exponential => self.a * self.b.powf(t),
            SegmentKind::Linear => self.a + self.b * t,
        }
    }

    /// First and second derivatives in `t`.
    pub fn derivatives(&self, t: f64) -> (f64, f64) {
        match self.kind {
            SegmentKind::Exponential => {
                let lb = self.b.ln();
                let v = self.value(t);
                (v * lb, v * lb * lb)
            }
            SegmentKind::Linear => (self.b, 0.0),
        }
    }
}

/// A period to fit: `[t_start, t_end]` and the model kind.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Period {
    pub t_start: f64,
    pub t_end: f64,
    pub kind: SegmentKind,
}

/// Ordered, non-overlapping segments. Periods may touch at an endpoint.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "Vec<Segment>", into = "Vec<Segment>")]
pub struct PiecewiseModel {
    segments: Vec<Segment>,
}

impl PiecewiseModel {
    pub fn new(segments: Vec<Segment>) -> Result<Self> {
        if segments.is_empty() {
            return Err(Error::InvalidParameter("model has no segments".into()));
        }
        for s in &segments {
            Segment::new(s.kind, s.t_start, s.t_end, s.a, s.b)?;
        }
        check_ordered(segments.iter().map(|s| (s.t_start, s.t_end)))?;
        Ok(Self { segments })
    }

    pub fn segments(&self) -> &[Segment] {
        &self.segments
    }
}

impl TryFrom<Vec<Segment>> for PiecewiseModel {
    type Error = Error;

    fn try_from(segments: Vec<Segment>) -> Result<Self> {
        Self::new(segments)
    }
}

impl From<PiecewiseModel> for Vec<Segment> {
    fn from(m: PiecewiseModel) -> Self {
        m.segments
    }
}

fn check_ordered(ranges: impl Iterator<Item = (f64, f64)>) -> Result<()> {
    let mut prev: Option<(f64, f64)> = None;
    for (start, end) in ranges {
        if let Some((ps, pe)) = prev {
            if start < pe {
                return Err(Error::InvalidParameter(format!(
                    "period [{start}, {end}] overlaps or precedes [{ps}, {pe}]"
                )));
            }
        }
        prev = Some((start, end));
    }
    Ok(())
}

pub fn fit_segment(
    series: &PopulationSeries,
    t_start: f64,
    t_end: f64,
    kind: SegmentKind,
) -> Result<Segment> {
    let points: Vec<(f64, f64)> = series.within(t_start, t_end).collect();
    if points.len() < 2 {
        return Err(Error::TooFewPoints {
            needed: 2,
            got: points.len(),
        });
    }
    match kind {
        SegmentKind::Exponential => {
            let logged: Vec<(f64, f64)> = points.iter().map(|&(t, p)| (t, p.ln())).collect();
            let line = fit_line(&logged)?;
            Segment::new(kind, t_start, t_end, line.intercept.exp(), line.slope.exp())
        }
        SegmentKind::Linear => {
            let line = fit_line(&points)?;
            Segment::new(kind, t_start, t_end, line.intercept, line.slope)
        }
    }
}

pub fn fit_piecewise(series: &PopulationSeries, periods: &[Period]) -> Result<PiecewiseModel> {
    for p in periods {
        if !(p.t_start < p.t_end) {
            return Err(Error::InvalidParameter(format!(
                "period [{}, {}] is empty",
                p.t_start, p.t_end
            )));
        }
    }
    check_ordered(periods.iter().map(|p| (p.t_start, p.t_end)))?;
    let segments = periods
        .iter()
        .map(|p| fit_segment(series, p.t_start, p.t_end, p.kind))
        .collect::<Result<Vec<_>>>()?;
    PiecewiseModel::new(segments)
}
