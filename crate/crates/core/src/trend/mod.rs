//! Models for how a dimension evolves over time.
//!
//! A [`DimensionSeries`] is the observed trace of a changing fractal: one
//! dimension estimate per calendar year. Two models are fitted to it:
//!
//! * a short-term difference model, linear trend plus a growing oscillation
//!   (`difference`), fitted by minimising the L1 error;
//! * a long-term logistic model with a fixed lower bound (`logistic`), fitted
//!   by least squares.
//!
//! The logistic model maps to the logistic map `x <- b (1 - x) x` with
//! `b = r + 1`, whose behaviour is classified and simulated in `stability`.

mod difference;
mod logistic;
mod stability;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

pub use difference::{
    difference_step, eval_difference_model, fit_difference_model, DifferenceFit,
    DifferenceFitConfig, DifferenceModelParams,
};
pub use logistic::{
    fit_logistic, logistic_solution_from_initial, logistic_to_difference, DifferenceForm,
    LogisticFit, LogisticFitConfig, LogisticParams,
};
pub use stability::{
    analyze_orbit, classify_stability, is_monotone, simulate_difference, OrbitBehavior,
    StabilityClass,
};

/// Time-indexed dimension samples, `t` in calendar years.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DimensionSeries {
    samples: Vec<(f64, f64)>,
}

impl DimensionSeries {
    pub fn new(samples: Vec<(f64, f64)>) -> Result<Self> {
        if samples
            .iter()
            .any(|(t, d)| !t.is_finite() || !d.is_finite())
        {
            return Err(Error::InvalidSeries("non-finite sample".into()));
        }
        if !samples.windows(2).all(|w| w[0].0 < w[1].0) {
            return Err(Error::InvalidSeries(
                "sample times must be strictly increasing".into(),
            ));
        }
        Ok(Self { samples })
    }

    pub fn samples(&self) -> &[(f64, f64)] {
        &self.samples
    }

    pub fn len(&self) -> usize {
        self.samples.len()
    }

    pub fn is_empty(&self) -> bool {
        self.samples.is_empty()
    }

    pub fn times(&self) -> impl Iterator<Item = f64> + '_ {
        self.samples.iter().map(|s| s.0)
    }

    pub fn values(&self) -> impl Iterator<Item = f64> + '_ {
        self.samples.iter().map(|s| s.1)
    }

    pub(crate) fn require(&self, needed: usize) -> Result<()> {
        if self.samples.len() < needed {
            Err(Error::TooFewPoints {
                needed,
                got: self.samples.len(),
            })
        } else {
            Ok(())
        }
    }

    pub(crate) fn mean_time(&self) -> f64 {
        self.times().sum::<f64>() / self.samples.len() as f64
    }
}
