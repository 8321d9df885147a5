//! Short-term model: linear trend plus an oscillation whose amplitude grows
//! quadratically with distance from `c3`,
//!
//! ```text
//! phi(t) = c1 t + c2 + (t - c3)^2 sin(t - c4) / c5
//! ```
//!
//! fitted by minimising the L1 error over the sample times.
//!
//! For a fixed `c3` the model is linear in `(c1, c2, cos c4 / c5, sin c4 / c5)`
//! because `sin(t - c4) = sin t cos c4 - cos t sin c4`. The fit exploits this:
//! each start picks `c3`, refines it by a one-dimensional simplex over the
//! least-squares residual of the remaining linear problem, and then polishes
//! all five coordinates on the L1 objective with a five-dimensional simplex.

use nalgebra::{DMatrix, DVector};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::DimensionSeries;
use crate::error::{Error, Result};
use crate::optim::{select_best, NelderMead};

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct DifferenceModelParams {
    pub c1: f64,
    pub c2: f64,
    pub c3: f64,
    pub c4: f64,
    pub c5: f64,
}

pub fn eval_difference_model(p: &DifferenceModelParams, t: f64) -> f64 {
    p.c1 * t + p.c2 + (t - p.c3).powi(2) * (t - p.c4).sin() / p.c5
}

/// `phi(t + 1) - phi(t)` in expanded form:
/// `c1 + ((t + 1 - c3)^2 sin(t + 1 - c4) - (t - c3)^2 sin(t - c4)) / c5`.
pub fn difference_step(p: &DifferenceModelParams, t: f64) -> f64 {
    let ahead = (t + 1.0 - p.c3).powi(2) * (t + 1.0 - p.c4).sin();
    let here = (t - p.c3).powi(2) * (t - p.c4).sin();
    p.c1 + (ahead - here) / p.c5
}

impl DifferenceModelParams {
    pub fn eval(&self, t: f64) -> f64 {
        eval_difference_model(self, t)
    }

    pub fn step(&self, t: f64) -> f64 {
        difference_step(self, t)
    }

    /// Sum of absolute residuals over the series.
    pub fn l1_error(&self, series: &DimensionSeries) -> f64 {
        series
            .samples()
            .iter()
            .map(|&(t, d)| (self.eval(t) - d).abs())
            .sum()
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct DifferenceFitConfig {
    /// Seeded random starts added to the fixed grid of `c3` starts.
    pub starts: usize,
    /// Iteration cap for each simplex run.
    pub max_iterations: usize,
    pub seed: u64,
}

impl Default for DifferenceFitConfig {
    fn default() -> Self {
        Self {
            starts: 16,
            max_iterations: 20_000,
            seed: 20_220_000,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DifferenceFit {
    pub params: DifferenceModelParams,
    /// L1 objective evaluated at `params`.
    pub objective: f64,
    /// Index of the winning start.
    pub start_index: usize,
    pub starts_tried: usize,
}

/// Largest `c5` reported when the fitted oscillation vanishes.
const MAX_C5: f64 = 1e300;

/// Fixed start offsets for `c3`, in units of the series span from its mean time.
const GRID_OFFSETS: [f64; 21] = [
    0.0, 0.25, -0.25, 0.5, -0.5, 1.0, -1.0, 2.0, -2.0, 4.0, -4.0, 8.0, -8.0, 16.0, -16.0, 32.0,
    -32.0, 64.0, -64.0, 128.0, -128.0,
];

/// Samples with trigonometric terms precomputed.
struct Prepared {
    t: Vec<f64>,
    d: Vec<f64>,
    sin_t: Vec<f64>,
    cos_t: Vec<f64>,
    t_mean: f64,
}

/// Internal coordinates: `[c1, level, c3, u, v]` with
/// `phi(t) = c1 (t - t_mean) + level + ((t - c3) / scale)^2 (u sin t - v cos t)`.
struct Reparam {
    scale: f64,
}

impl Prepared {
    fn model(&self, re: &Reparam, z: &[f64], i: usize) -> f64 {
        let q = ((self.t[i] - z[2]) / re.scale).powi(2);
        z[0] * (self.t[i] - self.t_mean) + z[1] + q * (z[3] * self.sin_t[i] - z[4] * self.cos_t[i])
    }

    fn l1(&self, re: &Reparam, z: &[f64]) -> f64 {
        (0..self.t.len())
            .map(|i| (self.model(re, z, i) - self.d[i]).abs())
            .sum()
    }

    /// Least-squares solve of the linear coordinates for fixed `c3`.
    fn project(&self, re: &Reparam, c3: f64) -> Option<([f64; 5], f64)> {
        let n = self.t.len();
        let a = DMatrix::from_fn(n, 4, |i, j| {
            let q = ((self.t[i] - c3) / re.scale).powi(2);
            match j {
                0 => self.t[i] - self.t_mean,
                1 => 1.0,
                2 => q * self.sin_t[i],
                _ => -q * self.cos_t[i],
            }
        });
        let b = DVector::from_column_slice(&self.d);
        let sol = a.clone().svd(true, true).solve(&b, 1e-13).ok()?;
        let resid = &a * &sol - &b;
        let ssr = resid.norm_squared();
        ssr.is_finite()
            .then(|| ([sol[0], sol[1], c3, sol[2], sol[3]], ssr))
    }

    fn to_params(&self, re: &Reparam, z: &[f64]) -> DifferenceModelParams {
        let amp = z[3].hypot(z[4]);
        let (c4, c5) = if amp > 0.0 {
            (z[4].atan2(z[3]), (re.scale * re.scale / amp).min(MAX_C5))
        } else {
            (0.0, MAX_C5)
        };
        DifferenceModelParams {
            c1: z[0],
            c2: z[1] - z[0] * self.t_mean,
            c3: z[2],
            c4,
            c5,
        }
    }
}

pub fn fit_difference_model(
    series: &DimensionSeries,
    config: &DifferenceFitConfig,
) -> Result<DifferenceFit> {
    series.require(6)?;
    if config.max_iterations == 0 {
        return Err(Error::InvalidParameter("max_iterations must be positive".into()));
    }
    let prep = Prepared {
        t: series.times().collect(),
        d: series.values().collect(),
        sin_t: series.times().map(f64::sin).collect(),
        cos_t: series.times().map(f64::cos).collect(),
        t_mean: series.mean_time(),
    };
    let (t_min, t_max) = (prep.t[0], prep.t[prep.t.len() - 1]);
    let span = (t_max - t_min).max(1.0);
    let d_scale = prep.d.iter().fold(0.0f64, |m, d| m.max(d.abs())).max(1e-12);

    let mut starts: Vec<f64> = GRID_OFFSETS
        .iter()
        .map(|o| prep.t_mean + o * span)
        .collect();
    let mut rng = ChaCha8Rng::seed_from_u64(config.seed);
    for _ in 0..config.starts {
        let magnitude = 10f64.powf(rng.random_range(-1.0..2.5)) * span;
        let sign = if rng.random_bool(0.5) { 1.0 } else { -1.0 };
        starts.push(prep.t_mean + sign * magnitude);
    }

    let nm = NelderMead {
        max_iterations: config.max_iterations,
        ..NelderMead::default()
    };
    let candidates: Vec<Option<DifferenceModelParams>> = starts
        .par_iter()
        .map(|&c3_start| {
            let re = Reparam {
                scale: span + (c3_start - prep.t_mean).abs(),
            };
            let ssr = |c3: f64| prep.project(&re, c3).map_or(f64::INFINITY, |(_, s)| s);
            let c3 = nm
                .minimize(|x: &[f64]| ssr(x[0]), &[c3_start], &[0.1 * span])
                .x[0];
            let (z0, _) = prep.project(&re, c3)?;
            let amp = z0[3].hypot(z0[4]);
            let steps = [
                (0.1 * z0[0].abs()).max(1e-3 * d_scale / span),
                1e-3 * d_scale,
                0.1 * span,
                (0.1 * amp).max(1e-6 * d_scale),
                (0.1 * amp).max(1e-6 * d_scale),
            ];
            let polished = nm.minimize(|z: &[f64]| prep.l1(&re, z), &z0, &steps);
            let z = if polished.value <= prep.l1(&re, &z0) {
                polished.x
            } else {
                z0.to_vec()
            };
            Some(prep.to_params(&re, &z))
        })
        .collect();

    let objectives: Vec<f64> = candidates
        .iter()
        .map(|c| c.map_or(f64::INFINITY, |p| p.l1_error(series)))
        .collect();
    let best = select_best(&objectives).ok_or_else(|| {
        Error::Optimisation("difference model objective is non-finite at every start".into())
    })?;
    Ok(DifferenceFit {
        params: candidates[best].expect("finite objective implies a candidate"),
        objective: objectives[best],
        start_index: best,
        starts_tried: starts.len(),
    })
}
