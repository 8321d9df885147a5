//! Long-term logistic model `phi(t) = offset + K / (1 + A e^(-r t))`.
//!
//! `offset` is a caller-supplied lower bound (the value before growth
//! starts); `K`, `A` and `r` are fitted by least squares. With `t` in
//! calendar years `A` is astronomically large, so the simplex works on
//! `(ln K, r, ln A - r t_mean)`, which keeps the three coordinates on
//! comparable scales and removes most of the correlation between `A` and `r`.

use serde::{Deserialize, Serialize};

use super::DimensionSeries;
use crate::error::{Error, Result};
use crate::optim::{select_best, Minimum, NelderMead};
use crate::regress::fit_line;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct LogisticParams {
    #[serde(rename = "K")]
    pub k: f64,
    #[serde(rename = "A")]
    pub a: f64,
    pub r: f64,
    pub offset: f64,
}

impl LogisticParams {
    fn decay(&self, t: f64) -> f64 {
        (self.a.ln() - self.r * t).exp()
    }

    /// `K / (1 + A e^(-r t))`, without the offset.
    pub fn growth(&self, t: f64) -> f64 {
        self.k / (1.0 + self.decay(t))
    }

    pub fn value(&self, t: f64) -> f64 {
        self.offset + self.growth(t)
    }

    /// Right-hand side of the logistic equation, `r g (1 - g / K)` for the
    /// offset-free value `g`.
    pub fn rate(&self, t: f64) -> f64 {
        let g = self.growth(t);
        self.r * g * (1.0 - g / self.k)
    }
}

/// Logistic solution through `d0` at `t = 0`: `A = (K - d0) / d0`.
pub fn logistic_solution_from_initial(k: f64, r: f64, d0: f64) -> Result<LogisticParams> {
    if !(k > 0.0 && k.is_finite()) {
        return Err(Error::InvalidParameter(format!("carrying capacity {k} must be positive")));
    }
    if !(d0 > 0.0 && d0 < k) {
        return Err(Error::InvalidParameter(format!(
            "initial value {d0} must lie strictly between 0 and K = {k}"
        )));
    }
    if !r.is_finite() {
        return Err(Error::InvalidParameter("growth rate must be finite".into()));
    }
    Ok(LogisticParams {
        k,
        a: (k - d0) / d0,
        r,
        offset: 0.0,
    })
}

/// Logistic-map form `x <- b (1 - x) x` of a logistic model.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct DifferenceForm {
    /// `r + 1`.
    pub b: f64,
    /// `r / ((r + 1) K)`; the map state is `x = state_scale * g` for the
    /// offset-free value `g`.
    pub state_scale: f64,
}

impl DifferenceForm {
    pub fn state(&self, growth_value: f64) -> f64 {
        self.state_scale * growth_value
    }
}

pub fn logistic_to_difference(p: &LogisticParams) -> Result<DifferenceForm> {
    if !(p.k > 0.0) {
        return Err(Error::InvalidParameter(format!(
            "carrying capacity {} must be positive",
            p.k
        )));
    }
    Ok(DifferenceForm {
        b: p.r + 1.0,
        state_scale: p.r / ((p.r + 1.0) * p.k),
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct LogisticFitConfig {
    /// Iteration cap for each simplex run.
    pub max_iterations: usize,
}

impl Default for LogisticFitConfig {
    fn default() -> Self {
        Self {
            max_iterations: 20_000,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct LogisticFit {
    pub params: LogisticParams,
    pub rmse: f64,
    pub converged: bool,
}

/// Multipliers on `max(d) - offset` used as initial carrying capacities. The
/// first is the primary linearised start.
const CAPACITY_STARTS: [f64; 6] = [1.05, 1.01, 1.2, 1.5, 2.0, 3.0];

pub fn fit_logistic(
    series: &DimensionSeries,
    offset: f64,
    config: &LogisticFitConfig,
) -> Result<LogisticFit> {
    series.require(4)?;
    if !offset.is_finite() {
        return Err(Error::InvalidParameter("offset must be finite".into()));
    }
    if let Some(&(t, d)) = series.samples().iter().find(|s| s.1 <= offset) {
        return Err(Error::InvalidSeries(format!(
            "sample ({t}, {d}) does not exceed the offset {offset}"
        )));
    }
    if config.max_iterations == 0 {
        return Err(Error::InvalidParameter("max_iterations must be positive".into()));
    }

    let t_mean = series.mean_time();
    let lifted: Vec<(f64, f64)> = series
        .samples()
        .iter()
        .map(|&(t, d)| (t, d - offset))
        .collect();
    let top = lifted.iter().fold(0.0f64, |m, s| m.max(s.1));

    // z = [ln K, r, ln A - r t_mean]
    let sse = |z: &[f64]| -> f64 {
        let k = z[0].exp();
        lifted
            .iter()
            .map(|&(t, g)| {
                let e = k / (1.0 + (z[2] - z[1] * (t - t_mean)).exp()) - g;
                e * e
            })
            .sum()
    };

    let nm = NelderMead {
        max_iterations: config.max_iterations,
        f_tol: 1e-30,
        ..NelderMead::default()
    };
    let runs: Vec<Minimum> = CAPACITY_STARTS
        .iter()
        .map(|m| {
            let k0 = m * top;
            let line = fit_line(
                &lifted
                    .iter()
                    .map(|&(t, g)| (t - t_mean, (k0 / g - 1.0).ln()))
                    .collect::<Vec<_>>(),
            )
            .expect("sample times are distinct");
            let r0 = -line.slope;
            let z0 = [k0.ln(), r0, line.intercept];
            let steps = [0.05, 0.1 * r0.abs() + 1e-3, 0.1];
            nm.minimize(sse, &z0, &steps)
        })
        .collect();
    let values: Vec<f64> = runs.iter().map(|m| m.value).collect();
    let best = select_best(&values)
        .map(|i| &runs[i])
        .ok_or_else(|| Error::Optimisation("logistic objective is non-finite".into()))?;

    let z = &best.x;
    let params = LogisticParams {
        k: z[0].exp(),
        a: (z[2] + z[1] * t_mean).exp(),
        r: z[1],
        offset,
    };
    let n = series.len() as f64;
    let rmse = (series
        .samples()
        .iter()
        .map(|&(t, d)| (params.value(t) - d).powi(2))
        .sum::<f64>()
        / n)
        .sqrt();
    // An exact fit on a ridge of equivalent parameters never shrinks the
    // simplex; that is still a fit.
    let exact = rmse <= 1e-12 * top.max(1.0);
    if !best.converged && !exact {
        return Err(Error::Optimisation(format!(
            "logistic fit did not converge within {} iterations (rmse {rmse})",
            config.max_iterations
        )));
    }
    if !(params.k.is_finite() && params.a.is_finite() && params.a > 0.0 && params.r.is_finite()) {
        return Err(Error::Optimisation(format!(
            "logistic fit left the representable range: {params:?}"
        )));
    }
    Ok(LogisticFit {
        params,
        rmse,
        converged: best.converged,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    const YEARS: [f64; 8] = [1900.0, 1915.0, 1924.0, 1935.0, 1956.0, 1986.0, 2006.0, 2013.0];

    fn printed_params() -> LogisticParams {
        LogisticParams {
            k: 0.699952,
            a: 2.07022e40,
            r: 0.049432,
            offset: 1.0,
        }
    }

    fn sample(p: &LogisticParams, years: &[f64]) -> DimensionSeries {
        DimensionSeries::new(years.iter().map(|&t| (t, p.value(t))).collect()).unwrap()
    }

    #[test]
    fn initial_value_examples() {
        assert_eq!(logistic_solution_from_initial(2.0, 1.0, 1.0).unwrap().a, 1.0);
        assert_eq!(logistic_solution_from_initial(1.0, 0.5, 0.25).unwrap().a, 3.0);
        assert!(logistic_solution_from_initial(1.0, 0.5, 1.0).is_err());
        assert!(logistic_solution_from_initial(1.0, 0.5, 0.0).is_err());
        let p = logistic_solution_from_initial(1.0, 0.5, 0.25).unwrap();
        assert!((p.value(0.0) - 0.25).abs() < 1e-15);
    }

    #[test]
    fn difference_form() {
        let mut p = printed_params();
        let f = logistic_to_difference(&p).unwrap();
        assert_eq!(f.b, p.r + 1.0);
        assert!((f.b - 1.049432).abs() < 1e-15);
        p.r = 0.0;
        assert_eq!(logistic_to_difference(&p).unwrap().b, 1.0);
        p.r = 2.0;
        let f = logistic_to_difference(&p).unwrap();
        assert_eq!(f.b, 3.0);
        assert!((f.state(p.k) - 2.0 / 3.0).abs() < 1e-15);
        p.k = 0.0;
        assert!(logistic_to_difference(&p).is_err());
    }

    #[test]
    fn recovers_printed_parameters() {
        let truth = printed_params();
        let fit = fit_logistic(&sample(&truth, &YEARS), 1.0, &LogisticFitConfig::default())
            .unwrap();
        assert!((fit.params.k / truth.k - 1.0).abs() < 0.01, "{:?}", fit.params);
        assert!((fit.params.r / truth.r - 1.0).abs() < 0.02, "{:?}", fit.params);
        assert!(fit.rmse < 1e-6, "rmse {}", fit.rmse);
    }

    #[test]
    fn recovers_parameter_sweep() {
        for &(k, r) in &[(0.3f64, 0.02f64), (0.5, 0.05), (1.0, 0.2), (0.7, 0.1), (0.9, 0.03)] {
            let t_mid = 1950.0;
            let truth = LogisticParams {
                k,
                a: (r * t_mid).exp(),
                r,
                offset: 1.0,
            };
            let span = 3.0 / r;
            let years: Vec<f64> = (0..10)
                .map(|i| t_mid - 0.5 * span + span * i as f64 / 9.0)
                .collect();
            let fit =
                fit_logistic(&sample(&truth, &years), 1.0, &LogisticFitConfig::default()).unwrap();
            assert!((fit.params.k / k - 1.0).abs() < 0.01, "{k} {r}: {:?}", fit.params);
            assert!((fit.params.r / r - 1.0).abs() < 0.02, "{k} {r}: {:?}", fit.params);
        }
    }

    #[test]
    fn flat_series_does_not_crash() {
        let s = DimensionSeries::new((0..6).map(|i| (1950.0 + 10.0 * i as f64, 1.35)).collect())
            .unwrap();
        match fit_logistic(&s, 1.0, &LogisticFitConfig::default()) {
            Ok(fit) => assert!(fit.rmse <= 1e-6, "{fit:?}"),
            Err(Error::Optimisation(_)) => {}
            Err(e) => panic!("unexpected error {e}"),
        }
    }

    #[test]
    fn samples_below_offset_rejected() {
        let s = DimensionSeries::new(vec![(1.0, 1.2), (2.0, 0.9), (3.0, 1.4), (4.0, 1.5)]).unwrap();
        assert!(matches!(
            fit_logistic(&s, 1.0, &LogisticFitConfig::default()),
            Err(Error::InvalidSeries(_))
        ));
        let short = DimensionSeries::new(vec![(1.0, 1.2), (2.0, 1.3)]).unwrap();
        assert!(fit_logistic(&short, 1.0, &LogisticFitConfig::default()).is_err());
    }

    #[test]
    fn closed_form_satisfies_its_ode() {
        let p = LogisticParams {
            k: 0.8,
            a: 5.0,
            r: 0.3,
            offset: 1.0,
        };
        for t in [-5.0, 0.0, 2.0, 7.5] {
            let h = 1e-4;
            let fd = (p.value(t + h) - p.value(t - h)) / (2.0 * h);
            assert!((fd - p.rate(t)).abs() <= 1e-6 * p.rate(t).abs());
        }
    }
}
