//! Behaviour of the logistic map `x <- b (1 - x) x`.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Stability band of the logistic map coefficient `b`.
///
/// | band              | class                     |
/// |-------------------|---------------------------|
/// | `(1, 2]`          | `LargeNeighborhoodStable` |
/// | `(2, 3)`          | `NearEquilibriumStable`   |
/// | `(3, 1 + sqrt 5)` | `PeriodTwoOscillation`    |
/// | `[1 + sqrt 5, ∞)` | `Unstable`                |
///
/// `b <= 1`, `b = 3` and NaN fall in none of the bands and map to `OutOfRange`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum StabilityClass {
    LargeNeighborhoodStable,
    NearEquilibriumStable,
    PeriodTwoOscillation,
    Unstable,
    OutOfRange,
}

pub fn classify_stability(b: f64) -> StabilityClass {
    let chaos_onset = 1.0 + 5f64.sqrt();
    if b > 1.0 && b <= 2.0 {
        StabilityClass::LargeNeighborhoodStable
    } else if b > 2.0 && b < 3.0 {
        StabilityClass::NearEquilibriumStable
    } else if b > 3.0 && b < chaos_onset {
        StabilityClass::PeriodTwoOscillation
    } else if b >= chaos_onset {
        StabilityClass::Unstable
    } else {
        StabilityClass::OutOfRange
    }
}

/// Iterates the map `steps` times from `x0`; the orbit includes `x0`.
pub fn simulate_difference(b: f64, x0: f64, steps: usize) -> Result<Vec<f64>> {
    if !(x0 > 0.0 && x0 < 1.0) {
        return Err(Error::InvalidParameter(format!("x0 = {x0} must lie in (0, 1)")));
    }
    if steps == 0 {
        return Err(Error::InvalidParameter("steps must be at least 1".into()));
    }
    if !b.is_finite() {
        return Err(Error::InvalidParameter("b must be finite".into()));
    }
    let mut orbit = Vec::with_capacity(steps + 1);
    let mut x = x0;
    orbit.push(x);
    for _ in 0..steps {
        x = b * (1.0 - x) * x;
        orbit.push(x);
    }
    Ok(orbit)
}

/// Long-run pattern read off the tail of an orbit.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "kebab-case")]
pub enum OrbitBehavior {
    FixedPoint { value: f64 },
    PeriodTwo { low: f64, high: f64 },
    Diverged,
    Irregular,
}

/// Number of trailing values inspected by [`analyze_orbit`].
const TAIL: usize = 16;

/// Classifies the last values of `orbit`: a fixed point if they agree within
/// `tol`, a period-2 cycle if alternate values agree within `tol` (and the two
/// phases differ by more than `tol`), diverged if any value left the real line
/// or grew past `1e6`.
pub fn analyze_orbit(orbit: &[f64], tol: f64) -> OrbitBehavior {
    if orbit.iter().any(|x| !x.is_finite() || x.abs() > 1e6) {
        return OrbitBehavior::Diverged;
    }
    if orbit.len() < TAIL {
        return OrbitBehavior::Irregular;
    }
    let tail = &orbit[orbit.len() - TAIL..];
    let within = |vals: &mut dyn Iterator<Item = f64>| {
        let (lo, hi) = vals.fold((f64::INFINITY, f64::NEG_INFINITY), |(lo, hi), v| {
            (lo.min(v), hi.max(v))
        });
        (hi - lo <= tol).then_some((lo + hi) / 2.0)
    };
    if let Some(value) = within(&mut tail.iter().copied()) {
        return OrbitBehavior::FixedPoint { value };
    }
    let even = within(&mut tail.iter().step_by(2).copied());
    let odd = within(&mut tail.iter().skip(1).step_by(2).copied());
    match (even, odd) {
        (Some(a), Some(b)) if (a - b).abs() > tol => OrbitBehavior::PeriodTwo {
            low: a.min(b),
            high: a.max(b),
        },
        _ => OrbitBehavior::Irregular,
    }
}

/// True when the orbit never changes direction.
pub fn is_monotone(orbit: &[f64]) -> bool {
    orbit.windows(2).all(|w| w[1] >= w[0]) || orbit.windows(2).all(|w| w[1] <= w[0])
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn bands() {
        use StabilityClass::*;
        assert_eq!(classify_stability(1.5), LargeNeighborhoodStable);
        assert_eq!(classify_stability(2.0), LargeNeighborhoodStable);
        assert_eq!(classify_stability(2.5), NearEquilibriumStable);
        assert_eq!(classify_stability(3.1), PeriodTwoOscillation);
        assert_eq!(classify_stability(3.0), OutOfRange);
        assert_eq!(classify_stability(1.0), OutOfRange);
        assert_eq!(classify_stability(0.5), OutOfRange);
        assert_eq!(classify_stability(1.0 + 5f64.sqrt()), Unstable);
        assert_eq!(classify_stability(f64::NAN), OutOfRange);
        assert_eq!(classify_stability(1.049432), LargeNeighborhoodStable);
    }

    #[test]
    fn converges_to_fixed_point() {
        let orbit = simulate_difference(1.5, 0.2, 500).unwrap();
        assert_eq!(orbit.len(), 501);
        match analyze_orbit(&orbit, 1e-6) {
            OrbitBehavior::FixedPoint { value } => assert!((value - 1.0 / 3.0).abs() < 1e-6),
            other => panic!("{other:?}"),
        }
    }

    #[test]
    fn period_two_cycle() {
        let orbit = simulate_difference(3.2, 0.3, 2000).unwrap();
        match analyze_orbit(&orbit, 1e-6) {
            OrbitBehavior::PeriodTwo { low, high } => {
                // Closed form of the 2-cycle: x = (b + 1 -+ sqrt((b - 3)(b + 1))) / (2b).
                let b: f64 = 3.2;
                let disc = ((b - 3.0) * (b + 1.0)).sqrt();
                assert!((low - (b + 1.0 - disc) / (2.0 * b)).abs() < 1e-6);
                assert!((high - (b + 1.0 + disc) / (2.0 * b)).abs() < 1e-6);
            }
            other => panic!("{other:?}"),
        }
    }

    #[test]
    fn slow_growth_converges_monotonically() {
        let b = 1.049432;
        let orbit = simulate_difference(b, 0.01, 10_000).unwrap();
        assert!(is_monotone(&orbit));
        let last = *orbit.last().unwrap();
        assert!((last - (1.0 - 1.0 / b)).abs() < 1e-9);
    }

    #[test]
    fn divergence_detected() {
        let orbit = simulate_difference(4.5, 0.3, 200).unwrap();
        assert_eq!(analyze_orbit(&orbit, 1e-6), OrbitBehavior::Diverged);
        let orbit = simulate_difference(4.0, 0.3, 2000).unwrap();
        assert_eq!(analyze_orbit(&orbit, 1e-6), OrbitBehavior::Irregular);
    }

    #[test]
    fn preconditions() {
        assert!(simulate_difference(2.0, 0.0, 10).is_err());
        assert!(simulate_difference(2.0, 1.0, 10).is_err());
        assert!(simulate_difference(2.0, 0.5, 0).is_err());
    }
}
