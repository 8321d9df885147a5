//! Derivative-free minimisation with the Nelder–Mead simplex method.
//!
//! Used by both trend fits. The implementation is fully deterministic: for a
//! given objective, start point and step vector it always visits the same
//! points. Non-finite objective values are treated as `+inf`, which lets
//! callers express box constraints by returning `f64::INFINITY`.

/// Tuning for one simplex run.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct NelderMead {
    pub max_iterations: usize,
    /// Absolute tolerance on the spread of objective values over the simplex.
    pub f_tol: f64,
    /// Tolerance on vertex distance from the best vertex, as a fraction of the
    /// initial step in each coordinate.
    pub x_tol: f64,
    /// Extra restarts from the best point after convergence.
    pub restarts: usize,
}

impl Default for NelderMead {
    fn default() -> Self {
        Self {
            max_iterations: 20_000,
            f_tol: 1e-15,
            x_tol: 1e-10,
            restarts: 8,
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Minimum {
    pub x: Vec<f64>,
    pub value: f64,
    pub iterations: usize,
    pub evaluations: usize,
    pub converged: bool,
}

const REFLECT: f64 = 1.0;
const EXPAND: f64 = 2.0;
const CONTRACT: f64 = 0.5;
const SHRINK: f64 = 0.5;

fn sanitize(v: f64) -> f64 {
    if v.is_nan() {
        f64::INFINITY
    } else {
        v
    }
}

impl NelderMead {
    /// Runs the simplex from `x0`, restarting from the best vertex until a
    /// restart no longer improves the objective or `restarts` is exhausted.
    pub fn minimize<F>(&self, f: F, x0: &[f64], step: &[f64]) -> Minimum
    where
        F: Fn(&[f64]) -> f64,
    {
        let mut best = self.run_once(&f, x0, step);
        for _ in 0..self.restarts {
            if best.iterations >= self.max_iterations {
                break;
            }
            let next = self.run_once(&f, &best.x, step);
            let improved = next.value < best.value;
            let gain = best.value - next.value;
            let iterations = best.iterations + next.iterations;
            let evaluations = best.evaluations + next.evaluations;
            if improved {
                best = Minimum {
                    iterations,
                    evaluations,
                    ..next
                };
            } else {
                best.iterations = iterations;
                best.evaluations = evaluations;
                best.converged &= next.converged;
            }
            if !improved || gain <= self.f_tol {
                break;
            }
        }
        best
    }

    fn run_once<F>(&self, f: &F, x0: &[f64], step: &[f64]) -> Minimum
    where
        F: Fn(&[f64]) -> f64,
    {
        let n = x0.len();
        assert_eq!(step.len(), n, "step length must match dimension");
        let scale: Vec<f64> = step
            .iter()
            .map(|s| if *s == 0.0 { 1.0 } else { s.abs() })
            .collect();
        let mut evaluations = 0usize;
        let mut eval = |x: &[f64]| {
            evaluations += 1;
            sanitize(f(x))
        };

        let mut simplex: Vec<Vec<f64>> = Vec::with_capacity(n + 1);
        simplex.push(x0.to_vec());
        for i in 0..n {
            let mut v = x0.to_vec();
            v[i] += if step[i] == 0.0 { 1e-8 } else { step[i] };
            simplex.push(v);
        }
        let mut values: Vec<f64> = simplex.iter().map(|v| eval(v)).collect();

        let mut iterations = 0;
        let mut converged = false;
        let mut order: Vec<usize> = (0..=n).collect();
        while iterations < self.max_iterations {
            order.sort_by(|&a, &b| values[a].total_cmp(&values[b]).then(a.cmp(&b)));
            let (best, worst, second) = (order[0], order[n], order[n.saturating_sub(1)]);

            let spread = values[worst] - values[best];
            let spread_ok = spread <= self.f_tol || (values[worst] == values[best]);
            let size_ok = simplex.iter().all(|v| {
                v.iter()
                    .zip(&simplex[best])
                    .zip(&scale)
                    .all(|((a, b), s)| (a - b).abs() <= self.x_tol * s)
            });
            if spread_ok && size_ok {
                converged = true;
                break;
            }
            iterations += 1;

            let mut centroid = vec![0.0; n];
            for &i in &order[..n] {
                for (c, x) in centroid.iter_mut().zip(&simplex[i]) {
                    *c += x / n as f64;
                }
            }
            let along = |t: f64| -> Vec<f64> {
                centroid
                    .iter()
                    .zip(&simplex[worst])
                    .map(|(c, w)| c + t * (c - w))
                    .collect()
            };

            let xr = along(REFLECT);
            let fr = eval(&xr);
            if fr < values[best] {
                let xe = along(REFLECT * EXPAND);
                let fe = eval(&xe);
                if fe < fr {
                    simplex[worst] = xe;
                    values[worst] = fe;
                } else {
                    simplex[worst] = xr;
                    values[worst] = fr;
                }
                continue;
            }
            if fr < values[second] {
                simplex[worst] = xr;
                values[worst] = fr;
                continue;
            }
            let (xc, fc) = if fr < values[worst] {
                let xc = along(REFLECT * CONTRACT);
                let fc = eval(&xc);
                (xc, fc)
            } else {
                let xc = along(-CONTRACT);
                let fc = eval(&xc);
                (xc, fc)
            };
            if fc < values[worst].min(fr) {
                simplex[worst] = xc;
                values[worst] = fc;
                continue;
            }
            let anchor = simplex[best].clone();
            for &i in &order[1..] {
                let v: Vec<f64> = anchor
                    .iter()
                    .zip(&simplex[i])
                    .map(|(a, x)| a + SHRINK * (x - a))
                    .collect();
                values[i] = eval(&v);
                simplex[i] = v;
            }
        }

        let best = (0..=n)
            .min_by(|&a, &b| values[a].total_cmp(&values[b]).then(a.cmp(&b)))
            .expect("simplex is never empty");
        Minimum {
            x: simplex[best].clone(),
            value: values[best],
            iterations,
            evaluations,
            converged,
        }
    }
}

/// Index of the smallest value, ties going to the lowest index. Non-finite
/// values lose to any finite one.
pub fn select_best<'a, I>(values: I) -> Option<usize>
where
    I: IntoIterator<Item = &'a f64>,
{
    values
        .into_iter()
        .enumerate()
        .filter(|(_, v)| v.is_finite())
        .min_by(|a, b| a.1.total_cmp(b.1).then(a.0.cmp(&b.0)))
        .map(|(i, _)| i)
}
