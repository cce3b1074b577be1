//! Quadrature of 2π-periodic integrands over the full circle.

use std::f64::consts::TAU;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::exec::{self, Strategy};

pub const DEFAULT_SAMPLES: usize = 4096;
pub const DEFAULT_TOLERANCE: f64 = 1e-8;
pub const MAX_REFINEMENTS: usize = 8;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Rule {
    #[default]
    Simpson,
    Romberg,
}

/// Grid size, stopping tolerance and rule for [`integrate_circle`].
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct QuadratureSpec {
    samples: usize,
    tolerance: f64,
    rule: Rule,
    #[serde(default)]
    strategy: Strategy,
}

impl Default for QuadratureSpec {
    fn default() -> Self {
        Self {
            samples: DEFAULT_SAMPLES,
            tolerance: DEFAULT_TOLERANCE,
            rule: Rule::Simpson,
            strategy: Strategy::default(),
        }
    }
}

impl QuadratureSpec {
    /// `samples` is the number of subintervals of `[0, 2π]`; it must be even
    /// and at least 16.
    pub fn new(samples: usize, tolerance: f64, rule: Rule) -> Result<Self> {
        if samples < 16 || !samples.is_multiple_of(2) {
            return Err(Error::Config(format!(
                "sample count must be an even integer >= 16, got {samples}"
            )));
        }
        if !(tolerance > 0.0 && tolerance.is_finite()) {
            return Err(Error::Config(format!("tolerance must be > 0, got {tolerance}")));
        }
        Ok(Self {
            samples,
            tolerance,
            rule,
            strategy: Strategy::default(),
        })
    }

    pub fn with_strategy(mut self, strategy: Strategy) -> Self {
        self.strategy = strategy;
        self
    }

    pub fn samples(&self) -> usize {
        self.samples
    }

    pub fn tolerance(&self) -> f64 {
        self.tolerance
    }

    pub fn rule(&self) -> Rule {
        self.rule
    }

    pub fn strategy(&self) -> Strategy {
        self.strategy
    }
}

/// Outcome of a converged quadrature, with the samples of the finest grid.
#[derive(Debug, Clone, PartialEq)]
pub struct Quadrature {
    pub value: f64,
    /// Previous estimate; `|value - previous| < tolerance`.
    pub previous: f64,
    /// Number of subintervals of the finest grid.
    pub intervals: usize,
    /// `(alpha, f(alpha))` on the finest grid, `alpha = 2πj/intervals`,
    /// `j = 0..=intervals`.
    pub samples: Vec<(f64, f64)>,
}

pub fn grid(intervals: usize) -> Vec<f64> {
    (0..=intervals)
        .map(|j| TAU * j as f64 / intervals as f64)
        .collect()
}

fn trapezoid(values: &[f64]) -> f64 {
    let n = values.len() - 1;
    let h = TAU / n as f64;
    let inner: f64 = values[1..n].iter().sum();
    h * (inner + 0.5 * (values[0] + values[n]))
}

fn simpson(values: &[f64]) -> f64 {
    let n = values.len() - 1;
    debug_assert!(n.is_multiple_of(2));
    let h = TAU / n as f64;
    let (mut odd, mut even) = (0.0, 0.0);
    for (j, v) in values.iter().enumerate().take(n).skip(1) {
        if j % 2 == 1 {
            odd += v;
        } else {
            even += v;
        }
    }
    h / 3.0 * (values[0] + values[n] + 4.0 * odd + 2.0 * even)
}

/// Fills in midpoints: `coarse` has `n + 1` samples, the result `2n + 1`.
fn refine<F>(coarse: &[f64], strategy: Strategy, f: &F) -> Result<Vec<f64>>
where
    F: Fn(f64) -> Result<f64> + Sync,
{
    let n = coarse.len() - 1;
    let mids: Vec<f64> = (0..n)
        .map(|j| TAU * (2 * j + 1) as f64 / (2 * n) as f64)
        .collect();
    let new = exec::try_map(strategy, &mids, f)?;
    let mut out = Vec::with_capacity(2 * n + 1);
    for j in 0..n {
        out.push(coarse[j]);
        out.push(new[j]);
    }
    out.push(coarse[n]);
    Ok(out)
}

/// `∫₀^{2π} f(α) dα` for a fallible integrand.
///
/// Simpson: the grid is doubled until two successive composite estimates
/// differ by less than the tolerance, then one Richardson step is applied.
/// Romberg: the trapezoid sequence on the same grids is extrapolated and the
/// last two diagonal entries are compared.
pub fn try_integrate_circle<F>(f: F, spec: &QuadratureSpec) -> Result<Quadrature>
where
    F: Fn(f64) -> Result<f64> + Sync,
{
    let n0 = spec.samples;
    let first = exec::try_map(spec.strategy, &grid(n0), &f)?;
    let mut values = refine(&first, spec.strategy, &f)?;
    let mut romberg: Vec<Vec<f64>> = vec![vec![trapezoid(&first)]];
    let mut coarse_est = match spec.rule {
        Rule::Simpson => simpson(&first),
        Rule::Romberg => romberg[0][0],
    };
    for level in 1..=MAX_REFINEMENTS {
        let (fine_est, value) = match spec.rule {
            Rule::Simpson => {
                let s = simpson(&values);
                (s, s + (s - coarse_est) / 15.0)
            }
            Rule::Romberg => {
                let mut row = vec![trapezoid(&values)];
                let prev = &romberg[level - 1];
                for k in 1..=level {
                    let p = 4f64.powi(k as i32);
                    row.push(row[k - 1] + (row[k - 1] - prev[k - 1]) / (p - 1.0));
                }
                let d = row[level];
                romberg.push(row);
                (d, d)
            }
        };
        if (fine_est - coarse_est).abs() < spec.tolerance {
            let intervals = values.len() - 1;
            let samples = grid(intervals).into_iter().zip(values).collect();
            return Ok(Quadrature {
                value,
                previous: coarse_est,
                intervals,
                samples,
            });
        }
        if level == MAX_REFINEMENTS {
            return Err(Error::NonConvergence {
                levels: level,
                last: fine_est,
                previous: coarse_est,
            });
        }
        coarse_est = fine_est;
        values = refine(&values, spec.strategy, &f)?;
    }
    unreachable!("loop returns on the last level")
}

/// `∫₀^{2π} f(α) dα` for an infallible integrand.
pub fn integrate_circle<F>(f: F, spec: &QuadratureSpec) -> Result<f64>
where
    F: Fn(f64) -> f64 + Sync,
{
    try_integrate_circle(|x| Ok(f(x)), spec).map(|q| q.value)
}

/// Composite Simpson on a fixed grid of `intervals` subintervals, no
/// refinement. Used as a brute-force reference.
pub fn simpson_fixed<F>(f: F, intervals: usize, strategy: Strategy) -> Result<f64>
where
    F: Fn(f64) -> Result<f64> + Sync,
{
    if intervals < 2 || !intervals.is_multiple_of(2) {
        return Err(Error::Config(format!("Simpson needs an even interval count, got {intervals}")));
    }
    let values = exec::try_map(strategy, &grid(intervals), f)?;
    Ok(simpson(&values))
}
