//! Angle charts on invariant graphs, the action variable, and the expansion of
//! the charts around rotation number 1/4.
//!
//! On the level `eta` the angle is
//! `theta(x) = Theta int_0^x dt / sqrt(D(t)^2 - (eta - gamma(t))^2)` with
//! `Theta` chosen so that `theta(1) = 1`. The integrand is analytic and
//! periodic, so it is stored as a truncated Fourier series and integrated
//! term by term.

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::dynamics::step;
use crate::error::{Error, Result};
use crate::geometry::{curve_for_rotation_number, InvariantCurve};
use crate::numerics::{unit_grid, SpectralSeries};
use crate::potentials::SurisParams;
use crate::scalar::{c, floor_tol, kahan_sum, Real};

/// Number of tabulated chart nodes.
pub const CHART_GRID: usize = 2048;

const FIT_MIN: usize = 64;
const FIT_MAX: usize = 1 << 16;

fn chart_density<T: Real>(p: &SurisParams<T>, eta: T, x: T) -> T {
    let l = p.level_coefficients(x);
    let s = eta - l.gamma;
    T::one() / (l.d * l.d - s * s).sqrt()
}

/// The normalized angle coordinate on one invariant graph.
#[derive(Debug, Clone)]
pub struct AngleChart<T> {
    params: SurisParams<T>,
    rho: T,
    curve: InvariantCurve<T>,
    density: SpectralSeries<T>,
    /// `int_0^1` of the unnormalized density.
    period: T,
    theta_table: Vec<T>,
}

impl<T: Real> AngleChart<T> {
    /// Chart on a given curve; `rho` is recorded as its label.
    pub fn from_curve(curve: InvariantCurve<T>, rho: T) -> Result<Self> {
        let p = *curve.params();
        let eta = curve.eta();
        let density = SpectralSeries::fit(|x| chart_density(&p, eta, x), floor_tol(c(1e-14)), FIT_MIN, FIT_MAX)
            .map_err(|_| Error::domain("angle chart", format!("density is not resolved at level {eta}")))?;
        let period = density.mean();
        if !(period > T::zero()) || !period.is_finite() {
            return Err(Error::domain("angle chart", "non-positive normalization"));
        }
        let mut chart = Self { params: p, rho, curve, density, period, theta_table: Vec::new() };
        chart.theta_table = unit_grid::<T>(CHART_GRID).into_iter().map(|x| chart.theta(x)).collect();
        Ok(chart)
    }

    pub fn params(&self) -> &SurisParams<T> {
        &self.params
    }

    pub fn rho(&self) -> T {
        self.rho
    }

    pub fn eta(&self) -> T {
        self.curve.eta()
    }

    pub fn curve(&self) -> &InvariantCurve<T> {
        &self.curve
    }

    /// Normalization constant `Theta`.
    pub fn normalization(&self) -> T {
        T::one() / self.period
    }

    /// Lifted angle: `theta(x + 1) = theta(x) + 1`.
    pub fn theta(&self, x: T) -> T {
        self.density.primitive(x) / self.period
    }

    pub fn theta_prime(&self, x: T) -> T {
        chart_density(&self.params, self.curve.eta(), x) / self.period
    }

    /// `theta` on the uniform grid of [`CHART_GRID`] nodes.
    pub fn theta_table(&self) -> &[T] {
        &self.theta_table
    }

    /// Inverse chart `x(theta)`, lifted.
    pub fn x_of_theta(&self, theta: T) -> T {
        let n = self.theta_table.len();
        let fl = theta.floor();
        let frac = theta - fl;
        // seed from the monotone table
        let j = self.theta_table.partition_point(|t| *t <= frac).max(1) - 1;
        let h = T::one() / T::from_int(n as i64);
        let t0 = self.theta_table[j];
        let t1 = if j + 1 < n { self.theta_table[j + 1] } else { T::one() };
        let mut x = T::from_int(j as i64) * h + h * (frac - t0) / (t1 - t0);
        for _ in 0..8 {
            let dx = (self.theta(x) - frac) / self.theta_prime(x);
            x -= dx;
            if dx.abs() <= T::epsilon() * c(4.0) {
                break;
            }
        }
        x + fl
    }

    /// `max |x(theta(x)) - x|` over `n` points.
    pub fn inverse_defect(&self, n: usize) -> T {
        unit_grid::<T>(n)
            .into_iter()
            .map(|x| (self.x_of_theta(self.theta(x)) - x).abs())
            .fold(T::zero(), T::max)
    }

    /// `max |theta(x_1) - theta(x_0) - rho|` (mod 1) over `n` base points on the curve.
    pub fn conjugacy_defect(&self, n: usize) -> Result<T> {
        let v = self.curve.potential();
        let mut worst = T::zero();
        for x0 in unit_grid::<T>(n) {
            let z1 = step(v, self.curve.point(x0)?);
            let d = self.theta(z1.x) - self.theta(x0) - self.rho;
            worst = worst.max((d - d.round()).abs());
        }
        Ok(worst)
    }

    /// `|theta(1) - theta(0) - 1|`.
    pub fn normalization_defect(&self) -> T {
        (self.theta(T::one()) - self.theta(T::zero()) - T::one()).abs()
    }
}

/// Chart on the main branch with rotation number `rho`.
pub fn build_chart<T: Real>(p: &SurisParams<T>, rho: T) -> Result<AngleChart<T>> {
    let curve = curve_for_rotation_number(p, rho, 1, 0)?;
    AngleChart::from_curve(curve, rho)
}

/// Charts for several rotation numbers, built in parallel.
pub fn build_charts<T: Real>(p: &SurisParams<T>, rhos: &[T]) -> Vec<Result<AngleChart<T>>> {
    rhos.par_iter().map(|&r| build_chart(p, r)).collect()
}

const ACTION_MIN_NODES: usize = 64;
const ACTION_MAX_NODES: usize = 1 << 16;

fn periodic_trapezoid<T: Real, F: Fn(T) -> Result<T>>(f: F, tol: T) -> Result<T> {
    let mut n = ACTION_MIN_NODES;
    let mut prev = kahan_sum(unit_grid::<T>(n).into_iter().map(&f).collect::<Result<Vec<_>>>()?) / T::from_int(n as i64);
    while n < ACTION_MAX_NODES {
        n *= 2;
        let h = T::one() / T::from_int(n as i64);
        // reuse the old nodes, add the midpoints
        let odd = (0..n / 2)
            .map(|j| f((T::from_int(2 * j as i64) + T::one()) * h))
            .collect::<Result<Vec<_>>>()?;
        let cur = c::<T>(0.5) * prev + kahan_sum(odd) * h;
        if (cur - prev).abs() <= tol * cur.abs().max(T::one()) {
            return Ok(cur);
        }
        prev = cur;
    }
    Err(Error::NoConvergence { iterations: n, residual: f64::NAN })
}

/// Action `Omega(eta) = (1/2pi) int_0^1 acos((gamma - eta) / D) dx` on the main branch.
pub fn action_variable<T: Real>(p: &SurisParams<T>, eta: T) -> Result<T> {
    let slack = c::<T>(1e-12).max(T::epsilon() * c(8.0));
    let integral = periodic_trapezoid(
        |x| {
            let l = p.level_coefficients(x);
            let arg = (l.gamma - eta) / l.d;
            if arg.abs() > T::one() + slack {
                return Err(Error::domain("action_variable", format!("acos argument {arg} at x = {x}")));
            }
            Ok(arg.max(-T::one()).min(T::one()).acos())
        },
        floor_tol(c(1e-14)),
    )?;
    Ok(integral / T::two_pi())
}

/// `d Omega / d eta = (1/2pi) int_0^1 dx / sqrt(D^2 - (gamma - eta)^2)`.
pub fn action_slope<T: Real>(p: &SurisParams<T>, eta: T) -> Result<T> {
    let integral = periodic_trapezoid(
        |x| {
            let v = chart_density(p, eta, x);
            if v.is_finite() {
                Ok(v)
            } else {
                Err(Error::domain("action_slope", "level touches the boundary"))
            }
        },
        floor_tol(c(1e-14)),
    )?;
    Ok(integral / T::two_pi())
}

/// `theta_{1/4}`, its first-order variation `u` in the rotation number, and the
/// second-order remainder `v` on sampled offsets.
#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(bound = "T: Real")]
pub struct ExpansionTerms<T> {
    pub grid: Vec<T>,
    pub theta_quarter: Vec<T>,
    pub theta_prime_quarter: Vec<T>,
    /// `d theta_rho / d rho` at `rho = 1/4`.
    pub u: Vec<T>,
    /// Offsets `rho - 1/4` at which `v` was sampled.
    pub offsets: Vec<T>,
    /// `theta_rho - theta_{1/4} - (rho - 1/4) u` for each offset.
    pub v: Vec<Vec<T>>,
    pub level_quarter: T,
    /// `d Omega / d rho` at `1/4`.
    pub action_per_rotation: T,
}

impl<T: Real> ExpansionTerms<T> {
    pub fn u_sup(&self) -> T {
        self.u.iter().fold(T::zero(), |m, v| m.max(v.abs()))
    }

    /// `sup |theta_{1/4}(x) - x|` and `sup |theta'_{1/4}(x) - 1|`.
    pub fn identity_defect(&self) -> (T, T) {
        let d0 = self.grid.iter().zip(&self.theta_quarter).fold(T::zero(), |m, (x, t)| m.max((*t - *x).abs()));
        let d1 = self.theta_prime_quarter.iter().fold(T::zero(), |m, t| m.max((*t - T::one()).abs()));
        (d0, d1)
    }

    /// `sup |v(rho, .)| / (rho - 1/4)^2` for each sampled offset.
    pub fn v_ratios(&self) -> Vec<T> {
        self.offsets
            .iter()
            .zip(&self.v)
            .map(|(d, row)| row.iter().fold(T::zero(), |m, v| m.max(v.abs())) / (*d * *d))
            .collect()
    }
}

/// Settings of [`expansion_terms_with`].
#[derive(Debug, Clone)]
pub struct ExpansionOptions<T> {
    pub grid: usize,
    pub step: T,
    pub offsets: Vec<T>,
}

impl<T: Real> Default for ExpansionOptions<T> {
    fn default() -> Self {
        let offsets = [-0.05, -0.0375, -0.025, -0.0125, 0.0125, 0.025, 0.0375, 0.05].iter().map(|v| c(*v)).collect();
        Self { grid: 256, step: c(1e-3), offsets }
    }
}

pub fn expansion_terms<T: Real>(p: &SurisParams<T>) -> Result<ExpansionTerms<T>> {
    expansion_terms_with(p, &ExpansionOptions::default())
}

pub fn expansion_terms_with<T: Real>(p: &SurisParams<T>, opts: &ExpansionOptions<T>) -> Result<ExpansionTerms<T>> {
    let quarter = c::<T>(0.25);
    let h = opts.step;
    let half = h * c(0.5);
    let mut rhos = vec![quarter, quarter - h, quarter + h, quarter - half, quarter + half];
    rhos.extend(opts.offsets.iter().map(|d| quarter + *d));
    let charts = build_charts(p, &rhos).into_iter().collect::<Result<Vec<_>>>()?;
    let grid = unit_grid::<T>(opts.grid);
    let sample = |ch: &AngleChart<T>| grid.iter().map(|&x| ch.theta(x)).collect::<Vec<_>>();
    let base = sample(&charts[0]);
    let (m1, p1, m2, p2) = (sample(&charts[1]), sample(&charts[2]), sample(&charts[3]), sample(&charts[4]));
    // Richardson on two central differences
    let u: Vec<T> = (0..grid.len())
        .map(|j| {
            let d1 = (p1[j] - m1[j]) / (h * c(2.0));
            let d2 = (p2[j] - m2[j]) / h;
            (c::<T>(4.0) * d2 - d1) / c(3.0)
        })
        .collect();
    let v = opts
        .offsets
        .iter()
        .zip(&charts[5..])
        .map(|(d, ch)| {
            grid.iter()
                .enumerate()
                .map(|(j, &x)| ch.theta(x) - base[j] - *d * u[j])
                .collect()
        })
        .collect();
    let eta_p = charts[4].eta();
    let eta_m = charts[3].eta();
    let omega = (action_variable(p, eta_p)? - action_variable(p, eta_m)?) / h;
    Ok(ExpansionTerms {
        theta_prime_quarter: grid.iter().map(|&x| charts[0].theta_prime(x)).collect(),
        grid,
        theta_quarter: base,
        u,
        offsets: opts.offsets.clone(),
        v,
        level_quarter: charts[0].eta(),
        action_per_rotation: omega,
    })
}
