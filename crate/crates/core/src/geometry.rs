//! Invariant graphs of the Suris map and their rotation numbers.
//!
//! On the level `I = eta` the curve over `x` is
//! `psi(x) = sigma/(2 pi) acos((gamma(x) - eta) / D(x)) - V'(x)/2 + k`.

use serde::{Deserialize, Serialize};

use crate::dynamics::{first_integral, graph_window, integral_range, step, PhasePoint};
use crate::error::{Error, Result};
use crate::numerics::{brent_root, unit_grid};
use crate::potentials::{Potential, SurisParams};
use crate::scalar::{c, floor_tol, KahanSum, Real};

/// Size of the tabulated graph.
pub const CURVE_GRID: usize = 2048;

/// Default number of iterates used to measure rotation numbers.
pub const ROTATION_ITERATES: usize = 20_000;

/// Levels outside this window are not searched by the rotation-number solver.
pub const LEVEL_WINDOW: f64 = 0.9;

const CLAMP_SLACK: f64 = 1e-12;

/// Level, branch and sheet of an invariant graph.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(bound = "T: Real")]
pub struct CurveParams<T> {
    pub eta: T,
    pub sigma: i8,
    pub k: i64,
}

impl<T: Real> CurveParams<T> {
    pub fn new(eta: T, sigma: i8, k: i64) -> Result<Self> {
        if sigma != 1 && sigma != -1 {
            return Err(Error::InvalidArgument(format!("sigma must be +1 or -1, got {sigma}")));
        }
        Ok(Self { eta, sigma, k })
    }

    /// The main branch `sigma = +1`, `k = 0`.
    pub fn main(eta: T) -> Self {
        Self { eta, sigma: 1, k: 0 }
    }
}

/// An invariant graph of the Suris map with its values on a uniform grid.
#[derive(Debug, Clone)]
pub struct InvariantCurve<T> {
    params: SurisParams<T>,
    curve: CurveParams<T>,
    potential: Potential<T>,
    table: Vec<T>,
}

impl<T: Real> InvariantCurve<T> {
    pub fn new(params: SurisParams<T>, curve: CurveParams<T>) -> Result<Self> {
        let (ilo, ihi) = integral_range(&params);
        if !(curve.eta > ilo && curve.eta < ihi) {
            return Err(Error::domain(
                "invariant curve",
                format!("level {} outside the range ({ilo}, {ihi})", curve.eta),
            ));
        }
        let potential = Potential::suris(params);
        let mut c = Self { params, curve, potential, table: Vec::new() };
        let table = unit_grid::<T>(CURVE_GRID)
            .into_iter()
            .map(|x| c.psi(x))
            .collect::<Result<Vec<_>>>()?;
        c.table = table;
        Ok(c)
    }

    pub fn params(&self) -> &SurisParams<T> {
        &self.params
    }

    pub fn curve_params(&self) -> &CurveParams<T> {
        &self.curve
    }

    pub fn eta(&self) -> T {
        self.curve.eta
    }

    pub fn potential(&self) -> &Potential<T> {
        &self.potential
    }

    /// `psi` on the uniform grid of [`CURVE_GRID`] nodes.
    pub fn table(&self) -> &[T] {
        &self.table
    }

    /// `(gamma(x) - eta) / D(x)`, clamped when within `1e-12` of the unit interval.
    pub fn cos_argument(&self, x: T) -> Result<T> {
        let l = self.params.level_coefficients(x);
        let arg = (l.gamma - self.curve.eta) / l.d;
        let slack = c::<T>(CLAMP_SLACK).max(T::epsilon() * c(8.0));
        if arg.abs() > T::one() + slack {
            return Err(Error::domain(
                "psi",
                format!("level {} does not project over x = {x} (argument {arg})", self.curve.eta),
            ));
        }
        Ok(arg.max(-T::one()).min(T::one()))
    }

    /// Height of the graph over `x`.
    pub fn psi(&self, x: T) -> Result<T> {
        let arg = self.cos_argument(x)?;
        let sigma = T::from_int(self.curve.sigma as i64);
        Ok(sigma * arg.acos() / T::two_pi() - c::<T>(0.5) * self.params.vprime(x) + T::from_int(self.curve.k))
    }

    pub fn point(&self, x: T) -> Result<PhasePoint<T>> {
        Ok(PhasePoint::new(x, self.psi(x)?))
    }

    /// `max |y_1 - psi(x_1)|` over `n` sampled base points, where `(x_1, y_1)` is the image of `(x, psi(x))`.
    pub fn invariance_residual(&self, n: usize) -> Result<T> {
        let mut worst = T::zero();
        for x in unit_grid::<T>(n) {
            let z1 = step(&self.potential, self.point(x)?);
            worst = worst.max((z1.y - self.psi(z1.x)?).abs());
        }
        Ok(worst)
    }

    /// `max |I(x, psi(x)) - eta|` over the tabulated grid.
    pub fn level_residual(&self) -> T {
        unit_grid::<T>(CURVE_GRID)
            .into_iter()
            .zip(&self.table)
            .map(|(x, &y)| (first_integral(&self.params, PhasePoint::new(x, y)) - self.curve.eta).abs())
            .fold(T::zero(), T::max)
    }
}

/// Rotation-number measurement of one orbit.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(bound = "T: Real")]
pub struct RotationEstimate<T> {
    /// Smoothly weighted Birkhoff average of `x_{j+1} - x_j` over `n` steps.
    pub weighted: T,
    /// `(x_n - x_0) / n`.
    pub plain_n: T,
    /// `(x_{2n} - x_0) / (2n)`.
    pub plain_2n: T,
    pub n: usize,
}

impl<T: Real> RotationEstimate<T> {
    pub fn value(&self) -> T {
        self.weighted
    }
}

/// Rotation number of the orbit of `z` under the map of `v`.
///
/// The weighted average uses `w(t) = exp(-1/(t(1-t)))`, which converges faster than
/// any power of `1/n` on quasi-periodic orbits; the two plain averages are
/// reported alongside.
pub fn rotation_number<T: Real>(v: &Potential<T>, z: PhasePoint<T>, n: usize) -> RotationEstimate<T> {
    let n = n.max(2);
    let nn = T::from_int(n as i64);
    let mut num = KahanSum::new();
    let mut den = KahanSum::new();
    let mut cur = z;
    let mut x_n = z.x;
    for j in 0..2 * n {
        let next = step(v, cur);
        if j < n {
            let t = (T::from_int(j as i64) + c(0.5)) / nn;
            let w = (-T::one() / (t * (T::one() - t))).exp();
            num.add(w * (next.x - cur.x));
            den.add(w);
            if j + 1 == n {
                x_n = next.x;
            }
        }
        cur = next;
    }
    RotationEstimate {
        weighted: num.value() / den.value(),
        plain_n: (x_n - z.x) / nn,
        plain_2n: (cur.x - z.x) / (nn * c(2.0)),
        n,
    }
}

/// Rotation number of the orbit started at `(0, psi(0))`.
pub fn rotation_number_on_curve<T: Real>(curve: &InvariantCurve<T>, n: usize) -> Result<RotationEstimate<T>> {
    Ok(rotation_number(&curve.potential, curve.point(T::zero())?, n))
}

/// Settings of [`curve_for_rotation_number_with`].
#[derive(Debug, Clone, Copy)]
pub struct CurveSolveOptions<T> {
    pub iterates: usize,
    pub eta_tol: T,
    pub window: T,
}

impl<T: Real> Default for CurveSolveOptions<T> {
    fn default() -> Self {
        Self { iterates: ROTATION_ITERATES, eta_tol: c(1e-12), window: c(LEVEL_WINDOW) }
    }
}

/// The invariant graph on branch `(sigma, k)` with rotation number `rho`.
pub fn curve_for_rotation_number<T: Real>(
    p: &SurisParams<T>,
    rho: T,
    sigma: i8,
    k: i64,
) -> Result<InvariantCurve<T>> {
    curve_for_rotation_number_with(p, rho, sigma, k, &CurveSolveOptions::default())
}

pub fn curve_for_rotation_number_with<T: Real>(
    p: &SurisParams<T>,
    rho: T,
    sigma: i8,
    k: i64,
    opts: &CurveSolveOptions<T>,
) -> Result<InvariantCurve<T>> {
    CurveParams::<T>::new(T::zero(), sigma, k)?;
    let (glo, ghi) = graph_window(p);
    let margin = c::<T>(1e-9);
    let lo = (glo + margin).max(-opts.window);
    let hi = (ghi - margin).min(opts.window);
    if !(lo < hi) {
        return Err(Error::NotAttainable { target: rho.to_f64_lossy(), lo: f64::NAN, hi: f64::NAN });
    }
    let measure = |eta: T| -> Result<T> {
        let curve = InvariantCurve::new(*p, CurveParams { eta, sigma, k })?;
        Ok(rotation_number_on_curve(&curve, opts.iterates)?.value() - rho)
    };

    let eta0 = -(T::two_pi() * (rho - T::from_int(k))).cos();
    let mut bracket = None;
    if eta0 > lo && eta0 < hi {
        let mut h = c::<T>(0.02);
        for _ in 0..5 {
            let a = (eta0 - h).max(lo);
            let b = (eta0 + h).min(hi);
            let (fa, fb) = (measure(a)?, measure(b)?);
            if (fa <= T::zero()) != (fb <= T::zero()) {
                bracket = Some((a, b));
                break;
            }
            h = h * c(2.0);
        }
    }
    let (a, b) = match bracket {
        Some(ab) => ab,
        None => scan_bracket(&measure, lo, hi, rho, sigma)?,
    };
    let eta = brent_root(measure, a, b, floor_tol(opts.eta_tol), 200)?;
    InvariantCurve::new(*p, CurveParams { eta, sigma, k })
}

const SCAN_POINTS: usize = 64;

fn scan_bracket<T: Real, F: Fn(T) -> Result<T>>(f: &F, lo: T, hi: T, rho: T, sigma: i8) -> Result<(T, T)> {
    let h = (hi - lo) / T::from_int(SCAN_POINTS as i64 - 1);
    let etas: Vec<T> = (0..SCAN_POINTS).map(|j| lo + h * T::from_int(j as i64)).collect();
    let vals = etas.iter().map(|&e| f(e)).collect::<Result<Vec<_>>>()?;
    let orient = T::from_int(sigma as i64);
    if vals.windows(2).any(|w| orient * (w[1] - w[0]) <= T::zero()) {
        return Err(Error::NonMonotone { lo: lo.to_f64_lossy(), hi: hi.to_f64_lossy() });
    }
    for j in 0..SCAN_POINTS - 1 {
        if (vals[j] <= T::zero()) != (vals[j + 1] <= T::zero()) {
            return Ok((etas[j], etas[j + 1]));
        }
    }
    let r0 = vals[0] + rho;
    let r1 = vals[SCAN_POINTS - 1] + rho;
    Err(Error::NotAttainable {
        target: rho.to_f64_lossy(),
        lo: r0.min(r1).to_f64_lossy(),
        hi: r0.max(r1).to_f64_lossy(),
    })
}
