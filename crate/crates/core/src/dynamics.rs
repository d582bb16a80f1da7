//! The standard map `(x, y) -> (x + y + V'(x), y + V'(x))`, its generating
//! function, the Frenkel-Kontorova residual and the Suris first integral.
//!
//! Coordinates are lifts: `x` lives on the real line and is reduced mod 1 only
//! when asked to.

use serde::{Deserialize, Serialize};

use crate::numerics::{golden_max, unit_grid};
use crate::potentials::{Potential, SurisParams};
use crate::scalar::{c, Real};

/// A point of the lifted cylinder.
#[derive(Debug, Clone, Copy, PartialEq, Default, Serialize, Deserialize)]
#[serde(bound = "T: Real")]
pub struct PhasePoint<T> {
    pub x: T,
    pub y: T,
}

impl<T: Real> PhasePoint<T> {
    pub fn new(x: T, y: T) -> Self {
        Self { x, y }
    }

    /// `x` reduced to `[0, 1)`.
    pub fn x_mod1(&self) -> T {
        let r = self.x - self.x.floor();
        if r >= T::one() {
            T::zero()
        } else {
            r
        }
    }
}

/// A finite forward orbit together with a description of the potential that generated it.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(bound = "T: Real")]
pub struct OrbitSegment<T> {
    pub points: Vec<PhasePoint<T>>,
    pub potential: String,
}

impl<T: Real> OrbitSegment<T> {
    pub fn len(&self) -> usize {
        self.points.len()
    }

    pub fn is_empty(&self) -> bool {
        self.points.is_empty()
    }

    pub fn xs(&self) -> Vec<T> {
        self.points.iter().map(|p| p.x).collect()
    }
}

/// One application of the standard map.
#[inline]
pub fn step<T: Real>(v: &Potential<T>, z: PhasePoint<T>) -> PhasePoint<T> {
    let y = z.y + v.vprime(z.x);
    PhasePoint { x: z.x + y, y }
}

/// `n` steps from `z`; the result has `n + 1` points.
pub fn iterate<T: Real>(v: &Potential<T>, z: PhasePoint<T>, n: usize) -> OrbitSegment<T> {
    let mut points = Vec::with_capacity(n + 1);
    let mut cur = z;
    points.push(cur);
    for _ in 0..n {
        cur = step(v, cur);
        points.push(cur);
    }
    OrbitSegment { points, potential: v.describe() }
}

/// `H(x1, x2) = (x2 - x1)^2 / 2 + V(x1)`.
pub fn generating_h<T: Real>(v: &Potential<T>, x1: T, x2: T) -> T {
    let d = x2 - x1;
    c::<T>(0.5) * d * d + v.value(x1)
}

/// `(dH/dx1, dH/dx2)`.
pub fn generating_h_grad<T: Real>(v: &Potential<T>, x1: T, x2: T) -> (T, T) {
    let d = x2 - x1;
    (-d + v.vprime(x1), d)
}

/// `xp - 2 x0 + xm - V'(x0)`.
#[inline]
pub fn fk_residual<T: Real>(v: &Potential<T>, xm: T, x0: T, xp: T) -> T {
    xp - c::<T>(2.0) * x0 + xm - v.vprime(x0)
}

/// `Phi(x, x')`, the first integral written in configuration variables.
pub fn phi<T: Real>(p: &SurisParams<T>, x: T, xp: T) -> T {
    let tp = T::two_pi();
    -(tp * (xp - x)).cos() + p.a() * ((tp * xp).cos() + (tp * x).cos())
        - p.b() * ((tp * xp).sin() + (tp * x).sin())
        + p.c() * (tp * (x + xp)).cos()
        - p.d() * (tp * (x + xp)).sin()
}

/// The Suris first integral `I(x, y)`.
pub fn first_integral<T: Real>(p: &SurisParams<T>, z: PhasePoint<T>) -> T {
    let tp = T::two_pi();
    let (x, y) = (z.x, z.y);
    let two = c::<T>(2.0);
    -(tp * y).cos() + p.a() * ((tp * x).cos() + (tp * (x - y)).cos())
        - p.b() * ((tp * x).sin() + (tp * (x - y)).sin())
        + p.c() * (tp * (two * x - y)).cos()
        - p.d() * (tp * (two * x - y)).sin()
}

const RANGE_GRID: usize = 1024;

/// `(min_x (gamma - D), max_x (gamma + D))`, the range of `I`.
pub fn integral_range<T: Real>(p: &SurisParams<T>) -> (T, T) {
    let lo = extremum(|x| {
        let l = p.level_coefficients(x);
        -(l.gamma - l.d)
    });
    let hi = extremum(|x| {
        let l = p.level_coefficients(x);
        l.gamma + l.d
    });
    (-lo, hi)
}

/// `(max_x (gamma - D), min_x (gamma + D))`: levels whose set projects onto every `x`.
pub fn graph_window<T: Real>(p: &SurisParams<T>) -> (T, T) {
    let lo = extremum(|x| {
        let l = p.level_coefficients(x);
        l.gamma - l.d
    });
    let hi = extremum(|x| {
        let l = p.level_coefficients(x);
        -(l.gamma + l.d)
    });
    (lo, -hi)
}

/// Maximum over `[0, 1)` by a grid scan refined by golden section around the best node.
fn extremum<T: Real, F: Fn(T) -> T>(f: F) -> T {
    let grid = unit_grid::<T>(RANGE_GRID);
    let (mut best_x, mut best) = (T::zero(), f(T::zero()));
    for &x in &grid {
        let v = f(x);
        if v > best {
            best = v;
            best_x = x;
        }
    }
    let h = T::one() / T::from_int(RANGE_GRID as i64);
    let (_, refined) = golden_max(&f, best_x - h, best_x + h, T::epsilon().sqrt() * c(0.01));
    refined.max(best)
}
