//! Suris potentials, trigonometric perturbations and their sums.
//!
//! With frequency fixed at `2 pi`, the Suris potential with parameters
//! `(A, B, C, D)` has derivative
//!
//! ```text
//! V'(x) = (1/pi) atan( E(x) / (1 + F(x)) )
//! E(x)  =  A sin 2pi x + B cos 2pi x + C sin 4pi x + D cos 4pi x
//! F(x)  = -A cos 2pi x + B sin 2pi x - C cos 4pi x + D sin 4pi x
//! ```
//!
//! Writing `w = e^{-2 pi i x}`, `1 + F + iE = g(w) = 1 + a1 w + a2 w^2` with
//! `a1 = -A + iB`, `a2 = -C + iD`, so `V' = Im log g(w) / pi`. Because `g`
//! has no zeros in the closed unit disc for eccentricity at most 1/4, the
//! Taylor coefficients of `log g` give an exponentially convergent Fourier
//! series for `V'`, which is integrated term by term for `V` and for every
//! higher derivative. The parameter derivatives use the series of `1/g`.

use num_complex::Complex;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::numerics::unit_grid;
use crate::scalar::{c, Real};

/// Largest eccentricity accepted at construction.
pub const MAX_ECCENTRICITY: f64 = 0.25;

/// Largest derivative order served by [`Potential::derivative`].
pub const MAX_DERIVATIVE_ORDER: usize = 32;

/// Default grid used by [`Potential::cr_norm`].
pub const CR_NORM_GRID: usize = 4096;

/// One of the four Suris parameters.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Param {
    A,
    B,
    C,
    D,
}

impl Param {
    pub const ALL: [Param; 4] = [Param::A, Param::B, Param::C, Param::D];
}

/// Parameters `(A, B, C, D)` of a Suris potential with eccentricity at most 1/4.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SurisParams<T> {
    a: T,
    b: T,
    c: T,
    d: T,
}

/// `(alpha, beta, gamma, D)` of the level-set decomposition
/// `I(x, y) = -alpha cos 2pi y + beta sin 2pi y + gamma`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct LevelCoefficients<T> {
    pub alpha: T,
    pub beta: T,
    pub gamma: T,
    pub d: T,
}

impl<T: Real> SurisParams<T> {
    pub fn new(a: T, b: T, c: T, d: T) -> Result<Self> {
        let p = Self { a, b, c, d };
        if ![a, b, c, d].iter().all(|v| v.is_finite()) {
            return Err(Error::InvalidParams("non-finite parameter".into()));
        }
        let eps = p.eccentricity();
        if eps > T::lit(MAX_ECCENTRICITY) * (T::one() + T::epsilon() * T::lit(4.0)) {
            return Err(Error::InvalidParams(format!(
                "eccentricity {eps} exceeds {MAX_ECCENTRICITY}"
            )));
        }
        Ok(p)
    }

    pub fn zero() -> Self {
        Self { a: T::zero(), b: T::zero(), c: T::zero(), d: T::zero() }
    }

    /// The symmetric special case `A = B = D = 0`, `C = -eps`.
    pub fn special(eps: T) -> Result<Self> {
        Self::new(T::zero(), T::zero(), -eps, T::zero())
    }

    /// `eps * direction / |direction|`.
    pub fn along(direction: [T; 4], eps: T) -> Result<Self> {
        let n = direction.iter().map(|v| *v * *v).sum::<T>().sqrt();
        if n == T::zero() {
            return Self::new(T::zero(), T::zero(), T::zero(), T::zero());
        }
        let s = eps / n;
        Self::new(direction[0] * s, direction[1] * s, direction[2] * s, direction[3] * s)
    }

    pub fn a(&self) -> T {
        self.a
    }
    pub fn b(&self) -> T {
        self.b
    }
    pub fn c(&self) -> T {
        self.c
    }
    pub fn d(&self) -> T {
        self.d
    }

    pub fn get(&self, which: Param) -> T {
        match which {
            Param::A => self.a,
            Param::B => self.b,
            Param::C => self.c,
            Param::D => self.d,
        }
    }

    pub fn as_array(&self) -> [T; 4] {
        [self.a, self.b, self.c, self.d]
    }

    /// Parameters shifted by `delta`; fails if the result leaves the admissible ball.
    pub fn offset(&self, delta: [T; 4]) -> Result<Self> {
        Self::new(self.a + delta[0], self.b + delta[1], self.c + delta[2], self.d + delta[3])
    }

    pub fn with(&self, which: Param, value: T) -> Result<Self> {
        let mut v = self.as_array();
        v[which as usize] = value;
        Self::new(v[0], v[1], v[2], v[3])
    }

    pub fn eccentricity(&self) -> T {
        (self.a * self.a + self.b * self.b + self.c * self.c + self.d * self.d).sqrt()
    }

    /// `(E(x), F(x))`.
    #[inline]
    pub fn e_f(&self, x: T) -> (T, T) {
        let tp = T::two_pi();
        let (s1, c1) = (tp * x).sin_cos();
        let (s2, c2) = (c::<T>(2.0) * tp * x).sin_cos();
        let e = self.a * s1 + self.b * c1 + self.c * s2 + self.d * c2;
        let f = -self.a * c1 + self.b * s1 - self.c * c2 + self.d * s2;
        (e, f)
    }

    /// `V'(x) = atan(E / (1 + F)) / pi`.
    #[inline]
    pub fn vprime(&self, x: T) -> T {
        let (e, f) = self.e_f(x);
        e.atan2(T::one() + f) / T::PI()
    }

    /// `V''(x)` from the closed form of `V'`.
    pub fn vsecond(&self, x: T) -> T {
        let tp = T::two_pi();
        let two = c::<T>(2.0);
        let (s1, c1) = (tp * x).sin_cos();
        let (s2, c2) = (two * tp * x).sin_cos();
        let e = self.a * s1 + self.b * c1 + self.c * s2 + self.d * c2;
        let f = -self.a * c1 + self.b * s1 - self.c * c2 + self.d * s2;
        let de = tp * (self.a * c1 - self.b * s1 + two * self.c * c2 - two * self.d * s2);
        let df = tp * (self.a * s1 + self.b * c1 + two * self.c * s2 + two * self.d * c2);
        let g = T::one() + f;
        (de * g - e * df) / (e * e + g * g) / T::PI()
    }

    /// `d V'(x) / d(which)`, differentiating the arctan in closed form.
    pub fn partial_vprime(&self, which: Param, x: T) -> T {
        let tp = T::two_pi();
        let (s1, c1) = (tp * x).sin_cos();
        let (s2, c2) = (c::<T>(2.0) * tp * x).sin_cos();
        let (e, f) = self.e_f(x);
        let (de, df) = match which {
            Param::A => (s1, -c1),
            Param::B => (c1, s1),
            Param::C => (s2, -c2),
            Param::D => (c2, s2),
        };
        let g = T::one() + f;
        (de * g - e * df) / (e * e + g * g) / T::PI()
    }

    /// `(alpha, beta, gamma, D)` at `x`.
    pub fn level_coefficients(&self, x: T) -> LevelCoefficients<T> {
        let (e, f) = self.e_f(x);
        let tp = T::two_pi();
        let (s1, c1) = (tp * x).sin_cos();
        let alpha = T::one() + f;
        let beta = e;
        let gamma = self.a * c1 - self.b * s1;
        LevelCoefficients { alpha, beta, gamma, d: alpha.hypot(beta) }
    }
}

/// Which series a [`SurisPotential`] evaluation runs over.
#[derive(Clone, Copy)]
enum Series {
    Log,
    Partial(Param),
}

/// A Suris potential with its precomputed spectral coefficients.
#[derive(Debug, Clone)]
pub struct SurisPotential<T> {
    params: SurisParams<T>,
    /// Taylor coefficients of `log g`, index `n - 1` holds the `w^n` term.
    log_coeffs: Vec<Complex<T>>,
    /// Taylor coefficients of `1 / g`, index `n` holds the `w^n` term.
    inv_coeffs: Vec<Complex<T>>,
    /// Estimated decay rate of the coefficients.
    decay: T,
}

const MAX_SERIES_TERMS: usize = 4096;

impl<T: Real> SurisPotential<T> {
    pub fn new(params: SurisParams<T>) -> Self {
        let zero = Complex::new(T::zero(), T::zero());
        let a1 = Complex::new(-params.a, params.b);
        let a2 = Complex::new(-params.c, params.d);
        let floor = T::min_positive_value().sqrt();

        // power sums p_n = r1^n + r2^n of the reciprocal roots, log g = -sum p_n w^n / n
        let mut log_coeffs = Vec::new();
        let (mut pm2, mut pm1) = (Complex::new(c::<T>(2.0), T::zero()), -a1);
        let mut small_run = 0;
        for n in 1..=MAX_SERIES_TERMS {
            let pn = if n == 1 { pm1 } else { -a1 * pm1 - a2 * pm2 };
            if n > 1 {
                pm2 = pm1;
                pm1 = pn;
            }
            let l = -pn / T::from_int(n as i64);
            log_coeffs.push(l);
            small_run = if l.norm() < floor { small_run + 1 } else { 0 };
            if small_run >= 2 {
                break;
            }
        }
        let mut inv_coeffs = vec![Complex::new(T::one(), T::zero())];
        let mut small_run = 0;
        for n in 1..=MAX_SERIES_TERMS {
            let hn = -a1 * inv_coeffs[n - 1] - if n >= 2 { a2 * inv_coeffs[n - 2] } else { zero };
            inv_coeffs.push(hn);
            small_run = if hn.norm() < floor { small_run + 1 } else { 0 };
            if small_run >= 2 {
                break;
            }
        }
        // max root modulus of t^2 + a1 t + a2
        let disc = (a1 * a1 - a2 * c::<T>(4.0)).sqrt();
        let half = c::<T>(0.5);
        let r1 = ((-a1 + disc) * half).norm();
        let r2 = ((-a1 - disc) * half).norm();
        let decay = r1.max(r2);
        Self { params, log_coeffs, inv_coeffs, decay }
    }

    pub fn params(&self) -> &SurisParams<T> {
        &self.params
    }

    fn coeff(&self, series: Series, n: usize) -> Option<Complex<T>> {
        match series {
            Series::Log => self.log_coeffs.get(n - 1).copied(),
            Series::Partial(p) => {
                let (shift, factor) = match p {
                    Param::A => (1, Complex::new(-T::one(), T::zero())),
                    Param::B => (1, Complex::new(T::zero(), T::one())),
                    Param::C => (2, Complex::new(-T::one(), T::zero())),
                    Param::D => (2, Complex::new(T::zero(), T::one())),
                };
                if n < shift {
                    return Some(Complex::new(T::zero(), T::zero()));
                }
                self.inv_coeffs.get(n - shift).map(|h| *h * factor)
            }
        }
    }

    /// `d^order / dx^order` of `(1/pi) Im int_0^x sum s_n e^{-2 pi i n t} dt`.
    fn eval_series(&self, series: Series, order: usize, x: T) -> T {
        let tp = T::two_pi();
        let (s, co) = (tp * x).sin_cos();
        let w = Complex::new(co, -s);
        let mut wn = Complex::new(T::one(), T::zero());
        let mut acc = Complex::new(T::zero(), T::zero());
        let tiny = T::epsilon() * c(1e-4);
        let mut max_term = T::zero();
        // the weighted terms peak near n* = (order - 1) / ln(1/decay)
        let ln_decay = (T::one() / self.decay.max(c(1e-300))).ln().max(c(1e-3));
        let n_peak = T::from_int(order as i64) / ln_decay;
        let mut n = 1usize;
        loop {
            let Some(coef) = self.coeff(series, n) else { break };
            wn = wn * w;
            let ni = Complex::new(T::zero(), -tp * T::from_int(n as i64));
            let term = if order == 0 {
                coef * (wn - Complex::new(T::one(), T::zero())) / ni
            } else {
                let mut m = coef * wn;
                for _ in 1..order {
                    m = m * ni;
                }
                m
            };
            acc = acc + term;
            // bound the term independently of x, so accidental zeros of w^n - 1 do not stop the sum
            let scale = if order == 0 { c::<T>(2.0) / ni.im.abs() } else { ni.im.abs().powi(order as i32 - 1) };
            let mag = coef.norm() * scale;
            max_term = max_term.max(mag);
            if T::from_int(n as i64) > c::<T>(2.0) * n_peak + c(4.0) && mag <= tiny * max_term {
                break;
            }
            n += 1;
        }
        acc.im / T::PI()
    }

    /// `V(x) = int_0^x V'`.
    pub fn value(&self, x: T) -> T {
        self.eval_series(Series::Log, 0, x)
    }

    pub fn vprime(&self, x: T) -> T {
        self.params.vprime(x)
    }

    pub fn vsecond(&self, x: T) -> T {
        self.params.vsecond(x)
    }

    /// Derivative of `V` of any order from the spectral series.
    pub fn derivative(&self, order: usize, x: T) -> T {
        match order {
            1 => self.params.vprime(x),
            2 => self.params.vsecond(x),
            _ => self.eval_series(Series::Log, order, x),
        }
    }

    /// `d V(x) / d(which)`, the integral from 0 to x of the closed-form parameter derivative of `V'`.
    pub fn partial(&self, which: Param, x: T) -> T {
        self.eval_series(Series::Partial(which), 0, x)
    }

    /// `x`-derivatives of `d V / d(which)`; order 1 is the closed form.
    pub fn partial_derivative(&self, which: Param, order: usize, x: T) -> T {
        match order {
            1 => self.params.partial_vprime(which, x),
            _ => self.eval_series(Series::Partial(which), order, x),
        }
    }

    pub fn series_len(&self) -> usize {
        self.log_coeffs.len()
    }
}

/// `W(x) = sum_m cos_m cos(2 pi m x) + sin_m sin(2 pi m x)`, `m = 1..N`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(bound = "T: Real")]
pub struct TrigPerturbation<T> {
    #[serde(rename = "cos", default)]
    pub cos_coeffs: Vec<T>,
    #[serde(rename = "sin", default)]
    pub sin_coeffs: Vec<T>,
}

impl<T: Real> TrigPerturbation<T> {
    pub fn new(cos_coeffs: Vec<T>, sin_coeffs: Vec<T>) -> Self {
        Self { cos_coeffs, sin_coeffs }
    }

    /// A single cosine harmonic `amp cos(2 pi m x)`.
    pub fn cosine(m: usize, amp: T) -> Self {
        let mut cos_coeffs = vec![T::zero(); m];
        cos_coeffs[m - 1] = amp;
        Self { cos_coeffs, sin_coeffs: Vec::new() }
    }

    /// Least-squares trigonometric fit of `samples` on the uniform grid, keeping `harmonics` modes.
    /// The mean is dropped.
    pub fn from_samples(samples: &[T], harmonics: usize) -> Self {
        let n = samples.len();
        let mut buf: Vec<Complex<T>> = samples.iter().map(|&s| Complex::new(s, T::zero())).collect();
        T::fft_forward(&mut buf);
        let scale = c::<T>(2.0) / T::from_int(n as i64);
        let k = harmonics.min((n - 1) / 2);
        let cos_coeffs = (1..=k).map(|m| buf[m].re * scale).collect();
        let sin_coeffs = (1..=k).map(|m| -buf[m].im * scale).collect();
        Self { cos_coeffs, sin_coeffs }
    }

    pub fn harmonics(&self) -> usize {
        self.cos_coeffs.len().max(self.sin_coeffs.len())
    }

    pub fn derivative(&self, order: usize, x: T) -> T {
        let tp = T::two_pi();
        let mut acc = T::zero();
        for m in 1..=self.harmonics() {
            let a = self.cos_coeffs.get(m - 1).copied().unwrap_or_else(T::zero);
            let b = self.sin_coeffs.get(m - 1).copied().unwrap_or_else(T::zero);
            if a == T::zero() && b == T::zero() {
                continue;
            }
            let k = tp * T::from_int(m as i64);
            let (s, co) = (k * x).sin_cos();
            // d^j/dx^j of a cos + b sin = k^j (a cos(kx + j pi/2) + b sin(kx + j pi/2))
            let (cs, sn) = match order % 4 {
                0 => (co, s),
                1 => (-s, co),
                2 => (-co, -s),
                _ => (s, -co),
            };
            acc += k.powi(order as i32) * (a * cs + b * sn);
        }
        acc
    }

    pub fn scaled(&self, s: T) -> Self {
        Self {
            cos_coeffs: self.cos_coeffs.iter().map(|v| *v * s).collect(),
            sin_coeffs: self.sin_coeffs.iter().map(|v| *v * s).collect(),
        }
    }
}

/// An evaluable 1-periodic potential.
#[derive(Debug, Clone)]
pub enum Potential<T> {
    Constant(T),
    Suris(SurisPotential<T>),
    Trig(TrigPerturbation<T>),
    Scaled(T, Box<Potential<T>>),
    Sum(Box<Potential<T>>, Box<Potential<T>>),
}

impl<T: Real> Potential<T> {
    pub fn zero() -> Self {
        Potential::Constant(T::zero())
    }

    pub fn suris(params: SurisParams<T>) -> Self {
        Potential::Suris(SurisPotential::new(params))
    }

    pub fn trig(w: TrigPerturbation<T>) -> Self {
        Potential::Trig(w)
    }

    pub fn plus(self, other: Potential<T>) -> Self {
        Potential::Sum(Box::new(self), Box::new(other))
    }

    pub fn scaled(self, s: T) -> Self {
        Potential::Scaled(s, Box::new(self))
    }

    /// `Suris(p + delta) - Suris(p)`.
    pub fn suris_increment(base: SurisParams<T>, delta: [T; 4]) -> Result<Self> {
        let moved = base.offset(delta)?;
        Ok(Potential::suris(moved).plus(Potential::suris(base).scaled(-T::one())))
    }

    pub fn value(&self, x: T) -> T {
        match self {
            Potential::Constant(v) => *v,
            Potential::Suris(s) => s.value(x),
            Potential::Trig(t) => t.derivative(0, x),
            Potential::Scaled(s, p) => *s * p.value(x),
            Potential::Sum(a, b) => a.value(x) + b.value(x),
        }
    }

    #[inline]
    pub fn vprime(&self, x: T) -> T {
        match self {
            Potential::Constant(_) => T::zero(),
            Potential::Suris(s) => s.vprime(x),
            Potential::Trig(t) => t.derivative(1, x),
            Potential::Scaled(s, p) => *s * p.vprime(x),
            Potential::Sum(a, b) => a.vprime(x) + b.vprime(x),
        }
    }

    pub fn vsecond(&self, x: T) -> T {
        match self {
            Potential::Constant(_) => T::zero(),
            Potential::Suris(s) => s.vsecond(x),
            Potential::Trig(t) => t.derivative(2, x),
            Potential::Scaled(s, p) => *s * p.vsecond(x),
            Potential::Sum(a, b) => a.vsecond(x) + b.vsecond(x),
        }
    }

    /// `d^order V / dx^order` for `order <= MAX_DERIVATIVE_ORDER`.
    pub fn derivative(&self, order: usize, x: T) -> Result<T> {
        if order > MAX_DERIVATIVE_ORDER {
            return Err(Error::UnsupportedOrder { order, max: MAX_DERIVATIVE_ORDER });
        }
        Ok(self.derivative_unchecked(order, x))
    }

    fn derivative_unchecked(&self, order: usize, x: T) -> T {
        match self {
            Potential::Constant(v) => {
                if order == 0 {
                    *v
                } else {
                    T::zero()
                }
            }
            Potential::Suris(s) => {
                if order == 0 {
                    s.value(x)
                } else {
                    s.derivative(order, x)
                }
            }
            Potential::Trig(t) => t.derivative(order, x),
            Potential::Scaled(s, p) => *s * p.derivative_unchecked(order, x),
            Potential::Sum(a, b) => a.derivative_unchecked(order, x) + b.derivative_unchecked(order, x),
        }
    }

    /// `max_{0 <= j <= r} sup_x |V^{(j)}(x)|` on a 4096-point grid.
    pub fn cr_norm(&self, r: usize) -> Result<T> {
        self.cr_norm_on_grid(r, CR_NORM_GRID)
    }

    pub fn cr_norm_on_grid(&self, r: usize, n: usize) -> Result<T> {
        if r > MAX_DERIVATIVE_ORDER {
            return Err(Error::UnsupportedOrder { order: r, max: MAX_DERIVATIVE_ORDER });
        }
        let grid = unit_grid::<T>(n);
        let mut best = T::zero();
        for j in 0..=r {
            for &x in &grid {
                best = best.max(self.derivative_unchecked(j, x).abs());
            }
        }
        Ok(best)
    }

    /// Samples of `V` on the uniform grid of size `n`.
    pub fn sample(&self, n: usize) -> Vec<T> {
        unit_grid::<T>(n).into_iter().map(|x| self.value(x)).collect()
    }

    /// Short human-readable identity.
    pub fn describe(&self) -> String {
        match self {
            Potential::Constant(v) => format!("const({v})"),
            Potential::Suris(s) => {
                let p = s.params();
                format!("suris(A={}, B={}, C={}, D={})", p.a, p.b, p.c, p.d)
            }
            Potential::Trig(t) => format!("trig({} harmonics)", t.harmonics()),
            Potential::Scaled(s, p) => format!("{s}*{}", p.describe()),
            Potential::Sum(a, b) => format!("{} + {}", a.describe(), b.describe()),
        }
    }

    /// The Suris parameters when the potential is a bare Suris potential.
    pub fn as_suris(&self) -> Option<&SurisParams<T>> {
        match self {
            Potential::Suris(s) => Some(s.params()),
            _ => None,
        }
    }
}

/// `{"A": .., "B": .., "C": .., "D": ..}`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(bound = "T: Real")]
pub struct SurisDoc<T> {
    #[serde(rename = "A", default)]
    pub a: T,
    #[serde(rename = "B", default)]
    pub b: T,
    #[serde(rename = "C", default)]
    pub c: T,
    #[serde(rename = "D", default)]
    pub d: T,
}

/// JSON document `{"suris": {...}, "trig": {"cos": [...], "sin": [...]}}`
/// describing `Suris + trig (+ constant)`. Every field is optional.
#[derive(Debug, Clone, PartialEq, Default, Serialize, Deserialize)]
#[serde(bound = "T: Real", deny_unknown_fields)]
pub struct PotentialDoc<T> {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub suris: Option<SurisDoc<T>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub trig: Option<TrigPerturbation<T>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub constant: Option<T>,
}

impl<T: Real> PotentialDoc<T> {
    pub fn from_json(s: &str) -> Result<Self> {
        Ok(serde_json::from_str(s)?)
    }

    pub fn to_json(&self) -> Result<String> {
        Ok(serde_json::to_string_pretty(self)?)
    }

    pub fn suris_params(&self) -> Result<Option<SurisParams<T>>> {
        self.suris.map(|s| SurisParams::new(s.a, s.b, s.c, s.d)).transpose()
    }

    pub fn to_potential(&self) -> Result<Potential<T>> {
        let mut parts = Vec::new();
        if let Some(p) = self.suris_params()? {
            parts.push(Potential::suris(p));
        }
        if let Some(t) = &self.trig {
            parts.push(Potential::Trig(t.clone()));
        }
        if let Some(v) = self.constant {
            parts.push(Potential::Constant(v));
        }
        Ok(parts.into_iter().reduce(|a, b| a.plus(b)).unwrap_or_else(Potential::zero))
    }

    /// Inverse of [`PotentialDoc::to_potential`] for potentials built from at most one
    /// Suris term, trig terms and constants.
    pub fn from_potential(p: &Potential<T>) -> Result<Self> {
        let mut doc = PotentialDoc::default();
        doc.absorb(p, T::one())?;
        Ok(doc)
    }

    fn absorb(&mut self, p: &Potential<T>, scale: T) -> Result<()> {
        match p {
            Potential::Constant(v) => {
                *self.constant.get_or_insert(T::zero()) += scale * *v;
            }
            Potential::Suris(s) => {
                if self.suris.is_some() || scale != T::one() {
                    return Err(Error::InvalidArgument(
                        "only a single unscaled Suris term is representable".into(),
                    ));
                }
                let q = s.params();
                self.suris = Some(SurisDoc { a: q.a, b: q.b, c: q.c, d: q.d });
            }
            Potential::Trig(t) => {
                let cur = self.trig.get_or_insert_with(|| TrigPerturbation::new(Vec::new(), Vec::new()));
                let add = |dst: &mut Vec<T>, src: &[T]| {
                    if dst.len() < src.len() {
                        dst.resize(src.len(), T::zero());
                    }
                    for (d, s) in dst.iter_mut().zip(src) {
                        *d += scale * *s;
                    }
                };
                add(&mut cur.cos_coeffs, &t.cos_coeffs);
                add(&mut cur.sin_coeffs, &t.sin_coeffs);
            }
            Potential::Scaled(s, inner) => self.absorb(inner, scale * *s)?,
            Potential::Sum(a, b) => {
                self.absorb(a, scale)?;
                self.absorb(b, scale)?;
            }
        }
        Ok(())
    }
}
