//! Numerical building blocks: spectral representation of smooth periodic
//! functions, bracketed root finding, one-dimensional minimization,
//! tridiagonal solves and grid maximization.

use num_complex::Complex;

use crate::error::{Error, Result};
use crate::scalar::{c, Real};

/// Real, smooth, 1-periodic function stored by its Fourier coefficients.
///
/// `g(x) = c_0 + 2 Re sum_{n=1}^{K} c_n e^{2 pi i n x}`.
#[derive(Debug, Clone)]
pub struct SpectralSeries<T> {
    coeffs: Vec<Complex<T>>,
}

impl<T: Real> SpectralSeries<T> {
    /// Builds the series from `m` equispaced samples on `[0, 1)`.
    pub fn from_samples(samples: &[T]) -> Self {
        let m = samples.len();
        assert!(m >= 4, "need at least 4 samples");
        let mut buf: Vec<Complex<T>> = samples.iter().map(|&s| Complex::new(s, T::zero())).collect();
        T::fft_forward(&mut buf);
        let inv_m = T::one() / T::from_int(m as i64);
        // Keep strictly below Nyquist; the Nyquist mode is not representable as a real series.
        let k = (m - 1) / 2;
        let coeffs = buf.iter().take(k + 1).map(|z| *z * inv_m).collect();
        Self { coeffs }
    }

    /// Samples `f` at successively doubled resolutions until the top octave of
    /// coefficients falls below `rel_tol` relative to the largest coefficient.
    pub fn fit<F: Fn(T) -> T>(f: F, rel_tol: T, min_m: usize, max_m: usize) -> Result<Self> {
        let mut m = min_m.next_power_of_two().max(8);
        loop {
            let h = T::one() / T::from_int(m as i64);
            let samples: Vec<T> = (0..m).map(|j| f(T::from_int(j as i64) * h)).collect();
            if samples.iter().any(|s| !s.is_finite()) {
                return Err(Error::domain("spectral fit", "non-finite sample"));
            }
            let s = Self::from_samples(&samples);
            if s.tail_ratio() <= rel_tol {
                return Ok(s);
            }
            if m >= max_m {
                return Err(Error::NoConvergence { iterations: m, residual: s.tail_ratio().to_f64_lossy() });
            }
            m *= 2;
        }
    }

    /// Largest coefficient modulus in the top half of the spectrum divided by the largest overall.
    pub fn tail_ratio(&self) -> T {
        let k = self.coeffs.len();
        let scale = self.coeffs.iter().map(|z| z.norm()).fold(T::zero(), T::max);
        if scale == T::zero() {
            return T::zero();
        }
        let tail = self.coeffs[k / 2..].iter().map(|z| z.norm()).fold(T::zero(), T::max);
        tail / scale
    }

    pub fn coeffs(&self) -> &[Complex<T>] {
        &self.coeffs
    }

    /// Number of retained positive frequencies.
    pub fn bandwidth(&self) -> usize {
        self.coeffs.len() - 1
    }

    pub fn mean(&self) -> T {
        self.coeffs[0].re
    }

    fn horner(coeffs: impl DoubleEndedIterator<Item = Complex<T>>, z: Complex<T>) -> Complex<T> {
        // sum_{n>=1} a_n z^n
        let mut acc = Complex::new(T::zero(), T::zero());
        for a in coeffs.rev() {
            acc = (acc + a) * z;
        }
        acc
    }

    fn unit(x: T) -> Complex<T> {
        let (s, co) = (T::two_pi() * x).sin_cos();
        Complex::new(co, s)
    }

    pub fn eval(&self, x: T) -> T {
        let z = Self::unit(x);
        let s = Self::horner(self.coeffs[1..].iter().copied(), z);
        self.coeffs[0].re + c::<T>(2.0) * s.re
    }

    pub fn derivative(&self, x: T) -> T {
        let z = Self::unit(x);
        let tp = T::two_pi();
        let s = Self::horner(
            self.coeffs[1..]
                .iter()
                .enumerate()
                .map(|(i, a)| *a * Complex::new(T::zero(), tp * T::from_int(i as i64 + 1))),
            z,
        );
        c::<T>(2.0) * s.re
    }

    /// `int_0^x g`, including the secular term `c_0 x`.
    pub fn primitive(&self, x: T) -> T {
        let z = Self::unit(x);
        let tp = T::two_pi();
        // int_0^x e^{2 pi i n t} dt = (z^n - 1) / (2 pi i n)
        let terms = self.coeffs[1..]
            .iter()
            .enumerate()
            .map(|(i, a)| *a / Complex::new(T::zero(), tp * T::from_int(i as i64 + 1)));
        let s = Self::horner(terms.clone(), z);
        let at_zero: Complex<T> = terms.fold(Complex::new(T::zero(), T::zero()), |acc, t| acc + t);
        self.coeffs[0].re * x + c::<T>(2.0) * (s - at_zero).re
    }

    /// Values of `g` on the uniform grid `j / n`, `j = 0..n`.
    pub fn grid_values(&self, n: usize) -> Vec<T> {
        let k = self.bandwidth();
        if n > 2 * k {
            let mut buf = vec![Complex::new(T::zero(), T::zero()); n];
            buf[0] = self.coeffs[0];
            for i in 1..=k {
                buf[i] = self.coeffs[i];
                buf[n - i] = self.coeffs[i].conj();
            }
            T::fft_inverse(&mut buf);
            buf.into_iter().map(|z| z.re).collect()
        } else {
            let h = T::one() / T::from_int(n as i64);
            (0..n).map(|j| self.eval(T::from_int(j as i64) * h)).collect()
        }
    }
}

/// Brent's bracketed root finder. `f(a)` and `f(b)` must have opposite signs.
pub fn brent_root<T: Real, F: FnMut(T) -> Result<T>>(mut f: F, a: T, b: T, xtol: T, max_iter: usize) -> Result<T> {
    let (mut a, mut b) = (a, b);
    let mut fa = f(a)?;
    let mut fb = f(b)?;
    if fa == T::zero() {
        return Ok(a);
    }
    if fb == T::zero() {
        return Ok(b);
    }
    if (fa > T::zero()) == (fb > T::zero()) {
        return Err(Error::domain("brent_root", "root is not bracketed"));
    }
    let two = c::<T>(2.0);
    let (mut cc, mut fc) = (a, fa);
    let mut d = b - a;
    let mut e = d;
    for _ in 0..max_iter {
        if (fb > T::zero()) == (fc > T::zero()) {
            cc = a;
            fc = fa;
            d = b - a;
            e = d;
        }
        if fc.abs() < fb.abs() {
            a = b;
            b = cc;
            cc = a;
            fa = fb;
            fb = fc;
            fc = fa;
        }
        let tol1 = two * T::epsilon() * b.abs() + xtol / two;
        let xm = (cc - b) / two;
        if xm.abs() <= tol1 || fb == T::zero() {
            return Ok(b);
        }
        if e.abs() >= tol1 && fa.abs() > fb.abs() {
            let s = fb / fa;
            let (mut p, mut q);
            if a == cc {
                p = two * xm * s;
                q = T::one() - s;
            } else {
                let qq = fa / fc;
                let r = fb / fc;
                p = s * (two * xm * qq * (qq - r) - (b - a) * (r - T::one()));
                q = (qq - T::one()) * (r - T::one()) * (s - T::one());
            }
            if p > T::zero() {
                q = -q;
            }
            p = p.abs();
            let min1 = c::<T>(3.0) * xm * q - (tol1 * q).abs();
            let min2 = (e * q).abs();
            if two * p < min1.min(min2) {
                e = d;
                d = p / q;
            } else {
                d = xm;
                e = d;
            }
        } else {
            d = xm;
            e = d;
        }
        a = b;
        fa = fb;
        b = if d.abs() > tol1 { b + d } else { b + tol1 * xm.signum() };
        fb = f(b)?;
    }
    Err(Error::NoConvergence { iterations: max_iter, residual: fb.abs().to_f64_lossy() })
}

/// Golden-section refinement of a local maximum of `f` inside `[a, b]`.
pub fn golden_max<T: Real, F: Fn(T) -> T>(f: F, a: T, b: T, xtol: T) -> (T, T) {
    let g = c::<T>(0.618_033_988_749_894_8);
    let (mut a, mut b) = (a, b);
    let mut x1 = b - g * (b - a);
    let mut x2 = a + g * (b - a);
    let mut f1 = f(x1);
    let mut f2 = f(x2);
    for _ in 0..200 {
        if (b - a).abs() <= xtol {
            break;
        }
        if f1 < f2 {
            a = x1;
            x1 = x2;
            f1 = f2;
            x2 = a + g * (b - a);
            f2 = f(x2);
        } else {
            b = x2;
            x2 = x1;
            f2 = f1;
            x1 = b - g * (b - a);
            f1 = f(x1);
        }
    }
    if f1 > f2 {
        (x1, f1)
    } else {
        (x2, f2)
    }
}

/// Maximum of a 1-periodic function: scan on `n` nodes, then refine around the best node.
pub fn periodic_max<T: Real, F: Fn(T) -> T>(f: F, n: usize) -> (T, T) {
    let h = T::one() / T::from_int(n as i64);
    let (mut best_j, mut best) = (0usize, f(T::zero()));
    for j in 1..n {
        let v = f(T::from_int(j as i64) * h);
        if v > best {
            best = v;
            best_j = j;
        }
    }
    let x0 = T::from_int(best_j as i64) * h;
    let (x, v) = golden_max(&f, x0 - h, x0 + h, T::epsilon().sqrt() * h * c(1e-3));
    if v > best {
        (x, v)
    } else {
        (x0, best)
    }
}

/// Solves a tridiagonal system in place (Thomas algorithm).
///
/// `sub[i]` couples row `i+1` to column `i`, `sup[i]` couples row `i` to
/// column `i+1`. Returns the solution and the pivots, whose signs give the
/// inertia of symmetric systems.
pub fn solve_tridiagonal<T: Real>(sub: &[T], diag: &[T], sup: &[T], rhs: &[T]) -> Result<(Vec<T>, Vec<T>)> {
    let n = diag.len();
    if n == 0 {
        return Ok((Vec::new(), Vec::new()));
    }
    let mut cp = vec![T::zero(); n];
    let mut dp = vec![T::zero(); n];
    let mut pivots = vec![T::zero(); n];
    let mut beta = diag[0];
    pivots[0] = beta;
    if beta == T::zero() {
        return Err(Error::domain("solve_tridiagonal", "zero pivot"));
    }
    dp[0] = rhs[0] / beta;
    for i in 1..n {
        cp[i - 1] = sup[i - 1] / beta;
        beta = diag[i] - sub[i - 1] * cp[i - 1];
        pivots[i] = beta;
        if beta == T::zero() {
            return Err(Error::domain("solve_tridiagonal", "zero pivot"));
        }
        dp[i] = (rhs[i] - sub[i - 1] * dp[i - 1]) / beta;
    }
    let mut x = dp;
    for i in (0..n - 1).rev() {
        let next = x[i + 1];
        x[i] -= cp[i] * next;
    }
    Ok((x, pivots))
}

/// Uniform grid `j / n` on `[0, 1)`.
pub fn unit_grid<T: Real>(n: usize) -> Vec<T> {
    let h = T::one() / T::from_int(n as i64);
    (0..n).map(|j| T::from_int(j as i64) * h).collect()
}

pub(crate) fn gcd(a: i64, b: i64) -> i64 {
    let (mut a, mut b) = (a.abs(), b.abs());
    while b != 0 {
        let t = a % b;
        a = b;
        b = t;
    }
    a
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::f64::consts::PI;

    #[test]
    fn spectral_series_reproduces_trig_polynomial() {
        let f = |x: f64| 0.3 + (2.0 * PI * x).cos() - 0.25 * (6.0 * PI * x).sin();
        let s = SpectralSeries::fit(f, 1e-14, 16, 1024).unwrap();
        for &x in &[0.0, 0.13, 0.5, 0.77] {
            assert!((s.eval(x) - f(x)).abs() < 1e-13);
            let d = -2.0 * PI * (2.0 * PI * x).sin() - 0.25 * 6.0 * PI * (6.0 * PI * x).cos();
            assert!((s.derivative(x) - d).abs() < 1e-11);
            let p = 0.3 * x + (2.0 * PI * x).sin() / (2.0 * PI) + 0.25 * ((6.0 * PI * x).cos() - 1.0) / (6.0 * PI);
            assert!((s.primitive(x) - p).abs() < 1e-14);
        }
        let g = s.grid_values(64);
        assert!((g[5] - f(5.0 / 64.0)).abs() < 1e-13);
    }

    #[test]
    fn spectral_fit_of_analytic_function() {
        let f = |x: f64| 1.0 / (1.2 + (2.0 * PI * x).cos());
        let s = SpectralSeries::fit(f, 1e-15, 16, 4096).unwrap();
        assert!((s.eval(0.321) - f(0.321)).abs() < 1e-13);
        // exact mean is 1/sqrt(1.2^2 - 1)
        assert!((s.mean() - 1.0 / (1.44f64 - 1.0).sqrt()).abs() < 1e-13);
    }

    #[test]
    fn brent_finds_cube_root() {
        let r = brent_root(|x: f64| Ok(x * x * x - 2.0), 0.0, 2.0, 1e-15, 100).unwrap();
        assert!((r - 2f64.cbrt()).abs() < 1e-14);
        assert!(brent_root(|x: f64| Ok(x * x + 1.0), -1.0, 1.0, 1e-12, 50).is_err());
    }

    #[test]
    fn periodic_max_refines_below_grid_spacing() {
        let (x, v) = periodic_max(|x: f64| (2.0 * PI * (x - 0.123_456_7)).cos(), 64);
        assert!((x - 0.123_456_7).abs() < 1e-7);
        assert!((v - 1.0).abs() < 1e-13);
    }

    #[test]
    fn tridiagonal_solve_and_pivots() {
        let (x, piv) = solve_tridiagonal::<f64>(&[1.0, 1.0], &[-2.0, -2.0, -2.0], &[1.0, 1.0], &[1.0, 0.0, 1.0]).unwrap();
        // [-2 1 0; 1 -2 1; 0 1 -2] x = [1 0 1] -> x = [-1, -1, -1]
        for v in x {
            assert!((v + 1.0).abs() < 1e-14);
        }
        assert!(piv.iter().all(|p| *p < 0.0));
    }

    #[test]
    fn gcd_basic() {
        assert_eq!(gcd(12, 18), 6);
        assert_eq!(gcd(-4, 6), 2);
        assert_eq!(gcd(1, 0), 1);
    }
}
