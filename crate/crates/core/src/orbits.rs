//! Periodic configurations of the Frenkel-Kontorova model: pinned and free
//! action minimizers, Mather's beta at rationals, and the action spectrum.
//!
//! A `(p, q)` configuration is `x_0, ..., x_{q-1}` with the convention
//! `x_{i+q} = x_i + p`; its action is `sum_{i<q} H(x_i, x_{i+1})`.

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::dynamics::{fk_residual, generating_h};
use crate::error::{Error, Result};
use crate::numerics::{brent_root, gcd, solve_tridiagonal};
use crate::potentials::{Potential, SurisParams};
use crate::scalar::{c, floor_tol, KahanSum, Real};

/// A `(p, q)` periodic configuration.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(bound = "T: Real")]
pub struct PeriodicConfiguration<T> {
    pub p: i64,
    pub q: i64,
    pub points: Vec<T>,
    /// Base point when solved with `x_0` fixed.
    pub pin: Option<T>,
    /// Sup norm of the FK residual over the solved indices.
    pub residual: T,
    /// Whether every pivot of the Hessian was positive at the solution.
    pub local_minimum: bool,
}

impl<T: Real> PeriodicConfiguration<T> {
    pub fn new(p: i64, q: i64, points: Vec<T>) -> Result<Self> {
        check_pq(p, q)?;
        if points.len() != q as usize {
            return Err(Error::GridMismatch { expected: q as usize, got: points.len() });
        }
        Ok(Self { p, q, points, pin: None, residual: T::nan(), local_minimum: false })
    }

    /// The rigid rotation `x_i = x0 + i p / q`.
    pub fn rigid(p: i64, q: i64, x0: T) -> Result<Self> {
        check_pq(p, q)?;
        let step = T::from_int(p) / T::from_int(q);
        Self::new(p, q, (0..q).map(|i| x0 + step * T::from_int(i)).collect())
    }

    /// `x_i` for any integer `i`.
    pub fn at(&self, i: i64) -> T {
        let q = self.q;
        let k = i.div_euclid(q);
        self.points[i.rem_euclid(q) as usize] + T::from_int(k * self.p)
    }

    /// FK residual at every index `0..q`.
    pub fn residuals(&self, v: &Potential<T>) -> Vec<T> {
        (0..self.q).map(|i| fk_residual(v, self.at(i - 1), self.at(i), self.at(i + 1))).collect()
    }
}

/// Action of a configuration.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(bound = "T: Real")]
pub struct ActionValue<T> {
    pub value: T,
    pub p: i64,
    pub q: i64,
    pub pin: Option<T>,
}

fn check_pq(p: i64, q: i64) -> Result<()> {
    if q < 1 {
        return Err(Error::InvalidArgument(format!("q must be positive, got {q}")));
    }
    if gcd(p, q) != 1 {
        return Err(Error::NotCoprime { p, q });
    }
    Ok(())
}

/// `sum_{i<q} H(x_i, x_{i+1})`.
pub fn action<T: Real>(v: &Potential<T>, cfg: &PeriodicConfiguration<T>) -> ActionValue<T> {
    let mut acc = KahanSum::new();
    for i in 0..cfg.q {
        acc.add(generating_h(v, cfg.at(i), cfg.at(i + 1)));
    }
    ActionValue { value: acc.value(), p: cfg.p, q: cfg.q, pin: cfg.pin }
}

/// Solver limits.
#[derive(Debug, Clone, Copy)]
pub struct SolveOptions<T> {
    pub tol: T,
    pub max_newton: usize,
    pub max_fallback: usize,
}

impl<T: Real> Default for SolveOptions<T> {
    fn default() -> Self {
        Self { tol: c(1e-12), max_newton: 200, max_fallback: 2000 }
    }
}

fn sup<T: Real>(v: &[T]) -> T {
    v.iter().fold(T::zero(), |m, x| m.max(x.abs()))
}

/// Residuals `R_1..R_{q-1}` of the pinned system.
fn pinned_residuals<T: Real>(v: &Potential<T>, x0: T, xq: T, inner: &[T]) -> Vec<T> {
    let m = inner.len();
    (0..m)
        .map(|i| {
            let xm = if i == 0 { x0 } else { inner[i - 1] };
            let xp = if i + 1 == m { xq } else { inner[i + 1] };
            fk_residual(v, xm, inner[i], xp)
        })
        .collect()
}

/// Minimizer of the action with `x_0 = x0` fixed.
pub fn minimize_pinned<T: Real>(v: &Potential<T>, p: i64, q: i64, x0: T, opts: &SolveOptions<T>) -> Result<PeriodicConfiguration<T>> {
    check_pq(p, q)?;
    let xq = x0 + T::from_int(p);
    let step = T::from_int(p) / T::from_int(q);
    let mut x: Vec<T> = (1..q).map(|i| x0 + step * T::from_int(i)).collect();
    let tol = floor_tol(opts.tol) * (T::one() + T::from_int(p.abs()));
    let mut r = pinned_residuals(v, x0, xq, &x);
    let mut best = sup(&r);
    let mut fallback_used = 0;
    let mut newton_used = 0;
    let mut pivots: Vec<T> = Vec::new();
    loop {
        while newton_used < opts.max_newton && best > tol {
            newton_used += 1;
            let m = x.len();
            let diag: Vec<T> = x.iter().map(|&xi| -c::<T>(2.0) - v.vsecond(xi)).collect();
            let off = vec![T::one(); m.saturating_sub(1)];
            let rhs: Vec<T> = r.iter().map(|ri| -*ri).collect();
            let (dx, _) = match solve_tridiagonal(&off, &diag, &off, &rhs) {
                Ok(s) => s,
                Err(_) => break,
            };
            // backtracking on the residual norm
            let mut lambda = T::one();
            let mut accepted = false;
            for _ in 0..30 {
                let trial: Vec<T> = x.iter().zip(&dx).map(|(a, d)| *a + lambda * *d).collect();
                let rt = pinned_residuals(v, x0, xq, &trial);
                let s = sup(&rt);
                if s < best || s <= tol {
                    x = trial;
                    r = rt;
                    best = s;
                    accepted = true;
                    break;
                }
                lambda = lambda * c(0.5);
            }
            if !accepted {
                break;
            }
        }
        if best <= tol || fallback_used >= opts.max_fallback {
            break;
        }
        // damped gradient descent on the action: -grad A = R
        let tau = c::<T>(0.2);
        let budget = opts.max_fallback - fallback_used;
        for _ in 0..budget {
            fallback_used += 1;
            for (xi, ri) in x.iter_mut().zip(&r) {
                *xi += tau * *ri;
            }
            r = pinned_residuals(v, x0, xq, &x);
            if fallback_used % 100 == 0 {
                break;
            }
        }
        best = sup(&r);
        // a few more Newton steps from the improved iterate
        newton_used = newton_used.min(opts.max_newton.saturating_sub(10));
    }
    if !(best <= tol) {
        return Err(Error::NoConvergence { iterations: newton_used + fallback_used, residual: best.to_f64_lossy() });
    }
    if !x.is_empty() {
        let m = x.len();
        let diag: Vec<T> = x.iter().map(|&xi| c::<T>(2.0) + v.vsecond(xi)).collect();
        let off = vec![-T::one(); m.saturating_sub(1)];
        pivots = solve_tridiagonal(&off, &diag, &off, &vec![T::zero(); m]).map(|s| s.1).unwrap_or_default();
    }
    let mut points = Vec::with_capacity(q as usize);
    points.push(x0);
    points.extend(x);
    Ok(PeriodicConfiguration {
        p,
        q,
        points,
        pin: Some(x0),
        residual: best,
        local_minimum: pivots.iter().all(|d| *d > T::zero()),
    })
}

/// `x0 -> (A_pinned(x0), R_0(x0))`, where `-R_0 = dA/dx0`.
fn pinned_profile<T: Real>(v: &Potential<T>, p: i64, q: i64, x0: T, opts: &SolveOptions<T>) -> Result<(PeriodicConfiguration<T>, T, T)> {
    let cfg = minimize_pinned(v, p, q, x0, opts)?;
    let a = action(v, &cfg).value;
    let r0 = fk_residual(v, cfg.at(-1), cfg.at(0), cfg.at(1));
    Ok((cfg, a, r0))
}

/// Minimal `(p, q)` configuration. Optional `pin` fixes `x_0`.
///
/// Free minimizers are found by minimizing the pinned action over the base
/// point: a grid scan followed by a root solve of `dA/dx0 = -R_0`.
pub fn minimize_action<T: Real>(v: &Potential<T>, p: i64, q: i64, pin: Option<T>) -> Result<PeriodicConfiguration<T>> {
    minimize_action_with(v, p, q, pin, &SolveOptions::default())
}

pub fn minimize_action_with<T: Real>(
    v: &Potential<T>,
    p: i64,
    q: i64,
    pin: Option<T>,
    opts: &SolveOptions<T>,
) -> Result<PeriodicConfiguration<T>> {
    check_pq(p, q)?;
    if let Some(x0) = pin {
        return minimize_pinned(v, p, q, x0, opts);
    }
    let m = (4 * q as usize).max(16);
    let h = T::one() / T::from_int(m as i64);
    let scan = (0..m)
        .map(|j| pinned_profile(v, p, q, T::from_int(j as i64) * h, opts))
        .collect::<Result<Vec<_>>>()?;
    let (jmin, _) = scan
        .iter()
        .enumerate()
        .fold((0, T::infinity()), |(bj, ba), (j, s)| if s.1 < ba { (j, s.1) } else { (bj, ba) });
    let tol = floor_tol(opts.tol) * (T::one() + T::from_int(p.abs()));
    let (cfg, _, r0) = &scan[jmin];
    if r0.abs() <= tol {
        return Ok(finish_free(cfg.clone(), *r0));
    }
    // R_0 goes from + to - through the minimum
    let xa = T::from_int(jmin as i64) * h - h;
    let xb = T::from_int(jmin as i64) * h + h;
    let x0 = brent_root(|x| Ok(pinned_profile(v, p, q, x, opts)?.2), xa, xb, T::epsilon() * c(4.0), 200)?;
    let (cfg, _, r0) = pinned_profile(v, p, q, x0, opts)?;
    if r0.abs() > tol * c(100.0) {
        return Err(Error::NoConvergence { iterations: 200, residual: r0.abs().to_f64_lossy() });
    }
    Ok(finish_free(cfg, r0))
}

fn finish_free<T: Real>(mut cfg: PeriodicConfiguration<T>, r0: T) -> PeriodicConfiguration<T> {
    cfg.pin = None;
    cfg.residual = cfg.residual.max(r0.abs());
    cfg
}

/// `beta(p/q) = A_min / q`.
pub fn beta<T: Real>(v: &Potential<T>, p: i64, q: i64) -> Result<T> {
    let cfg = minimize_action(v, p, q, None)?;
    Ok(action(v, &cfg).value / T::from_int(q))
}

/// One entry of [`action_spectrum_sample`].
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(bound = "T: Real")]
pub struct SpectrumEntry<T> {
    pub p: i64,
    pub q: i64,
    pub action: Option<T>,
    pub error: Option<String>,
}

/// Reduced rationals `p/q` in `[lo, hi]` with `q <= qmax`, ordered by value.
pub fn rationals_in(lo: f64, hi: f64, qmax: i64) -> Vec<(i64, i64)> {
    let mut out = Vec::new();
    for q in 1..=qmax {
        for p in 0..=q {
            let r = p as f64 / q as f64;
            if gcd(p, q) == 1 && r >= lo - 1e-15 && r <= hi + 1e-15 {
                out.push((p, q));
            }
        }
    }
    out.sort_by(|a, b| (a.0 * b.1).cmp(&(b.0 * a.1)));
    out
}

/// Free minimal actions for every reduced `p/q` in `[1/6, 1/3]` with `q <= qmax`.
pub fn action_spectrum_sample<T: Real>(v: &Potential<T>, qmax: i64) -> Result<Vec<SpectrumEntry<T>>> {
    if qmax > 64 {
        return Err(Error::InvalidArgument(format!("qmax {qmax} exceeds 64")));
    }
    Ok(rationals_in(1.0 / 6.0, 1.0 / 3.0, qmax)
        .par_iter()
        .map(|&(p, q)| match minimize_action(v, p, q, None) {
            Ok(cfg) => SpectrumEntry { p, q, action: Some(action(v, &cfg).value), error: None },
            Err(e) => SpectrumEntry { p, q, action: None, error: Some(e.to_string()) },
        })
        .collect())
}

/// `max_k |x_k - x'_k|` between the pinned orbits of `V_S` and `V_S + W` from `x0`.
pub fn orbit_deviation<T: Real>(ps: &SurisParams<T>, w: &Potential<T>, p: i64, q: i64, x0: T) -> Result<T> {
    let vs = Potential::suris(*ps);
    let a = minimize_pinned(&vs, p, q, x0, &SolveOptions::default())?;
    let b = minimize_pinned(&vs.clone().plus(w.clone()), p, q, x0, &SolveOptions::default())?;
    Ok(a.points.iter().zip(&b.points).fold(T::zero(), |m, (u, v)| m.max((*u - *v).abs())))
}

/// `|A - A_S - sum_k W(x_k)|` with `x_k` the pinned Suris orbit from `x0`.
pub fn action_deviation<T: Real>(ps: &SurisParams<T>, w: &Potential<T>, p: i64, q: i64, x0: T) -> Result<T> {
    let vs = Potential::suris(*ps);
    let vw = vs.clone().plus(w.clone());
    let a = minimize_pinned(&vs, p, q, x0, &SolveOptions::default())?;
    let b = minimize_pinned(&vw, p, q, x0, &SolveOptions::default())?;
    let mut sum_w = KahanSum::new();
    for &x in &a.points {
        sum_w.add(w.value(x));
    }
    Ok((action(&vw, &b).value - action(&vs, &a).value - sum_w.value()).abs())
}
