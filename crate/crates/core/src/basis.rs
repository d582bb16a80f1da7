//! The weighted inner product `<f, g> = int f conj(g) theta'_{1/4} dx`, the
//! families `e_q`, `E_q`, the deformed basis `f_q`, Gram matrices and the
//! projector onto the low modes `{f_0, f_{+-1}, f_{+-2}}`.
//!
//! Functions are sampled on a uniform grid and integrated with the periodic
//! trapezoid rule.

use std::collections::HashMap;
use std::sync::{Arc, RwLock};

use num_complex::Complex;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::action_angle::{build_chart, AngleChart};
use crate::error::{Error, Result};
use crate::linalg::CMatrix;
use crate::numerics::{gcd, unit_grid};
use crate::potentials::{Param, Potential, SurisParams, SurisPotential};
use crate::scalar::{c, Real};

/// Default quadrature size.
pub const DEFAULT_GRID: usize = 2048;

/// Ordering of the low modes in Gram matrices and projections.
pub const LOW_MODES: [i64; 5] = [0, 1, -1, 2, -2];

/// `(p_q, t_q, r_q)` for `q >= 3`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct RqAssignment {
    pub q: i64,
    pub p: i64,
    pub t: i64,
    /// `r_q` as a reduced fraction `(numerator, denominator)`.
    pub r: (i64, i64),
}

impl RqAssignment {
    pub fn value<T: Real>(&self) -> T {
        T::from_int(self.r.0) / T::from_int(self.r.1)
    }
}

/// Rotation number `r_q` attached to the chart of `f_q`, with `q = 4 p_q + t_q` for `q >= 9`
/// and a fixed table below.
pub fn r_q_assignment(q: i64) -> Result<RqAssignment> {
    if q < 3 {
        return Err(Error::InvalidArgument(format!("r_q needs q >= 3, got {q}")));
    }
    let (p, t) = match q {
        3 => (1, 1),
        4 => (1, 0),
        5 => (2, 3),
        6 => (1, 2),
        7 => (2, 1),
        8 => (2, 0),
        _ => (q / 4, q % 4),
    };
    let g = gcd(p, q);
    Ok(RqAssignment { q, p, t, r: (p / g, q / g) })
}

/// How a basis vector was produced.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum BasisKind {
    Constant,
    ParameterMode,
    ChartMode,
}

/// A sampled basis vector `f_q`.
#[derive(Debug, Clone)]
pub struct BasisVector<T> {
    pub q: i64,
    pub values: Vec<Complex<T>>,
    pub kind: BasisKind,
}

type ChartCache<T> = Arc<RwLock<HashMap<(i64, i64), Arc<AngleChart<T>>>>>;

/// Quadrature grid, weight `theta'_{1/4}` and a memo of the charts used by `f_q`.
#[derive(Debug, Clone)]
pub struct InnerProductContext<T> {
    params: SurisParams<T>,
    potential: SurisPotential<T>,
    grid: Vec<T>,
    weight: Vec<T>,
    quarter: Arc<AngleChart<T>>,
    charts: ChartCache<T>,
}

fn zero<T: Real>() -> Complex<T> {
    Complex::new(T::zero(), T::zero())
}

fn cis<T: Real>(phase: T) -> Complex<T> {
    let (s, co) = phase.sin_cos();
    Complex::new(co, s)
}

impl<T: Real> InnerProductContext<T> {
    pub fn new(params: SurisParams<T>, n: usize) -> Result<Self> {
        if n < 16 {
            return Err(Error::InvalidArgument(format!("quadrature grid too small: {n}")));
        }
        let quarter = Arc::new(build_chart(&params, c(0.25))?);
        let charts: ChartCache<T> = Arc::new(RwLock::new(HashMap::new()));
        charts.write().expect("chart cache poisoned").insert((1, 4), quarter.clone());
        Ok(Self::assemble(params, n, quarter, charts))
    }

    fn assemble(params: SurisParams<T>, n: usize, quarter: Arc<AngleChart<T>>, charts: ChartCache<T>) -> Self {
        let grid = unit_grid::<T>(n);
        let weight = grid.iter().map(|&x| quarter.theta_prime(x)).collect();
        Self { params, potential: SurisPotential::new(params), grid, weight, quarter, charts }
    }

    /// Same parameters on another grid, sharing the chart memo.
    pub fn with_grid(&self, n: usize) -> Self {
        Self::assemble(self.params, n, self.quarter.clone(), self.charts.clone())
    }

    pub fn params(&self) -> &SurisParams<T> {
        &self.params
    }

    pub fn grid(&self) -> &[T] {
        &self.grid
    }

    pub fn len(&self) -> usize {
        self.grid.len()
    }

    pub fn is_empty(&self) -> bool {
        self.grid.is_empty()
    }

    pub fn weight(&self) -> &[T] {
        &self.weight
    }

    pub fn quarter_chart(&self) -> &AngleChart<T> {
        &self.quarter
    }

    /// Quadrature of the weight, which should be 1.
    pub fn weight_integral(&self) -> T {
        crate::kahan_sum(self.weight.iter().copied()) / T::from_int(self.len() as i64)
    }

    pub fn inner(&self, f: &[Complex<T>], g: &[Complex<T>]) -> Result<Complex<T>> {
        let n = self.len();
        for len in [f.len(), g.len()] {
            if len != n {
                return Err(Error::GridMismatch { expected: n, got: len });
            }
        }
        let (mut re, mut im) = (crate::KahanSum::new(), crate::KahanSum::new());
        for j in 0..n {
            let z = f[j] * g[j].conj() * self.weight[j];
            re.add(z.re);
            im.add(z.im);
        }
        let inv = T::one() / T::from_int(n as i64);
        Ok(Complex::new(re.value() * inv, im.value() * inv))
    }

    pub fn norm(&self, f: &[Complex<T>]) -> Result<T> {
        Ok(self.inner(f, f)?.re.max(T::zero()).sqrt())
    }

    /// Samples of a real function, as complex values.
    pub fn sample_fn<F: Fn(T) -> T>(&self, f: F) -> Vec<Complex<T>> {
        self.grid.iter().map(|&x| Complex::new(f(x), T::zero())).collect()
    }

    pub fn sample_potential(&self, w: &Potential<T>) -> Vec<Complex<T>> {
        self.sample_fn(|x| w.value(x))
    }

    /// Chart of rotation number `r = num/den` (reduced), built on first use.
    pub fn chart(&self, r: (i64, i64)) -> Result<Arc<AngleChart<T>>> {
        if let Some(ch) = self.charts.read().expect("chart cache poisoned").get(&r) {
            return Ok(ch.clone());
        }
        let ch = Arc::new(build_chart(&self.params, T::from_int(r.0) / T::from_int(r.1))?);
        self.charts.write().expect("chart cache poisoned").entry(r).or_insert(ch.clone());
        Ok(ch)
    }

    /// Builds in parallel every chart needed by `f_q`, `q in qs`.
    pub fn prefetch(&self, qs: &[i64]) -> Result<()> {
        let mut missing: Vec<(i64, i64)> = Vec::new();
        {
            let cache = self.charts.read().expect("chart cache poisoned");
            for &q in qs {
                if q.abs() >= 3 {
                    let r = r_q_assignment(q.abs())?.r;
                    if !cache.contains_key(&r) && !missing.contains(&r) {
                        missing.push(r);
                    }
                }
            }
        }
        let built: Vec<_> = missing
            .par_iter()
            .map(|&r| build_chart(&self.params, T::from_int(r.0) / T::from_int(r.1)).map(|ch| (r, Arc::new(ch))))
            .collect::<Result<Vec<_>>>()?;
        let mut cache = self.charts.write().expect("chart cache poisoned");
        for (r, ch) in built {
            cache.entry(r).or_insert(ch);
        }
        Ok(())
    }

    /// `pi dV/d(which)` on the grid.
    fn parameter_mode(&self, which: Param) -> Vec<T> {
        self.grid.iter().map(|&x| T::PI() * self.potential.partial(which, x)).collect()
    }

    /// `f_q`.
    pub fn basis_vector(&self, q: i64) -> Result<BasisVector<T>> {
        let (values, kind) = match q {
            0 => (vec![Complex::new(T::one(), T::zero()); self.len()], BasisKind::Constant),
            1 | -1 | 2 | -2 => {
                let (re, im) = if q.abs() == 1 { (Param::B, Param::A) } else { (Param::D, Param::C) };
                let s = T::from_int(q.signum());
                let re = self.parameter_mode(re);
                let im = self.parameter_mode(im);
                (re.into_iter().zip(im).map(|(a, b)| Complex::new(a, s * b)).collect(), BasisKind::ParameterMode)
            }
            _ => {
                let ch = self.chart(r_q_assignment(q.abs())?.r)?;
                let qq = T::from_int(q.abs()) * T::two_pi();
                let vals: Vec<Complex<T>> = self
                    .grid
                    .iter()
                    .zip(&self.weight)
                    .map(|(&x, &w)| cis(qq * ch.theta(x)) * (ch.theta_prime(x) / w))
                    .collect();
                let vals = if q < 0 { vals.into_iter().map(|z| z.conj()).collect() } else { vals };
                (vals, BasisKind::ChartMode)
            }
        };
        Ok(BasisVector { q, values, kind })
    }

    /// `e_q = exp(2 pi i q theta_{1/4})`.
    pub fn e(&self, q: i64) -> Vec<Complex<T>> {
        let qq = T::from_int(q) * T::two_pi();
        self.grid.iter().map(|&x| cis(qq * self.quarter.theta(x))).collect()
    }

    /// `E_q = (e_q - 1) / (2 pi i q)`, `q != 0`.
    pub fn big_e(&self, q: i64) -> Vec<Complex<T>> {
        let den = Complex::new(T::zero(), T::two_pi() * T::from_int(q));
        self.e(q).into_iter().map(|z| (z - Complex::new(T::one(), T::zero())) / den).collect()
    }

    /// The undeformed counterpart of `f_q`: `E_q` for `0 < |q| <= 2`, `e_q` otherwise.
    pub fn reference_vector(&self, q: i64) -> Vec<Complex<T>> {
        if q != 0 && q.abs() <= 2 {
            self.big_e(q)
        } else {
            self.e(q)
        }
    }

    /// `e_q exp(2 pi i q (r_q - 1/4) u)` for `|q| >= 3`, given `u` on the grid.
    pub fn e_tilde(&self, q: i64, u: &[T]) -> Result<Vec<Complex<T>>> {
        if u.len() != self.len() {
            return Err(Error::GridMismatch { expected: self.len(), got: u.len() });
        }
        let a = r_q_assignment(q.abs())?;
        let shift = T::from_int(q.abs()) * (a.value::<T>() - c(0.25));
        let vals = self.e(q.abs()).into_iter().zip(u).map(|(z, &uj)| z * cis(T::two_pi() * shift * uj));
        Ok(if q < 0 { vals.map(|z| z.conj()).collect() } else { vals.collect() })
    }

    /// `<W, f_q>`.
    pub fn coefficient(&self, w: &Potential<T>, q: i64) -> Result<Complex<T>> {
        self.inner(&self.sample_potential(w), &self.basis_vector(q)?.values)
    }

    /// `<W, f_q>` for all `q` in `qs`, in parallel.
    pub fn coefficients(&self, w: &[Complex<T>], qs: &[i64]) -> Result<Vec<Complex<T>>> {
        self.prefetch(qs)?;
        qs.par_iter().map(|&q| self.inner(w, &self.basis_vector(q)?.values)).collect()
    }

    fn low_vectors(&self) -> Result<Vec<Vec<Complex<T>>>> {
        LOW_MODES.iter().map(|&q| Ok(self.basis_vector(q)?.values)).collect()
    }

    /// `G_ij = <f_i, f_j>` over [`LOW_MODES`].
    pub fn gram_low_modes(&self) -> Result<CMatrix<T>> {
        gram(self, &self.low_vectors()?)
    }

    /// Orthogonal projection of real samples `w` onto the low modes.
    pub fn project_low_modes(&self, w: &[Complex<T>]) -> Result<LowModeProjection<T>> {
        let f = self.low_vectors()?;
        let g = gram(self, &f)?;
        let rhs = f.iter().map(|fi| self.inner(w, fi)).collect::<Result<Vec<_>>>()?;
        // G^T c = rhs; G^T = conj(G) is Hermitian positive definite
        let conj_rhs: Vec<_> = rhs.iter().map(|z| z.conj()).collect();
        let coeffs: Vec<Complex<T>> = g.solve_hpd(&conj_rhs)?.into_iter().map(|z| z.conj()).collect();
        let values = (0..self.len())
            .map(|j| f.iter().zip(&coeffs).fold(zero(), |acc, (fi, ci)| acc + fi[j] * *ci))
            .collect();
        let tp = T::two_pi();
        let (c1, c2) = (coeffs[1], coeffs[3]);
        Ok(LowModeProjection {
            values,
            w0: coeffs[0].re,
            increments: [-tp * c1.im, tp * c1.re, -tp * c2.im, tp * c2.re],
            coeffs: [coeffs[0], coeffs[1], coeffs[2], coeffs[3], coeffs[4]],
        })
    }

    /// Finite-section estimate of `||T - I||` on `span{b_q : |q| <= n}`, where `T b_q = f_q`.
    pub fn riesz_defect(&self, n: usize) -> Result<T> {
        if n > 64 {
            return Err(Error::InvalidArgument(format!("riesz_defect supports n <= 64, got {n}")));
        }
        let qs: Vec<i64> = (-(n as i64)..=n as i64).collect();
        self.prefetch(&qs)?;
        let pairs = qs
            .par_iter()
            .map(|&q| {
                let b = self.reference_vector(q);
                let f = self.basis_vector(q)?.values;
                let d: Vec<_> = f.iter().zip(&b).map(|(x, y)| *x - *y).collect();
                Ok((b, d))
            })
            .collect::<Result<Vec<_>>>()?;
        let (b, d): (Vec<_>, Vec<_>) = pairs.into_iter().unzip();
        let gb = gram(self, &b)?;
        let gd = gram(self, &d)?;
        Ok(CMatrix::generalized_max_eigenvalue(&gd, &gb)?.max(T::zero()).sqrt())
    }
}

/// `G_ij = <v_i, v_j>`.
pub fn gram<T: Real>(ctx: &InnerProductContext<T>, v: &[Vec<Complex<T>>]) -> Result<CMatrix<T>> {
    let n = v.len();
    let mut g = CMatrix::zeros(n);
    for i in 0..n {
        for j in i..n {
            let z = ctx.inner(&v[i], &v[j])?;
            g[(i, j)] = z;
            g[(j, i)] = z.conj();
        }
    }
    Ok(g)
}

/// Result of [`InnerProductContext::project_low_modes`].
#[derive(Debug, Clone)]
pub struct LowModeProjection<T> {
    /// `P` on the grid.
    pub values: Vec<Complex<T>>,
    /// Coefficients on `f_0, f_1, f_-1, f_2, f_-2`.
    pub coeffs: [Complex<T>; 5],
    /// Constant part.
    pub w0: T,
    /// Parameter increments `(dA, dB, dC, dD)` with `P - w0 = sum dX pi dV/dX / pi`.
    pub increments: [T; 4],
}
