//! Small dense complex linear algebra: Hermitian Cholesky solves and
//! eigenvalues. Sizes here stay below a few hundred, so plain loops suffice.

use num_complex::Complex;

use crate::error::{Error, Result};
use crate::scalar::{c, Real};

/// Square complex matrix, row-major.
#[derive(Debug, Clone, PartialEq)]
pub struct CMatrix<T> {
    n: usize,
    data: Vec<Complex<T>>,
}

impl<T: Real> CMatrix<T> {
    pub fn zeros(n: usize) -> Self {
        Self { n, data: vec![Complex::new(T::zero(), T::zero()); n * n] }
    }

    pub fn identity(n: usize) -> Self {
        let mut m = Self::zeros(n);
        for i in 0..n {
            m[(i, i)] = Complex::new(T::one(), T::zero());
        }
        m
    }

    pub fn from_fn<F: FnMut(usize, usize) -> Complex<T>>(n: usize, mut f: F) -> Self {
        let mut m = Self::zeros(n);
        for i in 0..n {
            for j in 0..n {
                m[(i, j)] = f(i, j);
            }
        }
        m
    }

    pub fn dim(&self) -> usize {
        self.n
    }

    pub fn adjoint(&self) -> Self {
        Self::from_fn(self.n, |i, j| self[(j, i)].conj())
    }

    pub fn mul_vec(&self, v: &[Complex<T>]) -> Vec<Complex<T>> {
        (0..self.n)
            .map(|i| (0..self.n).fold(Complex::new(T::zero(), T::zero()), |acc, j| acc + self[(i, j)] * v[j]))
            .collect()
    }

    /// `max |A_ij - conj(A_ji)|`.
    pub fn hermitian_defect(&self) -> T {
        let mut worst = T::zero();
        for i in 0..self.n {
            for j in 0..self.n {
                worst = worst.max((self[(i, j)] - self[(j, i)].conj()).norm());
            }
        }
        worst
    }

    pub fn max_abs_diff(&self, other: &Self) -> T {
        self.data.iter().zip(&other.data).fold(T::zero(), |m, (a, b)| m.max((*a - *b).norm()))
    }

    /// Lower-triangular `L` with `A = L L^*`.
    pub fn cholesky(&self) -> Result<Self> {
        let n = self.n;
        let mut l = Self::zeros(n);
        for j in 0..n {
            let mut d = self[(j, j)].re;
            for k in 0..j {
                d -= l[(j, k)].norm_sqr();
            }
            if !(d > T::zero()) {
                return Err(Error::SingularGram { pivot: d.to_f64_lossy() });
            }
            let d = d.sqrt();
            l[(j, j)] = Complex::new(d, T::zero());
            for i in j + 1..n {
                let mut s = self[(i, j)];
                for k in 0..j {
                    s = s - l[(i, k)] * l[(j, k)].conj();
                }
                l[(i, j)] = s / d;
            }
        }
        Ok(l)
    }

    /// Solves `L y = b` for lower-triangular `self`.
    pub fn forward_solve(&self, b: &[Complex<T>]) -> Vec<Complex<T>> {
        let mut y = b.to_vec();
        for i in 0..self.n {
            for k in 0..i {
                let t = self[(i, k)] * y[k];
                y[i] = y[i] - t;
            }
            y[i] = y[i] / self[(i, i)];
        }
        y
    }

    /// Solves `L^* x = y` for lower-triangular `self`.
    pub fn adjoint_back_solve(&self, y: &[Complex<T>]) -> Vec<Complex<T>> {
        let mut x = y.to_vec();
        for i in (0..self.n).rev() {
            for k in i + 1..self.n {
                let t = self[(k, i)].conj() * x[k];
                x[i] = x[i] - t;
            }
            x[i] = x[i] / self[(i, i)].conj();
        }
        x
    }

    /// Solves `A x = b` for Hermitian positive definite `A`.
    pub fn solve_hpd(&self, b: &[Complex<T>]) -> Result<Vec<Complex<T>>> {
        let l = self.cholesky()?;
        Ok(l.adjoint_back_solve(&l.forward_solve(b)))
    }

    /// Eigenvalues of a Hermitian matrix, ascending.
    pub fn hermitian_eigenvalues(&self) -> Vec<T> {
        let n = self.n;
        // H = X + iY  ->  [[X, -Y], [Y, X]], whose spectrum is that of H twice
        let m = 2 * n;
        let mut a = vec![T::zero(); m * m];
        for i in 0..n {
            for j in 0..n {
                let z = self[(i, j)];
                a[i * m + j] = z.re;
                a[(i + n) * m + j + n] = z.re;
                a[i * m + j + n] = -z.im;
                a[(i + n) * m + j] = z.im;
            }
        }
        let mut ev = jacobi_eigenvalues(&mut a, m);
        ev.sort_by(|x, y| x.partial_cmp(y).unwrap_or(std::cmp::Ordering::Equal));
        ev.into_iter().step_by(2).collect()
    }

    /// Largest `lambda` with `A v = lambda B v`, for Hermitian `A` and Hermitian positive definite `B`.
    pub fn generalized_max_eigenvalue(a: &Self, b: &Self) -> Result<T> {
        let l = b.cholesky()?;
        let n = a.n;
        // C = L^{-1} A L^{-*}
        let mut tmp = Self::zeros(n);
        for j in 0..n {
            let col: Vec<_> = (0..n).map(|i| a[(i, j)]).collect();
            let y = l.forward_solve(&col);
            for i in 0..n {
                tmp[(i, j)] = y[i];
            }
        }
        let mut cm = Self::zeros(n);
        for i in 0..n {
            // row i of tmp L^{-*} = conj(L^{-1} conj(row))
            let row: Vec<_> = (0..n).map(|j| tmp[(i, j)].conj()).collect();
            let y = l.forward_solve(&row);
            for j in 0..n {
                cm[(i, j)] = y[j].conj();
            }
        }
        let sym = Self::from_fn(n, |i, j| (cm[(i, j)] + cm[(j, i)].conj()) * c::<T>(0.5));
        Ok(sym.hermitian_eigenvalues().last().copied().unwrap_or_else(T::zero))
    }
}

impl<T> std::ops::Index<(usize, usize)> for CMatrix<T> {
    type Output = Complex<T>;
    fn index(&self, (i, j): (usize, usize)) -> &Complex<T> {
        &self.data[i * self.n + j]
    }
}

impl<T> std::ops::IndexMut<(usize, usize)> for CMatrix<T> {
    fn index_mut(&mut self, (i, j): (usize, usize)) -> &mut Complex<T> {
        &mut self.data[i * self.n + j]
    }
}

/// Cyclic Jacobi on a real symmetric matrix stored row-major; destroys `a`.
fn jacobi_eigenvalues<T: Real>(a: &mut [T], n: usize) -> Vec<T> {
    let off = |a: &[T]| {
        let mut s = T::zero();
        for i in 0..n {
            for j in 0..n {
                if i != j {
                    s += a[i * n + j] * a[i * n + j];
                }
            }
        }
        s
    };
    let scale: T = a.iter().map(|v| *v * *v).sum::<T>().max(T::min_positive_value());
    let tol = T::epsilon() * T::epsilon() * scale;
    for _sweep in 0..100 {
        if off(a) <= tol {
            break;
        }
        for p in 0..n {
            for q in p + 1..n {
                let apq = a[p * n + q];
                if apq == T::zero() {
                    continue;
                }
                let app = a[p * n + p];
                let aqq = a[q * n + q];
                let theta = (aqq - app) / (c::<T>(2.0) * apq);
                let t = theta.signum() / (theta.abs() + (theta * theta + T::one()).sqrt());
                let cs = T::one() / (t * t + T::one()).sqrt();
                let sn = t * cs;
                for k in 0..n {
                    let akp = a[k * n + p];
                    let akq = a[k * n + q];
                    a[k * n + p] = cs * akp - sn * akq;
                    a[k * n + q] = sn * akp + cs * akq;
                }
                for k in 0..n {
                    let apk = a[p * n + k];
                    let aqk = a[q * n + k];
                    a[p * n + k] = cs * apk - sn * aqk;
                    a[q * n + k] = sn * apk + cs * aqk;
                }
            }
        }
    }
    (0..n).map(|i| a[i * n + i]).collect()
}
