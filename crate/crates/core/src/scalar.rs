//! Scalar abstraction shared by every numerical routine in the crate.
//!
//! All algorithms are written against [`Real`], which is implemented for
//! `f32` and `f64`. Tolerances that only make sense in double precision are
//! clamped against [`Real::epsilon`] where they are used.

use std::fmt::{Debug, Display};
use std::iter::Sum;
use std::ops::{AddAssign, DivAssign, MulAssign, SubAssign};

use num_complex::Complex;
use num_traits::{Float, FloatConst, FromPrimitive, ToPrimitive};
use rustfft::FftPlanner;
use serde::de::DeserializeOwned;
use serde::Serialize;

/// Floating-point scalar used throughout the library.
pub trait Real:
    Float
    + FloatConst
    + FromPrimitive
    + ToPrimitive
    + Sum
    + AddAssign
    + SubAssign
    + MulAssign
    + DivAssign
    + Default
    + Debug
    + Display
    + Send
    + Sync
    + Serialize
    + DeserializeOwned
    + 'static
{
    /// Converts an `f64` literal into the scalar type.
    fn lit(x: f64) -> Self;

    /// In-place forward DFT, `X_k = sum_j x_j e^{-2 pi i jk/n}` (unnormalized).
    fn fft_forward(buf: &mut [Complex<Self>]);

    /// In-place inverse DFT, `x_j = sum_k X_k e^{+2 pi i jk/n}` (unnormalized).
    fn fft_inverse(buf: &mut [Complex<Self>]);

    /// Converts an integer.
    fn from_int(n: i64) -> Self {
        Self::lit(n as f64)
    }

    /// `2 pi`.
    fn two_pi() -> Self {
        Self::TAU()
    }

    /// Lossy conversion to `f64` for reporting.
    fn to_f64_lossy(self) -> f64 {
        self.to_f64().unwrap_or(f64::NAN)
    }
}

macro_rules! impl_real {
    ($t:ty) => {
        impl Real for $t {
            #[inline]
            fn lit(x: f64) -> Self {
                x as $t
            }

            fn fft_forward(buf: &mut [Complex<Self>]) {
                let fft = FftPlanner::<$t>::new().plan_fft_forward(buf.len());
                fft.process(buf);
            }

            fn fft_inverse(buf: &mut [Complex<Self>]) {
                let fft = FftPlanner::<$t>::new().plan_fft_inverse(buf.len());
                fft.process(buf);
            }
        }
    };
}

impl_real!(f32);
impl_real!(f64);

/// Shorthand for [`Real::lit`].
#[inline]
pub(crate) fn c<T: Real>(x: f64) -> T {
    T::lit(x)
}

/// Compensated (Kahan–Babuška) accumulator.
#[derive(Debug, Clone, Copy, Default)]
pub struct KahanSum<T> {
    sum: T,
    comp: T,
}

impl<T: Real> KahanSum<T> {
    pub fn new() -> Self {
        Self { sum: T::zero(), comp: T::zero() }
    }

    pub fn add(&mut self, x: T) {
        let t = self.sum + x;
        if self.sum.abs() >= x.abs() {
            self.comp += (self.sum - t) + x;
        } else {
            self.comp += (x - t) + self.sum;
        }
        self.sum = t;
    }

    pub fn value(&self) -> T {
        self.sum + self.comp
    }
}

/// Compensated sum of a sequence.
pub fn kahan_sum<T: Real, I: IntoIterator<Item = T>>(items: I) -> T {
    let mut acc = KahanSum::new();
    for x in items {
        acc.add(x);
    }
    acc.value()
}

/// Tolerance that is at least a small multiple of machine epsilon.
pub(crate) fn floor_tol<T: Real>(tol: T) -> T {
    tol.max(T::epsilon() * c(64.0))
}
