//! Legendre elliptic integrals of the first kind via Carlson's `R_F`, and the
//! closed forms they give for the symmetric Suris potential `C = -eps`,
//! `A = B = D = 0`.

use crate::error::{Error, Result};
use crate::scalar::{c, Real};

/// Carlson's symmetric integral `R_F(x, y, z)` by duplication.
pub fn carlson_rf<T: Real>(x: T, y: T, z: T) -> Result<T> {
    if x < T::zero() || y < T::zero() || z < T::zero() {
        return Err(Error::domain("carlson_rf", "negative argument"));
    }
    let zeros = [x, y, z].iter().filter(|v| **v == T::zero()).count();
    if zeros > 1 {
        return Err(Error::domain("carlson_rf", "two arguments vanish"));
    }
    let (mut x, mut y, mut z) = (x, y, z);
    let quarter = c::<T>(0.25);
    let third = T::one() / c(3.0);
    let stop = T::epsilon().powf(T::one() / c(6.0)) * c(0.2);
    for _ in 0..100 {
        let a = (x + y + z) * third;
        let dx = T::one() - x / a;
        let dy = T::one() - y / a;
        let dz = T::one() - z / a;
        if dx.abs().max(dy.abs()).max(dz.abs()) < stop {
            let e2 = dx * dy - dz * dz;
            let e3 = dx * dy * dz;
            let series = T::one() - e2 / c(10.0) + e3 / c(14.0) + e2 * e2 / c(24.0) - c::<T>(3.0) * e2 * e3 / c(44.0);
            return Ok(series / a.sqrt());
        }
        let (sx, sy, sz) = (x.sqrt(), y.sqrt(), z.sqrt());
        let lambda = sx * sy + sy * sz + sz * sx;
        x = (x + lambda) * quarter;
        y = (y + lambda) * quarter;
        z = (z + lambda) * quarter;
    }
    Err(Error::NoConvergence { iterations: 100, residual: f64::NAN })
}

fn check_modulus<T: Real>(k: T) -> Result<T> {
    let k2 = k * k;
    if !(k2 < T::one()) {
        return Err(Error::domain("elliptic integral", format!("k^2 = {k2} must be below 1")));
    }
    Ok(k2)
}

/// Complete integral `K(k) = int_0^{pi/2} dt / sqrt(1 - k^2 sin^2 t)`.
pub fn elliptic_k<T: Real>(k: T) -> Result<T> {
    let k2 = check_modulus(k)?;
    carlson_rf(T::zero(), T::one() - k2, T::one())
}

/// Incomplete integral `F(phi, k) = int_0^phi dt / sqrt(1 - k^2 sin^2 t)` for any real `phi`.
pub fn elliptic_f<T: Real>(phi: T, k: T) -> Result<T> {
    let k2 = check_modulus(k)?;
    let pi = T::PI();
    let n = (phi / pi).round();
    let r = phi - n * pi;
    let (s, co) = r.sin_cos();
    let partial = s * carlson_rf(co * co, T::one() - k2 * s * s, T::one())?;
    if n == T::zero() {
        return Ok(partial);
    }
    Ok(c::<T>(2.0) * n * elliptic_k(k)? + partial)
}

/// Squared modulus `4 eps / ((1 + eps)^2 - eta^2)` of the symmetric case.
pub fn special_modulus_sq<T: Real>(eps: T, eta: T) -> Result<T> {
    let den = (T::one() + eps) * (T::one() + eps) - eta * eta;
    if !(den > T::zero()) {
        return Err(Error::domain("special case", "level outside the graph regime"));
    }
    let k2 = c::<T>(4.0) * eps / den;
    if !(k2 < T::one()) || k2 < T::zero() {
        return Err(Error::domain("special case", format!("k^2 = {k2} outside [0, 1)")));
    }
    Ok(k2)
}

/// Angle `F(2 pi x, k) / 4K(k)` on the level `eta` of the symmetric case.
pub fn theta_special<T: Real>(eps: T, eta: T, x: T) -> Result<T> {
    let k = special_modulus_sq(eps, eta)?.sqrt();
    Ok(elliptic_f(T::two_pi() * x, k)? / (c::<T>(4.0) * elliptic_k(k)?))
}

/// Rotation number `F(acos(-eta / (1 + eps)), k) / 4K(k)` of the level `eta` of the symmetric case.
pub fn rotation_number_special<T: Real>(eps: T, eta: T) -> Result<T> {
    let k = special_modulus_sq(eps, eta)?.sqrt();
    let arg = -eta / (T::one() + eps);
    if arg.abs() > T::one() {
        return Err(Error::domain("rotation_number_special", "acos argument outside [-1, 1]"));
    }
    Ok(elliptic_f(arg.acos(), k)? / (c::<T>(4.0) * elliptic_k(k)?))
}
