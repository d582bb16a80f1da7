//! Independent reference computations for the integration tests.
#![allow(dead_code)]

use std::f64::consts::PI;

use num_complex::Complex64;

const GK_NODES: [f64; 8] = [
    0.991455371120812639206854697526329,
    0.949107912342758524526189684047851,
    0.864864423359769072789712788640926,
    0.741531185599394439863864773280788,
    0.586087235467691130294144845693013,
    0.405845151377397166906606412076961,
    0.207784955007898467600689403773245,
    0.000000000000000000000000000000000,
];
const GK_WK: [f64; 8] = [
    0.022935322010529224963732008058970,
    0.063092092629978553290700663189204,
    0.104790010322250183839876322541518,
    0.140653259715525918745189590510238,
    0.169004726639267902826583426598550,
    0.190350578064785409913256402421014,
    0.204432940075298892414161999234649,
    0.209482141084727828012999174891714,
];
const GK_WG: [f64; 4] = [
    0.129484966168869693270611432679082,
    0.279705391489276667901467771423780,
    0.381830050505118944950369775488975,
    0.417959183673469387755102040816327,
];

fn gk15(f: &dyn Fn(f64) -> f64, a: f64, b: f64) -> (f64, f64) {
    let c = 0.5 * (a + b);
    let h = 0.5 * (b - a);
    let fc = f(c);
    let mut k = fc * GK_WK[7];
    let mut g = fc * GK_WG[3];
    for i in 0..7 {
        let d = h * GK_NODES[i];
        let s = f(c - d) + f(c + d);
        k += GK_WK[i] * s;
        if i % 2 == 1 {
            g += GK_WG[i / 2] * s;
        }
    }
    (k * h, ((k - g) * h).abs())
}

/// Adaptive Gauss-Kronrod (7/15) quadrature.
pub fn integrate(f: &dyn Fn(f64) -> f64, a: f64, b: f64, tol: f64) -> f64 {
    fn rec(f: &dyn Fn(f64) -> f64, a: f64, b: f64, tol: f64, depth: u32) -> f64 {
        let (v, e) = gk15(f, a, b);
        if e <= tol || e <= 1e-15 * v.abs() || depth > 30 {
            return v;
        }
        let m = 0.5 * (a + b);
        rec(f, a, m, 0.5 * tol, depth + 1) + rec(f, m, b, 0.5 * tol, depth + 1)
    }
    rec(f, a, b, tol, 0)
}

/// Complete elliptic integral of the first kind by the arithmetic-geometric mean.
pub fn agm_k(k: f64) -> f64 {
    let (mut a, mut b) = (1.0, (1.0 - k * k).sqrt());
    for _ in 0..64 {
        let (an, bn) = (0.5 * (a + b), (a * b).sqrt());
        a = an;
        b = bn;
        if (a - b).abs() < 1e-17 {
            break;
        }
    }
    PI / (2.0 * a)
}

/// Incomplete first-kind integral by direct quadrature of its integrand.
pub fn quad_f(phi: f64, k: f64) -> f64 {
    integrate(&|t| 1.0 / (1.0 - k * k * t.sin().powi(2)).sqrt(), 0.0, phi, 1e-15)
}

/// K(0.5) to 20 digits, computed once with arbitrary-precision AGM.
pub const K_HALF_REFERENCE: f64 = 1.685_750_354_812_596_042_87;

/// `V'` from the complex form `(1/pi) arg(1 + a1 w + a2 w^2)`, `w = exp(-2 pi i x)`.
pub fn vprime_oracle(p: [f64; 4], x: f64) -> f64 {
    let [a, b, c, d] = p;
    let w = Complex64::from_polar(1.0, -2.0 * PI * x);
    let g = 1.0 + Complex64::new(-a, b) * w + Complex64::new(-c, d) * w * w;
    g.arg() / PI
}

/// `V(x) = int_0^x V'`.
pub fn v_oracle(p: [f64; 4], x: f64) -> f64 {
    integrate(&|s| vprime_oracle(p, s), 0.0, x, 1e-14)
}

/// Normalized angle on the level `eta` of the special case `A = B = D = 0, C = -eps`
/// from the density `1/sqrt(D^2 - (eta - gamma)^2)`, `gamma = 0`.
pub fn theta_special_oracle(eps: f64, eta: f64, x: f64) -> f64 {
    let dens = |s: f64| {
        let dd = 1.0 + eps * eps + 2.0 * eps * (4.0 * PI * s).cos();
        1.0 / (dd - eta * eta).sqrt()
    };
    integrate(&dens, 0.0, x, 1e-14) / integrate(&dens, 0.0, 1.0, 1e-14)
}

/// Largest-magnitude entry difference of two complex samples.
pub fn sup_diff(a: &[Complex64], b: &[Complex64]) -> f64 {
    a.iter().zip(b).map(|(u, v)| (u - v).norm()).fold(0.0, f64::max)
}

/// Unit direction used across tests for generic Suris parameters.
pub const DIRECTION: [f64; 4] = [1.0, -0.7, 0.5, 0.3];

pub fn unit(d: [f64; 4]) -> [f64; 4] {
    let n = d.iter().map(|v| v * v).sum::<f64>().sqrt();
    d.map(|v| v / n)
}

/// Least-squares slope of `log y` against `log x`.
pub fn loglog_slope(xs: &[f64], ys: &[f64]) -> f64 {
    let lx: Vec<f64> = xs.iter().map(|v| v.ln()).collect();
    let ly: Vec<f64> = ys.iter().map(|v| v.ln()).collect();
    let n = lx.len() as f64;
    let (mx, my) = (lx.iter().sum::<f64>() / n, ly.iter().sum::<f64>() / n);
    let sxy: f64 = lx.iter().zip(&ly).map(|(a, b)| (a - mx) * (b - my)).sum();
    let sxx: f64 = lx.iter().map(|a| (a - mx).powi(2)).sum();
    sxy / sxx
}
