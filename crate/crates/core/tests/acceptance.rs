//! Acceptance suite: one PASS/FAIL line per criterion; nonzero exit if any fails.

mod common;

use std::f64::consts::PI;
use std::time::Instant;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;

use suris_core::action_angle::build_chart;
use suris_core::basis::InnerProductContext;
use suris_core::dynamics::{first_integral, step, PhasePoint};
use suris_core::elliptic::{rotation_number_special, theta_special};
use suris_core::geometry::{curve_for_rotation_number, rotation_number_on_curve, CurveParams, InvariantCurve};
use suris_core::lab::{
    beta_convexity_defect, periodic_rigidity_obstruction, verify_action_coefficient_bound, verify_action_constancy,
    verify_deviation_laws, verify_orthogonality, verify_projection_contraction,
};
use suris_core::orbits::{beta, rationals_in};
use suris_core::potentials::{Potential, SurisParams, TrigPerturbation};
use suris_core::Result;

use common::{sup_diff, unit, DIRECTION};

struct Outcome {
    passed: bool,
    detail: String,
}

fn generic(eps: f64) -> SurisParams<f64> {
    SurisParams::along(DIRECTION, eps).unwrap()
}

fn c1_conservation() -> Result<Outcome> {
    let start = Instant::now();
    let worst = [0.02, 0.05, 0.1]
        .par_iter()
        .flat_map(|&eps| (0..100u64).into_par_iter().map(move |seed| (eps, seed)))
        .map(|(eps, seed)| {
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            let dir: [f64; 4] = std::array::from_fn(|_| rng.gen_range(-1.0..1.0));
            let p = SurisParams::along(dir, eps)?;
            let v = Potential::suris(p);
            let mut z = PhasePoint::new(rng.gen_range(0.0..1.0), rng.gen_range(-0.5..0.5));
            let i0 = first_integral(&p, z);
            let mut w: f64 = 0.0;
            for _ in 0..10_000 {
                z = step(&v, z);
                w = w.max((first_integral(&p, z) - i0).abs());
            }
            Ok(w)
        })
        .collect::<Result<Vec<_>>>()?
        .into_iter()
        .fold(0.0, f64::max);
    let secs = start.elapsed().as_secs_f64();
    Ok(Outcome { passed: worst < 1e-9 && secs < 10.0, detail: format!("max drift {worst:.2e}, {secs:.2} s") })
}

fn c2_invariance() -> Result<Outcome> {
    let p = generic(0.05);
    let mut worst: f64 = 0.0;
    for eta in [-0.5, 0.0, 0.5] {
        for sigma in [1i8, -1] {
            let curve = InvariantCurve::new(p, CurveParams::new(eta, sigma, 0)?)?;
            worst = worst.max(curve.invariance_residual(256)?);
        }
    }
    Ok(Outcome { passed: worst < 1e-8, detail: format!("max graph distance {worst:.2e}") })
}

fn c3_coverage() -> Result<Outcome> {
    let p = generic(0.05);
    let rats = rationals_in(1.0 / 6.0, 1.0 / 3.0, 12);
    let errs = rats
        .par_iter()
        .map(|&(a, b)| {
            let rho = a as f64 / b as f64;
            let curve = curve_for_rotation_number(&p, rho, 1, 0)?;
            Ok((rotation_number_on_curve(&curve, 20_000)?.value() - rho).abs())
        })
        .collect::<Result<Vec<f64>>>()?;
    let worst = errs.iter().cloned().fold(0.0, f64::max);
    Ok(Outcome { passed: worst < 1e-6, detail: format!("{} rationals, max error {worst:.2e}", rats.len()) })
}

fn c4_elliptic() -> Result<Outcome> {
    let mut chart_err: f64 = 0.0;
    let mut rot_err: f64 = 0.0;
    for eps in [0.02, 0.08] {
        let p = SurisParams::special(eps)?;
        let chart = build_chart(&p, 0.25)?;
        let eta = chart.eta();
        for i in 0..512 {
            let x = (i as f64 + 0.5) / 512.0;
            chart_err = chart_err.max((chart.theta(x) - theta_special(eps, eta, x)?).abs());
        }
        for eta in [-0.3, 0.0, 0.3] {
            let curve = InvariantCurve::new(p, CurveParams::main(eta))?;
            let birkhoff = rotation_number_on_curve(&curve, 20_000)?.value();
            rot_err = rot_err.max((rotation_number_special(eps, eta)? - birkhoff).abs());
        }
    }
    Ok(Outcome {
        passed: chart_err < 1e-7 && rot_err < 1e-5,
        detail: format!("chart {chart_err:.2e}, rotation {rot_err:.2e}"),
    })
}

fn c5_degeneration() -> Result<Outcome> {
    let ctx = InnerProductContext::new(SurisParams::zero(), 2048)?;
    let mut basis_err: f64 = 0.0;
    for q in (-32i64..=32).filter(|q| *q != 0) {
        let f = ctx.basis_vector(q)?.values;
        let reference: Vec<_> = ctx
            .grid()
            .iter()
            .map(|&x| {
                let e = num_complex::Complex64::from_polar(1.0, 2.0 * PI * q as f64 * x);
                if q.abs() >= 3 { e } else { (e - 1.0) / num_complex::Complex64::new(0.0, 2.0 * PI * q as f64) }
            })
            .collect();
        basis_err = basis_err.max(sup_diff(&f, &reference));
    }
    let g = ctx.gram_low_modes()?;
    let modes = [0i64, 1, -1, 2, -2];
    let mut gram_err: f64 = 0.0;
    for (i, &a) in modes.iter().enumerate() {
        for (j, &b) in modes.iter().enumerate() {
            let i_ = num_complex::Complex64::new(0.0, 1.0);
            let exact = match (a, b) {
                (0, 0) => num_complex::Complex64::new(1.0, 0.0),
                (0, q) => -i_ / (2.0 * PI * q as f64),
                (p, 0) => i_ / (2.0 * PI * p as f64),
                (p, q) => num_complex::Complex64::new((if p == q { 2.0 } else { 1.0 }) / (4.0 * PI * PI * (p * q) as f64), 0.0),
            };
            gram_err = gram_err.max((g[(i, j)] - exact).norm());
        }
    }
    Ok(Outcome {
        passed: basis_err < 1e-10 && gram_err < 1e-9,
        detail: format!("basis {basis_err:.2e}, gram {gram_err:.2e}"),
    })
}

fn c6_orthogonality() -> Result<Outcome> {
    let start = Instant::now();
    let grids: Vec<usize> = (5..=11).map(|k| 1usize << k).collect();
    let rep = verify_orthogonality(&generic(0.02), 32, &grids)?;
    let secs = start.elapsed().as_secs_f64();
    let vals = &rep.measured["max_inner_product"];
    let seq: Vec<String> = vals.iter().map(|v| format!("{v:.1e}")).collect();
    Ok(Outcome { passed: rep.passed && secs < 60.0, detail: format!("N=32..2048: [{}], {secs:.1} s", seq.join(", ")) })
}

fn c7_constancy() -> Result<Outcome> {
    let rats = [(1, 6), (1, 5), (1, 4), (2, 7), (1, 3)];
    let rep = verify_action_constancy(&generic(0.05), &rats, &[0.0, 0.2, 0.4, 0.6, 0.8])?;
    let worst = rep.measured["action_range"].iter().cloned().fold(0.0, f64::max);
    Ok(Outcome { passed: rep.passed, detail: format!("max action range {worst:.2e}") })
}

fn suris_delta(norm: f64) -> [f64; 4] {
    unit(DIRECTION).map(|d| d * norm)
}

fn c8_deviation() -> Result<Outcome> {
    let rep = verify_deviation_laws(&generic(0.05), suris_delta(1e-2), 4, 1, 5, 0.1)?;
    let a = rep.fits["action_deviation"];
    let o = rep.fits["orbit_deviation"];
    Ok(Outcome {
        passed: rep.passed,
        detail: format!("action exponent {:.4} (R2 {:.6}), orbit exponent {:.4}", a.exponent, a.r_squared, o.exponent),
    })
}

fn c9_coefficients() -> Result<Outcome> {
    let qs: Vec<i64> = (3..=16).collect();
    let rep = verify_action_coefficient_bound(&generic(0.05), suris_delta(1e-2), 4, &qs, 2048)?;
    let r = &rep.measured["max_ratio"];
    Ok(Outcome {
        passed: rep.passed,
        detail: format!("ratios {:.4e}..{:.4e}, spread {:.4}", r[0], r[r.len() - 1], rep.measured["ratio_spread"][0]),
    })
}

fn c10_projection() -> Result<Outcome> {
    let ps = generic(0.05);
    // scale the increment so that its C1 norm is 1e-2
    let probe = Potential::suris_increment(ps, suris_delta(1e-2))?.cr_norm(1)?;
    let rep = verify_projection_contraction(&ps, suris_delta(1e-2 * 1e-2 / probe), 5, 2048)?;
    let seq: Vec<String> = rep.measured["residual_norm"].iter().map(|v| format!("{v:.1e}")).collect();
    Ok(Outcome { passed: rep.passed, detail: format!("residuals [{}]", seq.join(", ")) })
}

fn c11_obstruction() -> Result<Outcome> {
    let zero = periodic_rigidity_obstruction(&Potential::Constant(0.7), 1, 2)?;
    let a = 0.01;
    let cosine = periodic_rigidity_obstruction(&Potential::trig(TrigPerturbation::cosine(2, a)), 1, 2)?;
    let half = periodic_rigidity_obstruction(&Potential::suris(SurisParams::new(0.0, 0.0, -0.03, 0.04)?), 1, 2)?;
    Ok(Outcome {
        passed: zero < 1e-12 && cosine >= 0.9 * 2.0 * PI * a && half > 0.0,
        detail: format!("constant {zero:.1e}, cosine {cosine:.6}, half-periodic Suris {half:.6}"),
    })
}

fn c12_beta() -> Result<Outcome> {
    let zero = Potential::<f64>::zero();
    let mut free_err: f64 = 0.0;
    for q in 1..=12i64 {
        for p in -q..=q {
            if num_gcd(p, q) == 1 {
                let b: f64 = beta(&zero, p, q)?;
                free_err = free_err.max((b - (p * p) as f64 / (2 * q * q) as f64).abs());
            }
        }
    }
    let (defect, samples) = beta_convexity_defect(&Potential::suris(generic(0.05)), 12)?;
    Ok(Outcome {
        passed: free_err < 1e-12 && defect <= 1e-9,
        detail: format!("free error {free_err:.1e}, convexity defect {defect:.2e} over {} rationals", samples.len()),
    })
}

fn num_gcd(a: i64, b: i64) -> i64 {
    if b == 0 { a.abs() } else { num_gcd(b, a % b) }
}

fn main() {
    let criteria: [(&str, fn() -> Result<Outcome>); 12] = [
        ("first-integral conservation", c1_conservation),
        ("invariant-graph invariance", c2_invariance),
        ("rotation-interval coverage", c3_coverage),
        ("elliptic special case", c4_elliptic),
        ("basis degeneration at eps=0", c5_degeneration),
        ("orthogonality of harmonics", c6_orthogonality),
        ("action constancy on curves", c7_constancy),
        ("action/orbit deviation scaling", c8_deviation),
        ("coefficient bound mechanism", c9_coefficients),
        ("projection contraction", c10_projection),
        ("periodic rigidity obstruction", c11_obstruction),
        ("beta sanity and convexity", c12_beta),
    ];
    let mut failures = 0;
    for (i, (name, run)) in criteria.iter().enumerate() {
        let (ok, detail) = match run() {
            Ok(o) => (o.passed, o.detail),
            Err(e) => (false, format!("error: {e}")),
        };
        if !ok {
            failures += 1;
        }
        println!("criterion {:>2} {:<32} {}  {}", i + 1, name, if ok { "PASS" } else { "FAIL" }, detail);
    }
    println!("acceptance: {} passed, {} failed", criteria.len() - failures, failures);
    if failures > 0 {
        std::process::exit(1);
    }
}
