mod common;

use std::f64::consts::PI;

use num_complex::Complex64;
use proptest::prelude::*;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use suris_core::action_angle::{expansion_terms_with, ExpansionOptions};
use suris_core::basis::{gram, r_q_assignment, InnerProductContext};
use suris_core::potentials::{Param, Potential, SurisParams, SurisPotential, TrigPerturbation};
use suris_core::Error;

use common::{sup_diff, DIRECTION};

fn ctx(eps: f64, n: usize) -> InnerProductContext<f64> {
    InnerProductContext::new(SurisParams::along(DIRECTION, eps).unwrap(), n).unwrap()
}

fn random_trig(rng: &mut ChaCha8Rng, m: usize, amp: f64) -> Potential<f64> {
    let cs = (0..m).map(|_| rng.gen_range(-amp..amp)).collect();
    let sn = (0..m).map(|_| rng.gen_range(-amp..amp)).collect();
    Potential::trig(TrigPerturbation::new(cs, sn))
}

fn minus(a: &[Complex64], b: &[Complex64]) -> Vec<Complex64> {
    a.iter().zip(b).map(|(x, y)| x - y).collect()
}

#[test]
fn plain_fourier_products() {
    let flat = ctx(0.0, 256);
    for p in -5i64..=5 {
        for q in -5i64..=5 {
            let v = flat.inner(&flat.e(p), &flat.e(q)).unwrap();
            let want = if p == q { 1.0 } else { 0.0 };
            assert!((v - want).norm() < 1e-14);
        }
    }
    let c = ctx(0.05, 2048);
    let one = c.e(0);
    assert!((c.inner(&one, &one).unwrap() - 1.0).norm() < 1e-12);
    assert!((c.weight_integral() - 1.0).abs() < 1e-10);
    assert!(c.weight().iter().all(|w| *w > 0.0));
    for p in -6i64..=6 {
        for q in -6i64..=6 {
            let v = c.inner(&c.e(p), &c.e(q)).unwrap();
            assert!((v - if p == q { 1.0 } else { 0.0 }).norm() < 1e-9);
        }
    }
    let other = ctx(0.05, 1024);
    assert!(matches!(c.inner(&c.e(1), &other.e(1)), Err(Error::GridMismatch { .. })));
}

#[test]
fn rq_table() {
    let r = |q| r_q_assignment(q).unwrap().r;
    assert_eq!([r(3), r(4), r(5), r(6), r(7), r(8)], [(1, 3), (1, 4), (2, 5), (1, 6), (2, 7), (1, 4)]);
    let a = r_q_assignment(9).unwrap();
    assert_eq!((a.p, a.t, a.r), (2, 1, (2, 9)));
    let a = r_q_assignment(100).unwrap();
    assert_eq!((a.p, a.t, a.r), (25, 0, (1, 4)));
    assert!(r_q_assignment(2).is_err());
    for q in 9..200 {
        let v: f64 = r_q_assignment(q).unwrap().value();
        assert!((1.0 / 6.0..=1.0 / 3.0).contains(&v));
    }
}

#[test]
fn flat_basis_vectors() {
    let c = ctx(0.0, 512);
    let f1 = c.basis_vector(1).unwrap().values;
    let want: Vec<Complex64> = c
        .grid()
        .iter()
        .map(|&x| Complex64::new((2.0 * PI * x).sin() / (2.0 * PI), (1.0 - (2.0 * PI * x).cos()) / (2.0 * PI)))
        .collect();
    assert!(sup_diff(&f1, &want) < 1e-14);
    assert!(sup_diff(&f1, &c.big_e(1)) < 1e-14);
    let f5 = c.basis_vector(5).unwrap().values;
    let want: Vec<Complex64> = c.grid().iter().map(|&x| Complex64::from_polar(1.0, 10.0 * PI * x)).collect();
    assert!(sup_diff(&f5, &want) < 1e-12);
}

#[test]
fn conjugate_symmetry() {
    let c = ctx(0.05, 2048);
    for q in 1..=32i64 {
        let a = c.basis_vector(q).unwrap().values;
        let b = c.basis_vector(-q).unwrap().values;
        let conj: Vec<Complex64> = a.iter().map(|z| z.conj()).collect();
        assert!(sup_diff(&b, &conj) < 1e-12, "q {q}");
    }
}

#[test]
fn big_e_against_high_e() {
    // <E_j, e_q> vanishes for |q| >= 3; the q = 0 pairing is i/(2 pi j), not zero
    let c = ctx(0.05, 2048);
    for j in [1i64, -1, 2, -2] {
        for q in (3..=32i64).flat_map(|q| [q, -q]) {
            assert!(c.inner(&c.big_e(j), &c.e(q)).unwrap().norm() < 1e-9);
        }
        let z = c.inner(&c.big_e(j), &c.e(0)).unwrap();
        assert!((z - Complex64::new(0.0, 1.0 / (2.0 * PI * j as f64))).norm() < 1e-9);
    }
}

#[test]
fn high_low_orthogonality() {
    let c = ctx(0.05, 2048);
    let low: Vec<_> = [1i64, -1, 2, -2].iter().map(|&j| c.basis_vector(j).unwrap().values).collect();
    for q in (3..=32i64).flat_map(|q| [q, -q]) {
        let f = c.basis_vector(q).unwrap().values;
        for l in &low {
            assert!(c.inner(&f, l).unwrap().norm() < 1e-6);
        }
    }
}

#[test]
fn tilde_approximation_decays_like_one_over_q() {
    let p = SurisParams::along(DIRECTION, 0.05).unwrap();
    let c = InnerProductContext::new(p, 2048).unwrap();
    let t = expansion_terms_with(&p, &ExpansionOptions { grid: 2048, ..Default::default() }).unwrap();
    let k_of = |q: i64| q as f64 * sup_diff(&c.basis_vector(q).unwrap().values, &c.e_tilde(q, &t.u).unwrap());
    let fitted = (9..=32).map(k_of).fold(0.0, f64::max);
    let later = (33..=64).map(k_of).fold(0.0, f64::max);
    assert!(fitted.is_finite() && fitted > 0.0);
    assert!(later <= 1.5 * fitted, "{fitted} {later}");
}

#[test]
fn coefficient_examples() {
    let c = ctx(0.0, 512);
    assert_eq!(c.coefficient(&Potential::zero(), 4).unwrap(), Complex64::new(0.0, 0.0));
    for m in 3..=7usize {
        let w = Potential::trig(TrigPerturbation::cosine(m, 1.0));
        assert!((c.coefficient(&w, m as i64).unwrap() - 0.5).norm() < 1e-13);
    }
    let c = ctx(0.05, 2048);
    let fine = c.with_grid(4096);
    let w = random_trig(&mut ChaCha8Rng::seed_from_u64(3), 8, 0.01);
    for q in [-9i64, -3, 0, 1, 2, 3, 5, 12, 20] {
        let a = c.coefficient(&w, q).unwrap();
        let b = fine.coefficient(&w, q).unwrap();
        assert!((a - b).norm() < 1e-9, "q {q}");
    }
}

#[test]
fn gram_properties() {
    let c = ctx(0.05, 2048);
    let g = c.gram_low_modes().unwrap();
    assert_eq!(g.hermitian_defect(), 0.0);
    let vecs: Vec<_> = [0i64, 1, -1, 2, -2].iter().map(|&q| c.basis_vector(q).unwrap().values).collect();
    assert!(g.max_abs_diff(&gram(&c, &vecs).unwrap()) < 1e-15);
    for eps in [0.0, 0.025, 0.05, 0.075, 0.1] {
        let ev = ctx(eps, 1024).gram_low_modes().unwrap().hermitian_eigenvalues();
        assert!(ev[0] > 0.0, "eps {eps}");
    }
}

#[test]
fn projection_examples() {
    let c = ctx(0.05, 2048);
    // an element of the span is reproduced
    let pot = SurisPotential::new(*c.params());
    let span = c.sample_fn(|x| 0.3 + 0.02 * pot.partial(Param::A, x) - 0.01 * pot.partial(Param::D, x));
    let pr = c.project_low_modes(&span).unwrap();
    assert!(sup_diff(&pr.values, &span) < 1e-10);
    // residual orthogonal to all five modes
    let mut rng = ChaCha8Rng::seed_from_u64(11);
    for _ in 0..5 {
        let w = c.sample_potential(&random_trig(&mut rng, 10, 0.01));
        let pr = c.project_low_modes(&w).unwrap();
        let r = minus(&w, &pr.values);
        for j in [0i64, 1, -1, 2, -2] {
            assert!(c.inner(&r, &c.basis_vector(j).unwrap().values).unwrap().norm() < 1e-9);
        }
    }
    // f_3 at eps = 0 has no low-mode component
    let flat = ctx(0.0, 512);
    let bump = Potential::trig(TrigPerturbation::cosine(3, 0.01));
    let pr = flat.project_low_modes(&flat.sample_potential(&bump)).unwrap();
    assert!(pr.values.iter().all(|z| z.norm() < 1e-14));
    assert!(pr.increments.iter().all(|v| v.abs() < 1e-14));
}

#[test]
fn riesz_defect_trend() {
    assert!(ctx(0.0, 512).riesz_defect(16).unwrap() < 1e-9);
    let d05 = ctx(0.05, 2048).riesz_defect(32).unwrap();
    let d025 = ctx(0.025, 2048).riesz_defect(32).unwrap();
    assert!(d05 < 1.0, "{d05}");
    assert!(d025 < d05);
}

#[test]
fn parseval_constant_is_stable() {
    let c = ctx(0.05, 2048);
    let qs: Vec<i64> = (3..=64i64).flat_map(|q| [q, -q]).collect();
    c.prefetch(&qs).unwrap();
    let mut rng = ChaCha8Rng::seed_from_u64(2024);
    let ratios: Vec<f64> = (0..50)
        .map(|_| {
            let w = c.sample_potential(&random_trig(&mut rng, 12, 1.0));
            let r = minus(&w, &c.project_low_modes(&w).unwrap().values);
            let sum: f64 = c.coefficients(&r, &qs).unwrap().iter().map(|z| z.norm_sqr()).sum();
            c.norm(&r).unwrap().powi(2) / sum
        })
        .collect();
    let hi = ratios.iter().cloned().fold(0.0, f64::max);
    let lo = ratios.iter().cloned().fold(f64::INFINITY, f64::min);
    assert!(hi < 2.0 && lo > 0.5, "{lo} {hi}");
}

fn low_mode_norms(eps: f64, coeffs: [f64; 5]) -> (f64, f64) {
    let c = ctx(eps, 2048);
    let pot = SurisPotential::new(*c.params());
    let phi = |x: f64| coeffs[0] + Param::ALL.iter().zip(&coeffs[1..]).map(|(p, k)| k * pot.partial(*p, x)).sum::<f64>();
    let dphi = |x: f64| Param::ALL.iter().zip(&coeffs[1..]).map(|(p, k)| k * pot.partial_derivative(*p, 1, x)).sum::<f64>();
    let ctx_norm = c.norm(&c.sample_fn(phi)).unwrap();
    let c1 = c.grid().iter().map(|&x| phi(x).abs().max(dphi(x).abs())).fold(0.0, f64::max);
    (ctx_norm, c1)
}

#[test]
fn norm_equivalence_band() {
    let mut rng = ChaCha8Rng::seed_from_u64(5);
    let samples: Vec<[f64; 5]> = (0..10).map(|_| std::array::from_fn(|_| rng.gen_range(-1.0..1.0))).collect();
    let m = 20.0;
    let mut per_eps = Vec::new();
    for eps in [0.02, 0.05, 0.1] {
        let ratios: Vec<f64> = samples.iter().map(|k| {
            let (a, b) = low_mode_norms(eps, *k);
            a / b
        }).collect();
        assert!(ratios.iter().all(|r| (1.0 / m..=m).contains(r)), "eps {eps}: {ratios:?}");
        per_eps.push(ratios);
    }
    // the same function keeps nearly the same ratio as eps varies
    for (a, b) in per_eps[0].iter().zip(&per_eps[2]) {
        assert!((a / b).max(b / a) < 2.0);
    }
}

#[test]
fn tangent_approximation_is_quadratic() {
    let p = SurisParams::along(DIRECTION, 0.05).unwrap();
    let pot = SurisPotential::new(p);
    let dir = [0.6, 0.2, -0.5, 0.4];
    let err = |t: f64| {
        let q = SurisPotential::new(p.offset(dir.map(|d| d * t)).unwrap());
        (0..4096)
            .map(|i| {
                let x = i as f64 / 4096.0;
                let lin0: f64 = Param::ALL.iter().zip(&dir).map(|(w, d)| d * t * pot.partial(*w, x)).sum();
                let lin1: f64 = Param::ALL.iter().zip(&dir).map(|(w, d)| d * t * pot.partial_derivative(*w, 1, x)).sum();
                let e0 = q.value(x) - pot.value(x) - lin0;
                let e1 = q.vprime(x) - pot.vprime(x) - lin1;
                e0.abs().max(e1.abs())
            })
            .fold(0.0, f64::max)
    };
    let (a, b, c) = (err(0.02), err(0.01), err(0.005));
    for r in [a / b, b / c] {
        assert!((r - 4.0).abs() <= 0.8, "{r}");
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(16))]

    #[test]
    fn inner_product_is_hermitian_and_positive(seed in 0u64..1000) {
        let c = ctx(0.04, 512);
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let f = c.sample_potential(&random_trig(&mut rng, 6, 1.0));
        let g: Vec<Complex64> = c.e(3).iter().zip(&f).map(|(a, b)| a * b).collect();
        let fg = c.inner(&f, &g).unwrap();
        let gf = c.inner(&g, &f).unwrap();
        prop_assert!((fg - gf.conj()).norm() < 1e-13);
        prop_assert!(c.inner(&f, &f).unwrap().re >= 0.0);
    }
}
