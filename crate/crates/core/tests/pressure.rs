mod common;

use common::*;
use num_complex::Complex64;
use periodic_ns::config::{taylor_green, taylor_green_pressure};
use periodic_ns::forcing::Steady;
use periodic_ns::galerkin::Dynamics;
use periodic_ns::pressure::*;
use periodic_ns::spectral::{gradient, l2_inner, l2_norm, leray_project, random, SpectralField};
use periodic_ns::timestepper::{init_state, Integrator};
use std::f64::consts::TAU;

#[test]
fn zero_flow_gives_constant_pressure() {
    let u = SpectralField::zeros(3, 3, 2.0);
    let p = recover_pressure(&u, &u, 5.0).unwrap();
    let mut expect = SpectralField::zeros(3, 1, 2.0);
    expect.coeff_mut(WaveVector::ZERO)[0] = Complex64::new(5.0 / 8.0, 0.0);
    assert_eq!(p.p, expect);
    assert_eq!(p.mean_integral(), 5.0);
}

#[test]
fn taylor_green_pressure_field() {
    let (k, l, q0) = (4, TAU, 3.0);
    for t in [0.0f64, 0.3] {
        let u = taylor_green(k, l, 1.0).scaled((-2.0 * t).exp());
        let p = recover_pressure(&u, &SpectralField::zeros(k, 3, l), q0).unwrap();
        let exact = taylor_green_pressure(k, l, 1.0, 1.0, t, q0);
        assert!(l2_norm(&(&p.p - &exact)) <= 1e-13 * l2_norm(&exact));
        // pointwise against the closed form
        let x: [f64; 3] = [0.3, 1.1, 2.0];
        let analytic = 0.25 * ((2.0 * x[0]).cos() + (2.0 * x[1]).cos()) * (-4.0 * t).exp() + q0 / l.powi(3);
        assert!((evaluate(&p.p, x)[0] - analytic).abs() < 1e-13);
        let res = pressure_residuals(&p, &u, &SpectralField::zeros(k, 3, l), Dynamics::new(1.0)).unwrap();
        assert!(res.passes(1e-12), "{res:?}");
    }
}

#[test]
fn random_flow_residuals() {
    for seed in 0..4 {
        let u = random::solenoidal_field(4, 1.5, seed).scaled(0.3);
        let f = random::band_field(4, 3, 1.5, seed + 50, 0.0, 3.0, 0.0, 1.0);
        let p = recover_pressure(&u, &f, 1.0).unwrap();
        let res = pressure_residuals(&p, &u, &f, Dynamics::new(0.2)).unwrap();
        assert!(res.poisson <= 1e-12 * res.scale, "{res:?}");
        assert!(res.momentum <= 1e-12 * res.scale, "{res:?}");
        assert!(p.p.hermitian_defect() == 0.0 || p.p.hermitian_defect() < 1e-15 * p.p.max_abs());
    }
}

#[test]
fn gradient_forcing_shifts_pressure_only() {
    let (k, l) = (3, 1.0);
    let u0 = random::solenoidal_field(k, l, 9).scaled(0.05);
    let f = random::band_field(k, 3, l, 10, 1.0, 3.0, 0.0, 0.5);
    let mut s = random::band_field(k, 1, l, 11, 1.0, 3.0, 0.0, 0.5);
    s.coeff_mut(WaveVector::ZERO)[0] = Complex64::new(0.0, 0.0);
    let f_grad = &f + &gradient(&s);

    let p = recover_pressure(&u0, &f, 2.0).unwrap();
    let pg = recover_pressure(&u0, &f_grad, 2.0).unwrap();
    let shift = &pg.p - &p.p;
    assert!(l2_norm(&(&shift - &s)) <= 1e-12 * l2_norm(&s));

    let (fa, fb) = (Steady(f), Steady(f_grad));
    let ia = Integrator::new(Dynamics::new(0.1), Default::default(), &fa);
    let ib = Integrator::new(Dynamics::new(0.1), Default::default(), &fb);
    let (mut a, mut b) = (init_state(&u0, k), init_state(&u0, k));
    for _ in 0..20 {
        a = ia.step(&a, 0.01).unwrap().0;
        b = ib.step(&b, 0.01).unwrap().0;
    }
    assert!(l2_norm(&(&a.u - &b.u)) <= 1e-12 * l2_norm(&a.u));
}

#[test]
fn pressure_gradient_is_orthogonal_to_solenoidal_fields() {
    let u = random::solenoidal_field(3, 1.0, 2).scaled(0.5);
    let f = random::band_field(3, 3, 1.0, 3, 0.0, 3.0, 0.0, 1.0);
    let p = recover_pressure(&u, &f, 1.0).unwrap();
    let gp = gradient(&p.p);
    let scale = l2_norm(&gp);
    for seed in 0..5 {
        let v = leray_project(&random::band_field(3, 3, 1.0, 100 + seed, 0.0, 3.0, 0.0, 1.0));
        assert!(l2_inner(&gp, &v).unwrap().abs() <= 1e-12 * scale * l2_norm(&v));
    }
}

#[test]
fn evaluate_matches_oracle() {
    let f = random::band_field(2, 3, 1.3, 4, 0.0, f64::INFINITY, 0.0, 1.0);
    let x = [0.1, 0.77, 1.2];
    let a = evaluate(&f, x);
    let b = oracle::evaluate(&f, x);
    for (p, q) in a.iter().zip(&b) {
        assert!((p - q).abs() < 1e-13);
    }
}

#[test]
fn periodic_data_are_compatible() {
    let (k, l) = (3, 1.0);
    let u0 = random::solenoidal_field(k, l, 1);
    let f = random::band_field(k, 3, l, 2, 0.0, 3.0, 0.0, 1.0);
    let eval = |x: [f64; 3], _t: f64| {
        let v = evaluate(&f, x);
        [v[0], v[1], v[2]]
    };
    let rep = check_compatibility(&eval, &u0, &[0.0, 0.5], 2 * (k + 1), 1e-12);
    assert!(rep.passed, "{rep:?}");
    assert_eq!(rep.conditions.len(), 6 + 2 * 9);
    assert!(rep.conditions.iter().all(|c| c.max_jump <= 1e-13 * rep.scale));
}

#[test]
fn taylor_green_without_forcing_is_compatible() {
    let u0 = taylor_green(2, TAU, 1.0);
    let zero = |_: [f64; 3], _: f64| [0.0; 3];
    let rep = check_compatibility(&zero, &u0, &[0.0, 1.0], 6, 1e-12);
    assert!(rep.passed, "{rep:?}");
}

#[test]
fn linear_forcing_is_flagged_on_x1_faces() {
    let (k, l) = (2, 1.0);
    let u0 = random::solenoidal_field(k, l, 1);
    let f = random::band_field(k, 3, l, 2, 0.0, 2.0, 0.0, 1.0);
    let eval = |x: [f64; 3], _t: f64| {
        let v = evaluate(&f, x);
        [v[0], v[1] + 0.3 * x[0], v[2]]
    };
    let rep = check_compatibility(&eval, &u0, &[0.0], 2 * (k + 1), 1e-12);
    assert!(!rep.passed);
    for c in &rep.conditions {
        let flagged = c.max_jump > rep.tolerance;
        assert_eq!(flagged, c.component == 2 && c.axes == vec![1], "{c:?}");
    }
}
