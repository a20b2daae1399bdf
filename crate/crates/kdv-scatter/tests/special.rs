use kdv_scatter::quad::{adaptive, EndMap};
use kdv_scatter::special::*;
use kdv_scatter::C64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use std::f64::consts::PI;

fn k_quad(m: f64) -> f64 {
    let (v, _) = adaptive::<1>(0.0, PI / 2.0, 1e-15, |t| [C64::new(1.0 / (1.0 - m * m * t.sin().powi(2)).sqrt(), 0.0)]).unwrap();
    v[0].re
}

fn e_quad(m: f64) -> f64 {
    let (v, _) = adaptive::<1>(0.0, PI / 2.0, 1e-15, |t| [C64::new((1.0 - m * m * t.sin().powi(2)).sqrt(), 0.0)]).unwrap();
    v[0].re
}

#[test]
fn k_e_against_quadrature() {
    for m in [0.1, 0.5, 0.8, 0.95] {
        let (k, e) = (ellip_k(m).unwrap(), ellip_e(m).unwrap());
        assert!((k - k_quad(m)).abs() < 1e-12 * k, "K({m})");
        assert!((e - e_quad(m)).abs() < 1e-12 * e, "E({m})");
    }
}

#[test]
fn k_half_matches_agm_oracle() {
    // plain AGM(1, √(1−m²)) written out independently
    let m: f64 = 0.5;
    let (mut a, mut b) = (1.0f64, (1.0 - m * m).sqrt());
    for _ in 0..10 {
        let an = 0.5 * (a + b);
        b = (a * b).sqrt();
        a = an;
    }
    let k = ellip_k(m).unwrap();
    assert!((k - PI / (2.0 * a)).abs() < 1e-14 * k);
    assert!(k >= PI / 2.0 && ellip_e(m).unwrap() <= PI / 2.0);
}

#[test]
fn legendre_relation() {
    let mut rng = ChaCha8Rng::seed_from_u64(7);
    for _ in 0..20 {
        let m: f64 = rng.gen_range(0.01..0.99);
        let em = EllipticModulus::new(m, TauConvention::Complementary).unwrap();
        let res = em.e * em.kc + em.ec * em.k - em.k * em.kc - PI / 2.0;
        assert!(res.abs() < 1e-12, "m={m}: {res}");
    }
}

#[test]
fn jacobi_pythagoras() {
    let mut rng = ChaCha8Rng::seed_from_u64(11);
    for _ in 0..100 {
        let m: f64 = rng.gen_range(0.0..0.999);
        let u: f64 = rng.gen_range(-20.0..20.0);
        let (sn, cn, dn) = jacobi(u, m).unwrap();
        assert!((dn * dn + m * m * sn * sn - 1.0).abs() < 1e-12);
        assert!((sn * sn + cn * cn - 1.0).abs() < 1e-12);
        assert!(dn <= 1.0 + 1e-15 && dn >= (1.0 - m * m).sqrt() - 1e-12);
    }
}

#[test]
fn jacobi_derivative() {
    // d sn/du = cn dn by central differences
    let m = 0.7;
    let h = 1e-5;
    for u in [0.1, 1.3, 2.9] {
        let (sp, _, _) = jacobi(u + h, m).unwrap();
        let (sm, _, _) = jacobi(u - h, m).unwrap();
        let (_, cn, dn) = jacobi(u, m).unwrap();
        assert!(((sp - sm) / (2.0 * h) - cn * dn).abs() < 1e-9);
    }
}

#[test]
fn theta_quasi_periodicity() {
    let tau = C64::new(0.1, 0.7);
    let th = Theta3::new(tau).unwrap();
    let i = C64::i();
    for z in [C64::new(0.2, 0.1), C64::new(-0.4, -0.3), C64::new(0.05, 0.0)] {
        let lhs = th.eval(z + tau);
        let rhs = (-PI * i * tau - 2.0 * PI * i * z).exp() * th.eval(z);
        assert!((lhs - rhs).norm() < 1e-10 * rhs.norm().max(1.0));
    }
}

#[test]
fn theta_brute_force() {
    let tau = C64::new(0.0, 1.0);
    let mut s = C64::default();
    for n in -200i64..=200 {
        s += (C64::i() * PI * (n * n) as f64 * tau).exp();
    }
    assert!((theta3(C64::default(), tau).unwrap() - s).norm() < 1e-14);
    let z = C64::new(0.3, 0.2);
    let mut s = C64::default();
    for n in -200i64..=200 {
        let nf = n as f64;
        s += (C64::i() * PI * (2.0 * nf * z + nf * nf * tau)).exp();
    }
    assert!((theta3(z, tau).unwrap() - s).norm() < 1e-14);
}

#[test]
fn theta_derivatives() {
    let th = Theta3::new(C64::new(0.0, 0.6)).unwrap();
    let z = C64::new(0.17, 0.05);
    let h = 1e-4;
    let d = th.derivs(z);
    let f = |k: usize, w: C64| th.derivs(w)[k];
    for k in 0..3 {
        let fd = (f(k, z - 2.0 * h) - 8.0 * f(k, z - h) + 8.0 * f(k, z + h) - f(k, z + 2.0 * h)) / (12.0 * h);
        assert!((fd - d[k + 1]).norm() < 1e-7 * d[k + 1].norm().max(1.0));
    }
}

#[test]
fn theta_truncation_rule() {
    assert_eq!(theta_terms(C64::new(0.0, 100.0)), 8);
    let n = theta_terms(C64::new(0.0, 0.05));
    assert_eq!(n, ((40.0 / (PI * 0.05)).sqrt().ceil() as usize) + 4);
    // discarded tail below 1e-16
    let tail = (-PI * (n as f64 + 1.0).powi(2) * 0.05).exp();
    assert!(tail < 1e-16);
}

#[test]
fn end_map_sanity() {
    let (t, w) = EndMap::Start.apply(0.5);
    assert_eq!((t, w), (0.25, 1.0));
}
