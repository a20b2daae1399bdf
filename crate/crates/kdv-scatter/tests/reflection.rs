use kdv_scatter::mat;
use kdv_scatter::reflection::{PhaseTheta, Reflection};
use kdv_scatter::scattering::piece_points;
use kdv_scatter::scenario::{presets, Pattern, PerturbationKind, Region, Scenario};
use kdv_scatter::surface::{Pt, Side};
use kdv_scatter::{Error, C64};
use proptest::prelude::*;
use std::sync::OnceLock;

fn iii() -> &'static Reflection {
    static R: OnceLock<Reflection> = OnceLock::new();
    R.get_or_init(|| Reflection::new(&presets::pattern(Pattern::III)).unwrap())
}

fn trivial() -> &'static Reflection {
    static R: OnceLock<Reflection> = OnceLock::new();
    R.get_or_init(|| Reflection::new(&presets::trivial()).unwrap())
}

fn h_dev(r: &Reflection, y: f64) -> f64 {
    let l = C64::new(0.0, y);
    let h = r.h_eval(Pt::off(l)).unwrap().h;
    (h * (C64::i() * r.scat.delta * l).exp() - 1.0).norm()
}

#[test]
fn trivial_h_is_the_phase() {
    let r = trivial();
    for z in [C64::new(0.0, 50.0), C64::new(0.7, 0.4), C64::new(-2.0, 3.0)] {
        let h = r.h_eval(Pt::off(z)).unwrap();
        assert_eq!(h.h, (-C64::i() * r.scat.delta * z).exp());
        assert_eq!(h.quadrature_error, 0.0);
    }
    assert!(r.table_error() == 0.0);
}

#[test]
fn h_tends_to_the_phase_like_one_over_lambda() {
    let r = iii();
    let (d50, d100, d200) = (h_dev(r, 50.0), h_dev(r, 100.0), h_dev(r, 200.0));
    assert!(d50 < 0.05, "{d50}");
    // λ·(h e^{iΔλ} − 1) settles
    let (c50, c100, c200) = (50.0 * d50, 100.0 * d100, 200.0 * d200);
    assert!((c100 - c200).abs() < (c50 - c100).abs() + 1e-6, "{c50} {c100} {c200}");
    assert!((c100 / c200 - 1.0).abs() < 0.05, "{c100} {c200}");
}

#[test]
fn h_unitarity_on_the_real_line() {
    let r = iii();
    let q = Pt::real(1.3, Side::Off);
    let h = r.h_eval(q).unwrap();
    let rr = (r.scat.b(q).unwrap() / r.scat.a(q).unwrap()).norm_sqr();
    assert!((h.h.norm_sqr() - (1.0 - rr)).abs() < 1e-4);
    assert!(h.quadrature_error < 1e-6);
}

#[test]
fn mesh_doubling_stays_within_the_error_estimate() {
    let scn = presets::pattern(Pattern::III);
    let mut fine = scn.clone();
    fine.grids.band_degree *= 2;
    fine.grids.real_degree *= 2;
    let (a, b) = (iii(), Reflection::new(&fine).unwrap());
    let pts = [Pt::off(C64::new(0.3, 0.6)), Pt::off(C64::new(0.0, 3.0)), Pt::real(0.8, Side::Off), Pt::axis(1.25, Side::Plus)];
    for p in pts {
        let (ha, hb) = (a.h_eval(p).unwrap(), b.h_eval(p).unwrap());
        let bound = ha.quadrature_error.max(hb.quadrature_error);
        assert!((ha.h - hb.h).norm() < bound, "{:?}: {} vs {}, bound {bound:e}", p.z, ha.h, hb.h);
    }
}

#[test]
fn endpoint_exponents_are_quarters() {
    for p in [Pattern::I, Pattern::III] {
        let r = if p == Pattern::III { iii().clone() } else { Reflection::new(&presets::pattern(p)).unwrap() };
        let ex = r.endpoint_exponents();
        assert_eq!(ex.len(), 4);
        for (eta, e) in ex {
            let g = &r.scat.geom;
            let want = if eta == g.left.0 || eta == g.left.1 { 0.25 } else { -0.25 };
            assert!((e - want).abs() < 1e-6, "{p:?} at {eta}: {e}");
        }
    }
}

#[test]
fn factors_multiply_to_a() {
    let r = iii();
    for p in [Pt::off(C64::new(0.4, 0.9)), Pt::real(-2.2, Side::Off), Pt::axis(1.8, Side::Minus), Pt::axis(0.5, Side::Off)] {
        let (a1, a2) = r.factor_a1a2(p).unwrap();
        let a = r.scat.a(p).unwrap();
        assert!((a1 * a2 - a).norm() < 1e-10 * a.norm(), "{:?}", p.z);
    }
    // a₁ e^{−iΔλ} and a₂ tend to 1 up the axis
    let l = C64::new(0.0, 60.0);
    let (a1, a2) = r.factor_a1a2(Pt::off(l)).unwrap();
    assert!((a1 * (-C64::i() * r.scat.delta * l).exp() - 1.0).norm() < 0.05);
    assert!((a2 - 1.0).norm() < 0.05);
}

#[test]
fn factor_relations_hold() {
    let res = iii().factor_residuals(&[-4.5, -1.3, -0.2, 0.6, 1.3, 3.9], 8).unwrap();
    let rel: Vec<&str> = res.iter().map(|b| b.relation.as_str()).collect();
    for want in ["|a2| = 1", "1/|a1|² = 1 − |r|²", "h h* = 1 − |r|²", "a1(λ+) = a1(λ−)", "a2(λ+) = a2(λ−)"] {
        assert!(rel.contains(&want), "{want} missing");
    }
    for b in &res {
        assert!(b.max <= b.bound, "{b:?}");
        assert!(b.points > 0);
    }
}

#[test]
fn reflection_coefficients_are_single_valued_on_bands() {
    // both boundary values enter the definition, so the side tag does not matter
    let r = iii();
    for piece in &r.scat.geom.pieces {
        for y in piece_points(piece.lo, piece.hi, 4) {
            let p = r.reflection_coeffs(Pt::axis(y, Side::Plus)).unwrap();
            let m = r.reflection_coeffs(Pt::axis(y, Side::Minus)).unwrap();
            let low = r.reflection_coeffs(Pt::axis(-y, Side::Plus)).unwrap();
            assert_eq!((p.r1, p.r2), (m.r1, m.r2));
            assert_eq!((low.r1, low.r2), (p.r1.map(|v| v.conj()), p.r2.map(|v| v.conj())));
            assert_eq!(p.r1.is_some(), matches!(piece.region, Region::Sigma1LOnly | Region::BandIntersection));
            assert_eq!(p.r2.is_some(), matches!(piece.region, Region::Sigma1ROnly | Region::BandIntersection));
        }
    }
}

#[test]
fn rho_is_regular_at_zero_and_conjugate_symmetric() {
    let r = iii();
    let rho = |l: f64| r.reflection_coeffs(Pt::real(l, Side::Off)).unwrap().rho.unwrap();
    for l in [1e-3, 0.4, 2.5] {
        assert!((rho(-l) - rho(l).conj()).norm() < 1e-9);
    }
    let (lp, lm) = (2.0 * rho(1e-3) - rho(2e-3), 2.0 * rho(-1e-3) - rho(-2e-3));
    assert!((lp - lm).norm() < 1e-3, "{lp} vs {lm}");
    assert!(lp.norm().is_finite() && lp.norm() <= 1.0 + 1e-3);
}

#[test]
fn rho_decays_like_lambda_to_the_minus_four() {
    // a C³ bump, so ρ has an honest power tail
    let mut scn = presets::pattern(Pattern::III);
    scn.perturbation.kind = PerturbationKind::CompactSpline;
    let r = Reflection::new(&scn).unwrap();
    let rho = |l: f64| r.reflection_coeffs(Pt::real(l, Side::Off)).unwrap().rho.unwrap().norm();
    let (r20, r40) = (rho(20.0), rho(40.0));
    assert!(r20 > kdv_scatter::verify::RHO_FLOOR, "{r20}");
    assert!(r40 / r20 <= 1.5 / 16.0, "{}", r40 / r20);
}

#[test]
fn jump_matrix_shapes() {
    let r = iii();
    let ph = PhaseTheta::new(0.9, 0.0, r.theta_coefficient);
    let one = C64::new(1.0, 0.0);
    // Σ₁^l∖Σ₁^r of pattern (iii) is (1.5, 2)
    let p = Pt::axis(1.75, Side::Plus);
    assert_eq!(r.region(p), Region::Sigma1LOnly);
    let v = r.jump_matrix_x(&ph, p, &r.reflection_coeffs(p).unwrap()).unwrap();
    assert_eq!(v[0][1], C64::default());
    assert_eq!((v[0][0], v[1][1]), (one, one));
    let q = Pt::real(0.8, Side::Plus);
    let v = r.jump_matrix_x(&ph, q, &r.reflection_coeffs(q).unwrap()).unwrap();
    assert!((mat::det(&v) - 1.0).norm() < 1e-14);
    let off = Pt::off(C64::new(0.5, 0.5));
    assert!(matches!(r.reflection_coeffs(off), Err(Error::Domain(_))));
}

#[test]
fn x_jumps_and_v_relations() {
    let r = iii();
    let ph = PhaseTheta::new(0.7, 0.0, r.theta_coefficient);
    let xs = r.verify_x_jumps(&ph, 6).unwrap();
    assert_eq!(xs.len(), 7);
    for res in xs {
        assert!(res.max < 1e-6, "{res:?}");
    }
    for res in r.v_residuals(&ph, 6).unwrap() {
        let tol = if res.relation.starts_with("det") { 1e-10 } else { 1e-8 };
        assert!(res.max < tol, "{res:?}");
    }
    let zs: Vec<C64> = (0..10).map(|k| C64::new(0.3 + 0.4 * k as f64, 0.2 + 0.25 * k as f64)).collect();
    assert!(r.x_symmetry(&zs, 0.4).unwrap() < 1e-8);
}

#[test]
fn m_jumps_on_every_piece() {
    let res = iii().verify_m_jumps(0.4, 8).unwrap();
    assert_eq!(res.len(), 7);
    for r in res {
        assert!(r.max < 1e-4, "{r:?}");
    }
}

#[test]
fn trivial_m_has_no_real_jump() {
    let r = trivial();
    for l in [-2.0, 0.3, 1.7] {
        let v = r.jump_matrix_m(Pt::real(l, Side::Plus), 0.5).unwrap();
        assert!(mat::dist(&v, &mat::EYE) < 1e-8);
        let (p, m) = (r.m_matrix(Pt::real(l, Side::Plus), 0.5).unwrap(), r.m_matrix(Pt::real(l, Side::Minus), 0.5).unwrap());
        assert!(mat::dist(&p, &m) < 1e-8);
    }
}

#[test]
fn m_normalization_decays_like_one_over_lambda() {
    for r in [trivial(), iii()] {
        let xs = [-2.0, 0.0, 2.0];
        let (n50, n100) = (r.normalization(&xs, 50.0).unwrap(), r.normalization(&xs, 100.0).unwrap());
        assert!(n50 < 0.2, "{n50}");
        assert!((100.0 * n100 / (50.0 * n50) - 1.0).abs() < 0.1, "{n50} {n100}");
    }
}

#[test]
fn reconstruction_recovers_u0() {
    let xs: Vec<f64> = (0..20).map(|k| -4.0 + 8.0 * k as f64 / 19.0).collect();
    for q in iii().reconstruct_u(&xs).unwrap() {
        assert!((q.u_left - q.u0).abs() < 1e-3, "{q:?}");
        assert!((q.u_right - q.u0).abs() < 1e-3, "{q:?}");
    }
    // the background reproduces itself
    let t = trivial();
    let xs: Vec<f64> = (0..50).map(|k| -5.0 + 10.0 * k as f64 / 49.0).collect();
    for q in t.reconstruct_u(&xs).unwrap() {
        let ur = t.scat.jost.data.right.u_dn(q.x, 0.0);
        assert!((q.u_left - ur).abs() < 1e-3 && (q.u_right - ur).abs() < 1e-3, "{q:?}");
    }
}

#[test]
fn endpoint_growth_of_factors() {
    let series = iii().endpoint_series().unwrap();
    assert_eq!(series.len(), 2 * 2 * iii().scat.geom.pieces.len());
    for e in series {
        let max = e.rescaled.iter().cloned().fold(0.0, f64::max);
        assert!(max <= 10.0 * e.rescaled[0].max(1e-3), "{e:?}");
    }
}

#[test]
fn rejects_points_outside_the_domain() {
    let r = iii();
    assert!(matches!(r.h_eval(Pt::off(C64::new(0.2, -0.5))), Err(Error::Region(_))));
    assert!(matches!(r.h_eval(Pt::axis(1.25, Side::Off)), Err(Error::Domain(_))));
    assert!(matches!(r.m_matrix(Pt::real(0.5, Side::Off), 0.0), Err(Error::Domain(_))));
}

#[test]
fn bound_state_is_caught_before_factorization() {
    // this right phase puts an eigenvalue near 0.7i, just below the bands
    let mut scn = presets::pattern(Pattern::III);
    scn.right.x0 = -0.2;
    let s = kdv_scatter::scattering::Scattering::new(&scn).unwrap();
    let z = s.gap_zeros(400).unwrap();
    assert_eq!(z.len(), 1, "{z:?}");
    assert!((z[0] - 0.6997).abs() < 1e-3, "{z:?}");
    assert!(matches!(s.verify_solitonless(1e-2, 400), Err(Error::Solitons(1))));
}

#[test]
fn extra_winding_of_the_log_jump_is_reported() {
    // zero-free data whose band log-jump turns twice: no h with quarter exponents exists
    let mut scn = presets::pattern(Pattern::IV);
    scn.left.x0 = 0.0;
    scn.right.x0 = -0.3;
    let s = kdv_scatter::scattering::Scattering::new(&scn).unwrap();
    assert_eq!(s.verify_solitonless(1e-2, 400).unwrap().zeros, 0);
    match Reflection::new(&scn) {
        Err(Error::Consistency(msg)) => assert!(msg.contains("winds"), "{msg}"),
        other => panic!("expected a consistency error, got {:?}", other.map(|_| ())),
    }
}

fn scenario_with_theta(c: f64) -> Scenario {
    let mut s = presets::trivial();
    s.theta_t_coefficient = c;
    s
}

proptest! {
    #![proptest_config(ProptestConfig { cases: 24, ..ProptestConfig::default() })]

    #[test]
    fn theta_is_odd(x in -5.0f64..5.0, t in 0.0f64..2.0, re in -3.0f64..3.0, im in -3.0f64..3.0) {
        let ph = PhaseTheta::new(x, t, scenario_with_theta(4.0).theta_t_coefficient);
        let l = C64::new(re, im);
        prop_assert!((ph.at(-l) + ph.at(l)).norm() < 1e-12 * (1.0 + l.norm().powi(3)));
        prop_assert_eq!(PhaseTheta::new(x, 0.0, 4.0).at(l), x * l);
    }

    #[test]
    fn a2_is_unimodular_on_the_real_line(l in 0.05f64..6.0, neg in any::<bool>()) {
        let l = if neg { -l } else { l };
        let (_, a2) = iii().factor_a1a2(Pt::real(l, Side::Off)).unwrap();
        prop_assert!((a2.norm() - 1.0).abs() < 1e-4);
    }
}
