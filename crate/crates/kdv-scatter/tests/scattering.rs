use kdv_scatter::scattering::{piece_points, Scattering, APPROACH};
use kdv_scatter::scenario::{presets, Pattern, PerturbationKind, Region, Scenario};
use kdv_scatter::surface::{Pt, Side};
use kdv_scatter::{Error, C64};
use std::sync::OnceLock;

fn bumped(p: Pattern) -> Scenario {
    let mut scn = presets::pattern(p);
    scn.perturbation = presets::small_bump();
    scn
}

fn iii() -> &'static Scattering {
    static S: OnceLock<Scattering> = OnceLock::new();
    S.get_or_init(|| Scattering::new(&bumped(Pattern::III)).unwrap())
}

fn reals(n: usize) -> Vec<f64> {
    (0..n).map(|i| -6.0 + 12.0 * (i as f64 + 0.5) / n as f64).collect()
}

#[test]
fn trivial_perturbation_is_transparent() {
    let scn = presets::trivial();
    let s = Scattering::new(&scn).unwrap();
    let tol = scn.tol("trivial");
    assert_eq!(s.delta, 0.0);
    for l in reals(20) {
        let smp = s.sample(Pt::real(l, Side::Off)).unwrap();
        assert!((smp.a.unwrap() - 1.0).norm() < tol, "{l}");
        assert!(smp.b.unwrap().norm() < tol, "{l}");
    }
    let (e1, e2) = (s.geom.left.0, s.geom.left.1);
    for y in piece_points(e1, e2, 10) {
        for pt in [Pt::axis(y, Side::Plus), Pt::axis(y, Side::Minus), Pt::axis(-y, Side::Plus)] {
            let smp = s.sample(pt).unwrap();
            assert!((smp.a.unwrap() - 1.0).norm() < tol, "{:?}", pt);
            assert!(smp.b1.unwrap().norm() < tol, "{:?}", pt);
        }
    }
}

#[test]
fn unimodular_on_real_line() {
    let scn = bumped(Pattern::III);
    let s = iii();
    for l in reals(20) {
        let smp = s.sample(Pt::real(l, Side::Off)).unwrap();
        let (a, b) = (smp.a.unwrap(), smp.b.unwrap());
        assert!((a.norm_sqr() - b.norm_sqr() - 1.0).abs() < scn.tol("unitarity"), "{l}");
        assert!((smp.lambda_a.unwrap() - a * l).norm() < 1e-15 * a.norm().max(1.0) * l.abs().max(1.0));
    }
}

#[test]
fn jump_relations_on_every_piece() {
    let scn = bumped(Pattern::III);
    let res = iii().jump_residuals(10).unwrap();
    let regions: Vec<Region> = res.iter().map(|r| r.region).collect();
    for r in [
        Region::BandIntersection,
        Region::LowerIntersection,
        Region::Sigma1ROnly,
        Region::Sigma1LOnly,
        Region::Sigma2ROnly,
        Region::Sigma2LOnly,
    ] {
        assert!(regions.contains(&r), "no residual for {r:?}");
    }
    for r in &res {
        let tol = if r.relation == "det S = 1" { 1e-5 } else { scn.tol("ba_jumps") };
        assert!(r.max < tol, "{r:?}");
    }
}

#[test]
fn schwarz_symmetry_and_determinant() {
    let scn = bumped(Pattern::III);
    for r in iii().schwarz_residuals(&reals(20), 10).unwrap() {
        let tol = if r.region == Region::RealLine { scn.tol("schwarz") } else { 1e-5 };
        assert!(r.max < tol, "{r:?}");
    }
}

#[test]
fn matching_point_independence() {
    let scn = bumped(Pattern::III);
    let s = iii();
    let tol = scn.tol("x_matching");
    let pts = [Pt::real(0.4, Side::Off), Pt::real(-2.5, Side::Off), Pt::axis(1.25, Side::Plus), Pt::axis(0.85, Side::Minus), Pt::off(C64::new(0.5, 0.3))];
    for pt in pts {
        let v: Vec<C64> = [-5.0, 0.0, 5.0].iter().map(|&x| s.a_at(pt, x).unwrap()).collect();
        for w in &v {
            assert!((w - v[0]).norm() < tol, "{:?}: {v:?}", pt.z);
        }
        if pt.z.im == 0.0 || s.jost.admissible(kdv_scatter::jost::JSide::Right, 0, pt) {
            let v: Vec<C64> = [-5.0, 0.0, 5.0].iter().map(|&x| s.b1_at(pt, x).unwrap()).collect();
            for w in &v {
                assert!((w - v[0]).norm() < tol, "b at {:?}", pt.z);
            }
        }
    }
}

#[test]
fn b_only_on_real_line() {
    let s = iii();
    assert!(matches!(s.b(Pt::axis(1.25, Side::Plus)), Err(Error::Domain(_))));
    // b1 needs the right band on the upper axis
    assert!(matches!(s.b1(Pt::axis(1.75, Side::Plus)), Err(Error::Region(_))));
    assert!(matches!(s.a(Pt::off(C64::new(0.3, -0.5))), Err(Error::Region(_))));
    assert!(matches!(s.a(Pt::real(5e-4, Side::Off)), Err(Error::Proximity { .. })));
}

#[test]
fn large_lambda_asymptotics() {
    let s = iii();
    let mut prev = f64::INFINITY;
    for l in [20.0, 40.0, 60.0] {
        let an = s.a_normalized(Pt::real(l, Side::Off)).unwrap();
        let c = (an - 1.0).norm() * l;
        assert!(c < 2.0 && c > 0.1, "{l}: λ(a e^{{−iΔλ}} − 1) = {c}");
        assert!(c < prev * 1.1 + 1e-3);
        prev = c;
    }
    // the Gaussian bump is analytic: b is below the integration noise
    for l in [20.0, 40.0, 80.0] {
        assert!(s.b(Pt::real(l, Side::Off)).unwrap().norm() < 1e-10);
    }
    // a C³ bump gives power decay, and |b|λ⁴ does not grow
    let mut scn = bumped(Pattern::III);
    scn.perturbation.kind = PerturbationKind::CompactSpline;
    let sp = Scattering::new(&scn).unwrap();
    let v: Vec<f64> = [20.0, 40.0, 80.0].iter().map(|&l: &f64| sp.b(Pt::real(l, Side::Off)).unwrap().norm() * l.powi(4)).collect();
    assert!(v[0] > 1e-5, "{v:?}");
    assert!(v[1] <= v[0] && v[2] <= v[1], "{v:?}");
}

#[test]
fn no_zeros_for_small_bump() {
    let w = iii().verify_solitonless(1e-2, 400).unwrap();
    assert_eq!(w.zeros, 0);
    assert!(w.samples >= 400 && w.min_abs > 0.1);
    let t = Scattering::new(&presets::trivial()).unwrap();
    assert_eq!(t.winding(1e-2, 400).unwrap().zeros, 0);
}

#[test]
fn deep_well_is_rejected() {
    let mut scn = bumped(Pattern::III);
    let mut hit = None;
    for amp in [-0.5, -1.0, -2.0, -4.0] {
        scn.perturbation.amplitude = amp;
        match Scattering::new(&scn).unwrap().verify_solitonless(1e-2, 400) {
            Ok(_) => {}
            Err(Error::Solitons(n)) => {
                hit = Some((amp, n));
                break;
            }
            Err(e) => panic!("{e}"),
        }
    }
    let (amp, n) = hit.expect("no zero found in the sweep");
    assert!(n >= 1 && amp <= -1.0);
    // a is real on the gap axis; the zero below the bands shows as a sign change
    let s = Scattering::new(&scn).unwrap();
    let ys: Vec<f64> = (1..69).map(|i| i as f64 * 0.01).collect();
    let re: Vec<f64> = ys.iter().map(|&y| s.a(Pt::off(C64::new(0.0, y))).unwrap().re).collect();
    assert!(re.windows(2).any(|w| w[0] * w[1] < 0.0));
}

#[test]
fn cauchy_integral_reproduces_a() {
    let s = iii();
    let z0 = C64::new(3.0, 2.0);
    let c = s.cauchy_a(z0, 1e-2, 1e-8).unwrap();
    let d = s.a(Pt::off(z0)).unwrap();
    assert!((c - d).norm() < 1e-4, "{c} vs {d}");
}

#[test]
fn endpoint_rates() {
    let scn = bumped(Pattern::III);
    let bound = scn.tol("endpoint_growth");
    let s = iii();
    let series = s.endpoint_series().unwrap();
    assert!(series.len() >= 6);
    for e in &series {
        let first = e.rescaled[0].max(1e-3);
        let max = e.rescaled.iter().cloned().fold(0.0, f64::max);
        assert!(max <= bound * first, "{e:?}");
    }
    let r = s.b1_ratio_series(s.geom.right.1).unwrap();
    assert_eq!(r.len(), APPROACH.len());
    let last = r[r.len() - 1];
    assert!((last.norm() - 1.0).abs() < 1e-2);
    assert!((last - r[r.len() - 2]).norm() < (r[0] - r[1]).norm());
    // with no perturbation b1 vanishes and a stays bounded
    let t = Scattering::new(&presets::trivial()).unwrap();
    for e in t.endpoint_series().unwrap() {
        let last = e.rescaled[e.rescaled.len() - 1];
        if e.quantity == "b1" {
            assert!(last < 1e-8);
        } else {
            assert!(last < e.rescaled[0]);
        }
    }
}
