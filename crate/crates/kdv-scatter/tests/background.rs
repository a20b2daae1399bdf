use kdv_scatter::background::*;
use kdv_scatter::mat::{self, Mat};
use kdv_scatter::special::TauConvention;
use kdv_scatter::surface::{BandParams, Pt, Side};
use kdv_scatter::C64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

fn bg(e1: f64, e2: f64, x0: f64) -> Background {
    Background::new(BandParams::new(e1, e2, x0).unwrap(), TauConvention::Complementary).unwrap()
}

#[test]
fn dual_formula_agreement() {
    for b in [bg(1.0, 2.0, 0.0), bg(0.3, 1.7, 0.5), bg(1.2, 1.3, -1.0)] {
        let mut worst: f64 = 0.0;
        for k in 0..200 {
            let x = -10.0 + 0.1 * k as f64;
            let t = 0.01 * (k % 7) as f64;
            worst = worst.max((b.u_theta(x, t) - b.u_dn(x, t)).abs());
        }
        assert!(worst < 1e-9, "{worst}");
    }
}

#[test]
fn literal_tau_breaks_dual_formula() {
    let b = Background::new(BandParams::new(1.0, 2.0, 0.0).unwrap(), TauConvention::Literal).unwrap();
    let worst = (0..50).map(|k| (b.u_theta(0.1 * k as f64, 0.0) - b.u_dn(0.1 * k as f64, 0.0)).abs()).fold(0.0, f64::max);
    assert!(worst > 1e-3);
}

#[test]
fn kdv_residual_and_derivatives() {
    let b = bg(1.0, 2.0, 0.3);
    let h = 1e-3;
    for k in 0..100 {
        let x = -5.0 + 0.1 * k as f64;
        assert!(b.kdv_residual(x, 0.2).abs() < 1e-8);
        // analytic derivatives against central differences
        let d = b.u_dn_derivs(x, 0.2);
        let f = |e: f64| b.u_dn_derivs(x + e, 0.2);
        let (p1, p2, m1, m2) = (f(h), f(2.0 * h), f(-h), f(-2.0 * h));
        for j in 0..3 {
            let fd = (m2[j] - 8.0 * m1[j] + 8.0 * p1[j] - p2[j]) / (12.0 * h);
            assert!((fd - d[j + 1]).abs() < 1e-7 * (1.0 + d[j + 1].abs()));
        }
    }
    let p = b.surf.period();
    assert!((b.u_dn(0.77 + p, 0.0) - b.u_dn(0.77, 0.0)).abs() < 1e-12);
}

#[test]
fn m_normalization_and_symmetry() {
    let b = bg(1.0, 2.0, 0.2);
    let st = b.state(0.7, 0.0);
    let bc = b.bloch_const(Pt::off(C64::new(1e3, 0.0))).unwrap();
    let m = b.bloch_m(&bc, &st);
    assert!((m.m1 - 1.0).norm() < 1e-3 && (m.m2 - 1.0).norm() < 1e-3);
    let z = C64::new(2.0, 1.0);
    let a = b.bloch_m(&b.bloch_const(Pt::off(z)).unwrap(), &st);
    let c = b.bloch_m(&b.bloch_const(Pt::off(-z)).unwrap(), &st);
    assert!((a.m1 - c.m2).norm() < 1e-10 && (a.m2 - c.m1).norm() < 1e-10);
}

#[test]
fn m11_coefficient() {
    let b = bg(1.0, 2.0, 0.2);
    let st = b.state(0.7, 0.0);
    let l = C64::new(0.0, 400.0);
    let m = b.bloch_m(&b.bloch_const(Pt::off(l)).unwrap(), &st);
    assert!((l * (m.m1 - 1.0) - b.m11(0.7, 0.0)).norm() < 1e-2);
}

fn jump_residual(b: &Background, piece: Piece, y: f64, x: f64, t: f64) -> f64 {
    let st = b.state(x, t);
    let (p, m) = sides(y);
    let mp = b.bloch_m(&b.bloch_const(p).unwrap(), &st);
    let mm = b.bloch_m(&b.bloch_const(m).unwrap(), &st);
    let v = b.g1_jump(piece, &st);
    let rhs = mat::row_mul(&[mm.m1, mm.m2], &v);
    (mp.m1 - rhs[0]).norm().max((mp.m2 - rhs[1]).norm())
}

#[test]
fn g1_jumps_all_pieces() {
    let b = bg(1.0, 2.0, 0.2);
    for k in 0..20 {
        let f = (k as f64 + 0.5) / 20.0;
        let y = 1.0 + f;
        assert!(jump_residual(&b, Piece::UpperBand, y, 0.3, 0.1) < 1e-8);
        assert!(jump_residual(&b, Piece::LowerBand, -y, 0.3, 0.1) < 1e-8);
        let g = -1.0 + 2.0 * f;
        assert_eq!(piece_of(&b.surf, g), Some(Piece::Gap));
        assert!(jump_residual(&b, Piece::Gap, g, 0.3, 0.1) < 1e-8);
    }
    // the offset oracle for the gap jump at 0.4i
    let st = b.state(0.3, 0.0);
    let f = |e: f64| b.bloch_m(&b.bloch_const(Pt::off(C64::new(e, 0.4))).unwrap(), &st);
    let (l1, l2, r1, r2) = (f(-1e-6), f(-2e-6), f(1e-6), f(2e-6));
    let plus = [2.0 * l1.m1 - l2.m1, 2.0 * l1.m2 - l2.m2];
    let minus = [2.0 * r1.m1 - r2.m1, 2.0 * r1.m2 - r2.m2];
    let rhs = mat::row_mul(&minus, &b.g1_jump(Piece::Gap, &st));
    assert!((plus[0] - rhs[0]).norm() < 1e-8 && (plus[1] - rhs[1]).norm() < 1e-8);
}

#[test]
fn o_structure() {
    let b = bg(1.0, 2.0, 0.2);
    let mut rng = ChaCha8Rng::seed_from_u64(3);
    for _ in 0..20 {
        let x: f64 = rng.gen_range(-5.0..5.0);
        let t: f64 = rng.gen_range(0.0..0.5);
        let z = C64::new(rng.gen_range(0.1..3.0), rng.gen_range(-3.0..3.0));
        let st = b.state(x, t);
        let o = b.o_matrix(&b.bloch_const(Pt::off(z)).unwrap(), &st).unwrap();
        assert!((mat::det(&o) - 1.0).norm() < 1e-9);
    }
    let st = b.state(0.5, 0.0);
    let z = C64::new(1.0, 2.0);
    let o = b.o_matrix(&b.bloch_const(Pt::off(z)).unwrap(), &st).unwrap();
    let on = b.o_matrix(&b.bloch_const(Pt::off(-z)).unwrap(), &st).unwrap();
    assert!(mat::dist(&mat::flip(&on), &o) < 1e-10);
    let oc = b.o_matrix(&b.bloch_const(Pt::off(z.conj())).unwrap(), &st).unwrap();
    assert!(mat::dist(&mat::conj(&oc), &on) < 1e-10);
    let big = b.o_matrix(&b.bloch_const(Pt::off(C64::new(1e3, 0.0))).unwrap(), &st).unwrap();
    assert!(mat::dist(&big, &mat::EYE) < 1e-3);
    let zero = b.bloch_const(Pt::real(0.0, Side::Plus)).unwrap();
    assert!(matches!(b.o_matrix(&zero, &st), Err(kdv_scatter::Error::Pole(_))));
}

fn psi(b: &Background, z: Pt, x: f64, t: f64) -> Mat {
    b.psi0(&b.bloch_const(z).unwrap(), &b.state(x, t)).unwrap()
}

#[test]
fn psi0_determinant_and_lax() {
    let b = bg(1.0, 2.0, 0.2);
    let l = C64::new(1.0, 1.0);
    let d = mat::det(&psi(&b, Pt::off(l), 0.3, 0.0));
    assert!((d - 2.0 * C64::i() * l).norm() < 1e-9);
    let mut rng = ChaCha8Rng::seed_from_u64(5);
    let h = 1e-4;
    for _ in 0..10 {
        let x: f64 = rng.gen_range(-3.0..3.0);
        let t: f64 = rng.gen_range(0.0..0.2);
        let z = C64::new(rng.gen_range(0.2..2.0), rng.gen_range(-2.0..2.0));
        let pt = Pt::off(z);
        let fd = |f: &dyn Fn(f64) -> Mat| {
            let c = [1.0, -8.0, 8.0, -1.0];
            let s = [-2.0, -1.0, 1.0, 2.0];
            let mut acc = [[C64::default(); 2]; 2];
            for k in 0..4 {
                acc = mat::add(&acc, &mat::scale(&f(s[k] * h), C64::new(c[k] / (12.0 * h), 0.0)));
            }
            acc
        };
        let dx = fd(&|e| psi(&b, pt, x + e, t));
        let p = psi(&b, pt, x, t);
        let u = b.u_dn_derivs(x, t);
        let r = mat::dist(&dx, &mat::mul(&Background::lax_l(z, u[0]), &p)) / mat::norm(&p).max(1.0);
        assert!(r < 1e-6, "x residual {r}");
        let dt = fd(&|e| psi(&b, pt, x, t + e));
        let r = mat::dist(&dt, &mat::mul(&Background::lax_a(z, [u[0], u[1], u[2]]), &p)) / mat::norm(&p).max(1.0);
        assert!(r < 1e-5, "t residual {r}");
    }
}

#[test]
fn psi0_band_jump() {
    let b = bg(1.0, 2.0, 0.2);
    let (p, m) = sides(1.5);
    let pp = psi(&b, p, 0.4, 0.0);
    let pm = psi(&b, m, 0.4, 0.0);
    // same factor as the O and Φ jumps on Σ₁
    let is1 = mat::scale(&mat::SIGMA1, -C64::i());
    assert!(mat::dist(&pp, &mat::mul(&pm, &is1)) < 1e-7);
    let (p, m) = sides(-1.5);
    let pp = psi(&b, p, 0.4, 0.1);
    let pm = psi(&b, m, 0.4, 0.1);
    let is1 = mat::scale(&mat::SIGMA1, C64::i());
    assert!(mat::dist(&pp, &mat::mul(&pm, &is1)) < 1e-7);
}
