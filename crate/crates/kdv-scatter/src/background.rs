//! The one-gap background of one side: Bloch vector `m`, the matrix `O`, the
//! Baker–Akhiezer matrix `Ψ₀` and the travelling wave `u` in theta and dn² form.

use crate::error::{Error, Result};
use crate::mat::{self, Mat};
use crate::special::{Landen, TauConvention, Theta3};
use crate::surface::{Abel, BandParams, Pt, Side, SurfaceData};
use num_complex::Complex64 as C64;
use std::f64::consts::PI;

/// `(x, t)` with the derived phases `Ω = −xΩ₁ − tΩ₂` and `Δ = x₀Ω₁`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PhaseState {
    pub x: f64,
    pub t: f64,
    pub omega: f64,
    pub delta: f64,
}

impl PhaseState {
    pub fn new(s: &SurfaceData, x: f64, t: f64) -> Self {
        Self { x, t, omega: -x * s.omega1 - t * s.omega2, delta: s.bands.x0 * s.omega1 }
    }

    /// Argument `(Ω + Δ)/2π` of the theta functions.
    pub fn z(&self) -> f64 {
        (self.omega + self.delta) / (2.0 * PI)
    }
}

/// `λ`-dependent ingredients of `m`, computed once per spectral point.
#[derive(Debug, Clone, Copy)]
pub struct BlochConst {
    pub pt: Pt,
    pub abel: Abel,
    pub gamma: C64,
    den: [C64; 2],
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct BlochVector {
    pub m1: C64,
    pub m2: C64,
}

/// Which piece of the `m` jump contour.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Piece {
    UpperBand,
    Gap,
    LowerBand,
}

#[derive(Debug, Clone)]
pub struct Background {
    pub surf: SurfaceData,
    theta: Theta3,
    th0: C64,
    landen: Landen,
}

impl Background {
    pub fn new(bands: BandParams, conv: TauConvention) -> Result<Self> {
        let surf = SurfaceData::new(bands, conv)?;
        let theta = Theta3::new(2.0 * surf.tau)?;
        let th0 = theta.eval(C64::default());
        let landen = Landen::new(surf.ell.m)?;
        Ok(Self { surf, theta, th0, landen })
    }

    pub fn x0(&self) -> f64 {
        self.surf.bands.x0
    }

    pub fn state(&self, x: f64, t: f64) -> PhaseState {
        PhaseState::new(&self.surf, x, t)
    }

    /// `dz/dx` for `z = (Ω + Δ)/2π`.
    pub fn dzdx(&self) -> f64 {
        -self.surf.omega1 / (2.0 * PI)
    }

    pub fn bloch_const(&self, pt: Pt) -> Result<BlochConst> {
        let abel = self.surf.abel(pt)?;
        let gamma = self.surf.gamma(pt)?;
        let den = [self.theta.eval(2.0 * abel.j - 0.5), self.theta.eval(-2.0 * abel.j - 0.5)];
        if den.iter().any(|d| d.norm() < 1e-13) {
            return Err(Error::Pole(pt.z));
        }
        Ok(BlochConst { pt, abel, gamma, den })
    }

    fn m_parts(&self, bc: &BlochConst, st: &PhaseState) -> ([C64; 2], [C64; 2]) {
        let z = C64::new(st.z(), 0.0);
        let d0 = self.theta.derivs(z);
        let lz = d0[1] / d0[0];
        let pre = bc.gamma * self.th0 / d0[0];
        let mut m = [C64::default(); 2];
        let mut dm = [C64::default(); 2];
        for (k, sg) in [1.0, -1.0].into_iter().enumerate() {
            let d = self.theta.derivs(sg * 2.0 * bc.abel.j + z - 0.5);
            m[k] = pre * d[0] / bc.den[k];
            dm[k] = m[k] * (d[1] / d[0] - lz) * self.dzdx();
        }
        (m, dm)
    }

    pub fn bloch_m(&self, bc: &BlochConst, st: &PhaseState) -> BlochVector {
        let (m, _) = self.m_parts(bc, st);
        BlochVector { m1: m[0], m2: m[1] }
    }

    /// The matrix `O(x, t; λ)`; `λ = 0` is a pole.
    pub fn o_matrix(&self, bc: &BlochConst, st: &PhaseState) -> Result<Mat> {
        let l = bc.pt.z;
        if l.norm() == 0.0 {
            return Err(Error::Pole(l));
        }
        let (m, dm) = self.m_parts(bc, st);
        let pl = bc.abel.p / l;
        let il = C64::i() * l;
        Ok([
            [
                0.5 * ((1.0 + pl) * m[0] - dm[0] / il),
                0.5 * ((1.0 - pl) * m[1] - dm[1] / il),
            ],
            [
                0.5 * ((1.0 - pl) * m[0] + dm[0] / il),
                0.5 * ((1.0 + pl) * m[1] + dm[1] / il),
            ],
        ])
    }

    /// Exponent `(x − x₀)p + tq` of the Baker–Akhiezer phase.
    pub fn phase(&self, bc: &BlochConst, st: &PhaseState) -> C64 {
        (st.x - self.x0()) * bc.abel.p + st.t * bc.abel.q
    }

    /// `Ψ₀ = [[1, 1], [−iλ, iλ]] O e^{−i((x−x₀)p + tq)σ₃}`.
    pub fn psi0(&self, bc: &BlochConst, st: &PhaseState) -> Result<Mat> {
        let o = self.o_matrix(bc, st)?;
        let l = bc.pt.z;
        let il = C64::i() * l;
        let front = [[C64::new(1.0, 0.0), C64::new(1.0, 0.0)], [-il, il]];
        let e = (-C64::i() * self.phase(bc, st)).exp();
        Ok(mat::mul(&mat::mul(&front, &o), &mat::diag(e, 1.0 / e)))
    }

    /// The `m` jump on each piece: `m₊ = m₋ V`.
    pub fn g1_jump(&self, piece: Piece, st: &PhaseState) -> Mat {
        let i = C64::i();
        let z = C64::default();
        match piece {
            Piece::UpperBand => [[z, -i], [-i, z]],
            Piece::LowerBand => [[z, i], [i, z]],
            Piece::Gap => {
                let e = (i * (st.omega + st.delta)).exp();
                mat::diag(e, 1.0 / e)
            }
        }
    }

    /// `u` from the theta logarithmic derivative, `−2p₁ − 2i∂ₓm₁₁`.
    pub fn u_theta(&self, x: f64, t: f64) -> f64 {
        let z = C64::new(self.state(x, t).z(), 0.0);
        let d = self.theta.derivs(z);
        let l2 = d[2] / d[0] - (d[1] / d[0]) * (d[1] / d[0]);
        -2.0 * self.surf.p1 - 2.0 * self.dzdx().powi(2) * l2.re
    }

    /// The coefficient `m₁₁ = lim λ(m₁ − 1) = −i∂ₓ log θ₃((Ω+Δ)/2π; 2τ)`.
    pub fn m11(&self, x: f64, t: f64) -> C64 {
        let z = C64::new(self.state(x, t).z(), 0.0);
        let d = self.theta.derivs(z);
        -C64::i() * self.dzdx() * d[1] / d[0]
    }

    /// Travelling-wave speed `2(η₁² + η₂²)`.
    pub fn speed(&self) -> f64 {
        let b = &self.surf.bands;
        2.0 * (b.eta1 * b.eta1 + b.eta2 * b.eta2)
    }

    /// `[u, uₓ, uₓₓ, uₓₓₓ]` of `η₂² − η₁² − 2η₂² dn²(η₂(ξ − x₀) + K)`, `ξ = x − ct`.
    pub fn u_dn_derivs(&self, x: f64, t: f64) -> [f64; 4] {
        let b = &self.surf.bands;
        let (e1, e2) = (b.eta1, b.eta2);
        let m2 = self.surf.ell.m * self.surf.ell.m;
        let v = e2 * (x - self.speed() * t - b.x0) + self.surf.ell.k;
        let (sn, cn, dn) = self.landen.eval(v);
        let d = dn * dn;
        let d1 = -2.0 * m2 * sn * cn * dn;
        let d2 = -6.0 * d * d + 4.0 * (2.0 - m2) * d - 2.0 * (1.0 - m2);
        let d3 = (-12.0 * d + 4.0 * (2.0 - m2)) * d1;
        let c = -2.0 * e2 * e2;
        [e2 * e2 - e1 * e1 + c * d, c * e2 * d1, c * e2 * e2 * d2, c * e2.powi(3) * d3]
    }

    pub fn u_dn(&self, x: f64, t: f64) -> f64 {
        self.u_dn_derivs(x, t)[0]
    }

    /// `u_t − 6uuₓ + uₓₓₓ` with `u_t = −c uₓ` exact for the travelling wave.
    pub fn kdv_residual(&self, x: f64, t: f64) -> f64 {
        let [u, ux, _, uxxx] = self.u_dn_derivs(x, t);
        -self.speed() * ux - 6.0 * u * ux + uxxx
    }

    /// Both forms of `u`, failing if they disagree by more than `tol`.
    pub fn u_checked(&self, x: f64, t: f64, tol: f64) -> Result<(f64, f64)> {
        let (a, b) = (self.u_theta(x, t), self.u_dn(x, t));
        if (a - b).abs() > tol {
            return Err(Error::Consistency(format!("u_theta {a} vs u_dn {b} at x = {x}, t = {t}")));
        }
        Ok((a, b))
    }

    /// The matrix `L` of the spatial Lax equation.
    pub fn lax_l(lambda: C64, u: f64) -> Mat {
        [[C64::default(), C64::new(1.0, 0.0)], [u - lambda * lambda, C64::default()]]
    }

    /// The matrix `A` of the temporal Lax equation.
    pub fn lax_a(lambda: C64, u: [f64; 3]) -> Mat {
        let l2 = lambda * lambda;
        let f = 4.0 * l2 + 2.0 * u[0];
        [[C64::new(-u[1], 0.0), f], [(u[0] - l2) * f - u[2], C64::new(u[1], 0.0)]]
    }
}

/// The piece of the `m` contour containing the axis point `iy`, if any.
pub fn piece_of(s: &SurfaceData, y: f64) -> Option<Piece> {
    let (e1, e2) = (s.eta1(), s.eta2());
    if y > e1 && y < e2 {
        Some(Piece::UpperBand)
    } else if y < -e1 && y > -e2 {
        Some(Piece::LowerBand)
    } else if y.abs() < e1 {
        Some(Piece::Gap)
    } else {
        None
    }
}

/// The two boundary points at `iy`.
pub fn sides(y: f64) -> (Pt, Pt) {
    (Pt::axis(y, Side::Plus), Pt::axis(y, Side::Minus))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn u_at_phase_point() {
        let bg = Background::new(BandParams::new(1.0, 2.0, 0.4).unwrap(), TauConvention::Complementary).unwrap();
        assert!((bg.u_dn(0.4, 0.0) - (1.0 - 4.0)).abs() < 1e-13);
    }
}
