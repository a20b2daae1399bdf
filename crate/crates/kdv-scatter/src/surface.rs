//! Genus-one surface of one background: `R(λ)`, `γ(λ)`, the Abelian integrals
//! `p`, `q`, `J` and their periods.
//!
//! All cuts lie on the imaginary axis and are oriented upward, so the `+`
//! boundary value is the one from the left (`Re λ → 0⁻`). On the real line
//! `+` means from above.

use crate::error::{Error, Result};
use crate::quad::{adaptive, EndMap};
use crate::special::{EllipticModulus, TauConvention};
use num_complex::Complex64 as C64;
use serde::{Deserialize, Serialize};
use std::f64::consts::PI;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Side {
    Plus,
    Minus,
    Off,
}

impl Side {
    pub fn flip(self) -> Side {
        match self {
            Side::Plus => Side::Minus,
            Side::Minus => Side::Plus,
            Side::Off => Side::Off,
        }
    }

    pub fn label(self) -> &'static str {
        match self {
            Side::Plus => "+",
            Side::Minus => "-",
            Side::Off => "o",
        }
    }
}

/// A spectral point together with the boundary value requested on a cut.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Pt {
    pub z: C64,
    pub side: Side,
}

impl Pt {
    pub fn off(z: C64) -> Self {
        Self { z, side: Side::Off }
    }

    /// A point `i y` on the imaginary axis.
    pub fn axis(y: f64, side: Side) -> Self {
        Self { z: C64::new(0.0, y), side }
    }

    pub fn real(x: f64, side: Side) -> Self {
        Self { z: C64::new(x, 0.0), side }
    }

    /// Validates the side tag and snaps on-axis points exactly onto the axis.
    pub fn checked(z: C64, side: Side) -> Result<Self> {
        if side == Side::Off {
            return Ok(Self { z, side });
        }
        if z.re.abs() <= 1e-12 {
            Ok(Self { z: C64::new(0.0, z.im), side })
        } else if z.im.abs() <= 1e-12 {
            Ok(Self { z: C64::new(z.re, 0.0), side })
        } else {
            Err(Error::Domain(format!("side tag given for off-contour point {z}")))
        }
    }

    pub fn on_axis(&self) -> bool {
        self.z.re == 0.0
    }

    /// The point `−λ`; on the axis the side is exchanged.
    pub fn neg(self) -> Self {
        let side = if self.on_axis() { self.side.flip() } else { self.side };
        Self { z: -self.z, side }
    }

    /// The point `λ̄`; on the axis the side is kept, on ℝ it is exchanged.
    pub fn conj(self) -> Self {
        let side = if self.on_axis() { self.side } else if self.z.im == 0.0 { self.side.flip() } else { self.side };
        Self { z: self.z.conj(), side }
    }

    /// True when the point is treated as lying right of the imaginary axis.
    pub fn is_right(&self) -> bool {
        if self.on_axis() {
            self.side != Side::Plus
        } else {
            self.z.re > 0.0
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct BandParams {
    pub eta1: f64,
    pub eta2: f64,
    pub x0: f64,
}

impl BandParams {
    pub fn new(eta1: f64, eta2: f64, x0: f64) -> Result<Self> {
        if !(eta1 > 0.0 && eta2 > eta1 && eta1.is_finite() && eta2.is_finite() && x0.is_finite()) {
            return Err(Error::Domain(format!("need 0 < eta1 < eta2, got ({eta1}, {eta2})")));
        }
        Ok(Self { eta1, eta2, x0 })
    }

    pub fn modulus(&self) -> f64 {
        self.eta1 / self.eta2
    }
}

/// Abelian integrals at one point.
#[derive(Debug, Clone, Copy)]
pub struct Abel {
    pub p: C64,
    pub q: C64,
    pub j: C64,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct SurfaceData {
    pub bands: BandParams,
    pub ell: EllipticModulus,
    pub c1: f64,
    pub c2: f64,
    pub omega1: f64,
    pub omega2: f64,
    pub tau: C64,
    pub p1: f64,
}

impl SurfaceData {
    pub fn new(bands: BandParams, conv: TauConvention) -> Result<Self> {
        let (e1, e2) = (bands.eta1, bands.eta2);
        let ell = EllipticModulus::new(bands.modulus(), conv)?;
        let c1 = e2 * e2 - e2 * e2 * ell.e / ell.k;
        let c2 = e1 * e1 * e2 * e2 / 3.0 - (e1 * e1 + e2 * e2) * c1 / 6.0;
        Ok(Self {
            bands,
            ell,
            c1,
            c2,
            omega1: PI * e2 / ell.k,
            omega2: -2.0 * PI * e2 * (e1 * e1 + e2 * e2) / ell.k,
            tau: C64::new(0.0, ell.kc / (2.0 * ell.k)),
            p1: (e1 * e1 - e2 * e2) / 2.0 + e2 * e2 * ell.e / ell.k,
        })
    }

    pub fn eta1(&self) -> f64 {
        self.bands.eta1
    }

    pub fn eta2(&self) -> f64 {
        self.bands.eta2
    }

    /// Spatial period `2K/η₂` of the background.
    pub fn period(&self) -> f64 {
        2.0 * self.ell.k / self.bands.eta2
    }

    fn check_branch(&self, z: C64) -> Result<()> {
        for e in [self.bands.eta1, self.bands.eta2] {
            for s in [1.0, -1.0] {
                if (z - C64::new(0.0, s * e)).norm() < 1e-12 {
                    return Err(Error::Singular(z));
                }
            }
        }
        Ok(())
    }

    /// Distance from `z` to the nearest branch point.
    pub fn branch_distance(&self, z: C64) -> f64 {
        let mut d = f64::INFINITY;
        for e in [self.bands.eta1, self.bands.eta2] {
            for s in [1.0, -1.0] {
                d = d.min((z - C64::new(0.0, s * e)).norm());
            }
        }
        d
    }

    /// True if `iy` lies inside one of the two bands.
    pub fn in_band(&self, y: f64) -> bool {
        let a = y.abs();
        a > self.bands.eta1 && a < self.bands.eta2
    }

    /// `√w` with `w = (λ²+η₁²)/(λ²+η₂²)`, principal off the cuts. On a band
    /// the boundary value from the right (`right = true`) or left is taken.
    #[inline]
    pub(crate) fn sqrt_w(&self, z: C64, right: bool) -> C64 {
        self.sqrt_w_at(z, C64::default(), right).0
    }

    /// `(√w, λ²+η₂²)` at `λ = base + off`, with the factors `λ ∓ iη` formed
    /// as `(base ∓ iη) + off` so they stay accurate next to a branch point.
    #[inline]
    fn sqrt_w_at(&self, base: C64, off: C64, right: bool) -> (C64, C64) {
        let i = C64::i();
        let (e1, e2) = (self.bands.eta1, self.bands.eta2);
        let f = |e: f64| ((base - i * e) + off) * ((base + i * e) + off);
        let n1 = f(e1);
        let n2 = f(e2);
        let w = n1 / n2;
        let z = base + off;
        let s = if z.re == 0.0 && w.re < 0.0 {
            let sg = if right { 1.0 } else { -1.0 } * z.im.signum();
            C64::new(0.0, sg * w.re.abs().sqrt())
        } else {
            w.sqrt()
        };
        (s, n2)
    }

    #[inline]
    fn r_raw(&self, z: C64, right: bool) -> C64 {
        let (s, n2) = self.sqrt_w_at(z, C64::default(), right);
        n2 * s
    }

    /// `R(λ) = √((λ²+η₁²)(λ²+η₂²))` with `R/λ² → 1` and cuts on the bands.
    pub fn r(&self, pt: Pt) -> Result<C64> {
        self.check_branch(pt.z)?;
        Ok(self.r_raw(pt.z, pt.side != Side::Plus))
    }

    /// `γ(λ) = ((λ²+η₁²)/(λ²+η₂²))^{1/4}`, `γ(∞) = 1`.
    pub fn gamma(&self, pt: Pt) -> Result<C64> {
        self.check_branch(pt.z)?;
        Ok(self.sqrt_w(pt.z, pt.side != Side::Plus).sqrt())
    }

    /// Integrand `[dp, dq·scale, dJ]` per unit dζ.
    #[inline]
    fn differentials(&self, base: C64, off: C64, right: bool, qscale: f64) -> [C64; 3] {
        let (e1, e2) = (self.bands.eta1, self.bands.eta2);
        let (s, n2) = self.sqrt_w_at(base, off, right);
        let rinv = 1.0 / (n2 * s);
        let z = base + off;
        let z2 = z * z;
        [
            (z2 + self.c1) * rinv,
            12.0 * (z2 * z2 + 0.5 * (e1 * e1 + e2 * e2) * z2 + self.c2) * rinv * qscale,
            C64::new(0.0, -e2 / (4.0 * self.ell.k)) * rinv,
        ]
    }

    fn is_branch_y(&self, y: f64) -> bool {
        let a = y.abs();
        a == self.bands.eta1 || a == self.bands.eta2
    }

    /// `∫` of the differentials along the segment `[za, zb]`; points on the
    /// axis use the right boundary values.
    fn segment(&self, za: C64, zb: C64, qscale: f64) -> Result<[C64; 3]> {
        if za == zb {
            return Ok([C64::default(); 3]);
        }
        let axis = za.re == 0.0 && zb.re == 0.0;
        let map = EndMap::from_flags(
            za.re == 0.0 && self.is_branch_y(za.im),
            zb.re == 0.0 && self.is_branch_y(zb.im),
        );
        let dz = zb - za;
        let (v, _) = adaptive::<3>(0.0, 1.0, 1e-14, |s| {
            let (t, tc, w) = map.apply3(s);
            let (base, mut off) = if t < 0.5 { (za, dz * t) } else { (zb, -dz * tc) };
            if axis {
                off.re = 0.0;
            }
            let d = self.differentials(base, off, true, qscale);
            [d[0] * dz * w, d[1] * dz * w, d[2] * dz * w]
        })?;
        Ok(v)
    }

    /// Integration path from `iη₂` to a point with `Re z ≥ 0` that avoids
    /// crossing the cuts (axis pieces use right boundary values).
    fn path(&self, z: C64) -> Vec<C64> {
        let (e1, e2) = (self.bands.eta1, self.bands.eta2);
        let c = 0.3 * e1.min(e2 - e1);
        let start = C64::new(0.0, e2);
        if z.re >= c {
            return vec![start, C64::new(z.re, e2), z];
        }
        let y = z.im;
        let mut pts = vec![start];
        if y > e2 {
            pts.push(C64::new(0.0, y));
        } else {
            for b in [e1, -e1, -e2] {
                if y < b {
                    pts.push(C64::new(0.0, b));
                }
            }
            pts.push(C64::new(0.0, y));
        }
        if z.re != 0.0 {
            pts.push(z);
        }
        pts.dedup();
        pts
    }

    fn abel_right(&self, z: C64) -> Result<Abel> {
        let qscale = 1.0 / (1.0 + z.norm_sqr());
        let path = self.path(z);
        let mut acc = [C64::default(); 3];
        for w in path.windows(2) {
            let v = self.segment(w[0], w[1], qscale)?;
            for k in 0..3 {
                acc[k] += v[k];
            }
        }
        Ok(Abel { p: acc[0], q: acc[1] / qscale, j: acc[2] })
    }

    /// `p`, `q`, `J` at a point, honoring the side tag on the axis.
    pub fn abel(&self, pt: Pt) -> Result<Abel> {
        self.check_branch(pt.z)?;
        if pt.z == C64::default() && pt.side == Side::Off {
            return Err(Error::Domain("λ = 0 needs a side tag".into()));
        }
        if pt.is_right() {
            self.abel_right(pt.z)
        } else {
            let a = self.abel_right(-pt.z)?;
            Ok(Abel { p: -a.p, q: -a.q, j: -0.5 - a.j })
        }
    }

    /// `∮_A` of `[dp, dq, ω]`: the cycle around the gap, twice the integral
    /// from `−iη₁` to `iη₁` along the right side. `∮_A ω = 1`.
    pub fn a_period(&self) -> Result<[C64; 3]> {
        let v = self.segment(C64::new(0.0, -self.bands.eta1), C64::new(0.0, self.bands.eta1), 1.0)?;
        Ok([2.0 * v[0], 2.0 * v[1], 2.0 * v[2]])
    }

    /// `∮_B` of `[dp, dq, ω]`: the cycle around `Σ₁`, twice the integral from
    /// `iη₂` down to `iη₁` on the right side. Gives `(Ω₁, Ω₂, τ)`.
    pub fn b_period(&self) -> Result<[C64; 3]> {
        let v = self.segment(C64::new(0.0, self.bands.eta2), C64::new(0.0, self.bands.eta1), 1.0)?;
        Ok([2.0 * v[0], 2.0 * v[1], 2.0 * v[2]])
    }
}
