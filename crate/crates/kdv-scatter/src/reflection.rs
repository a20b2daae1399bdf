//! The auxiliary function `h`, the factorization `a = a₁a₂`, the reflection
//! coefficients `r₁`, `r₂`, `ρ`, and the jump matrices of the problems for
//! `M` and `X`.
//!
//! `log h = −iΔλ + C(λ)` where `C` sums the Cauchy integrals of the
//! log-jumps over the upper band pieces, their mirrors on the lower axis, and
//! `ln(1 − |r|²)` over ℝ. The lower integrands are `−conj` of the upper ones,
//! so only the upper pieces are tabulated and the mirror contribution at `λ`
//! is `−conj C_up(λ̄)`. Each piece's logarithm is unwrapped along the piece and
//! shifted by a multiple of `2πi` so that `h` behaves like `(λ − iη)^{+1/4}`
//! at left endpoints and `(λ − iη)^{−1/4}` at right endpoints.

use crate::error::{Error, Result};
use crate::jost::JSide;
use crate::mat::{self, Mat};
use crate::quad::{adaptive, EndMap, Piecewise, Refine};
use crate::scattering::{piece_points, EndpointSeries, Residual, Scattering, APPROACH};
use crate::scenario::{BandPiece, Pattern, Region, Scenario};
use crate::surface::{Pt, Side};
use num_complex::Complex64 as C64;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use std::f64::consts::PI;

const TWO_PI_I: C64 = C64 { re: 0.0, im: 2.0 * PI };
const QUAD_TOL: f64 = 1e-12;
/// Target for the largest trailing Chebyshev coefficient of a log-jump table.
const BAND_TAIL: f64 = 1e-9;
const REAL_TAIL: f64 = 1e-10;
const TABLE_GUARD: f64 = 1e-9;
const MIN_TAU_PANEL: f64 = 1e-5;
/// Closest approach of a table node to a band endpoint; the Jost solutions
/// lose digits like `1/d` closer in.
const END_DISTANCE: f64 = 3e-9;
const SPREAD_SHIFT: f64 = 1.5;
/// Scale `c` of the subtracted `κ ln(s²/(s² + c²))`.
const LOG_SCALE: f64 = 1.0;
/// Horizontal offset of the continuation path for points on the axis.
const RAY_OFFSET: f64 = 0.05;

/// `θ(x, t; λ) = xλ + c·tλ³`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct PhaseTheta {
    pub x: f64,
    pub t: f64,
    pub coefficient: f64,
}

impl PhaseTheta {
    pub fn new(x: f64, t: f64, coefficient: f64) -> Self {
        Self { x, t, coefficient }
    }

    pub fn at(&self, l: C64) -> C64 {
        self.x * l + self.coefficient * self.t * l * l * l
    }
}

#[derive(Debug, Clone, Copy, Serialize, Deserialize)]
pub struct AuxiliaryH {
    pub lambda: Pt,
    pub h: C64,
    pub quadrature_error: f64,
}

/// `r₁` on `Σ₁^l`, `r₂` on `Σ₁^r`, `ρ` on ℝ. On the lower axis the entries
/// are the Schwarz reflections `conj r_j(λ̄)`.
#[derive(Debug, Clone, Copy, Serialize, Deserialize)]
pub struct ReflectionSample {
    pub lambda: Pt,
    pub region: Region,
    pub r1: Option<C64>,
    pub r2: Option<C64>,
    pub rho: Option<C64>,
}

#[derive(Debug, Clone, Copy, Serialize, Deserialize)]
pub struct Reconstruction {
    pub x: f64,
    /// From the first column of `X`, built on `Φ₁^l`.
    pub u_left: f64,
    /// From the second column of `X`, built on `Φ₂^r`.
    pub u_right: f64,
    pub u0: f64,
}

/// A residual together with the quadrature error it should stay under.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct Bounded {
    pub region: Region,
    pub relation: String,
    pub points: usize,
    pub max: f64,
    pub bound: f64,
}

/// Log-jump of one upper piece, tabulated in `τ ∈ [0, 1]` with
/// `y = lo + (hi − lo) sin²(πτ/2)`.
#[derive(Debug, Clone)]
struct BandTable {
    piece: BandPiece,
    table: Piecewise,
    offset: i64,
    /// Interpolation tail plus the spread of the samples under a change of
    /// matching point.
    error: f64,
}

impl BandTable {
    fn at_tau(&self, tau: f64) -> C64 {
        self.table.eval(tau) + TWO_PI_I * self.offset as f64
    }

    fn at_t(&self, t: f64) -> C64 {
        self.at_tau(2.0 / PI * t.clamp(0.0, 1.0).sqrt().asin())
    }

    /// `f/(2πi)` at the lower and upper ends.
    fn ends(&self) -> (f64, f64) {
        ((self.at_tau(0.0) / TWO_PI_I).re, (self.at_tau(1.0) / TWO_PI_I).re)
    }
}

/// `g̃(s) = ln(1 − |r|²) − κ ln(s²/(s² + c²))`, even in `s`. Below `s₁` it is
/// tabulated in `w = s²`; past `cut` the reflection is below the cutoff and
/// only the subtracted term remains.
#[derive(Debug, Clone)]
struct RealTable {
    kappa: f64,
    s1: f64,
    cut: f64,
    near: Option<Piecewise>,
    far: Option<Piecewise>,
    error: f64,
}

fn l0(s: f64) -> f64 {
    -(LOG_SCALE * LOG_SCALE / (s * s)).ln_1p()
}

impl RealTable {
    fn zero() -> Self {
        Self { kappa: 0.0, s1: 0.25, cut: 0.0, near: None, far: None, error: 0.0 }
    }

    fn tilde(&self, s: f64) -> f64 {
        let a = s.abs();
        if a > self.cut {
            return -self.kappa * l0(a);
        }
        if a <= self.s1 {
            return self.near.as_ref().map_or(0.0, |c| c.eval(a * a).re);
        }
        self.far.as_ref().map_or(0.0, |c| c.eval(a).re)
    }

    /// Breakpoints `s₁ < … ≤ cut` of the tabulated range.
    fn knots(&self) -> Vec<f64> {
        match &self.far {
            Some(p) => p.edges(),
            None => vec![self.s1],
        }
    }
}

/// Forward reflection data of one scenario.
#[derive(Debug, Clone)]
pub struct Reflection {
    pub scat: Scattering,
    pub theta_coefficient: f64,
    bands: Vec<BandTable>,
    real: RealTable,
    x0r: f64,
}

fn side_sign(side: Side) -> Result<f64> {
    match side {
        Side::Plus => Ok(1.0),
        Side::Minus => Ok(-1.0),
        Side::Off => Err(Error::Domain("a point on the contour needs a side".into())),
    }
}

/// `(1/2πi)∫ f(ζ)/(ζ − λ) dζ` along `za → zb` with `ζ = za + (zb − za)·t(τ)`.
/// `f_tau` feeds the quadrature; `f_t` gives the value subtracted at the
/// projection of `λ`, whose log kernel is integrated exactly. On the open
/// segment the side of `pt` (left = `Plus`) picks the boundary value.
fn cauchy_segment(
    za: C64,
    zb: C64,
    map: EndMap,
    f_tau: &dyn Fn(f64) -> C64,
    f_t: &dyn Fn(f64) -> C64,
    pt: Pt,
) -> Result<(C64, f64, C64)> {
    let l = pt.z;
    let dz = zb - za;
    let len = dz.norm();
    let t0 = (((l - za) * dz.conj()).re / (len * len)).clamp(0.0, 1.0);
    let fs = f_t(t0);
    let on = (za + dz * t0 - l).norm() <= 1e-14 * len && t0 > 0.0 && t0 < 1.0;
    let lg = if on {
        C64::new(((zb - l).norm() / (za - l).norm()).ln(), side_sign(pt.side)? * PI)
    } else {
        ((zb - l) / (za - l)).ln()
    };
    let (v, e) = adaptive::<1>(0.0, 1.0, QUAD_TOL, |tau| {
        let (t, w) = map.apply(tau);
        let d = za + dz * t - l;
        if d.norm() == 0.0 {
            return [C64::default()];
        }
        [(f_tau(tau) - fs) * dz * w / d]
    })?;
    Ok(((v[0] + fs * lg) / TWO_PI_I, e / (2.0 * PI), lg))
}

/// Logarithms with the argument continued along the samples.
fn unwrap_logs(ws: &[C64]) -> Result<Vec<C64>> {
    let mut out = Vec::with_capacity(ws.len());
    let mut prev: Option<f64> = None;
    for w in ws {
        if w.norm() == 0.0 || !w.norm().is_finite() {
            return Err(Error::Resolution(format!("log-jump argument {w} has no logarithm")));
        }
        let mut arg = w.arg();
        if let Some(p) = prev {
            arg += 2.0 * PI * ((p - arg) / (2.0 * PI)).round();
        }
        prev = Some(arg);
        out.push(C64::new(w.norm().ln(), arg));
    }
    Ok(out)
}

fn batch(f: &(dyn Fn(f64) -> Result<C64> + Sync)) -> impl Fn(&[f64]) -> Result<Vec<C64>> + '_ {
    move |xs: &[f64]| {
        let v: Vec<Result<C64>> = xs.par_iter().map(|&x| f(x)).collect();
        v.into_iter().collect()
    }
}

/// Points where the sample spread under a shifted matching point is measured.
const SPREAD_AT: [f64; 5] = [0.1, 0.3, 0.5, 0.7, 0.9];

impl Reflection {
    pub fn new(scn: &Scenario) -> Result<Self> {
        Self::from_scattering(Scattering::new(scn)?, scn)
    }

    pub fn from_scattering(mut scat: Scattering, scn: &Scenario) -> Result<Self> {
        let x0r = scat.jost.data.right.x0();
        let trivial = scat.geom.pattern == Pattern::Identical && scn.perturbation.is_zero();
        let guard = scat.jost.guard;
        // tables sample closer to the endpoints than user-facing evaluations
        scat.jost.guard = TABLE_GUARD;
        let built = if trivial {
            Ok((
                scat.geom
                    .pieces
                    .iter()
                    .map(|&piece| BandTable { piece, table: Piecewise::constant(0.0, 1.0, C64::default()), offset: 0, error: 0.0 })
                    .collect(),
                RealTable::zero(),
            ))
        } else {
            Self::build_tables(&scat, scn)
        };
        scat.jost.guard = guard;
        let (bands, real) = built?;
        let mut out = Self { scat, theta_coefficient: scn.theta_t_coefficient, bands, real, x0r };
        if !trivial {
            out.fit_offsets()?;
        }
        Ok(out)
    }

    fn log_jump(scat: &Scattering, piece: &BandPiece, tau: f64) -> Result<C64> {
        let s = (0.5 * PI * tau).sin();
        let y = piece.lo + (piece.hi - piece.lo) * s * s;
        let (p, m) = (Pt::axis(y, Side::Plus), Pt::axis(y, Side::Minus));
        Ok(match piece.region {
            Region::Sigma1ROnly => -scat.b1(m)? / scat.b1(p)?,
            Region::BandIntersection => -scat.b1(m)? / scat.b1_star(m)?,
            _ => -scat.b1_star(p)? / scat.b1_star(m)?,
        })
    }

    fn build_tables(scat: &Scattering, scn: &Scenario) -> Result<(Vec<BandTable>, RealTable)> {
        let mut shifted = scat.clone();
        shifted.x_match += SPREAD_SHIFT;
        let mut bands = Vec::new();
        for piece in &scat.geom.pieces {
            let end_gap = 2.0 / PI * (END_DISTANCE / (piece.hi - piece.lo)).sqrt().asin();
            let lim = Refine { degree: scn.grids.band_degree, tail: BAND_TAIL, min_width: MIN_TAU_PANEL, max_panels: 64, end_gap };
            let raw = |tau: f64| Self::log_jump(scat, piece, tau);
            let what = format!("log-jump on {} [{}, {}]", piece.region.label(), piece.lo, piece.hi);
            let table = Piecewise::build(&[0.0, 1.0], lim, &what, &batch(&raw), &unwrap_logs)?;
            let mut spread: f64 = 0.0;
            for tau in SPREAD_AT {
                let r = raw(tau)? / Self::log_jump(&shifted, piece, tau)?;
                spread = spread.max(r.ln().norm());
            }
            bands.push(BandTable { piece: *piece, error: table.tail() + spread, table, offset: 0 });
        }
        Ok((bands, Self::build_real(scat, &shifted, scn)?))
    }

    fn build_real(scat: &Scattering, shifted: &Scattering, scn: &Scenario) -> Result<RealTable> {
        let abs_a = |s: f64| -> Result<f64> { Ok(scat.a(Pt::real(s, Side::Off))?.norm()) };
        let slope = (abs_a(4e-3)?.ln() - abs_a(2e-3)?.ln()) / 2f64.ln();
        let kappa = -slope.round();
        if (slope + kappa).abs() > 0.2 || !(kappa == 0.0 || kappa == 1.0) {
            return Err(Error::Consistency(format!("|a| grows like λ^{slope:.3} at 0")));
        }
        let cutoff = scn.grids.real_cutoff;
        let mut s = 4.0;
        loop {
            let small = |s: f64| -> Result<bool> { Ok(scat.b(Pt::real(s, Side::Off))?.norm_sqr() < cutoff) };
            if small(s)? && small(1.5 * s)? {
                break;
            }
            s *= 2.0;
            if s > 512.0 {
                return Err(Error::Resolution(format!("|r|² stays above {cutoff:e} up to λ = {s}")));
            }
        }
        let cut = 1.5 * s;
        let s1: f64 = 0.25;
        let g = |s: f64| -> Result<C64> { Ok(C64::new(-2.0 * abs_a(s)?.ln() - kappa * l0(s), 0.0)) };
        let ident = |v: &[C64]| -> Result<Vec<C64>> { Ok(v.to_vec()) };
        let lim = Refine { degree: scn.grids.real_degree, tail: REAL_TAIL, min_width: 1e-6, max_panels: 128, end_gap: 0.0 };
        let gw = |w: f64| g(w.sqrt());
        let near = Piecewise::build(&[1.2e-6, s1 * s1], lim, "ln(1 − |r|²) near 0", &batch(&gw), &ident)?;
        let mut edges = vec![s1];
        let mut e = 1.0;
        while e < cut {
            edges.push(e);
            e *= 2.0;
        }
        edges.push(cut);
        let far = Piecewise::build(&edges, lim, "ln(1 − |r|²)", &batch(&g), &ident)?;
        let mut spread: f64 = 0.0;
        for f in SPREAD_AT {
            let s = s1 + f * (cut.min(8.0) - s1);
            let q = Pt::real(s, Side::Off);
            spread = spread.max(2.0 * (scat.a(q)?.norm() / shifted.a(q)?.norm()).ln().abs());
        }
        let error = near.tail().max(far.tail()) + spread;
        Ok(RealTable { kappa, s1, cut, near: Some(near), far: Some(far), error })
    }

    /// Shifts each piece's logarithm by `2πi n` so the exponent of `h` is
    /// `+1/4` at left endpoints and `−1/4` at right endpoints; the exponent at
    /// `iη` is `(f_below − f_above)/(2πi)`.
    fn fit_offsets(&mut self) -> Result<()> {
        let mut k = 0;
        while k < self.bands.len() {
            let mut below = 0.0;
            let mut j = k;
            loop {
                let (lo, hi) = self.bands[j].ends();
                let eta = self.bands[j].piece.lo;
                let raw = below - lo - self.target(eta);
                let n = raw.round();
                if (raw - n).abs() > 0.1 {
                    return Err(Error::Consistency(format!("exponent of h at i{eta} is off a quarter by {:.3}", raw - n)));
                }
                self.bands[j].offset = n as i64;
                below = hi + n;
                if j + 1 < self.bands.len() && self.bands[j + 1].piece.lo == self.bands[j].piece.hi {
                    j += 1;
                } else {
                    break;
                }
            }
            let top = self.bands[j].piece.hi;
            let miss = below - self.target(top);
            if miss.abs() > 0.1 {
                return Err(Error::Consistency(format!(
                    "exponent of h at i{top} is {below:.3}, expected {}: the log-jump winds {:.0} times too often across the bands ending there",
                    self.target(top),
                    miss
                )));
            }
            k = j + 1;
        }
        Ok(())
    }

    fn target(&self, eta: f64) -> f64 {
        let g = &self.scat.geom;
        let same = |a: f64, b: f64| (a - b).abs() <= 1e-12 * a.max(1.0);
        let mut t = 0.0;
        if same(eta, g.left.0) || same(eta, g.left.1) {
            t += 0.25;
        }
        if same(eta, g.right.0) || same(eta, g.right.1) {
            t -= 0.25;
        }
        t
    }

    /// Exponent `e` of `h ~ (λ − iη)^e` at every endpoint, read off the tables.
    pub fn endpoint_exponents(&self) -> Vec<(f64, f64)> {
        let mut out: Vec<(f64, f64)> = Vec::new();
        for b in &self.bands {
            let (lo, hi) = b.ends();
            for (eta, v) in [(b.piece.lo, -lo), (b.piece.hi, hi)] {
                match out.iter_mut().find(|(e, _)| *e == eta) {
                    Some(entry) => entry.1 += v,
                    None => out.push((eta, v)),
                }
            }
        }
        out
    }

    pub fn region(&self, pt: Pt) -> Region {
        self.scat.region(pt)
    }

    /// Largest estimated integrand error over all tables.
    pub fn table_error(&self) -> f64 {
        self.bands.iter().map(|b| b.error).fold(self.real.error, f64::max)
    }

    fn check_upper(&self, pt: Pt) -> Result<()> {
        if pt.z.im < 0.0 {
            return Err(Error::Region(format!("h and a₁, a₂ live in the closed upper half-plane, got {}", pt.z)));
        }
        if pt.on_axis() && pt.side == Side::Off && self.region(pt) != Region::Gap {
            return Err(Error::Domain(format!("{} lies on a band; give a side", pt.z)));
        }
        let d = self
            .scat
            .geom
            .endpoints()
            .iter()
            .map(|&e| (pt.z - C64::new(0.0, e)).norm())
            .fold(pt.z.norm(), f64::min);
        if d < self.scat.jost.guard {
            return Err(Error::Proximity { lambda: pt.z, dist: d });
        }
        Ok(())
    }

    fn cauchy_real(&self, pt: Pt) -> Result<(C64, f64)> {
        let t = &self.real;
        if t.kappa == 0.0 && t.far.is_none() {
            return Ok((C64::default(), 0.0));
        }
        let l = pt.z;
        let x = l.re;
        let fs = t.tilde(x);
        let mut knots = t.knots();
        let reach = 2.0 * x.abs() + 1.0;
        while *knots.last().unwrap() < reach {
            let last = *knots.last().unwrap();
            knots.push(2.0 * last);
        }
        let r = *knots.last().unwrap();
        let mut segs = vec![(-t.s1, t.s1)];
        for w in knots.windows(2) {
            segs.push((w[0], w[1]));
            segs.push((-w[1], -w[0]));
        }
        let mut acc = C64::default();
        let mut err = 0.0;
        for (a, b) in segs {
            let (v, e) = adaptive::<1>(a, b, QUAD_TOL, |s| {
                let d = s - l;
                if d.norm() == 0.0 {
                    return [C64::default()];
                }
                [C64::new(t.tilde(s) - fs, 0.0) / d]
            })?;
            acc += v[0];
            err += e;
        }
        if t.kappa != 0.0 {
            for sg in [1.0, -1.0] {
                let (v, e) = adaptive::<1>(0.0, 1.0, QUAD_TOL, |u| {
                    if u == 0.0 {
                        return [C64::default()];
                    }
                    let f = t.kappa * (LOG_SCALE * LOG_SCALE * u * u / (r * r)).ln_1p();
                    [f * r / (u * (sg * r - l * u))]
                })?;
                acc += v[0];
                err += e;
            }
        }
        let lg = if l.im == 0.0 {
            C64::new(((r - x) / (r + x)).ln(), PI)
        } else {
            ((r - l) / (-r - l)).ln()
        };
        acc += fs * lg;
        let mut out = acc / TWO_PI_I;
        if t.kappa != 0.0 {
            let lp = if l.im == 0.0 { C64::new(x, 0.0) } else { l };
            out += t.kappa * (lp.ln() - (lp + C64::new(0.0, LOG_SCALE)).ln());
        }
        Ok((out, err / (2.0 * PI) + t.error * (1.0 + lg.norm() / PI)))
    }

    /// `C(λ) = log h + iΔλ`.
    fn cauchy_sum(&self, pt: Pt) -> Result<(C64, f64)> {
        self.check_upper(pt)?;
        let (mut acc, mut err) = self.cauchy_real(pt)?;
        let mirror = Pt::off(pt.z.conj());
        for b in &self.bands {
            let (za, zb) = (C64::new(0.0, b.piece.lo), C64::new(0.0, b.piece.hi));
            let ft = |tau: f64| b.at_tau(tau);
            let fx = |t: f64| b.at_t(t);
            let (u, eu, lu) = cauchy_segment(za, zb, EndMap::Both, &ft, &fx, pt)?;
            let (d, ed, ld) = cauchy_segment(za, zb, EndMap::Both, &ft, &fx, mirror)?;
            acc += u - d.conj();
            err += eu + ed + b.error * (2.0 + (lu.norm() + ld.norm()) / PI);
        }
        Ok((acc, err))
    }

    pub fn h_eval(&self, pt: Pt) -> Result<AuxiliaryH> {
        let (c, err) = self.cauchy_sum(pt)?;
        let h = (-C64::i() * self.scat.delta * pt.z + c).exp();
        Ok(AuxiliaryH { lambda: pt, h, quadrature_error: err * h.norm() })
    }

    /// `log(a e^{−iΔλ})` continued from `i∞` down a vertical ray; points on
    /// the axis are reached from their side at a small horizontal offset.
    fn log_a(&self, pt: Pt) -> Result<C64> {
        self.check_upper(pt)?;
        let z = pt.z;
        let top = (4.0 * self.scat.geom.max_eta() + 8.0).max(z.im + 1.0);
        let xr = if pt.on_axis() {
            if pt.side == Side::Minus {
                RAY_OFFSET
            } else {
                -RAY_OFFSET
            }
        } else {
            z.re
        };
        let start = C64::new(xr, top);
        let corner = C64::new(xr, z.im);
        let mut segs = vec![(start, corner)];
        if pt.on_axis() {
            segs.push((corner, z));
        }
        let an = |q: Pt| self.scat.a_normalized(q);
        let a0 = an(Pt::off(start))?;
        if (a0 - 1.0).norm() > 0.5 {
            return Err(Error::Branch(start));
        }
        let mut la = a0.ln();
        let nseg = segs.len();
        for (k, &(p, q)) in segs.iter().enumerate() {
            let at = |s: f64| -> Pt {
                if s >= 1.0 && k + 1 == nseg {
                    pt
                } else {
                    Pt::off(p + (q - p) * s)
                }
            };
            let len = (q - p).norm();
            let steps = ((len / 1e-3).log2().ceil().max(1.0) as usize).min(40);
            let mut ss: Vec<f64> = (0..steps).map(|i| 1.0 - 0.5f64.powi(i as i32)).collect();
            ss.push(1.0);
            let vals: Vec<Result<C64>> = ss.par_iter().map(|&s| an(at(s))).collect();
            let vals = vals.into_iter().collect::<Result<Vec<_>>>()?;
            for i in 0..ss.len() - 1 {
                let mut stack = vec![(ss[i], vals[i], ss[i + 1], vals[i + 1], 0u32)];
                while let Some((s0, v0, s1, v1, depth)) = stack.pop() {
                    let r = v1 / v0;
                    if r.arg().abs() <= 0.25 * PI {
                        la += r.ln();
                        continue;
                    }
                    if depth >= 30 || (s1 - s0) * len < 1e-12 {
                        return Err(Error::Branch(p + (q - p) * s0));
                    }
                    let sm = 0.5 * (s0 + s1);
                    let vm = an(at(sm))?;
                    stack.push((sm, vm, s1, v1, depth + 1));
                    stack.push((s0, v0, sm, vm, depth + 1));
                }
            }
        }
        Ok(la)
    }

    /// `(log a₁, log a₂)` with `a₁ = (a/h)^{1/2}`, `a₂ = (ah)^{1/2}`.
    fn log_factors(&self, pt: Pt) -> Result<(C64, C64)> {
        let la = self.log_a(pt)?;
        let (c, _) = self.cauchy_sum(pt)?;
        let idl = C64::i() * self.scat.delta * pt.z;
        Ok((idl + 0.5 * (la - c), 0.5 * (la + c)))
    }

    /// `(a₁, a₂)` in the closed upper half-plane.
    pub fn factor_a1a2(&self, pt: Pt) -> Result<(C64, C64)> {
        let (l1, l2) = self.log_factors(pt)?;
        Ok((l1.exp(), l2.exp()))
    }

    /// `a₂*(λ) = conj a₂(λ̄)` for `λ` in the closed lower half-plane.
    fn a2_star(&self, pt: Pt) -> Result<C64> {
        let q = if pt.z.im == 0.0 { Pt::real(pt.z.re, Side::Off) } else { pt.conj() };
        Ok(self.factor_a1a2(q)?.1.conj())
    }

    fn upper_coeffs(&self, y: f64) -> Result<(Option<C64>, Option<C64>)> {
        let i = C64::i();
        let (p, m) = (Pt::axis(y, Side::Plus), Pt::axis(y, Side::Minus));
        let l = p.z;
        let region = self.region(p);
        let (a1p, a2p) = self.factor_a1a2(p)?;
        let (a1m, a2m) = self.factor_a1a2(m)?;
        let x0 = self.x0r;
        let r1 = if matches!(region, Region::Sigma1LOnly | Region::BandIntersection) {
            let b1sm = self.scat.b1_star(m)?;
            Some(a2m / a1m * (-2.0 * i * x0 * l).exp() / (a2m * a1p - i * b1sm))
        } else {
            None
        };
        let r2 = if matches!(region, Region::Sigma1ROnly | Region::BandIntersection) {
            let b1m = self.scat.b1(m)?;
            Some(a1m / a2m * (2.0 * i * x0 * l).exp() / (a1m * a2p + i * b1m))
        } else {
            None
        };
        Ok((r1, r2))
    }

    pub fn reflection_coeffs(&self, pt: Pt) -> Result<ReflectionSample> {
        use Region::*;
        let region = self.region(pt);
        let mut out = ReflectionSample { lambda: pt, region, r1: None, r2: None, rho: None };
        match region {
            RealLine => {
                let q = Pt::real(pt.z.re, Side::Off);
                let (a1, _) = self.factor_a1a2(q)?;
                let b = self.scat.b(q)?;
                out.rho = Some(b / (a1 * self.a2_star(q)?) * (-2.0 * C64::i() * self.x0r * q.z).exp());
            }
            Sigma1LOnly | Sigma1ROnly | BandIntersection => {
                (out.r1, out.r2) = self.upper_coeffs(pt.z.im)?;
            }
            Sigma2LOnly | Sigma2ROnly | LowerIntersection => {
                let (r1, r2) = self.upper_coeffs(-pt.z.im)?;
                out.r1 = r1.map(|r| r.conj());
                out.r2 = r2.map(|r| r.conj());
            }
            _ => return Err(Error::Domain(format!("{} is not on the jump contour ({})", pt.z, region.label()))),
        }
        Ok(out)
    }

    /// The jump matrix `V(x, t; λ)` of the problem for `X` on its seven pieces.
    pub fn jump_matrix_x(&self, phase: &PhaseTheta, pt: Pt, refl: &ReflectionSample) -> Result<Mat> {
        use Region::*;
        let i = C64::i();
        let e = (2.0 * i * phase.at(pt.z)).exp();
        let need = |v: Option<C64>, name: &str| v.ok_or_else(|| Error::Domain(format!("{name} missing at {}", pt.z)));
        let o = C64::new(1.0, 0.0);
        let z = C64::default();
        let inter = |c: C64, r1: C64, r2: C64| -> Result<Mat> {
            let q = 1.0 + r1 * r2;
            if q.norm() < 1e-8 {
                return Err(Error::Degenerate(pt.z));
            }
            let d = (1.0 - r1 * r2) / q;
            Ok([[d, c * 2.0 * i * r2 / (e * q)], [c * 2.0 * i * r1 * e / q, d]])
        };
        match self.region(pt) {
            Sigma1ROnly => Ok([[o, -2.0 * i * need(refl.r2, "r2")? / e], [z, o]]),
            BandIntersection => inter(-o, need(refl.r1, "r1")?, need(refl.r2, "r2")?),
            Sigma1LOnly => Ok([[o, z], [-2.0 * i * need(refl.r1, "r1")? * e, o]]),
            RealLine => {
                let r = need(refl.rho, "rho")?;
                Ok([[C64::from(1.0 - r.norm_sqr()), -r.conj() / e], [r * e, o]])
            }
            Sigma2LOnly => Ok([[o, 2.0 * i * need(refl.r1, "r1")? / e], [z, o]]),
            LowerIntersection => {
                let (r1, r2) = (need(refl.r1, "r1")?, need(refl.r2, "r2")?);
                // same shape with r₁ and r₂ exchanged
                inter(o, r2, r1)
            }
            Sigma2ROnly => Ok([[o, z], [2.0 * i * need(refl.r2, "r2")? * e, o]]),
            r => Err(Error::Domain(format!("no jump of X on {}", r.label()))),
        }
    }

    fn is_upper(pt: Pt) -> Result<bool> {
        if pt.z.im != 0.0 {
            return Ok(pt.z.im > 0.0);
        }
        match pt.side {
            Side::Plus => Ok(true),
            Side::Minus => Ok(false),
            Side::Off => Err(Error::Domain("a real point needs a side for M".into())),
        }
    }

    /// `M = [Φ₁^l/a, Φ₂^r] e^{i(x−x₀^r)λσ₃}` above ℝ and
    /// `[Φ₁^r, Φ₂^l/a*] e^{i(x−x₀^r)λσ₃}` below.
    pub fn m_matrix(&self, pt: Pt, x: f64) -> Result<Mat> {
        let upper = Self::is_upper(pt)?;
        let q = if pt.z.im == 0.0 { Pt::real(pt.z.re, Side::Off) } else { pt };
        let j = &self.scat.jost;
        let e = C64::i() * (x - self.x0r) * q.z;
        let (c0, c1, s0, s1) = if upper {
            let a = self.scat.a(q)?;
            (j.column(JSide::Left, 0, q, &[x])?[0], j.column(JSide::Right, 1, q, &[x])?[0], 1.0 / a, C64::new(1.0, 0.0))
        } else {
            let q2 = if q.z.im == 0.0 { q } else { q.conj() };
            let a_star = self.scat.a(q2)?.conj();
            (j.column(JSide::Right, 0, q, &[x])?[0], j.column(JSide::Left, 1, q, &[x])?[0], C64::new(1.0, 0.0), 1.0 / a_star)
        };
        let f0 = (c0.log + e).exp() * s0;
        let f1 = (c1.log - e).exp() * s1;
        Ok([[c0.v[0] * f0, c1.v[0] * f1], [c0.v[1] * f0, c1.v[1] * f1]])
    }

    /// The printed jump matrix `V^(M)` at `λ` on the contour, built from
    /// one-sided scattering data.
    pub fn jump_matrix_m(&self, pt: Pt, x: f64) -> Result<Mat> {
        use Region::*;
        let s = &self.scat;
        let i = C64::i();
        let o = C64::new(1.0, 0.0);
        let z = C64::default();
        let l = pt.z;
        let e = (2.0 * i * (x - self.x0r) * l).exp();
        let (p, m) = (Pt::axis(l.im, Side::Plus), Pt::axis(l.im, Side::Minus));
        match self.region(pt) {
            Sigma1ROnly => {
                let (am, b1m) = (s.a(m)?, s.b1(m)?);
                Ok([[am / (i * b1m), -i / e], [z, i * b1m / am]])
            }
            BandIntersection => {
                let (ap, am, b1m, b1sm) = (s.a(p)?, s.a(m)?, s.b1(m)?, s.b1_star(m)?);
                Ok([[-i * b1sm / ap, -i / e], [-i * e / (ap * am), i * b1m / am]])
            }
            Sigma1LOnly => {
                let (ap, am, b1sm) = (s.a(p)?, s.a(m)?, s.b1_star(m)?);
                Ok([[-i * b1sm / ap, z], [-i * e / (ap * am), o]])
            }
            RealLine => {
                let q = Pt::real(l.re, Side::Off);
                let (a, b) = (s.a(q)?, s.b(q)?);
                Ok([[C64::from(1.0 / a.norm_sqr()), -b.conj() / (a.conj() * e)], [b / a * e, o]])
            }
            Sigma2LOnly => {
                let (asp, asm, b1m) = (s.a_star(p)?, s.a_star(m)?, s.b1(m)?);
                Ok([[o, i / (e * asp * asm)], [z, i * b1m / asp]])
            }
            LowerIntersection => {
                let (asp, asm, b1m, b1sm) = (s.a_star(p)?, s.a_star(m)?, s.b1(m)?, s.b1_star(m)?);
                Ok([[-i * b1sm / asm, i / (e * asp * asm)], [i * e, i * b1m / asp]])
            }
            Sigma2ROnly => {
                let (asm, b1sm) = (s.a_star(m)?, s.b1_star(m)?);
                Ok([[-i * b1sm / asm, z], [i * e, i * asm / b1sm]])
            }
            r => Err(Error::Domain(format!("no jump of M on {}", r.label()))),
        }
    }

    /// Points on each piece of the contour: `n` per band piece and its
    /// mirror, `n` on each half of ℝ.
    fn contour_points(&self, n: usize) -> Vec<(Region, f64, bool)> {
        let mut out = Vec::new();
        for piece in &self.scat.geom.pieces {
            for y in piece_points(piece.lo, piece.hi, n) {
                out.push((piece.region, y, false));
                out.push((self.region(Pt::axis(-y, Side::Plus)), -y, false));
            }
        }
        let m = 2.5 * self.scat.geom.max_eta();
        for k in 0..n {
            let s = 0.05 + (m - 0.05) * (k as f64 + 0.5) / n as f64;
            out.push((Region::RealLine, s, true));
            out.push((Region::RealLine, -s, true));
        }
        out
    }

    fn sides(v: f64, real: bool) -> (Pt, Pt) {
        if real {
            (Pt::real(v, Side::Plus), Pt::real(v, Side::Minus))
        } else {
            (Pt::axis(v, Side::Plus), Pt::axis(v, Side::Minus))
        }
    }

    fn group(items: Vec<(Region, &str, Result<f64>)>) -> Result<Vec<Residual>> {
        let mut out: Vec<Residual> = Vec::new();
        for (region, rel, v) in items {
            let v = v?;
            match out.iter_mut().find(|r| r.region == region && r.relation == rel) {
                Some(r) => {
                    r.points += 1;
                    r.max = r.max.max(v);
                }
                None => out.push(Residual { region, relation: rel.to_string(), points: 1, max: v }),
            }
        }
        Ok(out)
    }

    /// `max ‖M₊ − M₋V^(M)‖` per piece, relative to `max(1, ‖M₊‖)`.
    pub fn verify_m_jumps(&self, x: f64, n: usize) -> Result<Vec<Residual>> {
        let pts = self.contour_points(n);
        let items: Vec<(Region, &str, Result<f64>)> = pts
            .par_iter()
            .map(|&(region, v, real)| {
                let f = || -> Result<f64> {
                    let (p, m) = Self::sides(v, real);
                    let mp = self.m_matrix(p, x)?;
                    let mm = self.m_matrix(m, x)?;
                    let vm = self.jump_matrix_m(p, x)?;
                    Ok(mat::dist(&mp, &mat::mul(&mm, &vm)) / mat::norm(&mp).max(1.0))
                };
                (region, "M+ = M- V(M)", f())
            })
            .collect();
        Self::group(items)
    }

    /// `[1, 1]·M·a₂^{σ₃}` above ℝ, `[1, 1]·M·a₂*^{−σ₃}` below.
    pub fn x_row(&self, pt: Pt, x: f64) -> Result<[C64; 2]> {
        let m = self.m_matrix(pt, x)?;
        let r = [m[0][0] + m[1][0], m[0][1] + m[1][1]];
        if Self::is_upper(pt)? {
            let q = if pt.z.im == 0.0 { Pt::real(pt.z.re, Side::Off) } else { pt };
            let (_, a2) = self.factor_a1a2(q)?;
            Ok([r[0] * a2, r[1] / a2])
        } else {
            let a2s = self.a2_star(pt)?;
            Ok([r[0] / a2s, r[1] * a2s])
        }
    }

    /// `max |X₊ − X₋V|` per piece, relative to `max(1, |X₊|)`.
    pub fn verify_x_jumps(&self, phase: &PhaseTheta, n: usize) -> Result<Vec<Residual>> {
        let pts = self.contour_points(n);
        let items: Vec<(Region, &str, Result<f64>)> = pts
            .par_iter()
            .map(|&(region, v, real)| {
                let f = || -> Result<f64> {
                    let (p, m) = Self::sides(v, real);
                    let xp = self.x_row(p, phase.x)?;
                    let xm = self.x_row(m, phase.x)?;
                    let vx = self.jump_matrix_x(phase, p, &self.reflection_coeffs(p)?)?;
                    let prod = [xm[0] * vx[0][0] + xm[1] * vx[1][0], xm[0] * vx[0][1] + xm[1] * vx[1][1]];
                    let big = xp[0].norm().max(xp[1].norm()).max(1.0);
                    Ok(((xp[0] - prod[0]).norm()).max((xp[1] - prod[1]).norm()) / big)
                };
                (region, "X+ = X- V", f())
            })
            .collect();
        Self::group(items)
    }

    /// `det V = 1` and `V(λ)·σ₁V(−λ)σ₁ = I` on every piece. The second is
    /// the inverse relation between the two sides of a band: the jump at
    /// `−λ` is the one seen from the opposite side of the conjugate cut.
    pub fn v_residuals(&self, phase: &PhaseTheta, n: usize) -> Result<Vec<Residual>> {
        let pts = self.contour_points(n);
        let items: Vec<Vec<(Region, &str, Result<f64>)>> = pts
            .par_iter()
            .map(|&(region, v, real)| {
                let p = if real { Pt::real(v, Side::Plus) } else { Pt::axis(v, Side::Plus) };
                let run = || -> Result<(f64, f64)> {
                    let vp = self.jump_matrix_x(phase, p, &self.reflection_coeffs(p)?)?;
                    let q = p.neg();
                    let vq = self.jump_matrix_x(phase, q, &self.reflection_coeffs(q)?)?;
                    let d = (mat::det(&vp) - 1.0).norm();
                    let inv = mat::dist(&mat::mul(&vp, &mat::flip(&vq)), &mat::EYE);
                    Ok((d, inv))
                };
                match run() {
                    Ok((d, inv)) => vec![(region, "det V = 1", Ok(d)), (region, "V(λ) σ1 V(−λ) σ1 = I", Ok(inv))],
                    Err(e) => vec![(region, "det V = 1", Err(e))],
                }
            })
            .collect();
        Self::group(items.into_iter().flatten().collect())
    }

    /// `X(−λ) = X(λ)σ₁` and `conj X(λ̄) = X(λ)σ₁` at off-contour points.
    pub fn x_symmetry(&self, zs: &[C64], x: f64) -> Result<f64> {
        let v: Vec<Result<f64>> = zs
            .par_iter()
            .map(|&z| {
                let p = Pt::off(z);
                let xs = self.x_row(p, x)?;
                let xn = self.x_row(Pt::off(-z), x)?;
                let xc = self.x_row(Pt::off(z.conj()), x)?;
                let big = xs[0].norm().max(xs[1].norm()).max(1.0);
                let d1 = (xn[0] - xs[1]).norm().max((xn[1] - xs[0]).norm());
                let d2 = (xc[0].conj() - xs[1]).norm().max((xc[1].conj() - xs[0]).norm());
                Ok(d1.max(d2) / big)
            })
            .collect();
        Ok(v.into_iter().collect::<Result<Vec<_>>>()?.into_iter().fold(0.0, f64::max))
    }

    /// Relative change of `a` when the matching point moves.
    fn a_spread(&self, pt: Pt) -> Result<f64> {
        let a = self.scat.a(pt)?;
        let b = self.scat.a_at(pt, self.scat.x_match + SPREAD_SHIFT)?;
        Ok((a - b).norm() / a.norm())
    }

    /// Properties of `a₁`, `a₂` and `r₁`, `r₂`, each with the bound it is
    /// judged against (a fixed tolerance or the quadrature error).
    pub fn factor_residuals(&self, reals: &[f64], n: usize) -> Result<Vec<Bounded>> {
        let i = C64::i();
        let mut out = Vec::new();
        let fold = |v: Vec<Result<(f64, f64)>>| -> Result<(f64, f64)> {
            let v = v.into_iter().collect::<Result<Vec<_>>>()?;
            Ok(v.iter().fold((0.0, 0.0), |acc, &(r, b)| (acc.0.max(r), acc.1.max(b))))
        };
        let real: Vec<Result<(f64, f64, f64)>> = reals
            .par_iter()
            .map(|&s| {
                let q = Pt::real(s, Side::Off);
                let (a1, a2) = self.factor_a1a2(q)?;
                let (a, b) = (self.scat.a(q)?, self.scat.b(q)?);
                let r2 = (b / a).norm_sqr();
                let h = self.h_eval(q)?;
                let hh = h.h.norm_sqr() - (1.0 - r2);
                Ok(((a2.norm() - 1.0).abs(), (1.0 / a1.norm_sqr() - (1.0 - r2)).abs(), hh.abs()))
            })
            .collect();
        let real = real.into_iter().collect::<Result<Vec<_>>>()?;
        let m = |k: usize| real.iter().map(|t| [t.0, t.1, t.2][k]).fold(0.0, f64::max);
        out.push(Bounded { region: Region::RealLine, relation: "|a2| = 1".into(), points: reals.len(), max: m(0), bound: 1e-4 });
        out.push(Bounded { region: Region::RealLine, relation: "1/|a1|² = 1 − |r|²".into(), points: reals.len(), max: m(1), bound: 1e-4 });
        out.push(Bounded { region: Region::RealLine, relation: "h h* = 1 − |r|²".into(), points: reals.len(), max: m(2), bound: 1e-4 });
        for piece in &self.scat.geom.pieces {
            let ys = piece_points(piece.lo, piece.hi, n);
            let region = piece.region;
            let two_sided = |y: f64| -> Result<((C64, C64), (C64, C64), f64)> {
                let (p, m) = (Pt::axis(y, Side::Plus), Pt::axis(y, Side::Minus));
                // relative errors of h and a on both sides; a₁, a₂ carry half of each
                let mut e = 0.0;
                for q in [p, m] {
                    let h = self.h_eval(q)?;
                    e += 0.5 * (h.quadrature_error / h.h.norm() + self.a_spread(q)?);
                }
                Ok((self.factor_a1a2(p)?, self.factor_a1a2(m)?, e))
            };
            match region {
                Region::Sigma1ROnly => {
                    let (r, b) = fold(ys.par_iter().map(|&y| {
                        let ((a1p, _), (a1m, _), e) = two_sided(y)?;
                        Ok(((a1p - a1m).norm(), e * a1p.norm()))
                    }).collect())?;
                    out.push(Bounded { region, relation: "a1(λ+) = a1(λ−)".into(), points: ys.len(), max: r, bound: b });
                    let (r, _) = fold(ys.par_iter().map(|&y| {
                        let ((_, a2p), (_, a2m), _) = two_sided(y)?;
                        let simple = (2.0 * i * self.x0r * C64::new(0.0, y)).exp() / (2.0 * a2m * a2p);
                        let r2 = self.reflection_coeffs(Pt::axis(y, Side::Plus))?.r2.unwrap();
                        Ok(((r2 - simple).norm(), 0.0))
                    }).collect())?;
                    out.push(Bounded { region, relation: "r2 = e^{2iλx0r}/(2 a2(λ−) a2(λ+))".into(), points: ys.len(), max: r, bound: 1e-5 });
                }
                Region::Sigma1LOnly => {
                    let (r, b) = fold(ys.par_iter().map(|&y| {
                        let ((_, a2p), (_, a2m), e) = two_sided(y)?;
                        Ok(((a2p - a2m).norm(), e * a2p.norm()))
                    }).collect())?;
                    out.push(Bounded { region, relation: "a2(λ+) = a2(λ−)".into(), points: ys.len(), max: r, bound: b });
                    let (r, _) = fold(ys.par_iter().map(|&y| {
                        let ((a1p, _), (a1m, _), _) = two_sided(y)?;
                        let simple = (-2.0 * i * self.x0r * C64::new(0.0, y)).exp() / (2.0 * a1m * a1p);
                        let r1 = self.reflection_coeffs(Pt::axis(y, Side::Plus))?.r1.unwrap();
                        Ok(((r1 - simple).norm(), 0.0))
                    }).collect())?;
                    out.push(Bounded { region, relation: "r1 = e^{−2iλx0r}/(2 a1(λ−) a1(λ+))".into(), points: ys.len(), max: r, bound: 1e-5 });
                }
                Region::BandIntersection => {
                    // b₁ = 0 for reflectionless data; such points carry no information
                    let v: Vec<Result<Option<f64>>> = ys
                        .par_iter()
                        .map(|&y| {
                            let m = Pt::axis(y, Side::Minus);
                            let (b1, b1s) = (self.scat.b1(m)?, self.scat.b1_star(m)?);
                            if b1.norm().min(b1s.norm()) < 1e-8 {
                                return Ok(None);
                            }
                            let ((a1p, a2p), (a1m, a2m), _) = two_sided(y)?;
                            Ok(Some((a2p / a1p + a2m * b1 / (a1m * b1s)).norm()))
                        })
                        .collect();
                    let v: Vec<f64> = v.into_iter().collect::<Result<Vec<_>>>()?.into_iter().flatten().collect();
                    let max = v.iter().cloned().fold(0.0, f64::max);
                    out.push(Bounded { region, relation: "a2/a1 (λ+) = −a2 b1/(a1 b1*) (λ−)".into(), points: v.len(), max, bound: 1e-4 });
                }
                _ => {}
            }
        }
        Ok(out)
    }

    /// `|a₁|·d^{1/4}` and `|a₂|·d^{1/4}` approaching every endpoint from
    /// inside the adjacent pieces.
    pub fn endpoint_series(&self) -> Result<Vec<EndpointSeries>> {
        let mut out = Vec::new();
        for piece in &self.scat.geom.pieces {
            for (eta, below) in [(piece.lo, false), (piece.hi, true)] {
                let ds: Vec<f64> = APPROACH.iter().cloned().filter(|&d| d < 0.5 * (piece.hi - piece.lo)).collect();
                let vals: Vec<Result<(f64, f64)>> = ds
                    .par_iter()
                    .map(|&d| {
                        let p = Pt::axis(if below { eta - d } else { eta + d }, Side::Plus);
                        let (a1, a2) = self.factor_a1a2(p)?;
                        Ok((a1.norm() * d.powf(0.25), a2.norm() * d.powf(0.25)))
                    })
                    .collect();
                let vals = vals.into_iter().collect::<Result<Vec<_>>>()?;
                out.push(EndpointSeries { eta, below, quantity: "a1".into(), d: ds.clone(), rescaled: vals.iter().map(|v| v.0).collect() });
                out.push(EndpointSeries { eta, below, quantity: "a2".into(), d: ds.clone(), rescaled: vals.iter().map(|v| v.1).collect() });
            }
        }
        Ok(out)
    }

    /// `u(x) = −2i ∂ₓ lim λ(X₁ − 1)` and `u(x) = 2i ∂ₓ lim λ(X₂ − 1)` with the
    /// limit by Richardson extrapolation over `λ ∈ {40i, …, 320i}` and the
    /// derivative by a five-point difference.
    pub fn reconstruct_u(&self, xs: &[f64]) -> Result<Vec<Reconstruction>> {
        const HX: f64 = 0.02;
        const STENCIL: [f64; 4] = [-2.0, -1.0, 1.0, 2.0];
        const WEIGHTS: [f64; 4] = [1.0, -8.0, 8.0, -1.0];
        let all: Vec<f64> = xs.iter().flat_map(|&x| STENCIL.iter().map(move |&k| x + k * HX)).collect();
        let j = &self.scat.jost;
        let ys = [40.0, 80.0, 160.0, 320.0];
        let per: Vec<Result<(Vec<C64>, Vec<C64>)>> = ys
            .par_iter()
            .map(|&y| {
                let pt = Pt::off(C64::new(0.0, y));
                let l = pt.z;
                let (la1, la2) = self.log_factors(pt)?;
                let left = j.column(JSide::Left, 0, pt, &all)?;
                let right = j.column(JSide::Right, 1, pt, &all)?;
                let mut cl = Vec::with_capacity(all.len());
                let mut cr = Vec::with_capacity(all.len());
                for (k, &x) in all.iter().enumerate() {
                    let e = C64::i() * (x - self.x0r) * l;
                    let (lc, rc) = (&left[k], &right[k]);
                    cl.push(l * ((lc.v[0] + lc.v[1]) * (lc.log + e - la1).exp() - 1.0));
                    cr.push(l * ((rc.v[0] + rc.v[1]) * (rc.log - e - la2).exp() - 1.0));
                }
                Ok((cl, cr))
            })
            .collect();
        let per = per.into_iter().collect::<Result<Vec<_>>>()?;
        let limit = |mut c: Vec<C64>, at: f64| -> Result<C64> {
            let mut prev = c[c.len() - 1];
            let mut f = 1.0;
            while c.len() > 1 {
                f *= 2.0;
                prev = c[c.len() - 1];
                c = c.windows(2).map(|w| (f * w[1] - w[0]) / (f - 1.0)).collect();
            }
            let r = c[0];
            if (r - prev).norm() > 1e-2 * r.norm().max(1.0) {
                return Err(Error::Asymptotics(format!("λ(X − 1) at x = {at} does not settle: {prev}, {r}")));
            }
            Ok(r)
        };
        let mut out = Vec::with_capacity(xs.len());
        for (n, &x) in xs.iter().enumerate() {
            let mut dl = C64::default();
            let mut dr = C64::default();
            for k in 0..4 {
                let idx = 4 * n + k;
                let cl = limit(per.iter().map(|p| p.0[idx]).collect(), x)?;
                let cr = limit(per.iter().map(|p| p.1[idx]).collect(), x)?;
                dl += WEIGHTS[k] * cl;
                dr += WEIGHTS[k] * cr;
            }
            let ul = -2.0 * C64::i() * dl / (12.0 * HX);
            let ur = 2.0 * C64::i() * dr / (12.0 * HX);
            if ul.im.abs() > 1e-2 || ur.im.abs() > 1e-2 {
                return Err(Error::Asymptotics(format!("reconstructed u({x}) is not real: {ul}, {ur}")));
            }
            out.push(Reconstruction { x, u_left: ul.re, u_right: ur.re, u0: j.data.u0(x) });
        }
        Ok(out)
    }

    /// `max |M(x; iy) − I|` over the given `x`.
    pub fn normalization(&self, xs: &[f64], y: f64) -> Result<f64> {
        let pt = Pt::off(C64::new(0.0, y));
        let v: Vec<Result<f64>> = xs.par_iter().map(|&x| Ok(mat::dist(&self.m_matrix(pt, x)?, &mat::EYE))).collect();
        Ok(v.into_iter().collect::<Result<Vec<_>>>()?.into_iter().fold(0.0, f64::max))
    }
}
