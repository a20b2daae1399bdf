//! Scattering coefficients `a`, `b`, `b₁` as Wronskians of Jost columns.
//!
//! `a = det[Φ₁^l, Φ₂^r]`, `b = b₁ = det[Φ₁^r, Φ₁^l]`. Schwarz conjugates
//! `f*(λ) = conj f(λ̄)` are evaluated at the conjugate point, which on the
//! imaginary axis keeps the side of the cut.

use crate::error::{Error, Result};
use crate::jost::{wronskian, Column, JSide, Jost};
use crate::mat::Mat;
use crate::quad::adaptive;
use crate::scenario::{BandGeometry, Region, Scenario};
use crate::surface::Pt;
use num_complex::Complex64 as C64;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use std::f64::consts::PI;

/// Scattering data at one spectral point. Entries are absent where the Jost
/// columns they need do not coexist.
#[derive(Debug, Clone, Copy, Serialize, Deserialize)]
pub struct ScatteringSample {
    pub lambda: Pt,
    pub region: Region,
    pub x: f64,
    pub a: Option<C64>,
    /// `b` on ℝ.
    pub b: Option<C64>,
    /// `b₁` on `Σ₁^r ∪ Σ₂^l`.
    pub b1: Option<C64>,
    /// `λ·a` and `λ·b`, finite at the origin.
    pub lambda_a: Option<C64>,
    pub lambda_b: Option<C64>,
    pub est_error: f64,
}

/// The four Jost columns at one `(x, λ)`; `None` where a column does not exist.
struct Cols {
    l: [Option<Column>; 2],
    r: [Option<Column>; 2],
}

#[derive(Debug, Clone)]
pub struct Scattering {
    pub jost: Jost,
    pub geom: BandGeometry,
    pub x_match: f64,
    /// `x₀^l − x₀^r`.
    pub delta: f64,
}

/// Largest residual of one identity over the sample points of one piece.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct Residual {
    pub region: Region,
    pub relation: String,
    pub points: usize,
    pub max: f64,
}

/// `|f|·d^{1/4}` along an approach `iη ± d` to a band endpoint, on the `+` side.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct EndpointSeries {
    pub eta: f64,
    /// Approach from below (`iη − d`) or above.
    pub below: bool,
    pub quantity: String,
    pub d: Vec<f64>,
    pub rescaled: Vec<f64>,
}

/// Distances of the approach sequences to band endpoints.
pub const APPROACH: [f64; 5] = [1e-1, 3e-2, 1e-2, 5e-3, 2e-3];

/// `n` interior points of `(lo, hi)` clustered toward the ends.
pub fn piece_points(lo: f64, hi: f64, n: usize) -> Vec<f64> {
    let pad = (0.02 * (hi - lo)).max(2e-3);
    let (a, b) = (lo + pad, hi - pad);
    (0..n).map(|j| a + 0.5 * (b - a) * (1.0 - (PI * (j as f64 + 0.5) / n as f64).cos())).collect()
}

/// Argument-principle result for the upper half-plane box.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct Winding {
    pub outer: i64,
    /// One entry per connected component of `Σ₁^l ∪ Σ₁^r`.
    pub slits: Vec<i64>,
    pub zeros: i64,
    pub samples: usize,
    pub min_abs: f64,
}

impl Scattering {
    pub fn new(scn: &Scenario) -> Result<Self> {
        Ok(Self::from_jost(Jost::new(scn)?, scn))
    }

    pub fn from_jost(jost: Jost, scn: &Scenario) -> Self {
        let delta = jost.data.left.x0() - jost.data.right.x0();
        Self { jost, geom: scn.geometry(), x_match: scn.matching_x(), delta }
    }

    pub fn region(&self, pt: Pt) -> Region {
        let z = pt.z;
        if z.im == 0.0 {
            Region::RealLine
        } else if pt.on_axis() {
            self.geom.region_of_axis(z.im)
        } else if z.im > 0.0 {
            Region::UpperPlane
        } else {
            Region::LowerPlane
        }
    }

    fn columns(&self, pt: Pt, x: f64) -> Result<Cols> {
        let j = &self.jost;
        let get = |side, k| -> Result<Option<Column>> {
            if j.admissible(side, k, pt) {
                Ok(Some(j.column(side, k, pt, &[x])?[0]))
            } else {
                Ok(None)
            }
        };
        Ok(Cols { l: [get(JSide::Left, 0)?, get(JSide::Left, 1)?], r: [get(JSide::Right, 0)?, get(JSide::Right, 1)?] })
    }

    /// `a(λ)` with the matching point `x`.
    pub fn a_at(&self, pt: Pt, x: f64) -> Result<C64> {
        let j = &self.jost;
        if !(j.admissible(JSide::Left, 0, pt) && j.admissible(JSide::Right, 1, pt)) {
            return Err(Error::Region(format!("a is not defined at {} ({})", pt.z, self.region(pt).label())));
        }
        let l = j.column(JSide::Left, 0, pt, &[x])?[0];
        let r = j.column(JSide::Right, 1, pt, &[x])?[0];
        Ok(wronskian(&l, &r))
    }

    pub fn a(&self, pt: Pt) -> Result<C64> {
        self.a_at(pt, self.x_match)
    }

    /// `b₁(λ) = det[Φ₁^r, Φ₁^l]`; on ℝ this is `b`.
    pub fn b1_at(&self, pt: Pt, x: f64) -> Result<C64> {
        let j = &self.jost;
        if !(j.admissible(JSide::Left, 0, pt) && j.admissible(JSide::Right, 0, pt)) {
            return Err(Error::Region(format!("b1 is not defined at {} ({})", pt.z, self.region(pt).label())));
        }
        let r = j.column(JSide::Right, 0, pt, &[x])?[0];
        let l = j.column(JSide::Left, 0, pt, &[x])?[0];
        Ok(wronskian(&r, &l))
    }

    pub fn b1(&self, pt: Pt) -> Result<C64> {
        self.b1_at(pt, self.x_match)
    }

    /// `b(λ)` on ℝ only.
    pub fn b(&self, pt: Pt) -> Result<C64> {
        if pt.z.im != 0.0 {
            return Err(Error::Domain(format!("b is defined on the real line only, got {}", pt.z)));
        }
        self.b1(pt)
    }

    /// `a*(λ) = conj a(λ̄)`.
    pub fn a_star(&self, pt: Pt) -> Result<C64> {
        Ok(self.a(pt.conj())?.conj())
    }

    pub fn b1_star(&self, pt: Pt) -> Result<C64> {
        Ok(self.b1(pt.conj())?.conj())
    }

    /// `S = (Φ^r)⁻¹ Φ^l` where all four columns exist (ℝ and band intersections).
    pub fn s_matrix_at(&self, pt: Pt, x: f64) -> Result<Mat> {
        let c = self.columns(pt, x)?;
        match (c.l, c.r) {
            ([Some(l0), Some(l1)], [Some(r0), Some(r1)]) => Ok([
                [wronskian(&l0, &r1), wronskian(&l1, &r1)],
                [wronskian(&r0, &l0), wronskian(&r0, &l1)],
            ]),
            _ => Err(Error::Region(format!("the scattering matrix needs all four Jost columns at {}", pt.z))),
        }
    }

    pub fn s_matrix(&self, pt: Pt) -> Result<Mat> {
        self.s_matrix_at(pt, self.x_match)
    }

    pub fn sample_at(&self, pt: Pt, x: f64) -> Result<ScatteringSample> {
        let c = self.columns(pt, x)?;
        let err_of = |a: &Column, b: &Column| (a.err + b.err) * (a.log + b.log).exp().norm() * 4.0;
        let (a, ea) = match (c.l[0], c.r[1]) {
            (Some(l), Some(r)) => (Some(wronskian(&l, &r)), err_of(&l, &r)),
            _ => (None, 0.0),
        };
        let (b1, eb) = match (c.r[0], c.l[0]) {
            (Some(r), Some(l)) => (Some(wronskian(&r, &l)), err_of(&r, &l)),
            _ => (None, 0.0),
        };
        let real = pt.z.im == 0.0;
        let b = if real { b1 } else { None };
        Ok(ScatteringSample {
            lambda: pt,
            region: self.region(pt),
            x,
            a,
            b,
            b1: if real { None } else { b1 },
            lambda_a: a.map(|a| a * pt.z),
            lambda_b: b.map(|b| b * pt.z),
            est_error: ea.max(eb),
        })
    }

    pub fn sample(&self, pt: Pt) -> Result<ScatteringSample> {
        self.sample_at(pt, self.x_match)
    }

    /// Samples at many points, in parallel; the output order follows `pts`.
    pub fn table(&self, pts: &[Pt]) -> Vec<Result<ScatteringSample>> {
        pts.par_iter().map(|&p| self.sample(p)).collect()
    }

    /// Residuals of the jump relations of `a`, `b₁` and `S` across every piece
    /// of `Σ₁^l ∪ Σ₁^r` and its mirror, at `n` points per piece.
    pub fn jump_residuals(&self, n: usize) -> Result<Vec<Residual>> {
        use Region::*;
        let i = C64::i();
        let mut out = Vec::new();
        for piece in &self.geom.pieces {
            let ys = piece_points(piece.lo, piece.hi, n);
            let mut rels: Vec<(Region, &str, Box<dyn Fn(f64) -> Result<f64> + Sync + '_>)> = Vec::new();
            let up = |y| (Pt::axis(y, crate::surface::Side::Plus), Pt::axis(y, crate::surface::Side::Minus));
            let down = |y: f64| up(-y);
            match piece.region {
                BandIntersection => {
                    for (region, f) in [(BandIntersection, up as fn(f64) -> (Pt, Pt)), (LowerIntersection, |y: f64| {
                        (Pt::axis(-y, crate::surface::Side::Plus), Pt::axis(-y, crate::surface::Side::Minus))
                    })] {
                        rels.push((region, "S(λ+) = σ1 S(λ−) σ1", Box::new(move |y| {
                            let (p, m) = f(y);
                            Ok(crate::mat::dist(&self.s_matrix(p)?, &crate::mat::flip(&self.s_matrix(m)?)))
                        })));
                        rels.push((region, "det S = 1", Box::new(move |y| {
                            let (p, m) = f(y);
                            let d = |s: Mat| (crate::mat::det(&s) - 1.0).norm();
                            Ok(d(self.s_matrix(p)?).max(d(self.s_matrix(m)?)))
                        })));
                    }
                    rels.push((BandIntersection, "a(λ+) = a*(λ−)", Box::new(move |y| {
                        let (p, m) = up(y);
                        Ok((self.a(p)? - self.a_star(m)?).norm())
                    })));
                    rels.push((BandIntersection, "b1(λ+) = b1*(λ−)", Box::new(move |y| {
                        let (p, m) = up(y);
                        Ok((self.b1(p)? - self.b1_star(m)?).norm())
                    })));
                }
                Sigma1ROnly => {
                    rels.push((Sigma1ROnly, "b1(λ+) = i a(λ−)", Box::new(move |y| {
                        let (p, m) = up(y);
                        Ok((self.b1(p)? - i * self.a(m)?).norm())
                    })));
                    rels.push((Sigma1ROnly, "a(λ+) = i b1(λ−)", Box::new(move |y| {
                        let (p, m) = up(y);
                        Ok((self.a(p)? - i * self.b1(m)?).norm())
                    })));
                    rels.push((Sigma2ROnly, "b1*(λ+) = −i a*(λ−)", Box::new(move |y| {
                        let (p, m) = down(y);
                        Ok((self.b1_star(p)? + i * self.a_star(m)?).norm())
                    })));
                    rels.push((Sigma2ROnly, "a*(λ+) = −i b1*(λ−)", Box::new(move |y| {
                        let (p, m) = down(y);
                        Ok((self.a_star(p)? + i * self.b1_star(m)?).norm())
                    })));
                }
                Sigma1LOnly => {
                    rels.push((Sigma1LOnly, "b1*(λ+) = −i a(λ−)", Box::new(move |y| {
                        let (p, m) = up(y);
                        Ok((self.b1_star(p)? + i * self.a(m)?).norm())
                    })));
                    rels.push((Sigma1LOnly, "a(λ+) = −i b1*(λ−)", Box::new(move |y| {
                        let (p, m) = up(y);
                        Ok((self.a(p)? + i * self.b1_star(m)?).norm())
                    })));
                    rels.push((Sigma2LOnly, "b1(λ+) = i a*(λ−)", Box::new(move |y| {
                        let (p, m) = down(y);
                        Ok((self.b1(p)? - i * self.a_star(m)?).norm())
                    })));
                    rels.push((Sigma2LOnly, "a*(λ+) = i b1(λ−)", Box::new(move |y| {
                        let (p, m) = down(y);
                        Ok((self.a_star(p)? - i * self.b1(m)?).norm())
                    })));
                }
                _ => {}
            }
            for (region, name, f) in rels {
                let vals: Vec<Result<f64>> = ys.par_iter().map(|&y| f(y)).collect();
                let max = vals.into_iter().collect::<Result<Vec<_>>>()?.into_iter().fold(0.0, f64::max);
                out.push(Residual { region, relation: name.to_string(), points: ys.len(), max });
            }
        }
        Ok(out)
    }

    /// `𝐒 = σ₁𝐒*σ₁ = σ₁𝐒(−λ)σ₁` and `det 𝐒 = 1` at the given real points;
    /// `S = σ₁S*σ₁` on the band intersection at `n` points per side.
    pub fn schwarz_residuals(&self, reals: &[f64], n: usize) -> Result<Vec<Residual>> {
        use crate::mat::{conj, det, dist, flip};
        let fold = |v: Vec<Result<f64>>| -> Result<f64> { Ok(v.into_iter().collect::<Result<Vec<_>>>()?.into_iter().fold(0.0, f64::max)) };
        let on_real = |g: &(dyn Fn(Pt) -> Result<f64> + Sync)| fold(reals.par_iter().map(|&l| g(Pt::real(l, crate::surface::Side::Off))).collect());
        let mut out = vec![
            Residual { region: Region::RealLine, relation: "S = σ1 S* σ1".into(), points: reals.len(), max: on_real(&|p| {
                let s = self.s_matrix(p)?;
                Ok(dist(&s, &flip(&conj(&self.s_matrix(p.conj())?))))
            })? },
            Residual { region: Region::RealLine, relation: "S(λ) = σ1 S(−λ) σ1".into(), points: reals.len(), max: on_real(&|p| {
                Ok(dist(&self.s_matrix(p)?, &flip(&self.s_matrix(p.neg())?)))
            })? },
            Residual { region: Region::RealLine, relation: "det S = 1".into(), points: reals.len(), max: on_real(&|p| {
                Ok((det(&self.s_matrix(p)?) - 1.0).norm())
            })? },
            Residual { region: Region::RealLine, relation: "|a|² − |b|² = 1".into(), points: reals.len(), max: on_real(&|p| {
                let s = self.sample(p)?;
                Ok((s.a.unwrap().norm_sqr() - s.b.unwrap().norm_sqr() - 1.0).abs())
            })? },
        ];
        for piece in self.geom.pieces.iter().filter(|p| p.region == Region::BandIntersection) {
            let ys = piece_points(piece.lo, piece.hi, n);
            let pts: Vec<Pt> = ys
                .iter()
                .flat_map(|&y| [crate::surface::Side::Plus, crate::surface::Side::Minus].map(|s| Pt::axis(y, s)))
                .collect();
            let max = fold(pts.par_iter().map(|&p| Ok(dist(&self.s_matrix(p)?, &flip(&conj(&self.s_matrix(p.conj())?))))).collect())?;
            out.push(Residual { region: Region::BandIntersection, relation: "S = σ1 S* σ1".into(), points: pts.len(), max });
        }
        Ok(out)
    }

    /// `|a|·d^{1/4}` and, where defined, `|b₁|·d^{1/4}` approaching every band
    /// endpoint from inside the adjacent band pieces.
    pub fn endpoint_series(&self) -> Result<Vec<EndpointSeries>> {
        let mut out = Vec::new();
        for piece in &self.geom.pieces {
            for (eta, below) in [(piece.lo, false), (piece.hi, true)] {
                let ds: Vec<f64> = APPROACH.iter().cloned().filter(|&d| d < 0.5 * (piece.hi - piece.lo)).collect();
                let pts: Vec<Pt> = ds
                    .iter()
                    .map(|&d| Pt::axis(if below { eta - d } else { eta + d }, crate::surface::Side::Plus))
                    .collect();
                let scaled = |f: &(dyn Fn(Pt) -> Result<C64> + Sync)| -> Result<Vec<f64>> {
                    let v: Vec<Result<f64>> = pts.par_iter().zip(&ds).map(|(&p, &d)| Ok(f(p)?.norm() * d.powf(0.25))).collect();
                    v.into_iter().collect()
                };
                out.push(EndpointSeries { eta, below, quantity: "a".into(), d: ds.clone(), rescaled: scaled(&|p| self.a(p))? });
                if self.jost.admissible(JSide::Right, 0, pts[0]) {
                    out.push(EndpointSeries { eta, below, quantity: "b1".into(), d: ds.clone(), rescaled: scaled(&|p| self.b1(p))? });
                }
            }
        }
        Ok(out)
    }

    /// `b₁(λ₊)/b₁(λ₋)` along the approach to `iη` from below.
    pub fn b1_ratio_series(&self, eta: f64) -> Result<Vec<C64>> {
        use crate::surface::Side::{Minus, Plus};
        APPROACH.iter().map(|&d| Ok(self.b1(Pt::axis(eta - d, Plus))? / self.b1(Pt::axis(eta - d, Minus))?)).collect()
    }

    /// `a(λ) e^{−iΔλ}`, which tends to 1 at infinity.
    pub fn a_normalized(&self, pt: Pt) -> Result<C64> {
        Ok(self.a(pt)? * (-C64::i() * self.delta * pt.z).exp())
    }

    fn slit_components(&self) -> Vec<(f64, f64)> {
        let mut out: Vec<(f64, f64)> = Vec::new();
        for p in &self.geom.pieces {
            match out.last_mut() {
                Some(last) if p.lo <= last.1 => last.1 = last.1.max(p.hi),
                _ => out.push((p.lo, p.hi)),
            }
        }
        out
    }

    /// Closed polygons: the outer box, then one box around each slit.
    fn winding_contours(&self, delta: f64) -> (Vec<C64>, Vec<Vec<C64>>) {
        let m = self.geom.max_eta();
        let (big, h) = (3.0 * m, 2.0 * m);
        let c = |x: f64, y: f64| C64::new(x, y);
        let outer = vec![c(-big, delta), c(big, delta), c(big, h), c(-big, h)];
        let slits = self
            .slit_components()
            .into_iter()
            .map(|(lo, hi)| vec![c(-delta, lo - delta), c(delta, lo - delta), c(delta, hi + delta), c(-delta, hi + delta)])
            .collect();
        (outer, slits)
    }

    /// Winding of `a` around a closed polygon with about `n` initial samples,
    /// refining any step whose phase change exceeds π/4.
    fn polygon_winding(&self, poly: &[C64], n: usize) -> Result<(i64, usize, f64)> {
        let len: f64 = (0..poly.len()).map(|i| (poly[(i + 1) % poly.len()] - poly[i]).norm()).sum();
        let mut zs = Vec::new();
        for i in 0..poly.len() {
            let (p, q) = (poly[i], poly[(i + 1) % poly.len()]);
            let k = (((q - p).norm() / len) * n as f64).ceil().max(2.0) as usize;
            zs.extend((0..k).map(|j| p + (q - p) * (j as f64 / k as f64)));
        }
        zs.push(zs[0]);
        let f = |z: C64| self.a_normalized(Pt::off(z));
        let vals: Vec<Result<C64>> = zs.par_iter().map(|&z| f(z)).collect();
        let vals = vals.into_iter().collect::<Result<Vec<_>>>()?;
        let mut total = 0.0;
        let mut count = zs.len();
        let mut min_abs = f64::INFINITY;
        for i in 0..zs.len() - 1 {
            let mut stack = vec![(zs[i], vals[i], zs[i + 1], vals[i + 1], 0u32)];
            while let Some((z0, f0, z1, f1, depth)) = stack.pop() {
                min_abs = min_abs.min(f0.norm());
                let d = (f1 / f0).arg();
                if d.abs() <= PI / 4.0 {
                    total += d;
                    continue;
                }
                if depth >= 12 {
                    return Err(Error::Resolution(format!("phase of a not resolved between {z0} and {z1}")));
                }
                let zm = 0.5 * (z0 + z1);
                let fm = f(zm)?;
                count += 1;
                stack.push((zm, fm, z1, f1, depth + 1));
                stack.push((z0, f0, zm, fm, depth + 1));
            }
        }
        Ok(((total / (2.0 * PI)).round() as i64, count, min_abs))
    }

    /// Zeros of `a` in the box `[−Λ, Λ] × [δ, H]` minus `δ`-neighbourhoods of
    /// the upper bands, with `Λ = 3η₂^max`, `H = 2η₂^max`.
    pub fn winding(&self, delta: f64, n: usize) -> Result<Winding> {
        let (outer, slits) = self.winding_contours(delta);
        let (wo, mut samples, mut min_abs) = self.polygon_winding(&outer, n)?;
        let mut ws = Vec::new();
        for s in &slits {
            let (w, c, m) = self.polygon_winding(s, n / 2)?;
            ws.push(w);
            samples += c;
            min_abs = min_abs.min(m);
        }
        let zeros = wo - ws.iter().sum::<i64>();
        Ok(Winding { outer: wo, slits: ws, zeros, samples, min_abs })
    }

    /// Fails with `Error::Solitons` when `a` has zeros in the box.
    /// Also fails when the gap-axis scan finds a sign change of `a`, which
    /// catches zeros inside the notches around the band endpoints.
    pub fn verify_solitonless(&self, delta: f64, n: usize) -> Result<Winding> {
        let w = self.winding(delta, n)?;
        if w.zeros != 0 {
            return Err(Error::Solitons(w.zeros));
        }
        let z = self.gap_zeros(n)?;
        if !z.is_empty() {
            return Err(Error::Solitons(z.len() as i64));
        }
        Ok(w)
    }

    /// Zeros of `a` on the upper gap axis, located by sign changes and
    /// bisection. `a` is real there and every zero in `ℂ₊` lies on it. Samples
    /// cluster down to `10⁻⁹` from each band endpoint.
    pub fn gap_zeros(&self, n: usize) -> Result<Vec<f64>> {
        let mut s = self.clone();
        s.jost.guard = 1e-12;
        let ends = self.geom.endpoints();
        let top = 4.0 * self.geom.max_eta() + 8.0;
        let mut gaps = vec![(1e-3, ends[0])];
        for w in ends.windows(2) {
            let mid = 0.5 * (w[0] + w[1]);
            if self.region(Pt::axis(mid, crate::surface::Side::Plus)) == Region::Gap {
                gaps.push((w[0], w[1]));
            }
        }
        gaps.push((*ends.last().unwrap(), top));
        let val = |y: f64| -> Result<f64> { Ok(s.a(Pt::off(C64::new(0.0, y)))?.re) };
        let mut out = Vec::new();
        for (k, &(lo, hi)) in gaps.iter().enumerate() {
            let mut ys: Vec<f64> = (1..n.max(2)).map(|i| lo + (hi - lo) * i as f64 / n.max(2) as f64).collect();
            let near: Vec<f64> = (2..=18).map(|j| 10f64.powf(-0.5 * j as f64)).filter(|&d| d < 0.25 * (hi - lo)).collect();
            for &d in &near {
                if k > 0 {
                    ys.push(lo + d);
                }
                if k + 1 < gaps.len() {
                    ys.push(hi - d);
                }
            }
            ys.sort_by(|a, b| a.partial_cmp(b).unwrap());
            let vs: Vec<Result<f64>> = ys.par_iter().map(|&y| val(y)).collect();
            let vs = vs.into_iter().collect::<Result<Vec<_>>>()?;
            for i in 0..ys.len() - 1 {
                if vs[i] * vs[i + 1] < 0.0 {
                    let (mut a, mut b, mut fa) = (ys[i], ys[i + 1], vs[i]);
                    for _ in 0..60 {
                        let m = 0.5 * (a + b);
                        let fm = val(m)?;
                        if fm * fa < 0.0 {
                            b = m;
                        } else {
                            (a, fa) = (m, fm);
                        }
                        if b - a < 1e-13 * b {
                            break;
                        }
                    }
                    out.push(0.5 * (a + b));
                }
            }
        }
        Ok(out)
    }

    /// `a(z₀)` from the Cauchy integral over the winding contours.
    pub fn cauchy_a(&self, z0: C64, delta: f64, tol: f64) -> Result<C64> {
        let (outer, slits) = self.winding_contours(delta);
        let edge_sum = |poly: &[C64]| -> Result<C64> {
            let mut acc = C64::default();
            for i in 0..poly.len() {
                let (p, q) = (poly[i], poly[(i + 1) % poly.len()]);
                let mut fail = None;
                let (v, _) = adaptive::<1>(0.0, 1.0, tol, |s| {
                    let z = p + (q - p) * s;
                    match self.a(Pt::off(z)) {
                        Ok(a) => [a / (z - z0) * (q - p)],
                        Err(e) => {
                            fail.get_or_insert(e);
                            [C64::default()]
                        }
                    }
                })?;
                if let Some(e) = fail {
                    return Err(e);
                }
                acc += v[0];
            }
            Ok(acc)
        };
        let mut total = edge_sum(&outer)?;
        for s in &slits {
            total -= edge_sum(s)?;
        }
        Ok(total / (2.0 * PI * C64::i()))
    }
}
