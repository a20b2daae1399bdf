//! Problem instances: the two backgrounds, the perturbation, resolution
//! policies and tolerances, plus the band geometry they induce.

use crate::background::Background;
use crate::error::{Error, Result};
use crate::special::TauConvention;
use crate::surface::BandParams;
use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};
use std::collections::BTreeMap;
use std::path::Path;

const DEFAULT_TOLERANCES: &str = include_str!("../data/tolerances.json");

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, Default)]
#[serde(rename_all = "snake_case")]
pub enum PerturbationKind {
    #[default]
    None,
    GaussianBump,
    CompactSpline,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Perturbation {
    #[serde(default)]
    pub kind: PerturbationKind,
    #[serde(default)]
    pub amplitude: f64,
    #[serde(default)]
    pub center: f64,
    #[serde(default = "one")]
    pub width: f64,
}

fn one() -> f64 {
    1.0
}

impl Default for Perturbation {
    fn default() -> Self {
        Self { kind: PerturbationKind::None, amplitude: 0.0, center: 0.0, width: 1.0 }
    }
}

impl Perturbation {
    pub fn eval(&self, x: f64) -> f64 {
        let r = (x - self.center) / self.width;
        match self.kind {
            PerturbationKind::None => 0.0,
            PerturbationKind::GaussianBump => self.amplitude * (-r * r).exp(),
            PerturbationKind::CompactSpline => {
                if r.abs() >= 1.0 {
                    0.0
                } else {
                    self.amplitude * (1.0 - r * r).powi(4)
                }
            }
        }
    }

    pub fn is_zero(&self) -> bool {
        self.kind == PerturbationKind::None || self.amplitude == 0.0
    }

    /// Interval outside which the bump is below 1e-17.
    pub fn support(&self) -> Option<(f64, f64)> {
        if self.is_zero() {
            return None;
        }
        let half = match self.kind {
            PerturbationKind::None => 0.0,
            PerturbationKind::GaussianBump => self.width * (self.amplitude.abs() * 1e17).ln().max(0.0).sqrt(),
            PerturbationKind::CompactSpline => self.width,
        };
        Some((self.center - half, self.center + half))
    }

    /// Points where the bump is not smooth.
    pub fn breakpoints(&self) -> Vec<f64> {
        match self.kind {
            PerturbationKind::CompactSpline if !self.is_zero() => {
                vec![self.center - self.width, self.center + self.width]
            }
            _ => vec![],
        }
    }
}

/// Resolution and truncation policies.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct Grids {
    /// Integration start `|x|`; derived from the tail bound when absent.
    pub x_far: Option<f64>,
    /// Background periods added past the perturbation support.
    pub extra_periods: f64,
    /// Width of the `tanh` switch between the backgrounds; 0 gives a sharp step at `x = 0`.
    pub switch_width: f64,
    pub ode_tol: f64,
    pub max_step: f64,
    /// Wronskian matching point; defaults to the perturbation center.
    pub matching_x: Option<f64>,
    /// Chebyshev degree for band tables.
    pub band_degree: usize,
    /// Chebyshev degree per real-line panel.
    pub real_degree: usize,
    /// Cutoff below which `|r|²` on ℝ is treated as zero in `h`.
    pub real_cutoff: f64,
}

impl Default for Grids {
    fn default() -> Self {
        Self {
            x_far: None,
            extra_periods: 40.0,
            switch_width: 1.0,
            ode_tol: 1e-11,
            max_step: 1.0,
            matching_x: None,
            band_degree: 48,
            real_degree: 40,
            real_cutoff: 1e-16,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Scenario {
    #[serde(default)]
    pub name: String,
    pub left: BandParams,
    pub right: BandParams,
    #[serde(default)]
    pub perturbation: Perturbation,
    #[serde(default)]
    pub grids: Grids,
    #[serde(default = "default_tolerances")]
    pub tolerances: BTreeMap<String, f64>,
    #[serde(default = "four")]
    pub theta_t_coefficient: f64,
    #[serde(default)]
    pub tau_convention: TauConvention,
    #[serde(default)]
    pub seed: u64,
}

fn four() -> f64 {
    4.0
}

pub fn default_tolerances() -> BTreeMap<String, f64> {
    serde_json::from_str(DEFAULT_TOLERANCES).expect("shipped tolerance table parses")
}

/// The six relative placements of `Σ₁^l` and `Σ₁^r`, plus the degenerate
/// case of identical backgrounds.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Pattern {
    /// `η₂^l < η₁^r`
    I,
    /// `η₁^l < η₁^r < η₂^l < η₂^r`
    II,
    /// `η₁^r < η₁^l < η₂^r < η₂^l`
    III,
    /// `Σ₁^r ⊂ Σ₁^l`
    IV,
    /// `Σ₁^l ⊂ Σ₁^r`
    V,
    /// `η₂^r < η₁^l`
    VI,
    Identical,
}

impl Pattern {
    pub fn label(self) -> &'static str {
        match self {
            Pattern::I => "i",
            Pattern::II => "ii",
            Pattern::III => "iii",
            Pattern::IV => "iv",
            Pattern::V => "v",
            Pattern::VI => "vi",
            Pattern::Identical => "identical",
        }
    }

    pub fn intersecting(self) -> bool {
        !matches!(self, Pattern::I | Pattern::VI)
    }
}

/// Where a spectral point sits relative to the two spectra.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Region {
    RealLine,
    BandIntersection,
    #[serde(rename = "sigma1r_only")]
    Sigma1ROnly,
    #[serde(rename = "sigma1l_only")]
    Sigma1LOnly,
    #[serde(rename = "sigma2r_only")]
    Sigma2ROnly,
    #[serde(rename = "sigma2l_only")]
    Sigma2LOnly,
    /// Mirror of the intersection on the lower axis.
    LowerIntersection,
    /// Axis points in no band.
    Gap,
    UpperPlane,
    LowerPlane,
}

impl Region {
    pub fn label(self) -> &'static str {
        match self {
            Region::RealLine => "real_line",
            Region::BandIntersection => "band_intersection",
            Region::Sigma1ROnly => "sigma1r_only",
            Region::Sigma1LOnly => "sigma1l_only",
            Region::Sigma2ROnly => "sigma2r_only",
            Region::Sigma2LOnly => "sigma2l_only",
            Region::LowerIntersection => "lower_intersection",
            Region::Gap => "gap",
            Region::UpperPlane => "upper_plane",
            Region::LowerPlane => "lower_plane",
        }
    }
}

/// One interval `(i lo, i hi)` of the upper axis with its region.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct BandPiece {
    pub region: Region,
    pub lo: f64,
    pub hi: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BandGeometry {
    pub pattern: Pattern,
    pub left: (f64, f64),
    pub right: (f64, f64),
    /// Upper-axis pieces in ascending order; their union is `Σ₁^l ∪ Σ₁^r`.
    pub pieces: Vec<BandPiece>,
}

impl BandGeometry {
    pub fn new(left: &BandParams, right: &BandParams) -> Result<Self> {
        let l = (left.eta1, left.eta2);
        let r = (right.eta1, right.eta2);
        let same = |a: f64, b: f64| (a - b).abs() <= 1e-12 * a.abs().max(1.0);
        let pattern = if same(l.0, r.0) && same(l.1, r.1) {
            Pattern::Identical
        } else {
            for a in [l.0, l.1] {
                for b in [r.0, r.1] {
                    if same(a, b) {
                        return Err(Error::Invalid {
                            path: "right".into(),
                            msg: format!("band endpoint i{b} is shared with the left background"),
                        });
                    }
                }
            }
            if l.1 < r.0 {
                Pattern::I
            } else if r.1 < l.0 {
                Pattern::VI
            } else if l.0 < r.0 && r.1 < l.1 {
                Pattern::IV
            } else if r.0 < l.0 && l.1 < r.1 {
                Pattern::V
            } else if l.0 < r.0 {
                Pattern::II
            } else {
                Pattern::III
            }
        };
        let mut cuts = vec![l.0, l.1, r.0, r.1];
        cuts.sort_by(|a, b| a.partial_cmp(b).unwrap());
        cuts.dedup();
        let mut pieces = Vec::new();
        for w in cuts.windows(2) {
            let mid = 0.5 * (w[0] + w[1]);
            let in_l = mid > l.0 && mid < l.1;
            let in_r = mid > r.0 && mid < r.1;
            let region = match (in_l, in_r) {
                (true, true) => Region::BandIntersection,
                (true, false) => Region::Sigma1LOnly,
                (false, true) => Region::Sigma1ROnly,
                (false, false) => continue,
            };
            pieces.push(BandPiece { region, lo: w[0], hi: w[1] });
        }
        Ok(Self { pattern, left: l, right: r, pieces })
    }

    /// Region of the axis point `iy`.
    pub fn region_of_axis(&self, y: f64) -> Region {
        let a = y.abs();
        let in_l = a > self.left.0 && a < self.left.1;
        let in_r = a > self.right.0 && a < self.right.1;
        match (y > 0.0, in_l, in_r) {
            (_, false, false) => Region::Gap,
            (true, true, true) => Region::BandIntersection,
            (true, true, false) => Region::Sigma1LOnly,
            (true, false, true) => Region::Sigma1ROnly,
            (false, true, true) => Region::LowerIntersection,
            (false, true, false) => Region::Sigma2LOnly,
            (false, false, true) => Region::Sigma2ROnly,
        }
    }

    /// All finite endpoints `η` of the upper bands, ascending.
    pub fn endpoints(&self) -> Vec<f64> {
        let mut v = vec![self.left.0, self.left.1, self.right.0, self.right.1];
        v.sort_by(|a, b| a.partial_cmp(b).unwrap());
        v.dedup();
        v
    }

    pub fn max_eta(&self) -> f64 {
        self.left.1.max(self.right.1)
    }
}

fn check_positive(path: &str, v: f64) -> Result<()> {
    if !(v > 0.0 && v.is_finite()) {
        return Err(Error::Invalid { path: path.into(), msg: format!("must be positive, got {v}") });
    }
    Ok(())
}

fn check_bands(path: &str, b: &BandParams) -> Result<()> {
    if !(b.eta1 > 0.0 && b.eta1.is_finite()) {
        return Err(Error::Invalid { path: format!("{path}.eta1"), msg: format!("must be positive, got {}", b.eta1) });
    }
    if !(b.eta2 > b.eta1 && b.eta2.is_finite()) {
        return Err(Error::Invalid {
            path: format!("{path}.eta2"),
            msg: format!("need eta1 < eta2, got ({}, {})", b.eta1, b.eta2),
        });
    }
    if !b.x0.is_finite() {
        return Err(Error::Invalid { path: format!("{path}.x0"), msg: "must be finite".into() });
    }
    Ok(())
}

impl Scenario {
    pub fn from_json(text: &str) -> Result<Self> {
        let mut scn: Scenario = serde_json::from_str(text).map_err(|e| Error::Invalid {
            path: format!("line {} column {}", e.line(), e.column()),
            msg: e.to_string(),
        })?;
        for (k, v) in default_tolerances() {
            scn.tolerances.entry(k).or_insert(v);
        }
        scn.validate()?;
        Ok(scn)
    }

    /// A scenario with default grids and tolerances.
    pub fn new(left: BandParams, right: BandParams, perturbation: Perturbation) -> Self {
        Self {
            name: String::new(),
            left,
            right,
            perturbation,
            grids: Grids::default(),
            tolerances: default_tolerances(),
            theta_t_coefficient: 4.0,
            tau_convention: TauConvention::default(),
            seed: 0,
        }
    }

    pub fn load(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path)
            .map_err(|e| Error::Invalid { path: path.display().to_string(), msg: e.to_string() })?;
        Self::from_json(&text)
    }

    /// Checks every field and fills tolerances missing from the document.
    pub fn validate(&self) -> Result<()> {
        check_bands("left", &self.left)?;
        check_bands("right", &self.right)?;
        BandGeometry::new(&self.left, &self.right)?;
        let p = &self.perturbation;
        check_positive("perturbation.width", p.width)?;
        if !p.amplitude.is_finite() || !p.center.is_finite() {
            return Err(Error::Invalid { path: "perturbation".into(), msg: "non-finite value".into() });
        }
        let g = &self.grids;
        if let Some(x) = g.x_far {
            check_positive("grids.x_far", x)?;
        }
        if !(g.switch_width >= 0.0 && g.switch_width.is_finite()) {
            return Err(Error::Invalid { path: "grids.switch_width".into(), msg: "must be >= 0".into() });
        }
        check_positive("grids.ode_tol", g.ode_tol)?;
        check_positive("grids.max_step", g.max_step)?;
        check_positive("grids.extra_periods", g.extra_periods)?;
        check_positive("grids.real_cutoff", g.real_cutoff)?;
        if g.band_degree < 8 || g.real_degree < 8 {
            return Err(Error::Invalid { path: "grids".into(), msg: "Chebyshev degrees must be >= 8".into() });
        }
        for (k, v) in &self.tolerances {
            check_positive(&format!("tolerances.{k}"), *v)?;
        }
        if !self.theta_t_coefficient.is_finite() {
            return Err(Error::Invalid { path: "theta_t_coefficient".into(), msg: "must be finite".into() });
        }
        Ok(())
    }

    /// The tolerance `name`, from the scenario or the shipped table.
    pub fn tol(&self, name: &str) -> f64 {
        self.tolerances
            .get(name)
            .copied()
            .or_else(|| default_tolerances().get(name).copied())
            .unwrap_or_else(|| panic!("unknown tolerance {name}"))
    }

    pub fn geometry(&self) -> BandGeometry {
        BandGeometry::new(&self.left, &self.right).expect("validated scenario")
    }

    pub fn backgrounds(&self) -> Result<(Background, Background)> {
        Ok((Background::new(self.left, self.tau_convention)?, Background::new(self.right, self.tau_convention)?))
    }

    /// Canonical JSON with all defaults filled in.
    pub fn canonical_json(&self) -> String {
        serde_json::to_string(self).expect("scenario serializes")
    }

    /// First 16 hex digits of the SHA-256 of the canonical JSON.
    pub fn hash(&self) -> String {
        let digest = Sha256::digest(self.canonical_json().as_bytes());
        digest.iter().take(8).map(|b| format!("{b:02x}")).collect()
    }

    pub fn matching_x(&self) -> f64 {
        self.grids.matching_x.unwrap_or(self.perturbation.center)
    }
}

/// Piecewise Chebyshev (first kind) interpolant of a real function.
#[derive(Debug, Clone, Default)]
struct PiecewiseCheb {
    edges: Vec<f64>,
    /// Per panel: node positions and values.
    panels: Vec<(Vec<f64>, Vec<f64>)>,
    weights: Vec<f64>,
}

impl PiecewiseCheb {
    const DEGREE: usize = 18;

    fn new(edges: Vec<f64>, f: impl Fn(f64) -> f64) -> Self {
        let n = Self::DEGREE + 1;
        let theta = |j: usize| (2 * j + 1) as f64 * std::f64::consts::PI / (2 * n) as f64;
        let weights = (0..n).map(|j| if j % 2 == 0 { 1.0 } else { -1.0 } * theta(j).sin()).collect();
        let panels = edges
            .windows(2)
            .map(|w| {
                let xs: Vec<f64> = (0..n).map(|j| 0.5 * (w[0] + w[1]) - 0.5 * (w[1] - w[0]) * theta(j).cos()).collect();
                let vs = xs.iter().map(|&x| f(x)).collect();
                (xs, vs)
            })
            .collect();
        Self { edges, panels, weights }
    }

    fn eval(&self, x: f64) -> Option<f64> {
        let e = &self.edges;
        if e.len() < 2 || x < e[0] || x > e[e.len() - 1] {
            return None;
        }
        let k = e.partition_point(|&b| b <= x).clamp(1, e.len() - 1) - 1;
        let (xs, vs) = &self.panels[k];
        let (mut num, mut den) = (0.0, 0.0);
        for j in 0..xs.len() {
            let d = x - xs[j];
            if d == 0.0 {
                return Some(vs[j]);
            }
            let t = self.weights[j] / d;
            num += t * vs[j];
            den += t;
        }
        Some(num / den)
    }
}

/// The step-like initial datum and its background limits.
#[derive(Debug, Clone)]
pub struct InitialData {
    pub left: Background,
    pub right: Background,
    pub bump: Perturbation,
    pub switch_width: f64,
    identical: bool,
    table: PiecewiseCheb,
}

impl InitialData {
    pub fn new(scn: &Scenario) -> Result<Self> {
        let (left, right) = scn.backgrounds()?;
        let mut d = Self {
            identical: scn.left == scn.right,
            left,
            right,
            bump: scn.perturbation.clone(),
            switch_width: scn.grids.switch_width,
            table: PiecewiseCheb::default(),
        };
        let (lo, hi) = d.core();
        let (lo, hi) = (lo - 25.0, hi + 25.0);
        let mut knots = vec![lo];
        knots.extend(d.breakpoints().into_iter().filter(|&b| b > lo && b < hi));
        knots.push(hi);
        let mut edges = vec![lo];
        for w in knots.windows(2) {
            let n = ((w[1] - w[0]) / 0.4).ceil().max(1.0) as usize;
            for i in 1..=n {
                edges.push(w[0] + (w[1] - w[0]) * i as f64 / n as f64);
            }
        }
        d.table = PiecewiseCheb::new(edges, |x| d.u0(x));
        Ok(d)
    }

    /// `u₀` from the interpolation table where available.
    #[inline]
    pub fn u0_fast(&self, x: f64) -> f64 {
        self.table.eval(x).unwrap_or_else(|| self.u0(x))
    }

    /// Weight of the right background at `x`.
    pub fn switch(&self, x: f64) -> f64 {
        if self.switch_width == 0.0 {
            if x < 0.0 {
                0.0
            } else {
                1.0
            }
        } else {
            0.5 * (1.0 + (x / self.switch_width).tanh())
        }
    }

    pub fn u_left(&self, x: f64) -> f64 {
        self.left.u_dn(x, 0.0)
    }

    pub fn u_right(&self, x: f64) -> f64 {
        self.right.u_dn(x, 0.0)
    }

    /// `u₀ = u₀^l + s(x)(u₀^r − u₀^l) + bump`.
    pub fn u0(&self, x: f64) -> f64 {
        let ul = self.u_left(x);
        let step = if self.identical { 0.0 } else { self.switch(x) * (self.u_right(x) - ul) };
        ul + step + self.bump.eval(x)
    }

    /// `u₀ − u₀^s` for the background `s` (left when `left = true`).
    pub fn excess(&self, x: f64, left: bool) -> f64 {
        let ub = if left { self.u_left(x) } else { self.u_right(x) };
        self.u0(x) - ub
    }

    /// Half-width of the region where the switch differs from 0 or 1 by more than 1e-17.
    pub fn switch_radius(&self) -> f64 {
        if self.identical {
            0.0
        } else {
            0.5 * self.switch_width * (4e18f64).ln()
        }
    }

    /// `[lo, hi]` outside which `u₀` equals its background limits to rounding.
    pub fn core(&self) -> (f64, f64) {
        let s = self.switch_radius();
        let (mut lo, mut hi) = (-s, s);
        if let Some((a, b)) = self.bump.support() {
            lo = lo.min(a);
            hi = hi.max(b);
        }
        (lo, hi)
    }

    /// Points where `u₀` is not smooth.
    pub fn breakpoints(&self) -> Vec<f64> {
        let mut v = self.bump.breakpoints();
        if self.switch_width == 0.0 && !self.identical {
            v.push(0.0);
        }
        v.sort_by(|a, b| a.partial_cmp(b).unwrap());
        v
    }
}

/// Integration start `|x|` for the Jost solutions.
pub fn x_far(scn: &Scenario, data: &InitialData) -> f64 {
    if let Some(x) = scn.grids.x_far {
        return x;
    }
    let (lo, hi) = data.core();
    let period = data.left.surf.period().max(data.right.surf.period());
    lo.abs().max(hi.abs()) + scn.grids.extra_periods * period
}

/// `∫_{|y| > X} |u₀ − u₀^s| dy` on the side where `s` is the limit, by quadrature.
pub fn tail_integral(data: &InitialData, x: f64, left: bool) -> Result<f64> {
    use crate::quad::adaptive;
    use num_complex::Complex64 as C64;
    let span = 60.0 * data.switch_width.max(data.bump.width).max(1.0);
    let (a, b) = if left { (-x - span, -x) } else { (x, x + span) };
    let (v, _) = adaptive::<1>(a, b, 1e-10, |y| [C64::new(data.excess(y, left).abs(), 0.0)])?;
    Ok(v[0].re)
}

/// Ready-made scenarios used by the tests, the acceptance run and the CLI.
pub mod presets {
    use super::*;

    fn bp(eta1: f64, eta2: f64, x0: f64) -> BandParams {
        BandParams { eta1, eta2, x0 }
    }

    /// Identical backgrounds and no bump.
    pub fn trivial() -> Scenario {
        let mut s = Scenario::new(bp(1.0, 2.0, 0.3), bp(1.0, 2.0, 0.3), Perturbation::default());
        s.name = "trivial".into();
        s
    }

    pub fn small_bump() -> Perturbation {
        Perturbation { kind: PerturbationKind::GaussianBump, amplitude: 0.05, center: 0.0, width: 1.0 }
    }

    /// Band pairs realising each pattern.
    pub fn bands(p: Pattern) -> (BandParams, BandParams) {
        match p {
            Pattern::I => (bp(0.8, 1.5, 0.1), bp(1.7, 2.3, -0.3)),
            Pattern::II => (bp(1.0, 2.0, 0.2), bp(1.5, 2.5, 0.0)),
            Pattern::III => (bp(1.0, 2.0, 0.3), bp(0.7, 1.5, 0.15)),
            Pattern::IV => (bp(1.0, 2.0, 0.5), bp(1.2, 1.8, 0.3)),
            Pattern::V => (bp(1.5, 1.9, 0.0), bp(1.0, 2.0, -0.3)),
            Pattern::VI => (bp(1.2, 2.0, 0.0), bp(0.4, 0.9, -1.0)),
            Pattern::Identical => (bp(1.0, 2.0, 0.3), bp(1.0, 2.0, 0.3)),
        }
    }

    /// Step-like data of pattern `p` with the small Gaussian bump.
    pub fn pattern(p: Pattern) -> Scenario {
        let (l, r) = bands(p);
        let mut s = Scenario::new(l, r, small_bump());
        s.name = format!("pattern_{}", p.label());
        s
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn bp(a: f64, b: f64) -> BandParams {
        BandParams { eta1: a, eta2: b, x0: 0.0 }
    }

    #[test]
    fn patterns() {
        let g = |l: (f64, f64), r: (f64, f64)| BandGeometry::new(&bp(l.0, l.1), &bp(r.0, r.1)).map(|g| g.pattern);
        assert_eq!(g((1.0, 2.0), (1.2, 1.8)).unwrap(), Pattern::IV);
        assert_eq!(g((0.8, 1.5), (1.7, 2.3)).unwrap(), Pattern::I);
        assert_eq!(g((1.0, 2.0), (0.7, 1.5)).unwrap(), Pattern::III);
        assert_eq!(g((1.0, 2.0), (1.5, 2.5)).unwrap(), Pattern::II);
        assert_eq!(g((1.0, 2.0), (0.5, 2.5)).unwrap(), Pattern::V);
        assert_eq!(g((1.0, 2.0), (0.2, 0.5)).unwrap(), Pattern::VI);
        assert!(g((1.0, 2.0), (1.0, 2.5)).is_err());
        assert_eq!(g((1.0, 2.0), (1.0, 2.0)).unwrap(), Pattern::Identical);
    }
}
