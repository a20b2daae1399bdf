//! Gauss–Legendre panels, endpoint maps for inverse-square-root ends, and
//! barycentric Chebyshev interpolation.

use crate::error::{Error, Result};
use gauss_quad::legendre::GaussLegendre;
use num_complex::Complex64 as C64;
use std::collections::HashMap;
use std::f64::consts::PI;
use std::num::NonZeroUsize;
use std::sync::{Arc, Mutex, OnceLock};

type Rule = Arc<Vec<(f64, f64)>>;

/// Nodes and weights on [0, 1].
pub fn gl_rule(n: usize) -> Rule {
    static RULES: OnceLock<Mutex<HashMap<usize, Rule>>> = OnceLock::new();
    let map = RULES.get_or_init(|| Mutex::new(HashMap::new()));
    let mut g = map.lock().expect("rule cache poisoned");
    g.entry(n)
        .or_insert_with(|| {
            let q = GaussLegendre::new(NonZeroUsize::new(n.max(1)).unwrap());
            let mut v: Vec<(f64, f64)> = q
                .as_node_weight_pairs()
                .iter()
                .map(|&(x, w)| (0.5 * (x + 1.0), 0.5 * w))
                .collect();
            v.sort_by(|a, b| a.0.partial_cmp(&b.0).unwrap());
            Arc::new(v)
        })
        .clone()
}

/// Variable change on [0, 1] removing `|t − end|^{-1/2}` singularities.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum EndMap {
    None,
    Start,
    End,
    Both,
}

impl EndMap {
    pub fn from_flags(start: bool, end: bool) -> Self {
        match (start, end) {
            (false, false) => EndMap::None,
            (true, false) => EndMap::Start,
            (false, true) => EndMap::End,
            (true, true) => EndMap::Both,
        }
    }

    /// `(t(s), dt/ds)`.
    #[inline]
    pub fn apply(self, s: f64) -> (f64, f64) {
        let (t, _, w) = self.apply3(s);
        (t, w)
    }

    /// `(t, 1 − t, dt/ds)` with `1 − t` free of cancellation.
    #[inline]
    pub fn apply3(self, s: f64) -> (f64, f64, f64) {
        match self {
            EndMap::None => (s, 1.0 - s, 1.0),
            EndMap::Start => (s * s, (1.0 - s) * (1.0 + s), 2.0 * s),
            EndMap::End => (s * (2.0 - s), (1.0 - s) * (1.0 - s), 2.0 * (1.0 - s)),
            EndMap::Both => {
                let (sn, cs) = (0.5 * PI * s).sin_cos();
                (sn * sn, cs * cs, 0.5 * PI * (PI * s).sin())
            }
        }
    }
}

/// Fixed-order rule for `∫_a^b f(s) ds` with vector values.
pub fn gl_fixed<const K: usize>(n: usize, a: f64, b: f64, mut f: impl FnMut(f64) -> [C64; K]) -> [C64; K] {
    let rule = gl_rule(n);
    let h = b - a;
    let mut acc = [C64::default(); K];
    for &(x, w) in rule.iter() {
        let v = f(a + h * x);
        for k in 0..K {
            acc[k] += v[k] * (w * h);
        }
    }
    acc
}

fn vnorm<const K: usize>(v: &[C64; K]) -> f64 {
    v.iter().map(|z| z.norm()).fold(0.0, f64::max)
}

/// Adaptive bisection with 16-point panels; returns value and error estimate.
/// `tol` is relative to `max(1, |first estimate|)`.
pub fn adaptive<const K: usize>(
    a: f64,
    b: f64,
    tol: f64,
    mut f: impl FnMut(f64) -> [C64; K],
) -> Result<([C64; K], f64)> {
    const N: usize = 16;
    let mut total = [C64::default(); K];
    let mut err = 0.0;
    let first = gl_fixed(N, a, b, &mut f);
    let tol = tol * vnorm(&first).max(1.0);
    let mut stack = vec![(a, b, first, 0u32)];
    let width = (b - a).abs();
    while let Some((lo, hi, whole, depth)) = stack.pop() {
        let mid = 0.5 * (lo + hi);
        let l = gl_fixed(N, lo, mid, &mut f);
        let r = gl_fixed(N, mid, hi, &mut f);
        let mut diff = [C64::default(); K];
        for k in 0..K {
            diff[k] = l[k] + r[k] - whole[k];
        }
        let e = vnorm(&diff);
        let scale = vnorm(&whole);
        let local_tol = (tol * ((hi - lo).abs() / width).max(1e-3)).max(1e-15 * scale);
        // panels this narrow only see rounding noise of an integrable end
        let tiny = (hi - lo).abs() < 1e-9 * width;
        if e <= local_tol || depth >= 40 || tiny {
            if depth >= 40 && e > local_tol && !tiny {
                return Err(Error::Quadrature(format!(
                    "panel [{lo}, {hi}] stuck at error {e:e}"
                )));
            }
            for k in 0..K {
                total[k] += l[k] + r[k];
            }
            err += e;
        } else {
            stack.push((lo, mid, l, depth + 1));
            stack.push((mid, hi, r, depth + 1));
        }
    }
    Ok((total, err))
}

/// Barycentric interpolant on Chebyshev points of the second kind over [a, b].
#[derive(Debug, Clone)]
pub struct Cheb {
    a: f64,
    b: f64,
    xs: Vec<f64>,
    vals: Vec<C64>,
}

impl Cheb {
    /// The `n + 1` interpolation nodes on [a, b], ascending.
    pub fn nodes(n: usize, a: f64, b: f64) -> Vec<f64> {
        (0..=n)
            .map(|j| {
                let c = -(PI * j as f64 / n as f64).cos();
                a + 0.5 * (b - a) * (c + 1.0)
            })
            .collect()
    }

    pub fn new(a: f64, b: f64, vals: Vec<C64>) -> Self {
        let n = vals.len() - 1;
        Self { a, b, xs: Self::nodes(n, a, b), vals }
    }

    pub fn degree(&self) -> usize {
        self.vals.len() - 1
    }

    pub fn values(&self) -> &[C64] {
        &self.vals
    }

    pub fn interval(&self) -> (f64, f64) {
        (self.a, self.b)
    }

    pub fn eval(&self, x: f64) -> C64 {
        let n = self.degree();
        let mut num = C64::default();
        let mut den = 0.0;
        for (j, (&xj, &vj)) in self.xs.iter().zip(&self.vals).enumerate() {
            let d = x - xj;
            if d == 0.0 {
                return vj;
            }
            let mut w = if j % 2 == 0 { 1.0 } else { -1.0 };
            if j == 0 || j == n {
                w *= 0.5;
            }
            let t = w / d;
            num += vj * t;
            den += t;
        }
        num / den
    }

    /// Max |Chebyshev coefficient| over the top quarter of the spectrum,
    /// relative to the largest coefficient: a cheap resolution indicator.
    pub fn tail_ratio(&self) -> f64 {
        let n = self.degree();
        let mut coef = vec![0.0f64; n + 1];
        for (k, ck) in coef.iter_mut().enumerate() {
            let mut s = C64::default();
            for j in 0..=n {
                let w = if j == 0 || j == n { 0.5 } else { 1.0 };
                s += self.vals[j] * w * (PI * (k * j) as f64 / n as f64).cos();
            }
            *ck = s.norm() * 2.0 / n as f64;
        }
        let big = coef.iter().cloned().fold(0.0, f64::max).max(1e-300);
        let tail = coef[(3 * n) / 4..].iter().cloned().fold(0.0, f64::max);
        tail / big
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn inverse_sqrt_ends() {
        // ∫_0^1 dt / sqrt(t(1-t)) = π
        let v = gl_fixed::<1>(30, 0.0, 1.0, |s| {
            let (t, w) = EndMap::Both.apply(s);
            [C64::new(w / (t * (1.0 - t)).sqrt(), 0.0)]
        });
        assert!((v[0].re - PI).abs() < 1e-12);
        let v = gl_fixed::<1>(30, 0.0, 1.0, |s| {
            let (t, w) = EndMap::Start.apply(s);
            [C64::new(w / t.sqrt(), 0.0)]
        });
        assert!((v[0].re - 2.0).abs() < 1e-12);
    }

    #[test]
    fn adaptive_peak() {
        let (v, _) = adaptive::<1>(-1.0, 1.0, 1e-12, |x| [C64::new(1.0 / (x * x + 1e-4), 0.0)]).unwrap();
        let exact = 2.0 * (1.0f64 / 1e-2).atan() / 1e-2;
        assert!((v[0].re - exact).abs() < 1e-9 * exact);
    }

    #[test]
    fn cheb_interp() {
        let n = 24;
        let xs = Cheb::nodes(n, 0.0, 2.0);
        let vals = xs.iter().map(|&x| C64::new(x.exp(), x.sin())).collect();
        let c = Cheb::new(0.0, 2.0, vals);
        let x = 1.2345;
        assert!((c.eval(x) - C64::new(x.exp(), x.sin())).norm() < 1e-13);
        assert!(c.tail_ratio() < 1e-12);
    }
}

/// Barycentric interpolant on the `n` Chebyshev points of the first kind over
/// [a, b]. No node sits on an end, so it can tabulate functions that may not
/// be sampled there.
#[derive(Debug, Clone)]
pub struct Cheb1 {
    a: f64,
    b: f64,
    xs: Vec<f64>,
    ws: Vec<f64>,
    vals: Vec<C64>,
}

impl Cheb1 {
    fn angle(j: usize, n: usize) -> f64 {
        PI * (n - 1 - j) as f64 / n as f64 + 0.5 * PI / n as f64
    }

    /// The `n` nodes on [a, b], ascending. The nodes for `n` are every third
    /// node for `3n`.
    pub fn nodes(n: usize, a: f64, b: f64) -> Vec<f64> {
        (0..n).map(|j| a + 0.5 * (b - a) * (1.0 + Self::angle(j, n).cos())).collect()
    }

    pub fn new(a: f64, b: f64, vals: Vec<C64>) -> Self {
        let n = vals.len();
        let ws = (0..n)
            .map(|j| {
                let th = Self::angle(j, n);
                let s = if (n - 1 - j) % 2 == 0 { 1.0 } else { -1.0 };
                s * th.sin()
            })
            .collect();
        Self { a, b, xs: Self::nodes(n, a, b), ws, vals }
    }

    pub fn len(&self) -> usize {
        self.vals.len()
    }

    pub fn is_empty(&self) -> bool {
        self.vals.is_empty()
    }

    pub fn values(&self) -> &[C64] {
        &self.vals
    }

    pub fn interval(&self) -> (f64, f64) {
        (self.a, self.b)
    }

    pub fn eval(&self, x: f64) -> C64 {
        let mut num = C64::default();
        let mut den = 0.0;
        for ((&xj, &wj), &vj) in self.xs.iter().zip(&self.ws).zip(&self.vals) {
            let d = x - xj;
            if d == 0.0 {
                return vj;
            }
            let t = wj / d;
            num += vj * t;
            den += t;
        }
        num / den
    }

    /// Chebyshev coefficients by the first-kind cosine sum.
    pub fn coefficients(&self) -> Vec<C64> {
        let n = self.len();
        (0..n)
            .map(|k| {
                let mut s = C64::default();
                for j in 0..n {
                    s += self.vals[j] * (k as f64 * Self::angle(j, n)).cos();
                }
                s * if k == 0 { 1.0 / n as f64 } else { 2.0 / n as f64 }
            })
            .collect()
    }

    /// Largest coefficient magnitude over the top quarter of the spectrum.
    pub fn tail(&self) -> f64 {
        let c = self.coefficients();
        let n = c.len();
        c[(3 * n) / 4..].iter().map(|z| z.norm()).fold(0.0, f64::max)
    }
}

/// Panels of [`Cheb1`] interpolants covering `[a, b]` without gaps.
#[derive(Debug, Clone)]
pub struct Piecewise {
    edges: Vec<f64>,
    panels: Vec<Cheb1>,
}

/// Limits for [`Piecewise::build`].
#[derive(Debug, Clone, Copy)]
pub struct Refine {
    pub degree: usize,
    /// Largest allowed [`Cheb1::tail`] on any panel.
    pub tail: f64,
    pub min_width: f64,
    pub max_panels: usize,
    /// Panels touching the outer ends are sampled on an interval shrunk by
    /// this much and extrapolated over the rest.
    pub end_gap: f64,
}

impl Refine {
    /// The interval actually sampled for the panel `[a, b]`.
    fn fit_span(&self, a: f64, b: f64, ends: (f64, f64)) -> (f64, f64) {
        let lo = if a <= ends.0 { a + self.end_gap } else { a };
        let hi = if b >= ends.1 { b - self.end_gap } else { b };
        (lo, hi)
    }
}

impl Piecewise {
    pub fn constant(a: f64, b: f64, v: C64) -> Self {
        Self { edges: vec![a, b], panels: vec![Cheb1::new(a, b, vec![v; 4])] }
    }

    /// Starts from the panels between consecutive `edges` and bisects every
    /// panel whose tail is too large. `f` evaluates a batch of points. `post`
    /// maps all raw samples, in ascending order, to the interpolated values.
    pub fn build(
        edges: &[f64],
        lim: Refine,
        what: &str,
        f: &dyn Fn(&[f64]) -> Result<Vec<C64>>,
        post: &dyn Fn(&[C64]) -> Result<Vec<C64>>,
    ) -> Result<Self> {
        let n = lim.degree.max(8);
        let ends = (edges[0], edges[edges.len() - 1]);
        let sample = |spans: &[(f64, f64)]| -> Result<Vec<Vec<C64>>> {
            let xs: Vec<f64> = spans
                .iter()
                .flat_map(|&(a, b)| {
                    let (lo, hi) = lim.fit_span(a, b, ends);
                    Cheb1::nodes(n, lo, hi)
                })
                .collect();
            Ok(f(&xs)?.chunks(n).map(|c| c.to_vec()).collect())
        };
        let spans: Vec<(f64, f64)> = edges.windows(2).map(|w| (w[0], w[1])).collect();
        let raw = sample(&spans)?;
        let mut panels: Vec<(f64, f64, Vec<C64>)> = spans.into_iter().zip(raw).map(|((a, b), v)| (a, b, v)).collect();
        loop {
            let flat: Vec<C64> = panels.iter().flat_map(|p| p.2.iter().cloned()).collect();
            let vals = post(&flat)?;
            let fitted: Vec<Cheb1> = panels
                .iter()
                .zip(vals.chunks(n))
                .map(|(p, v)| {
                    let (lo, hi) = lim.fit_span(p.0, p.1, ends);
                    Cheb1::new(lo, hi, v.to_vec())
                })
                .collect();
            let bad: Vec<usize> = (0..fitted.len()).filter(|&i| !(fitted[i].tail() < lim.tail)).collect();
            if bad.is_empty() {
                let mut e: Vec<f64> = panels.iter().map(|p| p.0).collect();
                e.push(ends.1);
                return Ok(Self { edges: e, panels: fitted });
            }
            let worst = bad.iter().cloned().max_by(|&i, &j| fitted[i].tail().total_cmp(&fitted[j].tail())).unwrap();
            let msg = format!(
                "{what}: trailing coefficient {:e} on [{}, {}] with {} panels",
                fitted[worst].tail(),
                panels[worst].0,
                panels[worst].1,
                panels.len()
            );
            let too_narrow = |i: usize| {
                let w = panels[i].1 - panels[i].0;
                w < 2.0 * lim.min_width || w < 8.0 * lim.end_gap
            };
            if panels.len() + bad.len() > lim.max_panels || bad.iter().any(|&i| too_narrow(i)) {
                return Err(Error::Resolution(msg));
            }
            let halves: Vec<(f64, f64)> = bad
                .iter()
                .flat_map(|&i| {
                    let (a, b) = (panels[i].0, panels[i].1);
                    let m = 0.5 * (a + b);
                    [(a, m), (m, b)]
                })
                .collect();
            let mut raw = sample(&halves)?.into_iter();
            let mut next = Vec::with_capacity(panels.len() + bad.len());
            for (i, p) in panels.into_iter().enumerate() {
                if bad.contains(&i) {
                    let (l, r) = (raw.next().unwrap(), raw.next().unwrap());
                    let m = 0.5 * (p.0 + p.1);
                    next.push((p.0, m, l));
                    next.push((m, p.1, r));
                } else {
                    next.push(p);
                }
            }
            panels = next;
        }
    }

    pub fn panels(&self) -> &[Cheb1] {
        &self.panels
    }

    pub fn edges(&self) -> Vec<f64> {
        self.edges.clone()
    }

    pub fn tail(&self) -> f64 {
        self.panels.iter().map(|p| p.tail()).fold(0.0, f64::max)
    }

    /// Extrapolates from the end panels outside the covered interval.
    pub fn eval(&self, x: f64) -> C64 {
        let i = self.edges[1..].partition_point(|&e| e < x).min(self.panels.len() - 1);
        self.panels[i].eval(x)
    }
}
