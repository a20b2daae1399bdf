//! Jost solutions `Φ^l`, `Φ^r` of the perturbed problem.
//!
//! Columns are integrated in the gauge `Y_k = Φ_k e^{i s_k (x−x₀) p}` with
//! `s₁ = 1`, `s₂ = −1`, which satisfies
//! `Y' = (−iλσ₃ + (iu₀/2λ)[[1,1],[−1,−1]] + i s_k p) Y`.
//! This needs only `u₀` inside the right-hand side, and the admissible column
//! is the dominant one in its direction of integration. The exponential
//! factor is returned separately as a logarithm so products of columns can
//! combine exponents before exponentiating.

use crate::background::{Background, BlochConst};
use crate::error::{Error, Result};
use crate::mat::{self, Mat, Vec2};
use crate::ode::{integrate, OdeOptions};
use crate::scenario::{x_far, InitialData, Scenario};
use crate::surface::Pt;
use num_complex::Complex64 as C64;
use serde::{Deserialize, Serialize};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum JSide {
    Left,
    Right,
}

impl JSide {
    pub fn label(self) -> &'static str {
        match self {
            JSide::Left => "left",
            JSide::Right => "right",
        }
    }
}

/// One Jost column `Φ_k = v e^{log}`.
#[derive(Debug, Clone, Copy)]
pub struct Column {
    pub v: Vec2,
    pub log: C64,
    pub err: f64,
}

impl Column {
    pub fn value(&self) -> Vec2 {
        let e = self.log.exp();
        [self.v[0] * e, self.v[1] * e]
    }

    /// `[1, 1]·Φ_k`.
    pub fn row_sum(&self) -> C64 {
        (self.v[0] + self.v[1]) * self.log.exp()
    }
}

/// `det[c0, c1]` with the exponents combined first.
pub fn wronskian(c0: &Column, c1: &Column) -> C64 {
    (c0.v[0] * c1.v[1] - c0.v[1] * c1.v[0]) * (c0.log + c1.log).exp()
}

/// The normalized matrix `J^s` with per-column validity.
#[derive(Debug, Clone, Copy)]
pub struct JostMatrix {
    pub j: Mat,
    pub side: JSide,
    pub x: f64,
    pub lambda: Pt,
    /// Which columns were integrated (the others are NaN).
    pub cols: [bool; 2],
    pub est_error: f64,
}

#[derive(Debug, Clone)]
pub struct Jost {
    pub data: InitialData,
    pub x_far: f64,
    pub opts: OdeOptions,
    /// Minimum distance from `0` and the branch points for any evaluation.
    pub guard: f64,
    breaks: Vec<f64>,
    start: [f64; 2],
}

const SIGNS: [f64; 2] = [1.0, -1.0];

impl Jost {
    pub fn new(scn: &Scenario) -> Result<Self> {
        let data = InitialData::new(scn)?;
        let xf = x_far(scn, &data);
        let (lo, hi) = data.core();
        let opts = OdeOptions { tol: scn.grids.ode_tol, max_step: scn.grids.max_step, ..OdeOptions::default() };
        Ok(Self {
            breaks: data.breakpoints(),
            start: [(lo - 1.0).max(-xf), (hi + 1.0).min(xf)],
            data,
            x_far: xf,
            opts,
            guard: 1e-3,
        })
    }

    pub fn background(&self, side: JSide) -> &Background {
        match side {
            JSide::Left => &self.data.left,
            JSide::Right => &self.data.right,
        }
    }

    /// Where integration of the `side` columns begins. Beyond this point `u₀`
    /// equals the background to rounding, so the Jost column there is the
    /// background Baker–Akhiezer column.
    pub fn start(&self, side: JSide) -> f64 {
        match side {
            JSide::Left => self.start[0],
            JSide::Right => self.start[1],
        }
    }

    /// Whether column `k` (0 or 1) of `Φ^side` exists at `pt`.
    pub fn admissible(&self, side: JSide, k: usize, pt: Pt) -> bool {
        let z = pt.z;
        if z.im == 0.0 {
            return true;
        }
        let s = &self.background(side).surf;
        let on_band = pt.on_axis() && s.in_band(z.im);
        let upper = z.im > 0.0;
        // left col 1 and right col 2 live in the upper half-plane
        let natural_upper = matches!((side, k), (JSide::Left, 0) | (JSide::Right, 1));
        natural_upper == upper || on_band
    }

    fn check_point(&self, side: JSide, pt: Pt) -> Result<()> {
        let s = &self.background(side).surf;
        let d = s.branch_distance(pt.z).min(pt.z.norm());
        if d < self.guard {
            return Err(Error::Proximity { lambda: pt.z, dist: d });
        }
        Ok(())
    }

    /// Column `k` of `Φ^side` at every `x` in `xs` (any order).
    pub fn column(&self, side: JSide, k: usize, pt: Pt, xs: &[f64]) -> Result<Vec<Column>> {
        self.check_point(side, pt)?;
        if !self.admissible(side, k, pt) {
            return Err(Error::Region(format!("column {} of the {} Jost solution does not exist at {}", k + 1, side.label(), pt.z)));
        }
        let bg = self.background(side);
        let bc = bg.bloch_const(pt)?;
        self.column_with(bg, &bc, side, k, xs)
    }

    fn column_with(&self, bg: &Background, bc: &BlochConst, side: JSide, k: usize, xs: &[f64]) -> Result<Vec<Column>> {
        let l = bc.pt.z;
        let sk = SIGNS[k];
        let p = bc.abel.p;
        let x0 = bg.x0();
        let log_at = |x: f64| -C64::i() * sk * (x - x0) * p;
        let start = self.start(side);
        let dir = if side == JSide::Left { 1.0 } else { -1.0 };
        let bg_col = |x: f64| -> Result<Vec2> { Ok(mat::col(&bg.o_matrix(bc, &bg.state(x, 0.0))?, k)) };
        let mut order: Vec<usize> = (0..xs.len()).collect();
        order.sort_by(|&a, &b| ((xs[a] - xs[b]) * dir).partial_cmp(&0.0).unwrap());
        let mut out = vec![Column { v: [C64::default(); 2], log: C64::default(), err: 0.0 }; xs.len()];
        let mut inner = Vec::new();
        for &i in &order {
            if (xs[i] - start) * dir <= 0.0 {
                out[i] = Column { v: bg_col(xs[i])?, log: log_at(xs[i]), err: 0.0 };
            } else {
                inner.push(i);
            }
        }
        if inner.is_empty() {
            return Ok(out);
        }
        let il = C64::i() * l;
        let c = C64::i() / (2.0 * l);
        let isp = C64::i() * sk * p;
        let data = &self.data;
        let rhs = |x: f64, y: &Vec2| -> Vec2 {
            let g = c * data.u0_fast(x) * (y[0] + y[1]);
            [(-il + isp) * y[0] + g, (il + isp) * y[1] - g]
        };
        let stops: Vec<f64> = inner.iter().map(|&i| xs[i]).collect();
        let (ys, st) = integrate(rhs, start, bg_col(start)?, &stops, &self.breaks, &self.opts).map_err(|e| match e {
            Error::Stiff { x, h, .. } => Error::Stiff { x, h, lambda: l },
            e => e,
        })?;
        let err = 10.0 * st.err_sum;
        for (&i, y) in inner.iter().zip(ys) {
            out[i] = Column { v: y, log: log_at(xs[i]), err };
        }
        Ok(out)
    }

    /// Both columns of `Φ^side` at one `x`; `pt` must admit both.
    pub fn phi(&self, side: JSide, pt: Pt, x: f64) -> Result<(Mat, f64)> {
        let c0 = self.column(side, 0, pt, &[x])?[0];
        let c1 = self.column(side, 1, pt, &[x])?[0];
        Ok((mat::from_cols(&c0.value(), &c1.value()), c0.err.max(c1.err)))
    }

    /// `J^s = O⁻¹ Φ e^{i(x−x₀)pσ₃}` from the integrated columns.
    pub fn j_from_columns(&self, side: JSide, pt: Pt, x: f64) -> Result<JostMatrix> {
        let bg = self.background(side);
        let bc = bg.bloch_const(pt)?;
        let oinv = mat::inv(&bg.o_matrix(&bc, &bg.state(x, 0.0))?);
        let mut j = [[C64::new(f64::NAN, 0.0); 2]; 2];
        let mut cols = [false; 2];
        let mut err: f64 = 0.0;
        for k in 0..2 {
            if !self.admissible(side, k, pt) {
                continue;
            }
            let c = self.column(side, k, pt, &[x])?[0];
            // Y_k is Φ_k without its exponential
            let y = mat::apply(&oinv, &c.v);
            j[0][k] = y[0];
            j[1][k] = y[1];
            cols[k] = true;
            err = err.max(c.err);
        }
        Ok(JostMatrix { j, side, x, lambda: pt, cols, est_error: err })
    }

    /// `J^s` by integrating the normalized equation
    /// `J' + ip[σ₃, J] = U J` with `U = O⁻¹ (i(u₀ − u₀^s)/2λ) [[1,1],[−1,−1]] O`,
    /// starting from `J = I`. Only admissible columns are integrated.
    pub fn solve_j(&self, side: JSide, x: f64, pt: Pt) -> Result<JostMatrix> {
        self.check_point(side, pt)?;
        let bg = self.background(side);
        let bc = bg.bloch_const(pt)?;
        let l = pt.z;
        let p = bc.abel.p;
        let left = side == JSide::Left;
        let start = if left { -self.x_far } else { self.x_far };
        let c = C64::i() / (2.0 * l);
        let data = &self.data;
        let mut j = [[C64::new(f64::NAN, 0.0); 2]; 2];
        let mut cols = [false; 2];
        let mut err: f64 = 0.0;
        for k in 0..2 {
            if !self.admissible(side, k, pt) {
                continue;
            }
            let dk = SIGNS[k];
            let rhs = |y: f64, v: &Vec2| -> Vec2 {
                let e = data.excess(y, left);
                let mut out = [-C64::i() * p * (1.0 - dk) * v[0], -C64::i() * p * (-1.0 - dk) * v[1]];
                if e != 0.0 {
                    let o = bg.o_matrix(&bc, &bg.state(y, 0.0)).expect("checked point");
                    let ov = mat::apply(&o, v);
                    let g = c * e * (ov[0] + ov[1]);
                    let w = mat::apply(&mat::inv(&o), &[g, -g]);
                    out[0] += w[0];
                    out[1] += w[1];
                }
                out
            };
            let mut e0 = [C64::default(); 2];
            e0[k] = C64::new(1.0, 0.0);
            let (ys, st) = integrate(rhs, start, e0, &[x], &self.breaks, &self.opts)?;
            j[0][k] = ys[0][0];
            j[1][k] = ys[0][1];
            cols[k] = true;
            err = err.max(10.0 * st.err_sum);
        }
        Ok(JostMatrix { j, side, x, lambda: pt, cols, est_error: err })
    }

    /// Independent value of `a = det[Φ₁^l, Φ₂^r]` from the scalar equation
    /// `−ψ'' + u₀ψ = λ²ψ`, seeded with the first rows of `Ψ₀^l`, `Ψ₀^r` and
    /// evaluated as a Wronskian at each `x` of `xs`.
    pub fn oracle_wronskian_a(&self, pt: Pt, xs: &[f64]) -> Result<Vec<C64>> {
        let l = pt.z;
        if l.im < 0.0 {
            return Err(Error::Region("the Wronskian oracle needs Im λ ≥ 0".into()));
        }
        self.check_point(JSide::Left, pt)?;
        self.check_point(JSide::Right, pt)?;
        let data = &self.data;
        let rhs = |x: f64, v: &Vec2| -> Vec2 { [v[1], (data.u0_fast(x) - l * l) * v[0]] };
        let seed = |side: JSide, k: usize, x: f64| -> Result<Vec2> {
            let bg = self.background(side);
            let bc = bg.bloch_const(pt)?;
            Ok(mat::col(&bg.psi0(&bc, &bg.state(x, 0.0))?, k))
        };
        let opts = OdeOptions { tol: self.opts.tol * 1e-1, ..self.opts };
        let mut sorted: Vec<f64> = xs.to_vec();
        sorted.sort_by(|a, b| a.partial_cmp(b).unwrap());
        let mut rev = sorted.clone();
        rev.reverse();
        let xl = -self.x_far.min(self.start[0].abs() + 20.0);
        let xr = self.x_far.min(self.start[1].abs() + 20.0);
        let (yl, _) = integrate(rhs, xl, seed(JSide::Left, 0, xl)?, &sorted, &self.breaks, &opts)?;
        let (mut yr, _) = integrate(rhs, xr, seed(JSide::Right, 1, xr)?, &rev, &self.breaks, &opts)?;
        yr.reverse();
        let w: Vec<(f64, C64)> = sorted
            .iter()
            .zip(yl.iter().zip(&yr))
            .map(|(&x, (a, b))| (x, (a[0] * b[1] - a[1] * b[0]) / (2.0 * C64::i() * l)))
            .collect();
        Ok(xs.iter().map(|x| w.iter().find(|(y, _)| y == x).unwrap().1).collect())
    }
}
