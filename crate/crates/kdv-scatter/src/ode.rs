//! Dormand–Prince 8(5,3) for complex systems, with output at prescribed points.

mod tableau;

use crate::error::{Error, Result};
use num_complex::Complex64 as C64;
use tableau::{A, B, C, E3, E5};

#[derive(Debug, Clone, Copy)]
pub struct OdeOptions {
    /// Relative tolerance on the max-norm of the state.
    pub tol: f64,
    pub max_step: f64,
    /// Step-size floor relative to the span before a stiffness error.
    pub min_rel_step: f64,
}

impl Default for OdeOptions {
    fn default() -> Self {
        Self { tol: 1e-11, max_step: 1.0, min_rel_step: 1e-13 }
    }
}

#[derive(Debug, Clone, Copy, Default)]
pub struct OdeStats {
    pub steps: usize,
    pub rejected: usize,
    /// Sum of accepted local error estimates, relative to the state norm.
    pub err_sum: f64,
}

fn max_norm<const N: usize>(y: &[C64; N]) -> f64 {
    y.iter().map(|z| z.norm()).fold(0.0, f64::max)
}

/// Integrates `y' = f(x, y)` from `x0` through the points of `stops`, which
/// must be monotone in the direction of integration, and returns the state
/// at each stop. `breaks` are points the stepper must not step across.
pub fn integrate<const N: usize>(
    mut f: impl FnMut(f64, &[C64; N]) -> [C64; N],
    x0: f64,
    y0: [C64; N],
    stops: &[f64],
    breaks: &[f64],
    opts: &OdeOptions,
) -> Result<(Vec<[C64; N]>, OdeStats)> {
    let mut out = Vec::with_capacity(stops.len());
    let mut stats = OdeStats::default();
    let Some(&last) = stops.last() else {
        return Ok((out, stats));
    };
    let dir = if last >= x0 { 1.0 } else { -1.0 };
    let span = (last - x0).abs().max(1e-300);
    // all points the stepper must land on, in order
    let mut marks: Vec<(f64, bool)> = stops.iter().map(|&s| (s, true)).collect();
    for &b in breaks {
        if (b - x0) * dir > 0.0 && (last - b) * dir > 0.0 {
            marks.push((b, false));
        }
    }
    marks.sort_by(|a, b| ((a.0 - b.0) * dir).partial_cmp(&0.0).unwrap().then(b.1.cmp(&a.1)));
    let mut x = x0;
    let mut y = y0;
    let mut k1 = f(x, &y);
    let mut h = {
        let yn = max_norm(&y).max(1e-300);
        let dn = max_norm(&k1).max(1e-300);
        (0.01 * yn / dn).min(opts.max_step).min(span)
    };
    for (target, record) in marks {
        if (target - x) * dir < 0.0 {
            return Err(Error::Domain("ode stops must be monotone".into()));
        }
        while (target - x) * dir > 0.0 {
            let rem = (target - x).abs();
            let mut hs = h.min(opts.max_step);
            let land = hs >= rem * (1.0 - 1e-12);
            if land {
                hs = rem;
            }
            let hd = hs * dir;
            let mut k = [[C64::default(); N]; 13];
            k[0] = k1;
            for i in 1..12 {
                let mut yi = y;
                for j in 0..i {
                    let a = A[i][j];
                    if a != 0.0 {
                        for q in 0..N {
                            yi[q] += k[j][q] * (a * hd);
                        }
                    }
                }
                k[i] = f(x + C[i] * hd, &yi);
            }
            let mut yn = y;
            for j in 0..12 {
                if B[j] != 0.0 {
                    for q in 0..N {
                        yn[q] += k[j][q] * (B[j] * hd);
                    }
                }
            }
            let xn = if land { target } else { x + hd };
            k[12] = f(xn, &yn);
            let scale = opts.tol * max_norm(&y).max(max_norm(&yn)).max(1e-300);
            let (mut n5, mut n3) = (0.0, 0.0);
            for q in 0..N {
                let (mut e5, mut e3) = (C64::default(), C64::default());
                for j in 0..13 {
                    e5 += k[j][q] * E5[j];
                    e3 += k[j][q] * E3[j];
                }
                n5 += (e5 / scale).norm_sqr();
                n3 += (e3 / scale).norm_sqr();
            }
            let den = n5 + 0.01 * n3;
            let err = if den == 0.0 { 0.0 } else { hs * n5 / (den * N as f64).sqrt() };
            if !err.is_finite() {
                return Err(Error::Stiff { x, h: hs, lambda: C64::default() });
            }
            if err <= 1.0 {
                stats.steps += 1;
                stats.err_sum += err * opts.tol;
                x = xn;
                y = yn;
                k1 = k[12];
                let fac = if err == 0.0 { 5.0 } else { (0.9 * err.powf(-0.125)).clamp(0.2, 5.0) };
                // a step shortened to land on a mark says nothing about the next one
                if !land || hs >= h {
                    h = hs * fac;
                }
            } else {
                stats.rejected += 1;
                h = hs * (0.9 * err.powf(-0.125)).clamp(0.1, 0.9);
                if h < opts.min_rel_step * span.max(1.0) {
                    return Err(Error::Stiff { x, h, lambda: C64::default() });
                }
            }
        }
        if record {
            out.push(y);
        }
    }
    Ok((out, stats))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn harmonic_oscillator() {
        // y'' = −ω² y as a complex first-order system
        let w = 7.0;
        let f = |_x: f64, y: &[C64; 2]| [y[1], -w * w * y[0]];
        let stops = [1.0, 2.5, 10.0];
        let (ys, st) = integrate(f, 0.0, [C64::new(1.0, 0.0), C64::new(0.0, 0.0)], &stops, &[5.0], &OdeOptions::default()).unwrap();
        for (x, y) in stops.iter().zip(&ys) {
            assert!((y[0].re - (w * x).cos()).abs() < 1e-8, "{x}: {}", y[0]);
        }
        assert!(st.steps > 10 && st.err_sum < 1e-7);
    }

    #[test]
    fn backwards_exponential() {
        let l = C64::new(0.3, -2.0);
        let f = |_x: f64, y: &[C64; 1]| [l * y[0]];
        let (ys, _) = integrate(f, 3.0, [C64::new(1.0, 0.0)], &[0.0], &[], &OdeOptions::default()).unwrap();
        assert!((ys[0][0] - (-3.0 * l).exp()).norm() < 1e-9);
    }
}
