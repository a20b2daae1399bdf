//! Complete elliptic integrals, Jacobi elliptic functions and the theta function θ₃.
//!
//! The modulus convention follows the background construction: `K(m)` means
//! `∫₀^{π/2} dθ / √(1 − m² sin²θ)`, i.e. the argument is the modulus `m` and
//! it is squared inside the integrand.

use crate::error::{Error, Result};
use num_complex::Complex64 as C64;
use serde::{Deserialize, Serialize};
use std::f64::consts::PI;

/// Which integral enters the theta period ratio.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, Default)]
#[serde(rename_all = "snake_case")]
pub enum TauConvention {
    /// `Kc = K(√(1 − m²))`, the complementary modulus. Reproduces the dn² wave.
    #[default]
    Complementary,
    /// `Kc = K(1 − m)` read literally.
    Literal,
}

fn agm_sequence(m: f64) -> (f64, Vec<f64>) {
    let mut a = 1.0_f64;
    let mut b = (1.0 - m * m).sqrt();
    let mut cs = vec![m];
    for _ in 0..64 {
        let c = 0.5 * (a - b);
        let an = 0.5 * (a + b);
        b = (a * b).sqrt();
        a = an;
        cs.push(c);
        if c.abs() <= 1e-17 * a {
            break;
        }
    }
    (a, cs)
}

/// Complete elliptic integral of the first kind.
pub fn ellip_k(m: f64) -> Result<f64> {
    if !(0.0..1.0).contains(&m) {
        return Err(Error::Domain(format!("ellip_k needs 0 <= m < 1, got {m}")));
    }
    let (a, _) = agm_sequence(m);
    Ok(PI / (2.0 * a))
}

/// Complete elliptic integral of the second kind.
pub fn ellip_e(m: f64) -> Result<f64> {
    if !(0.0..=1.0).contains(&m) {
        return Err(Error::Domain(format!("ellip_e needs 0 <= m <= 1, got {m}")));
    }
    if m == 1.0 {
        return Ok(1.0);
    }
    let (a, cs) = agm_sequence(m);
    let mut s = 0.0;
    let mut w = 0.5;
    for c in &cs {
        s += w * c * c;
        w *= 2.0;
    }
    Ok(PI / (2.0 * a) * (1.0 - s))
}

/// K, E and the complementary pair for one modulus.
#[derive(Debug, Clone, Copy, Serialize, Deserialize)]
pub struct EllipticModulus {
    pub m: f64,
    #[serde(rename = "K")]
    pub k: f64,
    #[serde(rename = "E")]
    pub e: f64,
    #[serde(rename = "Kc")]
    pub kc: f64,
    #[serde(rename = "Ec")]
    pub ec: f64,
}

impl EllipticModulus {
    pub fn new(m: f64, conv: TauConvention) -> Result<Self> {
        let mc = match conv {
            TauConvention::Complementary => (1.0 - m * m).sqrt(),
            TauConvention::Literal => 1.0 - m,
        };
        if m <= 0.0 {
            return Err(Error::Domain(format!("modulus must be positive, got {m}")));
        }
        Ok(Self {
            m,
            k: ellip_k(m)?,
            e: ellip_e(m)?,
            kc: ellip_k(mc)?,
            ec: ellip_e(mc)?,
        })
    }
}

/// Jacobi `(sn, cn, dn)(u | m)` by descending Landen transformation.
pub fn jacobi(u: f64, m: f64) -> Result<(f64, f64, f64)> {
    Ok(Landen::new(m)?.eval(u))
}

/// Precomputed descending Landen sequence for repeated `(sn, cn, dn)` calls.
#[derive(Debug, Clone, Copy)]
pub struct Landen {
    a: [f64; 32],
    c: [f64; 32],
    n: usize,
    period: f64,
}

impl Landen {
    pub fn new(m: f64) -> Result<Self> {
        if !(0.0..1.0).contains(&m) {
            return Err(Error::Domain(format!("jacobi needs 0 <= m < 1, got {m}")));
        }
        let mut a = [0.0_f64; 32];
        let mut c = [0.0_f64; 32];
        a[0] = 1.0;
        c[0] = m;
        let mut b = (1.0 - m * m).sqrt();
        let mut n = 0;
        while n < 30 && c[n].abs() > 1e-16 {
            a[n + 1] = 0.5 * (a[n] + b);
            c[n + 1] = 0.5 * (a[n] - b);
            b = (a[n] * b).sqrt();
            n += 1;
        }
        Ok(Self { a, c, n, period: 4.0 * ellip_k(m)? })
    }

    pub fn eval(&self, u: f64) -> (f64, f64, f64) {
        // reduce modulo the real period 4K
        let u = u - self.period * (u / self.period).round();
        if self.n == 0 {
            return (u.sin(), u.cos(), 1.0);
        }
        let n = self.n;
        let mut phi = (1u64 << n) as f64 * self.a[n] * u;
        for j in (1..=n).rev() {
            phi = 0.5 * (phi + (self.c[j] * phi.sin() / self.a[j]).asin());
        }
        let (sn, cn) = phi.sin_cos();
        // dn² = (1 − m²) + m² cn², free of the 0/0 at cn = 0
        let m = self.c[0];
        (sn, cn, ((1.0 - m) * (1.0 + m) + m * m * cn * cn).sqrt())
    }
}

/// Truncation order for θ₃ with nome parameter `tau`.
pub fn theta_terms(tau: C64) -> usize {
    let n = (40.0 / (PI * tau.im)).sqrt().ceil() as usize + 4;
    n.max(8)
}

/// θ₃ and its first three z-derivatives at fixed `tau`.
#[derive(Debug, Clone, Copy)]
pub struct Theta3 {
    tau: C64,
    n: usize,
}

impl Theta3 {
    pub fn new(tau: C64) -> Result<Self> {
        if !(tau.im > 0.0) {
            return Err(Error::Domain(format!("theta needs Im tau > 0, got {tau}")));
        }
        Ok(Self { tau, n: theta_terms(tau) })
    }

    pub fn tau(&self) -> C64 {
        self.tau
    }

    pub fn terms(&self) -> usize {
        self.n
    }

    pub fn eval(&self, z: C64) -> C64 {
        self.derivs(z)[0]
    }

    /// `[θ, θ', θ'', θ''']` at `z`.
    pub fn derivs(&self, z: C64) -> [C64; 4] {
        let i = C64::i();
        let w = (2.0 * PI * i * z).exp();
        let wi = 1.0 / w;
        let mut out = [C64::new(1.0, 0.0), C64::default(), C64::default(), C64::default()];
        let mut wp = C64::new(1.0, 0.0);
        let mut wm = C64::new(1.0, 0.0);
        for n in 1..=self.n {
            wp *= w;
            wm *= wi;
            let nf = n as f64;
            let q = (PI * i * nf * nf * self.tau).exp();
            let tp = q * wp;
            let tm = q * wm;
            let k = 2.0 * PI * i * nf;
            let k2 = k * k;
            out[0] += tp + tm;
            out[1] += k * (tp - tm);
            out[2] += k2 * (tp + tm);
            out[3] += k2 * k * (tp - tm);
        }
        out
    }
}

/// θ₃(z; τ) with the default truncation.
pub fn theta3(z: C64, tau: C64) -> Result<C64> {
    Ok(Theta3::new(tau)?.eval(z))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn k_e_at_zero() {
        assert!((ellip_k(0.0).unwrap() - PI / 2.0).abs() < 1e-15);
        assert!((ellip_e(0.0).unwrap() - PI / 2.0).abs() < 1e-15);
        assert_eq!(ellip_e(1.0).unwrap(), 1.0);
        assert!(ellip_k(1.0).is_err());
        assert!(ellip_e(1.5).is_err());
    }

    #[test]
    fn k_monotone_near_one() {
        assert!(ellip_k(0.999999).unwrap() > ellip_k(0.9).unwrap());
    }

    #[test]
    fn dn_quarter_period() {
        let m = 0.6;
        let k = ellip_k(m).unwrap();
        let (_, _, dn) = jacobi(k, m).unwrap();
        assert!((dn - (1.0 - m * m).sqrt()).abs() < 1e-14);
        let (_, _, d0) = jacobi(0.0, m).unwrap();
        assert_eq!(d0, 1.0);
        let (_, _, a) = jacobi(0.3, m).unwrap();
        let (_, _, b) = jacobi(0.3 + 2.0 * k, m).unwrap();
        assert!((a - b).abs() < 1e-14);
    }

    #[test]
    fn theta_basic() {
        let tau = C64::new(0.0, 0.8);
        let z = C64::new(0.2, 0.1);
        let th = Theta3::new(tau).unwrap();
        assert!((th.eval(z + 1.0) - th.eval(z)).norm() < 1e-14);
        assert!((th.eval(-z) - th.eval(z)).norm() < 1e-14);
        assert!(Theta3::new(C64::new(0.3, 0.0)).is_err());
    }
}
