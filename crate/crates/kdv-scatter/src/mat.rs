//! 2×2 complex matrices as nested arrays.

use num_complex::Complex64 as C64;

pub type Mat = [[C64; 2]; 2];
pub type Vec2 = [C64; 2];

const Z: C64 = C64 { re: 0.0, im: 0.0 };
const O: C64 = C64 { re: 1.0, im: 0.0 };

pub const EYE: Mat = [[O, Z], [Z, O]];
pub const SIGMA1: Mat = [[Z, O], [O, Z]];
pub const SIGMA3: Mat = [[O, Z], [Z, C64 { re: -1.0, im: 0.0 }]];

#[inline]
pub fn mul(a: &Mat, b: &Mat) -> Mat {
    [
        [a[0][0] * b[0][0] + a[0][1] * b[1][0], a[0][0] * b[0][1] + a[0][1] * b[1][1]],
        [a[1][0] * b[0][0] + a[1][1] * b[1][0], a[1][0] * b[0][1] + a[1][1] * b[1][1]],
    ]
}

#[inline]
pub fn apply(a: &Mat, v: &Vec2) -> Vec2 {
    [a[0][0] * v[0] + a[0][1] * v[1], a[1][0] * v[0] + a[1][1] * v[1]]
}

/// Row vector times matrix.
#[inline]
pub fn row_mul(v: &Vec2, a: &Mat) -> Vec2 {
    [v[0] * a[0][0] + v[1] * a[1][0], v[0] * a[0][1] + v[1] * a[1][1]]
}

#[inline]
pub fn det(a: &Mat) -> C64 {
    a[0][0] * a[1][1] - a[0][1] * a[1][0]
}

pub fn inv(a: &Mat) -> Mat {
    let d = det(a);
    [[a[1][1] / d, -a[0][1] / d], [-a[1][0] / d, a[0][0] / d]]
}

pub fn sub(a: &Mat, b: &Mat) -> Mat {
    [[a[0][0] - b[0][0], a[0][1] - b[0][1]], [a[1][0] - b[1][0], a[1][1] - b[1][1]]]
}

pub fn add(a: &Mat, b: &Mat) -> Mat {
    [[a[0][0] + b[0][0], a[0][1] + b[0][1]], [a[1][0] + b[1][0], a[1][1] + b[1][1]]]
}

pub fn scale(a: &Mat, s: C64) -> Mat {
    [[a[0][0] * s, a[0][1] * s], [a[1][0] * s, a[1][1] * s]]
}

pub fn diag(d0: C64, d1: C64) -> Mat {
    [[d0, Z], [Z, d1]]
}

pub fn conj(a: &Mat) -> Mat {
    [[a[0][0].conj(), a[0][1].conj()], [a[1][0].conj(), a[1][1].conj()]]
}

/// Columns `[c0, c1]` as a matrix.
pub fn from_cols(c0: &Vec2, c1: &Vec2) -> Mat {
    [[c0[0], c1[0]], [c0[1], c1[1]]]
}

pub fn col(a: &Mat, k: usize) -> Vec2 {
    [a[0][k], a[1][k]]
}

/// `σ₁ a σ₁`.
pub fn flip(a: &Mat) -> Mat {
    [[a[1][1], a[1][0]], [a[0][1], a[0][0]]]
}

/// Largest entry modulus.
pub fn norm(a: &Mat) -> f64 {
    a.iter().flatten().map(|z| z.norm()).fold(0.0, f64::max)
}

pub fn dist(a: &Mat, b: &Mat) -> f64 {
    norm(&sub(a, b))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn inverse_and_flip() {
        let a = [[C64::new(1.0, 2.0), C64::new(0.5, 0.0)], [C64::new(-1.0, 1.0), C64::new(3.0, -1.0)]];
        assert!(dist(&mul(&a, &inv(&a)), &EYE) < 1e-15);
        assert!(dist(&flip(&a), &mul(&SIGMA1, &mul(&a, &SIGMA1))) < 1e-15);
        assert!((det(&SIGMA3) + 1.0).norm() < 1e-15);
    }
}
