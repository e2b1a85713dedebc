use std::ops::{Add, AddAssign, Mul, Neg, Sub};

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::C64;

/// Complex 2x2 matrix stored row-major.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Mat2(pub [[C64; 2]; 2]);

const ZERO: C64 = Complex64::new(0.0, 0.0);
const ONE: C64 = Complex64::new(1.0, 0.0);

impl Mat2 {
    pub const IDENTITY: Mat2 = Mat2([[ONE, ZERO], [ZERO, ONE]]);
    pub const ZERO: Mat2 = Mat2([[ZERO, ZERO], [ZERO, ZERO]]);
    pub const SIGMA3: Mat2 = Mat2([[ONE, ZERO], [ZERO, Complex64::new(-1.0, 0.0)]]);

    pub fn new(a11: C64, a12: C64, a21: C64, a22: C64) -> Self {
        Mat2([[a11, a12], [a21, a22]])
    }

    pub fn diag(d1: C64, d2: C64) -> Self {
        Mat2([[d1, ZERO], [ZERO, d2]])
    }

    pub fn lower(a21: C64) -> Self {
        Mat2([[ONE, ZERO], [a21, ONE]])
    }

    pub fn upper(a12: C64) -> Self {
        Mat2([[ONE, a12], [ZERO, ONE]])
    }

    #[inline]
    pub fn get(&self, i: usize, j: usize) -> C64 {
        self.0[i][j]
    }

    pub fn det(&self) -> C64 {
        self.0[0][0] * self.0[1][1] - self.0[0][1] * self.0[1][0]
    }

    pub fn inverse(&self) -> Result<Mat2> {
        let d = self.det();
        if d.norm() == 0.0 || !d.is_finite() {
            return Err(Error::Domain("singular 2x2 matrix".into()));
        }
        let [[a, b], [c, e]] = self.0;
        Ok(Mat2([[e / d, -b / d], [-c / d, a / d]]))
    }

    pub fn scale(&self, s: C64) -> Mat2 {
        let [[a, b], [c, d]] = self.0;
        Mat2([[a * s, b * s], [c * s, d * s]])
    }

    /// Largest entry modulus.
    pub fn max_abs(&self) -> f64 {
        self.0.iter().flatten().fold(0.0, |m, v| m.max(v.norm()))
    }

    pub fn is_finite(&self) -> bool {
        self.0.iter().flatten().all(|v| v.is_finite())
    }

    pub fn conj_transpose(&self) -> Mat2 {
        let [[a, b], [c, d]] = self.0;
        Mat2([[a.conj(), c.conj()], [b.conj(), d.conj()]])
    }
}

/// `s^{sigma_3} A s^{-sigma_3}`, i.e. `diag(s, 1/s) A diag(1/s, s)`.
pub fn sigma3_conjugate(a: &Mat2, s: C64) -> Result<Mat2> {
    if s.norm() == 0.0 {
        return Err(Error::Domain("sigma3 conjugation by zero".into()));
    }
    if !s.is_finite() {
        return Err(Error::NonFinite("sigma3 conjugation factor".into()));
    }
    let s2 = s * s;
    let [[a11, a12], [a21, a22]] = a.0;
    Ok(Mat2([[a11, a12 * s2], [a21 / s2, a22]]))
}

impl Mul for Mat2 {
    type Output = Mat2;
    fn mul(self, rhs: Mat2) -> Mat2 {
        let a = &self.0;
        let b = &rhs.0;
        Mat2([
            [a[0][0] * b[0][0] + a[0][1] * b[1][0], a[0][0] * b[0][1] + a[0][1] * b[1][1]],
            [a[1][0] * b[0][0] + a[1][1] * b[1][0], a[1][0] * b[0][1] + a[1][1] * b[1][1]],
        ])
    }
}

impl Mul<C64> for Mat2 {
    type Output = Mat2;
    fn mul(self, s: C64) -> Mat2 {
        self.scale(s)
    }
}

impl Mul<[C64; 2]> for Mat2 {
    type Output = [C64; 2];
    fn mul(self, v: [C64; 2]) -> [C64; 2] {
        [
            self.0[0][0] * v[0] + self.0[0][1] * v[1],
            self.0[1][0] * v[0] + self.0[1][1] * v[1],
        ]
    }
}

impl Add for Mat2 {
    type Output = Mat2;
    fn add(self, rhs: Mat2) -> Mat2 {
        let mut out = self;
        out += rhs;
        out
    }
}

impl AddAssign for Mat2 {
    fn add_assign(&mut self, rhs: Mat2) {
        for i in 0..2 {
            for j in 0..2 {
                self.0[i][j] += rhs.0[i][j];
            }
        }
    }
}

impl Sub for Mat2 {
    type Output = Mat2;
    fn sub(self, rhs: Mat2) -> Mat2 {
        self + (-rhs)
    }
}

impl Neg for Mat2 {
    type Output = Mat2;
    fn neg(self) -> Mat2 {
        self.scale(Complex64::new(-1.0, 0.0))
    }
}
