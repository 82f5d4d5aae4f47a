use super::C64;
use std::ops::{Add, Mul, Neg, Sub};

/// Field operations shared by the real and complex 2×2 products.
pub trait Scalar:
    Copy + Add<Output = Self> + Sub<Output = Self> + Mul<Output = Self> + Neg<Output = Self>
{
    fn zero() -> Self;
    fn one() -> Self;
    fn from_f64(v: f64) -> Self;
    fn abs2(self) -> f64;
    fn scale(self, s: f64) -> Self;
    fn to_c64(self) -> C64;
    fn is_finite_val(self) -> bool;
}

impl Scalar for f64 {
    fn zero() -> Self {
        0.0
    }
    fn one() -> Self {
        1.0
    }
    fn from_f64(v: f64) -> Self {
        v
    }
    fn abs2(self) -> f64 {
        self * self
    }
    fn scale(self, s: f64) -> Self {
        self * s
    }
    fn to_c64(self) -> C64 {
        C64::new(self, 0.0)
    }
    fn is_finite_val(self) -> bool {
        self.is_finite()
    }
}

impl Scalar for C64 {
    fn zero() -> Self {
        C64::new(0.0, 0.0)
    }
    fn one() -> Self {
        C64::new(1.0, 0.0)
    }
    fn from_f64(v: f64) -> Self {
        C64::new(v, 0.0)
    }
    fn abs2(self) -> f64 {
        self.norm_sqr()
    }
    fn scale(self, s: f64) -> Self {
        self * s
    }
    fn to_c64(self) -> C64 {
        self
    }
    fn is_finite_val(self) -> bool {
        self.re.is_finite() && self.im.is_finite()
    }
}

/// Row-major 2×2 matrix.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Mat2<T>(pub [[T; 2]; 2]);

impl<T: Scalar> Mat2<T> {
    pub fn new(a: T, b: T, c: T, d: T) -> Self {
        Mat2([[a, b], [c, d]])
    }

    pub fn identity() -> Self {
        Self::new(T::one(), T::zero(), T::zero(), T::one())
    }

    pub fn mul(&self, o: &Self) -> Self {
        let a = &self.0;
        let b = &o.0;
        Mat2([
            [a[0][0] * b[0][0] + a[0][1] * b[1][0], a[0][0] * b[0][1] + a[0][1] * b[1][1]],
            [a[1][0] * b[0][0] + a[1][1] * b[1][0], a[1][0] * b[0][1] + a[1][1] * b[1][1]],
        ])
    }

    /// `[[t, -1], [1, 0]] * self`, the one-step update of a Schrödinger cocycle.
    #[inline]
    pub fn lmul_transfer(&self, t: T) -> Self {
        let m = &self.0;
        Mat2([
            [t * m[0][0] - m[1][0], t * m[0][1] - m[1][1]],
            [m[0][0], m[0][1]],
        ])
    }

    pub fn det(&self) -> T {
        self.0[0][0] * self.0[1][1] - self.0[0][1] * self.0[1][0]
    }

    pub fn trace(&self) -> T {
        self.0[0][0] + self.0[1][1]
    }

    pub fn scale(&self, s: f64) -> Self {
        let m = &self.0;
        Mat2([[m[0][0].scale(s), m[0][1].scale(s)], [m[1][0].scale(s), m[1][1].scale(s)]])
    }

    pub fn max_col_norm(&self) -> f64 {
        let m = &self.0;
        let c0 = m[0][0].abs2() + m[1][0].abs2();
        let c1 = m[0][1].abs2() + m[1][1].abs2();
        c0.max(c1).sqrt()
    }

    pub fn frobenius2(&self) -> f64 {
        self.0.iter().flatten().map(|v| v.abs2()).sum()
    }

    pub fn is_finite(&self) -> bool {
        self.0.iter().flatten().all(|v| v.is_finite_val())
    }

    pub fn to_c64(&self) -> Mat2<C64> {
        let m = &self.0;
        Mat2([[m[0][0].to_c64(), m[0][1].to_c64()], [m[1][0].to_c64(), m[1][1].to_c64()]])
    }

    /// Spectral (operator 2-) norm.
    pub fn norm2(&self) -> f64 {
        let z = self.to_c64();
        let f = z.frobenius2();
        let d = z.det().norm();
        let disc = (f * f - 4.0 * d * d).max(0.0);
        ((f + disc.sqrt()) / 2.0).sqrt()
    }
}

impl Mat2<C64> {
    pub fn eigenvalues(&self) -> [C64; 2] {
        let t = self.trace();
        let d = self.det();
        let disc = (t * t - 4.0 * d).sqrt();
        let (l1, l2) = ((t + disc) / 2.0, (t - disc) / 2.0);
        // recompute the smaller root from the product to avoid cancellation
        if l1.norm() >= l2.norm() {
            let l2b = if l1.norm() > 0.0 { d / l1 } else { l2 };
            [l1, l2b]
        } else {
            let l1b = if l2.norm() > 0.0 { d / l2 } else { l1 };
            [l2, l1b]
        }
    }

    pub fn spectral_radius(&self) -> f64 {
        self.eigenvalues()[0].norm()
    }

    pub fn apply(&self, v: [C64; 2]) -> [C64; 2] {
        let m = &self.0;
        [m[0][0] * v[0] + m[0][1] * v[1], m[1][0] * v[0] + m[1][1] * v[1]]
    }
}

/// Row-major 4×4 complex matrix.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Mat4(pub [[C64; 4]; 4]);

impl Mat4 {
    pub fn zero() -> Self {
        Mat4([[C64::new(0.0, 0.0); 4]; 4])
    }

    pub fn identity() -> Self {
        let mut m = Self::zero();
        for i in 0..4 {
            m.0[i][i] = C64::new(1.0, 0.0);
        }
        m
    }

    pub fn mul(&self, o: &Mat4) -> Mat4 {
        let mut r = Mat4::zero();
        for i in 0..4 {
            for k in 0..4 {
                let a = self.0[i][k];
                if a == C64::new(0.0, 0.0) {
                    continue;
                }
                for j in 0..4 {
                    r.0[i][j] += a * o.0[k][j];
                }
            }
        }
        r
    }

    pub fn apply(&self, v: &[C64; 4]) -> [C64; 4] {
        let mut r = [C64::new(0.0, 0.0); 4];
        for i in 0..4 {
            for j in 0..4 {
                r[i] += self.0[i][j] * v[j];
            }
        }
        r
    }
}
