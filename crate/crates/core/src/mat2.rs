//! Small dense complex 2×2 matrices and 2-vectors.

use std::ops::{Add, AddAssign, Mul, Neg, Sub};

use num_complex::Complex;

use crate::scalar::{cone, czero, Real};

pub type Vec2<T> = [Complex<T>; 2];

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Mat2<T> {
    pub m: [[Complex<T>; 2]; 2],
}

impl<T: Real> Mat2<T> {
    pub fn new(m11: Complex<T>, m12: Complex<T>, m21: Complex<T>, m22: Complex<T>) -> Self {
        Self {
            m: [[m11, m12], [m21, m22]],
        }
    }

    pub fn zero() -> Self {
        Self::new(czero(), czero(), czero(), czero())
    }

    pub fn identity() -> Self {
        Self::diag(cone(), cone())
    }

    pub fn diag(d1: Complex<T>, d2: Complex<T>) -> Self {
        Self::new(d1, czero(), czero(), d2)
    }

    /// Matrix with a single nonzero entry at zero-based position `(row, col)`.
    pub fn unit(row: usize, col: usize, value: Complex<T>) -> Self {
        let mut out = Self::zero();
        out.m[row][col] = value;
        out
    }

    pub fn get(&self, row: usize, col: usize) -> Complex<T> {
        self.m[row][col]
    }

    pub fn det(&self) -> Complex<T> {
        self.m[0][0] * self.m[1][1] - self.m[0][1] * self.m[1][0]
    }

    pub fn inverse(&self) -> Option<Self> {
        let det = self.det();
        if det.norm() == T::zero() {
            return None;
        }
        let inv = cone::<T>() / det;
        Some(Self::new(
            self.m[1][1] * inv,
            -self.m[0][1] * inv,
            -self.m[1][0] * inv,
            self.m[0][0] * inv,
        ))
    }

    pub fn scale(&self, s: Complex<T>) -> Self {
        Self::new(
            self.m[0][0] * s,
            self.m[0][1] * s,
            self.m[1][0] * s,
            self.m[1][1] * s,
        )
    }

    pub fn scale_real(&self, s: T) -> Self {
        Self::new(
            self.m[0][0] * s,
            self.m[0][1] * s,
            self.m[1][0] * s,
            self.m[1][1] * s,
        )
    }

    pub fn mul_vec(&self, v: &Vec2<T>) -> Vec2<T> {
        [
            self.m[0][0] * v[0] + self.m[0][1] * v[1],
            self.m[1][0] * v[0] + self.m[1][1] * v[1],
        ]
    }

    pub fn column(&self, col: usize) -> Vec2<T> {
        [self.m[0][col], self.m[1][col]]
    }

    pub fn conj_transpose(&self) -> Self {
        Self::new(
            self.m[0][0].conj(),
            self.m[1][0].conj(),
            self.m[0][1].conj(),
            self.m[1][1].conj(),
        )
    }

    /// Largest entry modulus.
    pub fn max_abs(&self) -> T {
        let mut out = T::zero();
        for row in &self.m {
            for v in row {
                out = out.max(v.norm());
            }
        }
        out
    }

    /// Largest ℓ^p norm over columns: the operator norm `ℓ¹ → ℓ^p`.
    pub fn norm_1_to_p(&self, p: Option<T>) -> T {
        (0..2)
            .map(|col| lp2(self.m[0][col].norm(), self.m[1][col].norm(), p))
            .fold(T::zero(), T::max)
    }

    /// Largest ℓ^p norm over rows: the operator norm `ℓ^{p'} → ℓ^∞`.
    pub fn norm_pconj_to_inf(&self, p: Option<T>) -> T {
        (0..2)
            .map(|row| lp2(self.m[row][0].norm(), self.m[row][1].norm(), p))
            .fold(T::zero(), T::max)
    }
}

/// ℓ^p norm of a pair of moduli; `None` means p = ∞.
fn lp2<T: Real>(x: T, y: T, p: Option<T>) -> T {
    match p {
        None => x.max(y),
        Some(p) if p == T::one() => x + y,
        Some(p) if p == T::lit(2.0) => x.hypot(y),
        Some(p) => (x.powf(p) + y.powf(p)).powf(T::one() / p),
    }
}

impl<T: Real> Add for Mat2<T> {
    type Output = Self;
    fn add(self, rhs: Self) -> Self {
        Self::new(
            self.m[0][0] + rhs.m[0][0],
            self.m[0][1] + rhs.m[0][1],
            self.m[1][0] + rhs.m[1][0],
            self.m[1][1] + rhs.m[1][1],
        )
    }
}

impl<T: Real> AddAssign for Mat2<T> {
    fn add_assign(&mut self, rhs: Self) {
        *self = *self + rhs;
    }
}

impl<T: Real> Sub for Mat2<T> {
    type Output = Self;
    fn sub(self, rhs: Self) -> Self {
        Self::new(
            self.m[0][0] - rhs.m[0][0],
            self.m[0][1] - rhs.m[0][1],
            self.m[1][0] - rhs.m[1][0],
            self.m[1][1] - rhs.m[1][1],
        )
    }
}

impl<T: Real> Neg for Mat2<T> {
    type Output = Self;
    fn neg(self) -> Self {
        self.scale_real(-T::one())
    }
}

impl<T: Real> Mul for Mat2<T> {
    type Output = Self;
    fn mul(self, rhs: Self) -> Self {
        let a = &self.m;
        let b = &rhs.m;
        Self::new(
            a[0][0] * b[0][0] + a[0][1] * b[1][0],
            a[0][0] * b[0][1] + a[0][1] * b[1][1],
            a[1][0] * b[0][0] + a[1][1] * b[1][0],
            a[1][0] * b[0][1] + a[1][1] * b[1][1],
        )
    }
}

pub fn vadd<T: Real>(a: &Vec2<T>, b: &Vec2<T>) -> Vec2<T> {
    [a[0] + b[0], a[1] + b[1]]
}

pub fn vscale<T: Real>(a: &Vec2<T>, s: Complex<T>) -> Vec2<T> {
    [a[0] * s, a[1] * s]
}
