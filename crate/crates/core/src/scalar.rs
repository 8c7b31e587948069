use std::fmt::{Debug, Display};

use num_complex::Complex;
use num_traits::{Float, FloatConst, FromPrimitive, NumAssign, ToPrimitive};

/// Real scalar type the numerical core is generic over.
pub trait Real:
    Float
    + FloatConst
    + FromPrimitive
    + ToPrimitive
    + NumAssign
    + Debug
    + Display
    + Default
    + Send
    + Sync
    + 'static
{
    /// Converts an `f64` literal into `Self`.
    fn lit(x: f64) -> Self {
        Self::from_f64(x).expect("f64 literal representable in scalar type")
    }

    /// Converts a grid index or count into `Self`.
    fn from_index(i: usize) -> Self {
        Self::from_usize(i).expect("index representable in scalar type")
    }

    fn as_f64(self) -> f64 {
        self.to_f64().expect("scalar convertible to f64")
    }
}

impl Real for f32 {}
impl Real for f64 {}

/// `e^{iθ}` for real `θ`.
pub fn cis<T: Real>(theta: T) -> Complex<T> {
    Complex::new(theta.cos(), theta.sin())
}

/// `e^{i z}` for complex `z`.
pub fn expi<T: Real>(z: Complex<T>) -> Complex<T> {
    (Complex::<T>::i() * z).exp()
}

pub fn czero<T: Real>() -> Complex<T> {
    Complex::new(T::zero(), T::zero())
}

pub fn cone<T: Real>() -> Complex<T> {
    Complex::new(T::one(), T::zero())
}

pub fn creal<T: Real>(x: T) -> Complex<T> {
    Complex::new(x, T::zero())
}
