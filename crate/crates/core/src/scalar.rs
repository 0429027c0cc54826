//! Scalar abstraction shared by every numerical routine in the crate.

use std::fmt::{Debug, Display, LowerExp};

use num_traits::{Float, FloatConst, FromPrimitive, NumAssign, ToPrimitive};

/// Real floating-point type the physics is generic over (`f32` or `f64`).
pub trait Scalar:
    Float
    + FloatConst
    + FromPrimitive
    + ToPrimitive
    + NumAssign
    + Debug
    + Display
    + LowerExp
    + Default
    + Send
    + Sync
    + 'static
{
    /// Lossy conversion from an `f64` literal.
    fn lit(x: f64) -> Self {
        Self::from_f64(x).expect("f64 literal representable")
    }

    fn from_usize_lossy(n: usize) -> Self {
        Self::from_usize(n).expect("usize representable")
    }

    fn from_i32_lossy(n: i32) -> Self {
        Self::from_i32(n).expect("i32 representable")
    }

    fn to_f64_lossy(self) -> f64 {
        self.to_f64().unwrap_or(f64::NAN)
    }
}

impl<T> Scalar for T where
    T: Float
        + FloatConst
        + FromPrimitive
        + ToPrimitive
        + NumAssign
        + Debug
        + Display
        + LowerExp
        + Default
        + Send
        + Sync
        + 'static
{
}

/// `sinh(z)/z` for complex `z`, regular at the origin.
pub fn sinhc<T: Scalar>(z: num_complex::Complex<T>) -> num_complex::Complex<T> {
    if z.norm() < T::lit(1e-4) {
        let z2 = z * z;
        num_complex::Complex::new(T::one(), T::zero()) + z2 / T::lit(6.0) + z2 * z2 / T::lit(120.0)
    } else {
        z.sinh() / z
    }
}
