//! Scalar abstraction: every solver in this crate is generic over a real
//! floating-point type. `f64` is the intended production scalar (see the
//! type aliases at the crate root); `f32` is supported for quick checks.

use std::fmt::{Debug, Display};

use num_traits::{Float, FromPrimitive, ToPrimitive};

/// Real scalar usable by the norm oracles and solvers: IEEE float with
/// lossless-enough conversion from the `f64` literals used for tolerances.
pub trait Real:
    Float + FromPrimitive + ToPrimitive + Debug + Display + Send + Sync + 'static
{
}

impl Real for f32 {}
impl Real for f64 {}

/// Converts an `f64` constant (tolerance, weight, literal) into `T`.
#[inline]
pub fn real<T: Real>(x: f64) -> T {
    T::from_f64(x).expect("f64 constant must convert into the scalar type")
}

/// `-1` or `+1`; zero maps to `+1` so ties resolve the same way everywhere.
#[inline]
pub fn sign_or_one<T: Real>(x: T) -> T {
    if x < T::zero() {
        -T::one()
    } else {
        T::one()
    }
}
