//! Scalar abstraction shared by the numerical modules.

use std::fmt::{Debug, Display};
use std::iter::Sum;

use num_traits::{Float, FloatConst, FromPrimitive};

/// Floating point type the geometry and solvers are written against.
pub trait Real:
    Float + FloatConst + FromPrimitive + Sum + Debug + Display + Default + Send + Sync + 'static
{
}

impl Real for f32 {}
impl Real for f64 {}

/// Converts an `f64` literal into `T`.
#[inline]
pub fn lit<T: Real>(x: f64) -> T {
    T::from_f64(x).expect("literal representable in target float type")
}

/// Lossy conversion to `f64`, used for diagnostics and serialization.
#[inline]
pub fn to_f64<T: Real>(x: T) -> f64 {
    x.to_f64().unwrap_or(f64::NAN)
}

/// `max(floor, factor * eps)`: a tolerance that is `floor` for `f64` but does
/// not drop below what the type can resolve.
#[inline]
pub fn tol<T: Real>(floor: f64, eps_factor: f64) -> T {
    let f: T = lit(floor);
    f.max(T::epsilon() * lit(eps_factor))
}

/// Inverse hyperbolic cotangent for `x > 1`, via `½·ln(1 + 2/(x-1))`.
#[inline]
pub fn acoth<T: Real>(x: T) -> T {
    let two = lit::<T>(2.0);
    (two / (x - T::one())).ln_1p() / two
}

/// Inverse hyperbolic tangent for `0 <= x < 1`, via `½·ln(1 + 2x/(1-x))`.
#[inline]
pub fn atanh<T: Real>(x: T) -> T {
    let two = lit::<T>(2.0);
    (two * x / (T::one() - x)).ln_1p() / two
}

/// `acosh(1 + m)` for `m >= 0` without cancellation near zero.
#[inline]
pub fn acosh_1p<T: Real>(m: T) -> T {
    let two = lit::<T>(2.0);
    two * (m / two).sqrt().asinh()
}
