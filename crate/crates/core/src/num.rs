//! Scalar abstraction shared by every numerical routine in the crate.

use std::fmt::{Debug, Display, LowerExp};

use num_traits::{Float, FloatConst, FromPrimitive};

/// Real floating-point scalar: `f32` or `f64`.
pub trait Real:
    Float + FloatConst + FromPrimitive + Debug + Display + LowerExp + Default + Send + Sync + 'static
{
    /// Converts an `f64` literal into this scalar type.
    #[inline]
    fn lit(x: f64) -> Self {
        Self::from_f64(x).expect("f64 literal representable in scalar type")
    }

    /// Widens to `f64` for serialization and reporting.
    #[inline]
    fn to_f64_lossless(self) -> f64 {
        num_traits::ToPrimitive::to_f64(&self).expect("scalar representable as f64")
    }
}

impl Real for f32 {}
impl Real for f64 {}

/// Wraps an angle in degrees into `[-180, 180)`.
pub fn wrap_degrees<T: Real>(deg: T) -> T {
    let full = T::lit(360.0);
    let half = T::lit(180.0);
    let mut wrapped = (deg + half) % full;
    if wrapped < T::zero() {
        wrapped = wrapped + full;
    }
    let out = wrapped - half;
    if out >= half {
        out - full
    } else {
        out
    }
}
