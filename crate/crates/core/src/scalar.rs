//! Floating-point scalar abstraction.
//!
//! Everything that touches complex amplitudes is generic over [`Real`] so the
//! same code runs in `f32` and `f64`. Tolerances are expressed in `f64` and
//! widened for low-precision scalars by [`Real::tolerance`].

use std::fmt::{Debug, Display};
use std::iter::Sum;

use num_traits::{Float, FloatConst, FromPrimitive, ToPrimitive};

/// Real scalar type used for matrix entries: `f32` or `f64`.
pub trait Real:
    Float + FloatConst + FromPrimitive + ToPrimitive + Sum + Default + Debug + Display + Send + Sync + 'static
{
    /// Converts an `f64` literal.
    #[inline]
    fn lit(x: f64) -> Self {
        Self::from_f64(x).expect("f64 literal representable")
    }

    #[inline]
    fn as_f64(self) -> f64 {
        self.to_f64().expect("finite real")
    }

    /// Returns `x`, or a few thousand ulps when the scalar cannot resolve `x`.
    #[inline]
    fn tolerance(x: f64) -> Self {
        Self::lit(x).max(Self::epsilon() * Self::lit(2048.0))
    }
}

impl Real for f32 {}
impl Real for f64 {}
