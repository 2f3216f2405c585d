//! Floating-point abstraction shared by every numerical routine in the crate.

use std::fmt::{Debug, Display, LowerExp};
use std::iter::Sum;

use num_traits::{Float, FloatConst, FromPrimitive, NumAssign, ToPrimitive};

/// Real scalar the core is generic over. Implemented for `f32` and `f64`.
pub trait Real:
    'static + Float + FloatConst + FromPrimitive + ToPrimitive + NumAssign + Sum + Default + Debug + Display + LowerExp + Send + Sync
{
    /// Converts an `f64` literal; every finite `f64` fits after rounding.
    #[inline]
    fn of(x: f64) -> Self {
        Self::from_f64(x).expect("f64 literal representable")
    }

    #[inline]
    fn as_f64(self) -> f64 {
        self.to_f64().expect("scalar converts to f64")
    }

    #[inline]
    fn of_usize(n: usize) -> Self {
        Self::from_usize(n).expect("usize representable")
    }
}

impl Real for f32 {}
impl Real for f64 {}

/// Closed-interval membership with relative slack, used for ball tests.
#[inline]
pub(crate) fn le_slack<T: Real>(a: T, b: T) -> bool {
    a <= b + T::of(64.0) * T::epsilon() * (T::one() + b.abs())
}
