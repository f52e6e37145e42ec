use std::fmt::{Debug, Display};
use std::iter::Sum;

use num_traits::{Float, FromPrimitive, ToPrimitive};

/// Real scalar used throughout the crate: `f32` or `f64`.
pub trait Scalar:
    Float + FromPrimitive + ToPrimitive + Debug + Display + Sum + Send + Sync + 'static
{
    /// Condition number above which a conditioning block is treated as singular.
    fn singular_condition() -> Self;

    /// Converts an `f64` literal. Every finite `f64` has a (possibly rounded)
    /// representation in the supported types.
    #[inline]
    fn lit(x: f64) -> Self {
        Self::from_f64(x).expect("finite literal")
    }

    #[inline]
    fn as_f64(self) -> f64 {
        self.to_f64().unwrap_or(f64::NAN)
    }
}

impl Scalar for f64 {
    fn singular_condition() -> Self {
        1e12
    }
}

impl Scalar for f32 {
    // 1e12 is beyond single precision; keep two digits of headroom over 1/eps.
    fn singular_condition() -> Self {
        0.01 / f32::EPSILON
    }
}
