//! Scalar abstraction shared by every numeric routine in the crate.

use std::fmt::{Debug, Display};
use std::iter::Sum;

use num_traits::{Float, FromPrimitive, NumAssign, ToPrimitive};

/// Floating point type the smoothing and clustering code is generic over.
///
/// Implemented for `f32` and `f64`. Everything that reports a number to the
/// outside world (JSON, CSV, Matrix Market) goes through `to_f64`.
pub trait Scalar:
    Float
    + FromPrimitive
    + ToPrimitive
    + NumAssign
    + Sum
    + Default
    + Debug
    + Display
    + Send
    + Sync
    + 'static
{
    /// Converts a literal constant. Panics only if `value` is not representable,
    /// which never happens for the constants used in this crate.
    #[inline]
    fn lit(value: f64) -> Self {
        Self::from_f64(value).expect("constant representable in scalar type")
    }

    #[inline]
    fn from_count(count: usize) -> Self {
        Self::from_usize(count).expect("count representable in scalar type")
    }

    #[inline]
    fn as_f64(self) -> f64 {
        self.to_f64().unwrap_or(f64::NAN)
    }

    /// `x * log2(x)` with the convention `0 * log2(0) = 0`.
    #[inline]
    fn xlog2x(self) -> Self {
        if self <= Self::zero() {
            Self::zero()
        } else {
            self * self.log2()
        }
    }
}

impl Scalar for f32 {}
impl Scalar for f64 {}

/// Sums values in slice order. Parallel code collects partial results into a
/// vector and reduces with this so results do not depend on the thread count.
pub(crate) fn ordered_sum<T: Scalar>(values: &[T]) -> T {
    values.iter().fold(T::zero(), |acc, &v| acc + v)
}
