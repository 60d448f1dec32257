//! Scalar abstraction shared by every kernel in the crate.

use std::fmt::{Debug, Display, LowerExp};
use std::iter::Sum;

use num_traits::{Float, FromPrimitive, ToPrimitive};

/// Real floating-point scalar: `f32` or `f64`.
pub trait Real:
    Float + FromPrimitive + ToPrimitive + Sum + Default + Debug + Display + LowerExp + Send + Sync + 'static
{
    /// Converts an `f64` literal into the scalar type (rounding for `f32`).
    fn lit(x: f64) -> Self {
        Self::from_f64(x).expect("f64 literal representable")
    }

    fn to_f64_lossy(self) -> f64 {
        self.to_f64().unwrap_or(f64::NAN)
    }
}

impl Real for f32 {}
impl Real for f64 {}

pub(crate) fn dot<T: Real>(a: &[T], b: &[T]) -> T {
    debug_assert_eq!(a.len(), b.len());
    a.iter().zip(b).map(|(&x, &y)| x * y).sum()
}

pub(crate) fn norm2<T: Real>(a: &[T]) -> T {
    // scaled to avoid overflow on large iterates
    let amax = a.iter().fold(T::zero(), |m, &x| m.max(x.abs()));
    if amax == T::zero() || !amax.is_finite() {
        return amax;
    }
    let s: T = a.iter().map(|&x| (x / amax) * (x / amax)).sum();
    amax * s.sqrt()
}

pub(crate) fn dist2<T: Real>(a: &[T], b: &[T]) -> T {
    let d: Vec<T> = a.iter().zip(b).map(|(&x, &y)| x - y).collect();
    norm2(&d)
}
