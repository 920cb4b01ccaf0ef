//! Floating-point scalar abstraction.
//!
//! All numeric code in this crate is generic over [`Real`], implemented for
//! `f32` and `f64`. Random draws are always made in `f64` and converted, so a
//! simulation produces the same stream of events regardless of the scalar
//! type it runs at.

use num_complex::Complex;
use num_traits::{Float, FloatConst, FromPrimitive, NumAssign};
use std::fmt::{Debug, Display};

/// Scalar type for all real-valued computation: `f32` or `f64`.
pub trait Real:
    Float + FloatConst + FromPrimitive + NumAssign + Display + Debug + Default + Send + Sync + 'static
{
    /// Convert an `f64` constant into this scalar type.
    fn of(v: f64) -> Self {
        Self::from_f64(v).expect("f64 constant not representable")
    }

    /// Widen to `f64` (used when aggregating statistics).
    fn as_f64(self) -> f64 {
        self.to_f64().expect("scalar not representable as f64")
    }
}

impl Real for f32 {}
impl Real for f64 {}

/// Complex number over a [`Real`] scalar.
pub type Cx<T> = Complex<T>;

/// Squared magnitude sum of a complex slice.
pub fn cvec_norm2<T: Real>(v: &[Cx<T>]) -> T {
    v.iter().fold(T::zero(), |a, z| a + z.norm_sqr())
}

/// l2 distance between two complex vectors of equal length.
pub fn cvec_dist<T: Real>(a: &[Cx<T>], b: &[Cx<T>]) -> T {
    debug_assert_eq!(a.len(), b.len());
    a.iter()
        .zip(b)
        .fold(T::zero(), |acc, (x, y)| acc + (x - y).norm_sqr())
        .sqrt()
}

/// Largest component magnitude of a complex slice (0 for an empty slice).
pub fn cvec_max_abs<T: Real>(v: &[Cx<T>]) -> T {
    v.iter().fold(T::zero(), |a, z| a.max(z.norm()))
}
