//! Floating point abstraction shared by the optimizers and the analysis code.

use ndarray::NdFloat;
use num_traits::FromPrimitive;
use std::fmt::LowerExp;
use std::iter::Sum;

/// Real scalar the crate is generic over: `f32` or `f64`.
pub trait Scalar: NdFloat + FromPrimitive + LowerExp + Sum + Default {
    /// Converts an `f64` literal into `Self`.
    fn lit(x: f64) -> Self {
        Self::from_f64(x).expect("f64 literal representable in scalar type")
    }

    fn to_f64_lossy(self) -> f64 {
        self.to_f64().unwrap_or(f64::NAN)
    }
}

impl Scalar for f32 {}
impl Scalar for f64 {}

pub(crate) fn all_finite<T: Scalar>(xs: &[T]) -> bool {
    xs.iter().all(|x| x.is_finite())
}

pub(crate) fn axpy<T: Scalar>(a: T, x: &[T], y: &[T]) -> Vec<T> {
    x.iter().zip(y).map(|(&xi, &yi)| a * xi + yi).collect()
}
