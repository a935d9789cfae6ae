//! Scalar abstraction shared by every geometric routine.

use std::fmt::{Debug, Display};
use std::iter::Sum;

use num_traits::{Float, FloatConst, FromPrimitive, ToPrimitive};

/// Floating point type usable as a coordinate.
///
/// Everything geometric in this crate is written against `Real`; the crate
/// root exports `f64` aliases for day-to-day use.
pub trait Real:
    Float + FloatConst + FromPrimitive + ToPrimitive + Sum + Default + Debug + Display + Send + Sync + 'static
{
    /// Default absolute tolerance for distance comparisons on unit-scale data.
    const DEFAULT_GEOM_TOL: f64;
    /// Default angular tolerance, radians.
    const DEFAULT_ANGLE_TOL: f64;

    /// Converts an `f64` literal. Never fails for the types implemented here.
    #[inline]
    fn lit(x: f64) -> Self {
        Self::from_f64(x).expect("f64 literal representable")
    }

    #[inline]
    fn as_f64(self) -> f64 {
        self.to_f64().expect("finite scalar")
    }
}

impl Real for f64 {
    const DEFAULT_GEOM_TOL: f64 = 1e-9;
    const DEFAULT_ANGLE_TOL: f64 = 1e-9;
}

impl Real for f32 {
    const DEFAULT_GEOM_TOL: f64 = 1e-4;
    const DEFAULT_ANGLE_TOL: f64 = 1e-4;
}
