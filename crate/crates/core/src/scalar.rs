//! Floating-point abstraction the numerical kernels are generic over.

use std::fmt::{Debug, Display};
use std::iter::Sum;

use num_traits::{Float, FloatConst, FromPrimitive, NumAssign};

/// Real scalar type for the kernels. In practice f32 or f64; the associated
/// tolerance scales with the precision of the type.
pub trait Scalar:
    Float + FloatConst + FromPrimitive + NumAssign + Sum + Debug + Display + Send + Sync + 'static
{
    /// Library-wide tolerance for comparisons that are exact up to roundoff.
    const EPS: Self;

    /// Conversion shorthand for literals.
    fn of(x: f64) -> Self {
        Self::from_f64(x).expect("f64 literal not representable in scalar type")
    }

    /// Conversion shorthand for counts and dimensions.
    fn of_usize(x: usize) -> Self {
        Self::from_usize(x).expect("usize not representable in scalar type")
    }
}

impl Scalar for f64 {
    const EPS: Self = 1e-12;
}

impl Scalar for f32 {
    const EPS: Self = 1e-5;
}
