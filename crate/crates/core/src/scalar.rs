//! The coefficient abstraction shared by the field element types.
//!
//! Exact computations instantiate the element types with [`BigRational`];
//! quick numeric sketches can use `f64`. Every algorithm that needs exact
//! equality or square classes is implemented only for the rational
//! instantiation.

use std::fmt::Debug;

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{FromPrimitive, Num, Signed, ToPrimitive};

/// Coefficient ring for field elements: a signed numeric type that can be
/// built from small integers and approximated by an `f64`.
pub trait Scalar: Num + Signed + Clone + Debug + FromPrimitive + ToPrimitive {
    fn from_int(v: i64) -> Self {
        Self::from_i64(v).expect("small integer is representable")
    }
}

impl<T> Scalar for T where T: Num + Signed + Clone + Debug + FromPrimitive + ToPrimitive {}

pub fn rat(n: i64, d: i64) -> BigRational {
    BigRational::new(BigInt::from(n), BigInt::from(d))
}

pub fn rat_int(n: impl Into<BigInt>) -> BigRational {
    BigRational::from_integer(n.into())
}
