//! Norm equations over biquadratic and cyclotomic fields.
//!
//! The crate decides whether `N_{K/Q}(x) = n` has a rational solution by
//! combining local solvability with an explicit evaluation of the
//! Brauer-Manin pairing, and it builds the cyclotomic double coverings that
//! realize the obstruction classes.

pub mod arith;
pub mod biquadratic;
pub mod coverings;
pub mod cyclotomic;
mod ecm;
pub mod error;
pub mod normtorus;
pub mod oracle;
pub mod padic;
pub mod quadratic;
pub mod scalar;

pub use error::{Error, Result};
pub use scalar::Scalar;

pub use num_bigint::BigInt;
pub use num_rational::BigRational;

/// Exact rational numbers, the default scalar of every exact computation.
pub type Rational = BigRational;

/// Library version, embedded in every CLI report.
pub const VERSION: &str = env!("CARGO_PKG_VERSION");
