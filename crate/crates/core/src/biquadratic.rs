//! Biquadratic fields `K = Q(sqrt(d1 d2), sqrt(d1 d3))` and their elements.

use std::fmt;

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::Zero;
use serde::{Deserialize, Serialize};

use crate::arith::{gcd_i64, squarefree_part};
use crate::error::{Error, Result};
use crate::quadratic::QuadElement;
use crate::scalar::Scalar;

/// Normalized triple `(d1, d2, d3)`: `d1 > 0`, pairwise coprime squarefree
/// integers, with generators `a = d1 d2`, `b = d1 d3`, `c = d2 d3`.
#[derive(Clone, Copy, PartialEq, Eq, Hash, Debug, Serialize, Deserialize)]
pub struct BiquadraticField {
    pub d1: i64,
    pub d2: i64,
    pub d3: i64,
}

/// Which of the three quadratic subfields.
#[derive(Clone, Copy, PartialEq, Eq, Debug, Serialize, Deserialize)]
pub enum Subfield {
    A,
    B,
    C,
}

impl Subfield {
    pub const ALL: [Subfield; 3] = [Subfield::A, Subfield::B, Subfield::C];
}

/// Bring `Q(sqrt(x), sqrt(y))` to the normalized triple.
///
/// Rejects inputs where `x`, `y` or `xy` is a rational square.
pub fn normalize_field(x: i64, y: i64) -> Result<BiquadraticField> {
    if x == 0 || y == 0 {
        return Err(Error::DegenerateField(format!("zero generator in ({x}, {y})")));
    }
    let mut a = squarefree_part(x);
    let mut b = squarefree_part(y);
    let prod = squarefree_part(
        a.checked_mul(b)
            .ok_or_else(|| Error::DegenerateField("generator product overflows".into()))?,
    );
    if a == 1 || b == 1 || prod == 1 {
        return Err(Error::DegenerateField(format!(
            "Q(sqrt({x}), sqrt({y})) has degree below 4"
        )));
    }
    if a < 0 && b > 0 {
        std::mem::swap(&mut a, &mut b);
    } else if a < 0 && b < 0 {
        b = a;
        a = prod;
    }
    let d1 = gcd_i64(a, b);
    Ok(BiquadraticField { d1, d2: a / d1, d3: b / d1 })
}

impl BiquadraticField {
    pub fn from_triple(d1: i64, d2: i64, d3: i64) -> Result<Self> {
        let k = normalize_field(d1 * d2, d1 * d3)?;
        if k != (BiquadraticField { d1, d2, d3 }) {
            return Err(Error::Domain(format!(
                "({d1}, {d2}, {d3}) is not normalized; expected ({}, {}, {})",
                k.d1, k.d2, k.d3
            )));
        }
        Ok(k)
    }

    pub fn a(&self) -> i64 {
        self.d1 * self.d2
    }

    pub fn b(&self) -> i64 {
        self.d1 * self.d3
    }

    pub fn c(&self) -> i64 {
        self.d2 * self.d3
    }

    pub fn generator(&self, s: Subfield) -> i64 {
        match s {
            Subfield::A => self.a(),
            Subfield::B => self.b(),
            Subfield::C => self.c(),
        }
    }

    pub fn generators(&self) -> [i64; 3] {
        [self.a(), self.b(), self.c()]
    }

    /// Primes dividing the discriminant, plus 2.
    pub fn ramified_support(&self) -> Vec<i64> {
        let mut ps = vec![2];
        for d in [self.d1, self.d2, self.d3] {
            ps.extend(crate::arith::prime_support(d));
        }
        ps.sort();
        ps.dedup();
        ps
    }

    pub fn is_real(&self) -> bool {
        self.generators().iter().all(|&g| g > 0)
    }
}

impl fmt::Display for BiquadraticField {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "Q(sqrt({}), sqrt({}))", self.a(), self.b())
    }
}

/// `x1 + x2 sqrt(a) + x3 sqrt(b) + x4 sqrt(c)` with `sqrt(c) = sqrt(a) sqrt(b) / d1`.
#[derive(Clone, PartialEq, Eq, Debug)]
pub struct KElement<T> {
    pub field: BiquadraticField,
    pub x: [T; 4],
}

impl<T: Scalar> KElement<T> {
    pub fn new(field: BiquadraticField, x: [T; 4]) -> Self {
        KElement { field, x }
    }

    pub fn from_ints(field: BiquadraticField, x: [i64; 4]) -> Self {
        KElement { field, x: x.map(T::from_int) }
    }

    pub fn one(field: BiquadraticField) -> Self {
        KElement::from_ints(field, [1, 0, 0, 0])
    }

    pub fn is_zero(&self) -> bool {
        self.x.iter().all(|v| v.is_zero())
    }

    pub fn mul(&self, o: &Self) -> Self {
        let k = self.field;
        let (a, b, c) = (T::from_int(k.a()), T::from_int(k.b()), T::from_int(k.c()));
        let (d1, d2, d3) = (T::from_int(k.d1), T::from_int(k.d2), T::from_int(k.d3));
        let [x1, x2, x3, x4] = self.x.clone();
        let [y1, y2, y3, y4] = o.x.clone();
        let r1 = x1.clone() * y1.clone()
            + a * x2.clone() * y2.clone()
            + b * x3.clone() * y3.clone()
            + c * x4.clone() * y4.clone();
        let r2 = x1.clone() * y2.clone()
            + x2.clone() * y1.clone()
            + d3 * (x3.clone() * y4.clone() + x4.clone() * y3.clone());
        let r3 = x1.clone() * y3.clone()
            + x3.clone() * y1.clone()
            + d2 * (x2.clone() * y4.clone() + x4.clone() * y2.clone());
        let r4 = x1 * y4 + x4 * y1 + d1 * (x2 * y3 + x3 * y2);
        KElement { field: k, x: [r1, r2, r3, r4] }
    }

    /// Norm to the quadratic subfield `Q(sqrt(t))`, `t` the chosen generator.
    pub fn relative_norm(&self, s: Subfield) -> QuadElement<T> {
        let k = self.field;
        let [x1, x2, x3, x4] = self.x.clone();
        let two = T::from_int(2);
        let sq = |v: &T| v.clone() * v.clone();
        let (a, b, c) = (T::from_int(k.a()), T::from_int(k.b()), T::from_int(k.c()));
        let (p, q) = match s {
            Subfield::A => (
                sq(&x1) + a * sq(&x2) - b * sq(&x3) - c * sq(&x4),
                two * (x1 * x2 - T::from_int(k.d3) * x3 * x4),
            ),
            Subfield::B => (
                sq(&x1) + b * sq(&x3) - a * sq(&x2) - c * sq(&x4),
                two * (x1 * x3 - T::from_int(k.d2) * x2 * x4),
            ),
            Subfield::C => (
                sq(&x1) + c * sq(&x4) - a * sq(&x2) - b * sq(&x3),
                two * (x1 * x4 - T::from_int(k.d1) * x2 * x3),
            ),
        };
        QuadElement::new(k.generator(s), p, q)
    }

    pub fn norm(&self) -> T {
        self.relative_norm(Subfield::A).norm()
    }

    /// Image under the automorphism flipping the signs of the listed roots.
    pub fn conjugate(&self, flip_a: bool, flip_b: bool) -> Self {
        let [x1, x2, x3, x4] = self.x.clone();
        let sa = if flip_a { -x2 } else { x2 };
        let sb = if flip_b { -x3 } else { x3 };
        let sc = if flip_a ^ flip_b { -x4 } else { x4 };
        KElement { field: self.field, x: [x1, sa, sb, sc] }
    }
}

/// The quartic norm form on integer coordinates.
pub fn norm_form_eval(k: &BiquadraticField, x: &[BigInt; 4]) -> BigInt {
    let e = KElement::<BigInt>::new(*k, x.clone());
    e.norm()
}

/// Norm form in machine integers; `None` on overflow.
pub fn norm_form_i128(k: &BiquadraticField, x: [i64; 4]) -> Option<i128> {
    let [x1, x2, x3, x4] = x.map(|v| v as i128);
    let (a, b, c) = (k.a() as i128, k.b() as i128, k.c() as i128);
    let p = x1
        .checked_mul(x1)?
        .checked_add(a.checked_mul(x2 * x2)?)?
        .checked_sub(b.checked_mul(x3 * x3)?)?
        .checked_sub(c.checked_mul(x4 * x4)?)?;
    let q = 2 * (x1 * x2 - (k.d3 as i128).checked_mul(x3 * x4)?);
    p.checked_mul(p)?.checked_sub(a.checked_mul(q.checked_mul(q)?)?)
}

impl KElement<BigRational> {
    pub fn inv(&self) -> Option<Self> {
        // x^{-1} = conj-product / norm
        let n = self.norm();
        if n.is_zero() {
            return None;
        }
        let mut acc = self.conjugate(true, false);
        acc = acc.mul(&self.conjugate(false, true));
        acc = acc.mul(&self.conjugate(true, true));
        let inv_n = BigRational::from_integer(1.into()) / n;
        Some(KElement { field: self.field, x: acc.x.map(|v| v * inv_n.clone()) })
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn normalization_examples() {
        assert_eq!(normalize_field(13, 17).unwrap(), BiquadraticField { d1: 1, d2: 13, d3: 17 });
        assert_eq!(normalize_field(-1, 17).unwrap(), BiquadraticField { d1: 1, d2: 17, d3: -1 });
        assert_eq!(normalize_field(6, 15).unwrap(), BiquadraticField { d1: 3, d2: 2, d3: 5 });
        assert_eq!(normalize_field(-1, -13).unwrap(), BiquadraticField { d1: 1, d2: 13, d3: -1 });
        assert!(matches!(normalize_field(4, 13), Err(Error::DegenerateField(_))));
        assert!(matches!(normalize_field(13, 52), Err(Error::DegenerateField(_))));
    }

    #[test]
    fn norm_of_unit_multiple() {
        let k = normalize_field(13, 17).unwrap();
        let xi = KElement::<BigInt>::from_ints(k, [15, 4, 0, 0]);
        assert_eq!(xi.norm(), BigInt::from(289));
        assert_eq!(norm_form_i128(&k, [15, 4, 0, 0]), Some(289));
    }

    #[test]
    fn norm_is_multiplicative_and_matches_relative_norms() {
        let k = normalize_field(6, 15).unwrap();
        let x = KElement::<BigInt>::from_ints(k, [1, 2, -3, 1]);
        let y = KElement::<BigInt>::from_ints(k, [-2, 0, 1, 5]);
        assert_eq!(x.mul(&y).norm(), x.norm() * y.norm());
        for s in Subfield::ALL {
            assert_eq!(x.relative_norm(s).norm(), x.norm());
        }
        let xr = KElement::<BigRational>::from_ints(k, [1, 2, -3, 1]);
        assert_eq!(xr.mul(&xr.inv().unwrap()), KElement::one(k));
    }
}
