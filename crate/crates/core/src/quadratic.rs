//! Elements of a quadratic field Q(sqrt(t)).

use std::fmt;
use std::ops::{Add, Mul, Neg, Sub};

use num_rational::BigRational;
use num_traits::{Signed, Zero};

use crate::arith::exact_sqrt;
use crate::scalar::Scalar;

/// `re + im * sqrt(t)` for a squarefree integer `t != 1`.
#[derive(Clone, PartialEq, Eq, Debug)]
pub struct QuadElement<T> {
    pub t: i64,
    pub re: T,
    pub im: T,
}

impl<T: Scalar> QuadElement<T> {
    pub fn new(t: i64, re: T, im: T) -> Self {
        QuadElement { t, re, im }
    }

    pub fn from_base(t: i64, re: T) -> Self {
        QuadElement { t, re, im: T::zero() }
    }

    pub fn sqrt_t(t: i64) -> Self {
        QuadElement { t, re: T::zero(), im: T::one() }
    }

    pub fn conj(&self) -> Self {
        QuadElement { t: self.t, re: self.re.clone(), im: -self.im.clone() }
    }

    pub fn norm(&self) -> T {
        self.re.clone() * self.re.clone() - T::from_int(self.t) * self.im.clone() * self.im.clone()
    }

    pub fn trace(&self) -> T {
        self.re.clone() + self.re.clone()
    }

    pub fn is_zero(&self) -> bool {
        self.re.is_zero() && self.im.is_zero()
    }

    pub fn is_rational(&self) -> bool {
        self.im.is_zero()
    }

    pub fn scale(&self, c: &T) -> Self {
        QuadElement { t: self.t, re: self.re.clone() * c.clone(), im: self.im.clone() * c.clone() }
    }

    pub fn pow(&self, e: u32) -> Self {
        let mut acc = QuadElement::from_base(self.t, T::one());
        for _ in 0..e {
            acc = &acc * self;
        }
        acc
    }

    /// Numeric value under `sqrt(t) -> sign * |t|^(1/2)` (real `t > 0` only).
    pub fn to_f64(&self, sign: f64) -> f64 {
        let r = (self.t as f64).abs().sqrt() * sign;
        self.re.to_f64().unwrap_or(f64::NAN) + self.im.to_f64().unwrap_or(f64::NAN) * r
    }
}

impl QuadElement<BigRational> {
    pub fn inv(&self) -> Option<Self> {
        let n = self.norm();
        if n.is_zero() {
            return None;
        }
        Some(QuadElement { t: self.t, re: &self.re / &n, im: -&self.im / &n })
    }

    pub fn div(&self, other: &Self) -> Option<Self> {
        other.inv().map(|i| self * &i)
    }

    /// A square root inside Q(sqrt(t)), if one exists.
    pub fn sqrt(&self) -> Option<Self> {
        if self.is_zero() {
            return Some(self.clone());
        }
        let n = self.norm();
        let rs = rational_sqrt(&n)?;
        // (u + v sqrt t)^2 = re + im sqrt t with u^2 = (re +- sqrt(norm)) / 2
        for s in [rs.clone(), -rs] {
            let u2 = (&self.re + &s) / BigRational::from_integer(2.into());
            if u2.is_zero() {
                // then re = -s, u = 0 and v^2 t = re
                let v2 = &self.re / BigRational::from_integer(self.t.into());
                if let Some(v) = rational_sqrt(&v2) {
                    let cand = QuadElement::new(self.t, BigRational::zero(), v);
                    if &(&cand * &cand) == self {
                        return Some(cand);
                    }
                }
                continue;
            }
            if let Some(u) = rational_sqrt(&u2) {
                let v = &self.im / (&u + &u);
                let cand = QuadElement::new(self.t, u, v);
                if &(&cand * &cand) == self {
                    return Some(cand);
                }
            }
        }
        None
    }

    pub fn is_square(&self) -> bool {
        self.sqrt().is_some()
    }
}

pub fn rational_sqrt(q: &BigRational) -> Option<BigRational> {
    if q.is_negative() {
        return None;
    }
    Some(BigRational::new(exact_sqrt(q.numer())?, exact_sqrt(q.denom())?))
}

impl<T: Scalar> Add for &QuadElement<T> {
    type Output = QuadElement<T>;
    fn add(self, o: &QuadElement<T>) -> QuadElement<T> {
        debug_assert_eq!(self.t, o.t);
        QuadElement { t: self.t, re: self.re.clone() + o.re.clone(), im: self.im.clone() + o.im.clone() }
    }
}

impl<T: Scalar> Sub for &QuadElement<T> {
    type Output = QuadElement<T>;
    fn sub(self, o: &QuadElement<T>) -> QuadElement<T> {
        debug_assert_eq!(self.t, o.t);
        QuadElement { t: self.t, re: self.re.clone() - o.re.clone(), im: self.im.clone() - o.im.clone() }
    }
}

impl<T: Scalar> Mul for &QuadElement<T> {
    type Output = QuadElement<T>;
    fn mul(self, o: &QuadElement<T>) -> QuadElement<T> {
        debug_assert_eq!(self.t, o.t);
        let t = T::from_int(self.t);
        QuadElement {
            t: self.t,
            re: self.re.clone() * o.re.clone() + t * self.im.clone() * o.im.clone(),
            im: self.re.clone() * o.im.clone() + self.im.clone() * o.re.clone(),
        }
    }
}

impl<T: Scalar> Neg for &QuadElement<T> {
    type Output = QuadElement<T>;
    fn neg(self) -> QuadElement<T> {
        QuadElement { t: self.t, re: -self.re.clone(), im: -self.im.clone() }
    }
}

impl<T: Scalar + fmt::Display> fmt::Display for QuadElement<T> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.im.is_zero() {
            return write!(f, "{}", self.re);
        }
        if self.re.is_zero() {
            return write!(f, "{}*sqrt({})", self.im, self.t);
        }
        if self.im.is_negative() {
            write!(f, "{} - {}*sqrt({})", self.re, self.im.abs(), self.t)
        } else {
            write!(f, "{} + {}*sqrt({})", self.re, self.im, self.t)
        }
    }
}

impl<T: Scalar> QuadElement<T> {
    pub fn one(t: i64) -> Self {
        QuadElement::from_base(t, T::one())
    }

    pub fn is_one(&self) -> bool {
        self.re.is_one() && self.im.is_zero()
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::scalar::rat;

    fn q(t: i64, a: i64, b: i64) -> QuadElement<BigRational> {
        QuadElement::new(t, rat(a, 1), rat(b, 1))
    }

    #[test]
    fn norm_of_small_unit_multiple() {
        assert_eq!(q(13, 15, 4).norm(), rat(17, 1));
        let f = QuadElement::<f64>::new(13, 15.0, 4.0);
        assert!((f.norm() - 17.0).abs() < 1e-9);
    }

    #[test]
    fn sqrt_roundtrip() {
        for (a, b) in [(3, 1), (-2, 5), (0, 1), (7, 0), (1, -4)] {
            let x = q(13, a, b);
            let s = (&x * &x).sqrt().unwrap();
            assert!(s == x || s == -&x);
        }
        assert!(q(13, 15, 4).sqrt().is_none());
        assert!(q(-7, -7, 0).sqrt().is_some());
        assert!(q(13, 13, 0).sqrt().is_some());
        assert!(q(13, -1, 0).sqrt().is_none());
    }

    #[test]
    fn inverse() {
        let x = q(-7, 5, 2);
        let y = x.inv().unwrap();
        assert!((&x * &y).is_one());
    }
}
