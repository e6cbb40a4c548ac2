//! p-adic numbers at finite precision, Hensel lifting, local splitting data
//! and Hilbert symbols over quadratic extensions of Q_p.

use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};
use serde::{Deserialize, Serialize};

use crate::arith::{hilbert_qp, jacobi, legendre_rat, sqrt_mod_prime, valuation, valuation_rat, PlaceQ};
use crate::biquadratic::{BiquadraticField, Subfield};
use crate::error::{domain, Error, Result};
use crate::quadratic::QuadElement;

const MAX_DIGITS: u32 = 4096;

/// `p^valuation * unit`, with `unit` a p-adic unit known modulo `p^precision`.
#[derive(Clone, PartialEq, Eq, Debug)]
pub struct PadicNumber {
    pub p: BigInt,
    pub valuation: i64,
    pub unit: BigInt,
    pub precision: u32,
}

fn modulus(p: &BigInt, k: u32) -> BigInt {
    num_traits::pow(p.clone(), k as usize)
}

fn inv_mod(a: &BigInt, m: &BigInt) -> Option<BigInt> {
    let g = a.extended_gcd(m);
    if !g.gcd.is_one() {
        return None;
    }
    Some(g.x.mod_floor(m))
}

impl PadicNumber {
    pub fn from_rational(q: &BigRational, p: &BigInt, precision: u32) -> Result<Self> {
        if q.is_zero() {
            return domain("zero has no unit part");
        }
        let (vn, un) = valuation(q.numer(), p);
        let (vd, ud) = valuation(q.denom(), p);
        let m = modulus(p, precision);
        let unit = (un * inv_mod(&ud, &m).expect("unit denominator")).mod_floor(&m);
        Ok(PadicNumber { p: p.clone(), valuation: vn - vd, unit, precision })
    }

    pub fn from_int(n: &BigInt, p: &BigInt, precision: u32) -> Result<Self> {
        Self::from_rational(&BigRational::from_integer(n.clone()), p, precision)
    }

    /// From an integer known modulo `p^known`.
    pub fn from_residue(x: &BigInt, p: &BigInt, known: u32) -> Result<Self> {
        let m = modulus(p, known);
        let x = x.mod_floor(&m);
        if x.is_zero() {
            return Err(Error::PrecisionExhausted(format!("value vanishes modulo {p}^{known}")));
        }
        let (v, u) = valuation(&x, p);
        let prec = known - v as u32;
        Ok(PadicNumber { p: p.clone(), valuation: v, unit: u.mod_floor(&modulus(p, prec)), precision: prec })
    }

    pub fn mul(&self, o: &Self) -> Self {
        let prec = self.precision.min(o.precision);
        let m = modulus(&self.p, prec);
        PadicNumber {
            p: self.p.clone(),
            valuation: self.valuation + o.valuation,
            unit: (&self.unit * &o.unit).mod_floor(&m),
            precision: prec,
        }
    }

    pub fn inv(&self) -> Self {
        let m = modulus(&self.p, self.precision);
        PadicNumber {
            p: self.p.clone(),
            valuation: -self.valuation,
            unit: inv_mod(&self.unit, &m).expect("unit"),
            precision: self.precision,
        }
    }

    pub fn neg(&self) -> Self {
        let m = modulus(&self.p, self.precision);
        PadicNumber { unit: (-&self.unit).mod_floor(&m), ..self.clone() }
    }

    pub fn add(&self, o: &Self) -> Result<Self> {
        let v = self.valuation.min(o.valuation);
        // absolute precision of each summand
        let abs_a = self.valuation + self.precision as i64;
        let abs_b = o.valuation + o.precision as i64;
        let abs = abs_a.min(abs_b);
        let known = (abs - v) as u32;
        let m = modulus(&self.p, known);
        let lift = |x: &PadicNumber| (&x.unit * modulus(&x.p, (x.valuation - v) as u32)).mod_floor(&m);
        let s = lift(self) + lift(o);
        let mut r = Self::from_residue(&s, &self.p, known)?;
        r.valuation += v;
        Ok(r)
    }

    /// Rational number `p^(v mod 2) * u` with `u` the unit class representative;
    /// it lies in the same square class.
    pub fn square_class_rep(&self) -> Result<BigRational> {
        let two = BigInt::from(2);
        let need = if self.p == two { 3 } else { 1 };
        if self.precision < need {
            return Err(Error::PrecisionExhausted("square class undetermined".into()));
        }
        let u = if self.p == two {
            self.unit.mod_floor(&BigInt::from(8))
        } else if jacobi(&self.unit, &self.p) == 1 {
            BigInt::one()
        } else {
            self.unit.mod_floor(&self.p)
        };
        let pv = if self.valuation.rem_euclid(2) == 1 { self.p.clone() } else { BigInt::one() };
        Ok(BigRational::from_integer(u * pv))
    }

    pub fn is_square(&self) -> Result<bool> {
        let rep = self.square_class_rep()?;
        Ok(crate::arith::is_square_local(&rep, &PlaceQ::Finite(self.p.clone())))
    }

    /// The unit as a signed residue, for display.
    pub fn to_rational_approx(&self) -> BigRational {
        let pv = modulus(&self.p, self.valuation.unsigned_abs() as u32);
        let u = BigRational::from_integer(self.unit.clone());
        if self.valuation >= 0 {
            u * BigRational::from_integer(pv)
        } else {
            u / BigRational::from_integer(pv)
        }
    }
}

fn poly_eval(poly: &[BigInt], x: &BigInt) -> BigInt {
    let mut acc = BigInt::zero();
    for c in poly.iter().rev() {
        acc = acc * x + c;
    }
    acc
}

fn poly_deriv(poly: &[BigInt]) -> Vec<BigInt> {
    poly.iter().enumerate().skip(1).map(|(i, c)| c * BigInt::from(i)).collect()
}

fn val_mod(x: &BigInt, p: &BigInt, cap: u32) -> u32 {
    let m = modulus(p, cap);
    let r = x.mod_floor(&m);
    if r.is_zero() {
        return cap;
    }
    valuation(&r, p).0 as u32
}

/// Lift a root of `poly` (integer coefficients, low degree first) from a seed
/// known modulo `p^seed_precision` to a root modulo `p^target`.
///
/// The seed must satisfy the Newton condition `v(f(s)) > 2 v(f'(s))` with
/// both valuations determined by the seed's precision; otherwise the result
/// is [`Error::Inconclusive`].
pub fn hensel_root(poly: &[BigInt], seed: &BigInt, seed_precision: u32, p: &BigInt, target: u32) -> Result<BigInt> {
    if seed_precision == 0 {
        return Err(Error::Inconclusive);
    }
    let d = poly_deriv(poly);
    let fp = poly_eval(&d, seed);
    let v1 = val_mod(&fp, p, seed_precision);
    if v1 >= seed_precision {
        return Err(Error::Inconclusive);
    }
    let cap = seed_precision + v1;
    let vf = val_mod(&poly_eval(poly, seed), p, cap);
    if vf <= 2 * v1 {
        return Err(Error::Inconclusive);
    }
    let work = target + 2 * v1 + 2;
    let m = modulus(p, work);
    let pv1 = modulus(p, v1);
    let mut s = seed.mod_floor(&m);
    for _ in 0..256 {
        let f = poly_eval(poly, &s).mod_floor(&m);
        if val_mod(&f, p, work) >= target + v1 {
            return Ok(s.mod_floor(&modulus(p, target)));
        }
        let g = poly_eval(&d, &s);
        let g_unit = (&g / &pv1).mod_floor(&m);
        let step = (&f / &pv1) * inv_mod(&g_unit, &m).ok_or(Error::Inconclusive)?;
        s = (s - step).mod_floor(&m);
    }
    Err(Error::PrecisionExhausted("Newton iteration did not converge".into()))
}

/// Square root of a p-adic number, or `None` if it is not a square.
pub fn padic_sqrt(x: &PadicNumber) -> Result<Option<PadicNumber>> {
    if x.valuation.rem_euclid(2) == 1 {
        return Ok(None);
    }
    let p = &x.p;
    let two = BigInt::from(2);
    let (seed, k) = if *p == two {
        if x.precision < 3 {
            return Err(Error::PrecisionExhausted("need the unit modulo 8".into()));
        }
        if x.unit.mod_floor(&BigInt::from(8)) != BigInt::one() {
            return Ok(None);
        }
        (BigInt::one(), 3)
    } else {
        match sqrt_mod_prime(&x.unit.mod_floor(p), p) {
            Some(r) => (r, 1),
            None => return Ok(None),
        }
    };
    let target = if *p == two { x.precision - 1 } else { x.precision };
    let poly = vec![-x.unit.clone(), BigInt::zero(), BigInt::one()];
    let mut r = hensel_root(&poly, &seed, k, p, target)?;
    // canonical root: r = 1 mod 4 at p = 2, r mod p in [1, (p-1)/2] otherwise
    let m = modulus(p, target);
    if *p == two {
        if target >= 2 && r.mod_floor(&BigInt::from(4)) != BigInt::one() {
            r = (-r).mod_floor(&m);
        }
    } else if r.mod_floor(p) * 2 > *p {
        r = (-r).mod_floor(&m);
    }
    Ok(Some(PadicNumber { p: p.clone(), valuation: x.valuation / 2, unit: r, precision: target }))
}

/// Square root of a rational in Q_p to `precision` digits.
pub fn sqrt_rational(q: &BigRational, p: &BigInt, precision: u32) -> Result<Option<PadicNumber>> {
    padic_sqrt(&PadicNumber::from_rational(q, p, precision + 1)?)
}

/// Behaviour of a quadratic field `Q(sqrt(t))` at a place of Q.
#[derive(Clone, Copy, PartialEq, Eq, Debug, Serialize, Deserialize)]
pub enum LocalQuadType {
    Split,
    Inert,
    Ramified,
}

/// Type of `Q(sqrt(t))` at `v`, `t` squarefree; at the real place,
/// a complex completion counts as ramified.
pub fn quad_type(t: i64, v: &PlaceQ) -> LocalQuadType {
    match v {
        PlaceQ::Real => {
            if t > 0 {
                LocalQuadType::Split
            } else {
                LocalQuadType::Ramified
            }
        }
        PlaceQ::Finite(p) => {
            let tb = BigInt::from(t);
            if *p == BigInt::from(2) {
                if t.rem_euclid(2) == 0 || t.rem_euclid(4) == 3 {
                    LocalQuadType::Ramified
                } else if t.rem_euclid(8) == 1 {
                    LocalQuadType::Split
                } else {
                    LocalQuadType::Inert
                }
            } else if (&tb % p).is_zero() {
                LocalQuadType::Ramified
            } else if jacobi(&tb, p) == 1 {
                LocalQuadType::Split
            } else {
                LocalQuadType::Inert
            }
        }
    }
}

/// Decomposition data of a biquadratic field at a place of Q.
#[derive(Clone, PartialEq, Eq, Debug, Serialize, Deserialize)]
pub struct LocalPlaceDesc {
    pub place: PlaceQ,
    pub e: u32,
    pub f: u32,
    pub g: u32,
    /// Local behaviour of `Q(sqrt(a))`, `Q(sqrt(b))`, `Q(sqrt(c))`.
    pub subfields: [(i64, LocalQuadType); 3],
}

impl LocalPlaceDesc {
    /// Local degree `e f` of each completion.
    pub fn local_degree(&self) -> u32 {
        self.e * self.f
    }

    pub fn subfield_type(&self, s: Subfield) -> LocalQuadType {
        let i = match s {
            Subfield::A => 0,
            Subfield::B => 1,
            Subfield::C => 2,
        };
        self.subfields[i].1
    }
}

/// Ramification index, residue degree and number of places above `v`.
pub fn splitting_type(k: &BiquadraticField, v: &PlaceQ) -> LocalPlaceDesc {
    let gens = k.generators();
    let types = gens.map(|t| quad_type(t, v));
    let split = types.iter().filter(|t| **t == LocalQuadType::Split).count() as u32;
    let unram = types.iter().filter(|t| **t != LocalQuadType::Ramified).count() as u32;
    let g = if split == 0 { 1 } else { split + 1 };
    let e = 4 / (unram + 1);
    let f = 4 / (e * g);
    LocalPlaceDesc {
        place: v.clone(),
        e,
        f,
        g,
        subfields: [(gens[0], types[0]), (gens[1], types[1]), (gens[2], types[2])],
    }
}

/// A place of `Q(sqrt(t))` above a place `v` of Q.
#[derive(Clone, PartialEq, Eq, Debug, Serialize, Deserialize)]
pub enum QuadPlace {
    /// `t` is a square in Q_v; `root_sign` picks `sqrt(t) -> +-r` with `r` canonical.
    Split { v: PlaceQ, root_sign: i8 },
    /// The unique place above `v`.
    Field { v: PlaceQ },
}

impl QuadPlace {
    pub fn base(&self) -> &PlaceQ {
        match self {
            QuadPlace::Split { v, .. } | QuadPlace::Field { v } => v,
        }
    }
}

/// All places of `Q(sqrt(t))` above `v`.
pub fn places_above(t: i64, v: &PlaceQ) -> Vec<QuadPlace> {
    if quad_type(t, v) == LocalQuadType::Split {
        vec![QuadPlace::Split { v: v.clone(), root_sign: 1 }, QuadPlace::Split { v: v.clone(), root_sign: -1 }]
    } else {
        vec![QuadPlace::Field { v: v.clone() }]
    }
}

/// Canonical square root of `t` in Q_p to `digits` digits (requires `t` split at `p`).
pub fn split_root(t: i64, p: &BigInt, digits: u32) -> Result<PadicNumber> {
    sqrt_rational(&BigRational::from_integer(t.into()), p, digits)?
        .ok_or_else(|| Error::Domain(format!("{t} is not a square in Q_{p}")))
}

/// Image of `x` in Q_p under `sqrt(t) -> sign * r`.
pub fn embed_split(x: &QuadElement<BigRational>, p: &BigInt, sign: i8) -> Result<PadicNumber> {
    if x.is_zero() {
        return domain("zero has no p-adic unit part");
    }
    if x.is_rational() {
        return PadicNumber::from_rational(&x.re, p, 64);
    }
    let mut digits = 64u32;
    loop {
        let r = split_root(x.t, p, digits)?;
        let r = if sign < 0 { r.neg() } else { r };
        let re = PadicNumber::from_rational(&x.re, p, digits);
        let im = PadicNumber::from_rational(&x.im, p, digits)?.mul(&r);
        let out = match re {
            Ok(re) => re.add(&im),
            Err(_) => Ok(im),
        };
        match out {
            Ok(v) if v.precision >= 4 => return Ok(v),
            _ if digits >= MAX_DIGITS => {
                return Err(Error::PrecisionExhausted(format!("cancellation in {x} at {p}")));
            }
            _ => digits *= 4,
        }
    }
}

fn real_sign(x: &QuadElement<BigRational>, sign: i8) -> i8 {
    // sign of re + s * im * sqrt(t), t > 0
    let im = if sign < 0 { -x.im.clone() } else { x.im.clone() };
    let sr = x.re.signum();
    let si = im.signum();
    if si.is_zero() {
        return if sr.is_positive() { 1 } else { -1 };
    }
    if sr.is_zero() || sr == si {
        return if si.is_positive() { 1 } else { -1 };
    }
    let lhs = &x.re * &x.re;
    let rhs = &im * &im * BigRational::from_integer(x.t.into());
    let bigger_re = lhs > rhs;
    let s = if bigger_re { sr } else { si };
    if s.is_positive() {
        1
    } else {
        -1
    }
}

/// Valuation of `x` at the unique place above odd `p` (normalized so the
/// uniformizer has valuation 1).
fn field_valuation(x: &QuadElement<BigRational>, p: &BigInt, ramified: bool) -> i64 {
    let vr = if x.re.is_zero() { i64::MAX } else { valuation_rat(&x.re, p) };
    let vi = if x.im.is_zero() { i64::MAX } else { valuation_rat(&x.im, p) };
    if ramified {
        let a = if vr == i64::MAX { i64::MAX } else { 2 * vr };
        let b = if vi == i64::MAX { i64::MAX } else { 2 * vi + 1 };
        a.min(b)
    } else {
        vr.min(vi)
    }
}

fn qpow(x: &QuadElement<BigRational>, e: i64) -> QuadElement<BigRational> {
    let base = if e < 0 { x.inv().expect("nonzero") } else { x.clone() };
    base.pow(e.unsigned_abs() as u32)
}

/// Hilbert symbol at the unique place above an odd prime `p` that does not
/// split in `Q(sqrt(t))`, by the tame symbol.
pub fn tame_symbol(a: &QuadElement<BigRational>, b: &QuadElement<BigRational>, p: &BigInt) -> Result<i8> {
    let t = a.t;
    let ty = quad_type(t, &PlaceQ::Finite(p.clone()));
    if *p == BigInt::from(2) || ty == LocalQuadType::Split {
        return domain("tame symbol needs an odd non-split prime");
    }
    if a.is_zero() || b.is_zero() {
        return domain("Hilbert symbol of zero");
    }
    let ram = ty == LocalQuadType::Ramified;
    let va = field_valuation(a, p, ram);
    let vb = field_valuation(b, p, ram);
    let mut z = &qpow(a, vb) * &qpow(b, -va);
    if (va * vb).rem_euclid(2) == 1 {
        z = -&z;
    }
    Ok(if ram { legendre_rat(&z.re, p) } else { legendre_rat(&z.norm(), p) })
}

enum TameGen {
    Sqrt,
    OneMinus(BigRational),
}

fn split_gen(x: &QuadElement<BigRational>) -> (BigRational, TameGen) {
    if x.re.is_zero() {
        (x.im.clone(), TameGen::Sqrt)
    } else {
        (x.re.clone(), TameGen::OneMinus(-&x.im / &x.re))
    }
}

fn gen_norm(t: i64, g: &TameGen) -> BigRational {
    let tq = BigRational::from_integer(t.into());
    match g {
        TameGen::Sqrt => -tq,
        TameGen::OneMinus(c) => BigRational::one() - c * c * tq,
    }
}

/// Product over all places `w | v` of `Q(sqrt(t))` of `(a, b)_w`, reduced to
/// Hilbert symbols over Q_v through the Steinberg relation.
pub fn quadratic_hilbert_sum(a: &QuadElement<BigRational>, b: &QuadElement<BigRational>, v: &PlaceQ) -> i8 {
    let t = a.t;
    if a.is_rational() {
        return hilbert_qp(&a.re, &b.norm(), v);
    }
    if b.is_rational() {
        return hilbert_qp(&b.re, &a.norm(), v);
    }
    let (qa, xa) = split_gen(a);
    let (qb, xb) = split_gen(b);
    let mut s = hilbert_qp(&qa, &b.norm(), v) * hilbert_qp(&qb, &gen_norm(t, &xa), v);
    let m1 = -BigRational::one();
    s *= match (&xa, &xb) {
        (TameGen::Sqrt, TameGen::Sqrt) => hilbert_qp(&m1, &BigRational::from_integer((-t).into()), v),
        (TameGen::Sqrt, TameGen::OneMinus(c)) | (TameGen::OneMinus(c), TameGen::Sqrt) => {
            hilbert_qp(c, &gen_norm(t, &TameGen::OneMinus(c.clone())), v)
        }
        (TameGen::OneMinus(c), TameGen::OneMinus(d)) => {
            if c == d {
                hilbert_qp(&m1, &gen_norm(t, &xa), v)
            } else {
                let aa = d / (d - c);
                let bb = -c / (d - c);
                hilbert_qp(&aa, &gen_norm(t, &xb), v) * hilbert_qp(&bb, &gen_norm(t, &xa), v)
            }
        }
    };
    s
}

/// Hilbert symbol `(a, b)_w` at one place `w` of `Q(sqrt(t))`.
pub fn hilbert_local(a: &QuadElement<BigRational>, b: &QuadElement<BigRational>, w: &QuadPlace) -> Result<i8> {
    if a.is_zero() || b.is_zero() {
        return domain("Hilbert symbol of zero");
    }
    if a.t != b.t {
        return domain("elements of different quadratic fields");
    }
    match w {
        QuadPlace::Split { v: PlaceQ::Real, root_sign } => {
            let sa = real_sign(a, *root_sign);
            let sb = real_sign(b, *root_sign);
            Ok(if sa < 0 && sb < 0 { -1 } else { 1 })
        }
        QuadPlace::Split { v: PlaceQ::Finite(p), root_sign } => {
            let ea = embed_split(a, p, *root_sign)?.square_class_rep()?;
            let eb = embed_split(b, p, *root_sign)?.square_class_rep()?;
            Ok(hilbert_qp(&ea, &eb, &PlaceQ::Finite(p.clone())))
        }
        QuadPlace::Field { v: PlaceQ::Real } => Ok(1),
        QuadPlace::Field { v: PlaceQ::Finite(p) } => {
            if *p == BigInt::from(2) {
                Ok(quadratic_hilbert_sum(a, b, &PlaceQ::Finite(p.clone())))
            } else {
                tame_symbol(a, b, p)
            }
        }
    }
}

/// Additive version: `0` for `+1`, `1` for `-1`.
pub fn symbol_bit(s: i8) -> u8 {
    u8::from(s < 0)
}

/// Integer residue of a p-adic unit as `i64` when small enough.
pub fn unit_residue(x: &PadicNumber, digits: u32) -> Option<i64> {
    x.unit.mod_floor(&modulus(&x.p, digits.min(x.precision))).to_i64()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::biquadratic::normalize_field;
    use crate::scalar::rat;

    fn bi(v: &[i64]) -> Vec<BigInt> {
        v.iter().map(|&x| BigInt::from(x)).collect()
    }

    #[test]
    fn hensel_examples() {
        let f = bi(&[-17, 0, 1]);
        let two = BigInt::from(2);
        assert_eq!(hensel_root(&f, &BigInt::from(1), 1, &two, 20), Err(Error::Inconclusive));
        let r = hensel_root(&f, &BigInt::from(1), 3, &two, 20).unwrap();
        let m = BigInt::from(1u64 << 20);
        assert_eq!((&r * &r - BigInt::from(17)).mod_floor(&m), BigInt::zero());

        let g = bi(&[-13, 0, 1]);
        let p = BigInt::from(17);
        let r = hensel_root(&g, &BigInt::from(8), 1, &p, 10).unwrap();
        assert_eq!(r.mod_floor(&p), BigInt::from(8));
        assert_eq!((&r * &r - BigInt::from(13)).mod_floor(&modulus(&p, 10)), BigInt::zero());
    }

    #[test]
    fn padic_roundtrip_and_sqrt() {
        let p = BigInt::from(5);
        let x = PadicNumber::from_rational(&rat(-50, 3), &p, 10).unwrap();
        assert_eq!(x.valuation, 2);
        let y = x.mul(&x.inv());
        assert_eq!(y.unit, BigInt::one());
        let s = sqrt_rational(&rat(-4 * 25, 1), &p, 10).unwrap().unwrap();
        let s2 = s.mul(&s);
        assert_eq!(s2.valuation, 2);
        assert_eq!((s2.unit + BigInt::from(4)).mod_floor(&modulus(&p, s2.precision)), BigInt::zero());
        assert!(sqrt_rational(&rat(2, 1), &p, 10).unwrap().is_none());
        assert!(sqrt_rational(&rat(17, 1), &BigInt::from(2), 10).unwrap().is_some());
        assert!(sqrt_rational(&rat(5, 1), &BigInt::from(2), 10).unwrap().is_none());
    }

    #[test]
    fn splitting_examples() {
        let k = normalize_field(13, 17).unwrap();
        let d = splitting_type(&k, &PlaceQ::prime(13));
        assert_eq!((d.e, d.f, d.g), (2, 1, 2));
        let d = splitting_type(&k, &PlaceQ::prime(43));
        assert_eq!((d.e, d.f, d.g), (1, 1, 4));
        let d = splitting_type(&k, &PlaceQ::prime(5));
        assert_eq!((d.e, d.f, d.g), (1, 2, 2));
        let d = splitting_type(&normalize_field(-1, 2).unwrap(), &PlaceQ::prime(2));
        assert_eq!((d.e, d.f, d.g), (4, 1, 1));
    }

    fn qe(t: i64, a: i64, b: i64) -> QuadElement<BigRational> {
        QuadElement::new(t, rat(a, 1), rat(b, 1))
    }

    #[test]
    fn local_symbols_agree_with_reduction() {
        let elems = [(1, 2), (3, -1), (0, 1), (5, 0), (-7, 3), (13, 4), (2, 2)];
        for t in [13i64, 17, -7, 221, -1, 2] {
            for p in [2i64, 3, 5, 7, 13, 17, 29] {
                let v = PlaceQ::prime(p);
                for &(a1, a2) in &elems {
                    for &(b1, b2) in &elems {
                        let (a, b) = (qe(t, a1, a2), qe(t, b1, b2));
                        let total: i8 = places_above(t, &v)
                            .iter()
                            .map(|w| hilbert_local(&a, &b, w).unwrap())
                            .product();
                        assert_eq!(total, quadratic_hilbert_sum(&a, &b, &v), "t={t} p={p} a={a} b={b}");
                        if p != 2 && quad_type(t, &v) != LocalQuadType::Split {
                            assert_eq!(tame_symbol(&a, &b, &BigInt::from(p)).unwrap(), total);
                        }
                    }
                }
            }
            let total: i8 = places_above(t, &PlaceQ::Real)
                .iter()
                .map(|w| hilbert_local(&qe(t, 1, -1), &qe(t, -3, 1), w).unwrap())
                .product();
            assert_eq!(total, quadratic_hilbert_sum(&qe(t, 1, -1), &qe(t, -3, 1), &PlaceQ::Real));
        }
    }
}
