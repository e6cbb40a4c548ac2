//! Exact arithmetic in cyclotomic fields Q(xi_M).
//!
//! Elements are coordinate vectors in the power basis `1, xi, ..., xi^(phi-1)`
//! modulo the M-th cyclotomic polynomial.

pub mod fpoly;
pub mod modular;
mod sqrt;

use std::collections::HashMap;
use std::ops::{Add, Mul, Neg, Sub};
use std::sync::{Arc, Mutex, OnceLock};

use num_bigint::BigInt;
use num_complex::Complex64;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};
use serde_json::json;

use crate::arith::{factor_i64, gcd_i64, jacobi_i64, lcm_u64};
use crate::biquadratic::{BiquadraticField, KElement};
use crate::error::{domain, Error, Result};
use crate::scalar::Scalar;

use modular::{coprime, eval_primitive, FourierPrime};
pub use sqrt::{carmichael, is_square, sqrt_exact, unit_order, SqrtConfig, SqrtOutcome};

/// Cached data for one conductor.
#[derive(Debug)]
pub struct CycloData {
    pub m: u64,
    pub phi: usize,
    /// Coefficients of Phi_M, low degree first, monic.
    pub poly: Vec<i64>,
    pub poly_big: Vec<BigInt>,
}

fn mobius(n: u64) -> i64 {
    let f = factor_i64(n as i64).expect("small");
    if f.factors.values().any(|&e| e > 1) {
        0
    } else if f.factors.len().is_multiple_of(2) {
        1
    } else {
        -1
    }
}

/// Coefficients of the M-th cyclotomic polynomial.
pub fn cyclotomic_poly(m: u64) -> Vec<i64> {
    let divs: Vec<u64> = (1..=m).filter(|d| m.is_multiple_of(*d)).collect();
    let mut p: Vec<i128> = vec![1];
    for &d in &divs {
        if mobius(m / d) == 1 {
            let mut q = vec![0i128; p.len() + d as usize];
            for (i, &c) in p.iter().enumerate() {
                q[i + d as usize] += c;
                q[i] -= c;
            }
            p = q;
        }
    }
    for &d in &divs {
        if mobius(m / d) == -1 {
            // exact division by x^d - 1
            let d = d as usize;
            let n = p.len() - 1;
            let mut r = p.clone();
            let mut q = vec![0i128; n + 1 - d];
            for i in (d..=n).rev() {
                let c = r[i];
                q[i - d] = c;
                r[i - d] += c;
                r[i] = 0;
            }
            debug_assert!(r.iter().all(|&c| c == 0));
            p = q;
        }
    }
    p.into_iter().map(|c| c as i64).collect()
}

fn data_cache() -> &'static Mutex<HashMap<u64, Arc<CycloData>>> {
    static CACHE: OnceLock<Mutex<HashMap<u64, Arc<CycloData>>>> = OnceLock::new();
    CACHE.get_or_init(|| Mutex::new(HashMap::new()))
}

pub fn check_conductor(m: u64) -> Result<()> {
    if m == 0 || m % 4 == 2 {
        return domain(format!("conductor {m} must be positive and not 2 mod 4"));
    }
    Ok(())
}

pub fn cyclo_data(m: u64) -> Result<Arc<CycloData>> {
    check_conductor(m)?;
    let mut c = data_cache().lock().unwrap_or_else(|e| e.into_inner());
    Ok(c.entry(m)
        .or_insert_with(|| {
            let poly = cyclotomic_poly(m);
            let poly_big = poly.iter().map(|&x| BigInt::from(x)).collect();
            Arc::new(CycloData { m, phi: poly.len() - 1, poly, poly_big })
        })
        .clone())
}

pub fn euler_phi(m: u64) -> u64 {
    (1..=m).filter(|&k| coprime(k, m)).count() as u64
}

/// Ramanujan sum `c_m(k)`, the trace of `xi_m^k`.
pub fn ramanujan_sum(m: u64, k: u64) -> i64 {
    let g = gcd_i64(k as i64, m as i64) as u64;
    let g = if k == 0 { m } else { g };
    (1..=g).filter(|d| g % d == 0).map(|d| mobius(m / d) * d as i64).sum()
}

/// Element of Q(xi_M) in the power basis.
#[derive(Clone, PartialEq, Eq, Debug)]
pub struct CycloElement<T> {
    m: u64,
    coords: Vec<T>,
}

fn reduce_cyclic<T: Scalar>(mut v: Vec<T>, data: &CycloData) -> Vec<T> {
    let d = data.phi;
    for i in (d..v.len()).rev() {
        if v[i].is_zero() {
            continue;
        }
        let c = std::mem::replace(&mut v[i], T::zero());
        for j in 0..d {
            let pj = data.poly[j];
            if pj != 0 {
                v[i - d + j] = v[i - d + j].clone() - c.clone() * T::from_int(pj);
            }
        }
    }
    v.truncate(d);
    v
}

impl<T: Scalar> CycloElement<T> {
    pub fn zero(m: u64) -> Result<Self> {
        let d = cyclo_data(m)?;
        Ok(CycloElement { m, coords: vec![T::zero(); d.phi] })
    }

    pub fn from_base(m: u64, c: T) -> Result<Self> {
        let mut z = Self::zero(m)?;
        z.coords[0] = c;
        Ok(z)
    }

    pub fn one(m: u64) -> Result<Self> {
        Self::from_base(m, T::one())
    }

    /// `xi_M^k`.
    pub fn xi_pow(m: u64, k: i64) -> Result<Self> {
        let mut v = vec![T::zero(); m as usize];
        v[k.rem_euclid(m as i64) as usize] = T::one();
        Self::from_cyclic(m, v)
    }

    /// From coefficients of `1, xi, ..., xi^(M-1)` (no reduction assumed).
    pub fn from_cyclic(m: u64, v: Vec<T>) -> Result<Self> {
        let data = cyclo_data(m)?;
        let mut v = v;
        if v.len() < data.phi {
            v.resize(data.phi, T::zero());
        }
        Ok(CycloElement { m, coords: reduce_cyclic(v, &data) })
    }

    pub fn from_coords(m: u64, coords: Vec<T>) -> Result<Self> {
        let data = cyclo_data(m)?;
        if coords.len() != data.phi {
            return domain(format!("expected {} coordinates, got {}", data.phi, coords.len()));
        }
        Ok(CycloElement { m, coords })
    }

    pub fn conductor(&self) -> u64 {
        self.m
    }

    pub fn coords(&self) -> &[T] {
        &self.coords
    }

    pub fn degree(&self) -> usize {
        self.coords.len()
    }

    pub fn is_zero(&self) -> bool {
        self.coords.iter().all(|c| c.is_zero())
    }

    pub fn is_rational(&self) -> bool {
        self.coords.iter().skip(1).all(|c| c.is_zero())
    }

    pub fn scale(&self, c: &T) -> Self {
        CycloElement { m: self.m, coords: self.coords.iter().map(|x| x.clone() * c.clone()).collect() }
    }

    /// Product by schoolbook convolution modulo `x^M - 1`, then reduction.
    pub fn mul_generic(&self, o: &Self) -> Self {
        assert_eq!(self.m, o.m, "conductor mismatch");
        let m = self.m as usize;
        let mut acc = vec![T::zero(); m.max(1)];
        for (i, a) in self.coords.iter().enumerate() {
            if a.is_zero() {
                continue;
            }
            for (j, b) in o.coords.iter().enumerate() {
                if b.is_zero() {
                    continue;
                }
                let k = (i + j) % m.max(1);
                acc[k] = acc[k].clone() + a.clone() * b.clone();
            }
        }
        Self::from_cyclic(self.m, acc).expect("valid conductor")
    }

    /// Image under `xi -> xi^a`.
    pub fn galois_apply(&self, a: i64) -> Result<Self> {
        let m = self.m as i64;
        if gcd_i64(a, m) != 1 {
            return domain(format!("{a} is not a unit modulo {m}"));
        }
        let mut v = vec![T::zero(); self.m as usize];
        for (k, c) in self.coords.iter().enumerate() {
            if !c.is_zero() {
                let idx = (a.rem_euclid(m) * k as i64).rem_euclid(m) as usize;
                v[idx] = v[idx].clone() + c.clone();
            }
        }
        Self::from_cyclic(self.m, v)
    }

    /// The same element inside Q(xi_{m2}), `m | m2`.
    pub fn lift(&self, m2: u64) -> Result<Self> {
        if !m2.is_multiple_of(self.m) {
            return domain(format!("{} does not divide {m2}", self.m));
        }
        if m2 == self.m {
            return Ok(self.clone());
        }
        let s = (m2 / self.m) as usize;
        let mut v = vec![T::zero(); m2 as usize];
        for (k, c) in self.coords.iter().enumerate() {
            v[(k * s) % m2 as usize] = c.clone();
        }
        Self::from_cyclic(m2, v)
    }

    /// Value under `xi -> exp(2 pi i j / M)` in double precision.
    pub fn embed_numeric(&self, j: i64) -> Result<Complex64> {
        let m = self.m as i64;
        if gcd_i64(j, m) != 1 {
            return domain(format!("embedding index {j} is not a unit modulo {m}"));
        }
        let mut z = Complex64::new(0.0, 0.0);
        for (k, c) in self.coords.iter().enumerate() {
            if c.is_zero() {
                continue;
            }
            let e = (j.rem_euclid(m) * k as i64).rem_euclid(m) as f64;
            let ang = 2.0 * std::f64::consts::PI * e / m as f64;
            z += Complex64::from_polar(1.0, ang) * c.to_f64().unwrap_or(f64::NAN);
        }
        Ok(z)
    }

    /// Bound on the absolute error of [`Self::embed_numeric`].
    pub fn embed_error_bound(&self) -> f64 {
        let l1: f64 = self.coords.iter().map(|c| c.to_f64().unwrap_or(f64::INFINITY).abs()).sum();
        l1 * (self.coords.len() as f64 + 4.0) * f64::EPSILON * 4.0
    }

    pub fn map<U: Scalar>(&self, f: impl Fn(&T) -> U) -> CycloElement<U> {
        CycloElement { m: self.m, coords: self.coords.iter().map(f).collect() }
    }
}

impl<T: Scalar> Add for &CycloElement<T> {
    type Output = CycloElement<T>;
    fn add(self, o: &CycloElement<T>) -> CycloElement<T> {
        assert_eq!(self.m, o.m, "conductor mismatch");
        CycloElement {
            m: self.m,
            coords: self.coords.iter().zip(&o.coords).map(|(a, b)| a.clone() + b.clone()).collect(),
        }
    }
}

impl<T: Scalar> Sub for &CycloElement<T> {
    type Output = CycloElement<T>;
    fn sub(self, o: &CycloElement<T>) -> CycloElement<T> {
        assert_eq!(self.m, o.m, "conductor mismatch");
        CycloElement {
            m: self.m,
            coords: self.coords.iter().zip(&o.coords).map(|(a, b)| a.clone() - b.clone()).collect(),
        }
    }
}

impl<T: Scalar> Neg for &CycloElement<T> {
    type Output = CycloElement<T>;
    fn neg(self) -> CycloElement<T> {
        CycloElement { m: self.m, coords: self.coords.iter().map(|a| -a.clone()).collect() }
    }
}

impl Mul for &CycloElement<f64> {
    type Output = CycloElement<f64>;
    fn mul(self, o: &CycloElement<f64>) -> CycloElement<f64> {
        self.mul_generic(o)
    }
}

impl Mul for &CycloElement<BigRational> {
    type Output = CycloElement<BigRational>;
    fn mul(self, o: &CycloElement<BigRational>) -> CycloElement<BigRational> {
        assert_eq!(self.m, o.m, "conductor mismatch");
        let (a, da) = self.to_integer_coords();
        let (b, db) = o.to_integer_coords();
        let data = cyclo_data(self.m).expect("valid conductor");
        let prod = int_mul_mod_phi(&a, &b, &data);
        let den = da * db;
        CycloElement {
            m: self.m,
            coords: prod.into_iter().map(|x| BigRational::new(x, den.clone())).collect(),
        }
    }
}

/// Product of integer coordinate vectors in Z[xi_M].
pub(crate) fn int_mul_mod_phi(a: &[BigInt], b: &[BigInt], data: &CycloData) -> Vec<BigInt> {
    let m = data.m as usize;
    let mut acc = vec![BigInt::zero(); m.max(1)];
    for (i, x) in a.iter().enumerate() {
        if x.is_zero() {
            continue;
        }
        for (j, y) in b.iter().enumerate() {
            if y.is_zero() {
                continue;
            }
            acc[(i + j) % m.max(1)] += x * y;
        }
    }
    reduce_int(acc, data)
}

pub(crate) fn reduce_int(mut v: Vec<BigInt>, data: &CycloData) -> Vec<BigInt> {
    let d = data.phi;
    if v.len() < d {
        v.resize(d, BigInt::zero());
    }
    for i in (d..v.len()).rev() {
        if v[i].is_zero() {
            continue;
        }
        let c = std::mem::take(&mut v[i]);
        for j in 0..d {
            let pj = data.poly[j];
            if pj != 0 {
                v[i - d + j] -= &c * pj;
            }
        }
    }
    v.truncate(d);
    v
}

/// Exact cyclotomic numbers, the default element type.
pub type Cyclo = CycloElement<BigRational>;
/// Floating-point shadow, for numeric experiments.
pub type CycloF64 = CycloElement<f64>;

impl CycloElement<BigRational> {
    pub fn from_ints(m: u64, coords: &[i64]) -> Result<Self> {
        Self::from_cyclic(m, coords.iter().map(|&c| BigRational::from_integer(c.into())).collect())
    }

    pub fn from_int_coords(m: u64, coords: Vec<BigInt>, den: &BigInt) -> Result<Self> {
        Self::from_coords(m, coords.into_iter().map(|c| BigRational::new(c, den.clone())).collect())
    }

    /// `(A, d)` with `self = A / d`, `A` integral and `d > 0` minimal.
    pub fn to_integer_coords(&self) -> (Vec<BigInt>, BigInt) {
        let den = self.coords.iter().fold(BigInt::one(), |acc, c| acc.lcm(c.denom()));
        let a = self.coords.iter().map(|c| (c * BigRational::from_integer(den.clone())).to_integer()).collect();
        (a, den)
    }

    /// Coordinates reduced modulo a Fourier prime (`None` if a denominator vanishes).
    pub fn residues(&self, fp: &FourierPrime) -> Option<Vec<u64>> {
        self.coords.iter().map(|c| fp.reduce_rat(c)).collect()
    }

    /// Values at the primitive roots of the prime's conductor, which must be a
    /// multiple of `M`; indexed by `j` modulo that conductor.
    pub fn values_at(&self, fp: &FourierPrime) -> Option<Vec<u64>> {
        let res = self.residues(fp)?;
        let sub = fp.restrict(self.m);
        let vm = eval_primitive(&res, &sub);
        Some((0..fp.m).map(|j| vm[(j % self.m) as usize]).collect())
    }

    pub fn div(&self, other: &Self) -> Result<Self> {
        assert_eq!(self.m, other.m, "conductor mismatch");
        if other.is_zero() {
            return domain("division by zero");
        }
        if other.is_rational() {
            let c = BigRational::one() / &other.coords[0];
            return Ok(self.scale(&c));
        }
        let data = cyclo_data(self.m)?;
        let m = self.m;
        let out = modular::reconstruct(
            m,
            m,
            &data.poly_big,
            |fp| {
                let (Some(a), Some(b)) = (self.values_at(fp), other.values_at(fp)) else {
                    return Ok(None);
                };
                let mut v = vec![0u64; m as usize];
                for j in 0..m as usize {
                    if m > 1 && !coprime(j as u64, m) {
                        continue;
                    }
                    if b[j] == 0 {
                        return Ok(None);
                    }
                    v[j] = modular::mulmod(a[j], modular::invmod(b[j], fp.ell), fp.ell);
                }
                Ok(Some(v))
            },
            |cand| {
                let c = CycloElement { m, coords: cand.to_vec() };
                &c * other == *self
            },
            400,
        )?;
        match out {
            modular::Reconstructed::Coords(c) => Ok(CycloElement { m, coords: c }),
            modular::Reconstructed::NotMember => unreachable!("same conductor"),
        }
    }

    pub fn inv(&self) -> Result<Self> {
        Self::one(self.m)?.div(self)
    }

    pub fn pow(&self, e: i64) -> Result<Self> {
        let base = if e < 0 { self.inv()? } else { self.clone() };
        let mut r = Self::one(self.m)?;
        let mut b = base;
        let mut k = e.unsigned_abs();
        while k > 0 {
            if k & 1 == 1 {
                r = &r * &b;
            }
            k >>= 1;
            if k > 0 {
                b = &b * &b;
            }
        }
        Ok(r)
    }

    /// Absolute trace to Q.
    pub fn trace(&self) -> BigRational {
        self.coords
            .iter()
            .enumerate()
            .filter(|(_, c)| !c.is_zero())
            .map(|(k, c)| c * BigRational::from_integer(ramanujan_sum(self.m, k as u64).into()))
            .fold(BigRational::zero(), |a, b| a + b)
    }

    /// Absolute norm to Q, exact (multi-modular with a Hadamard-type bound).
    pub fn norm(&self) -> BigRational {
        let (a, den) = self.to_integer_coords();
        let phi = self.coords.len() as u64;
        if self.is_zero() {
            return BigRational::zero();
        }
        let l1: BigInt = a.iter().map(|x| x.abs()).sum();
        let bits = l1.bits() * phi + 2;
        let mut crt = modular::Crt::new(1);
        let data = cyclo_data(self.m).expect("valid");
        let ai = CycloElement { m: self.m, coords: a.iter().map(|x| BigRational::from_integer(x.clone())).collect() };
        for fp in modular::fourier_primes(self.m) {
            if crt.modulus.bits() > bits {
                break;
            }
            let vals = ai.values_at(&fp).expect("integral");
            let mut p = 1u64;
            for j in 0..self.m {
                if self.m == 1 || coprime(j, self.m) {
                    p = modular::mulmod(p, vals[j as usize], fp.ell);
                }
            }
            crt.add(&[p], fp.ell);
        }
        let _ = data;
        let n = crt.symmetric().remove(0);
        BigRational::new(n, num_traits::pow(den, phi as usize))
    }

    /// The element as a member of Q(xi_{m_small}), if it lies there.
    pub fn descend(&self, m_small: u64) -> Result<Option<Self>> {
        check_conductor(m_small)?;
        if !self.m.is_multiple_of(m_small) {
            return domain(format!("{m_small} does not divide {}", self.m));
        }
        if m_small == self.m {
            return Ok(Some(self.clone()));
        }
        let small = cyclo_data(m_small)?;
        let out = modular::reconstruct(
            m_small,
            self.m,
            &small.poly_big,
            |fp| Ok(self.values_at(fp)),
            |cand| {
                CycloElement { m: m_small, coords: cand.to_vec() }.lift(self.m).map(|x| x == *self).unwrap_or(false)
            },
            400,
        )?;
        Ok(match out {
            modular::Reconstructed::Coords(c) => Some(CycloElement { m: m_small, coords: c }),
            modular::Reconstructed::NotMember => None,
        })
    }

    /// Smallest conductor `d | M` (with `d` not 2 mod 4) whose field contains the element.
    pub fn minimal_conductor(&self) -> Result<u64> {
        let mut divs: Vec<u64> = (1..=self.m).filter(|d| self.m.is_multiple_of(*d) && d % 4 != 2).collect();
        divs.sort();
        for d in divs {
            if self.descend(d)?.is_some() {
                return Ok(d);
            }
        }
        Ok(self.m)
    }

    pub fn is_real(&self) -> bool {
        self.galois_apply(-1).map(|c| c == *self).unwrap_or(false)
    }

    /// Canonical JSON: conductor and coordinates as strings.
    pub fn to_json(&self) -> serde_json::Value {
        json!({
            "conductor": self.m,
            "coords": self.coords.iter().map(|c| c.to_string()).collect::<Vec<_>>(),
        })
    }

    pub fn from_json(v: &serde_json::Value) -> Result<Self> {
        let m = v["conductor"].as_u64().ok_or_else(|| Error::Domain("missing conductor".into()))?;
        let coords = v["coords"]
            .as_array()
            .ok_or_else(|| Error::Domain("missing coords".into()))?
            .iter()
            .map(|c| {
                c.as_str()
                    .and_then(|s| s.parse::<BigRational>().ok())
                    .ok_or_else(|| Error::Domain(format!("bad coordinate {c}")))
            })
            .collect::<Result<Vec<_>>>()?;
        Self::from_coords(m, coords)
    }
}

/// Conductor of Q(sqrt(d)) for squarefree `d`.
pub fn quadratic_conductor(d: i64) -> u64 {
    if d == 1 {
        1
    } else if d.rem_euclid(4) == 1 {
        d.unsigned_abs()
    } else {
        4 * d.unsigned_abs()
    }
}

fn cyclic_mul(a: &[BigInt], b: &[BigInt], m: usize) -> Vec<BigInt> {
    let mut out = vec![BigInt::zero(); m];
    for (i, x) in a.iter().enumerate() {
        if x.is_zero() {
            continue;
        }
        for (j, y) in b.iter().enumerate() {
            if !y.is_zero() {
                out[(i + j) % m] += x * y;
            }
        }
    }
    out
}

/// `(prime Gauss sums, power of sqrt(-1), power of sqrt 2)` whose product is `+-sqrt(d)`.
fn sqrt_factors(d: i64) -> (Vec<i64>, u32, u32) {
    let f = factor_i64(d).expect("small");
    let mut odd = Vec::new();
    let mut ipow: i32 = if d < 0 { 1 } else { 0 };
    let mut two = 0;
    for (p, _) in f.factors {
        let p = p.to_i64().unwrap();
        if p == 2 {
            two = 1;
        } else {
            odd.push(p);
            if p % 4 == 3 {
                ipow -= 1;
            }
        }
    }
    (odd, ipow.rem_euclid(2) as u32, two)
}

/// Exact `sqrt(d)` inside Q(xi_M), the branch with positive real part
/// (or positive imaginary part when `d < 0`) under the first embedding.
pub fn gauss_sum_sqrt(d: i64, m: u64) -> Result<Cyclo> {
    check_conductor(m)?;
    if d == 0 {
        return domain("sqrt(0) requested");
    }
    let sf = crate::arith::squarefree_part(d);
    if sf != d {
        return domain(format!("{d} is not squarefree"));
    }
    if d == 1 {
        return Cyclo::one(m);
    }
    let cond = quadratic_conductor(d);
    if !m.is_multiple_of(cond) {
        return Err(Error::AmbientTooSmall { ambient: m, needed: cond });
    }
    let mu = m as usize;
    let mut acc = vec![BigInt::zero(); mu];
    acc[0] = BigInt::one();
    let (odd, ipow, two) = sqrt_factors(d);
    for p in odd {
        let mut g = vec![BigInt::zero(); mu];
        let step = mu / p as usize;
        for t in 1..p {
            g[(t as usize * step) % mu] = BigInt::from(jacobi_i64(t, p));
        }
        acc = cyclic_mul(&acc, &g, mu);
    }
    if ipow == 1 {
        let mut g = vec![BigInt::zero(); mu];
        g[mu / 4] = BigInt::one();
        acc = cyclic_mul(&acc, &g, mu);
    }
    if two == 1 {
        let mut g = vec![BigInt::zero(); mu];
        g[mu / 8] = BigInt::one();
        g[7 * mu / 8] = BigInt::one();
        acc = cyclic_mul(&acc, &g, mu);
    }
    let data = cyclo_data(m)?;
    let red = reduce_int(acc, &data);
    let mut g = Cyclo::from_int_coords(m, red, &BigInt::one())?;
    let z = g.embed_numeric(1)?;
    let flip = if d > 0 { z.re < 0.0 } else { z.im < 0.0 };
    if flip {
        g = -&g;
    }
    Ok(g)
}

/// Quadratic character of Q(sqrt(t)): `sigma_a(sqrt t) = chi(a) sqrt t`.
pub fn quad_char(t: i64, a: i64) -> i8 {
    if t == 1 {
        return 1;
    }
    let (odd, ipow, two) = sqrt_factors(t);
    let mut s: i8 = 1;
    for p in odd {
        s *= jacobi_i64(a.rem_euclid(p), p);
    }
    if ipow == 1 && a.rem_euclid(4) == 3 {
        s = -s;
    }
    if two == 1 && matches!(a.rem_euclid(8), 3 | 5) {
        s = -s;
    }
    s
}

/// Conductor of a biquadratic field.
pub fn biquadratic_conductor(k: &BiquadraticField) -> u64 {
    lcm_u64(quadratic_conductor(k.a()), quadratic_conductor(k.b()))
}

/// The roots `sqrt a, sqrt b, sqrt c = sqrt a sqrt b / d1` of `K` inside Q(xi_M).
pub fn biquadratic_roots(k: &BiquadraticField, m: u64) -> Result<[Cyclo; 3]> {
    let ra = gauss_sum_sqrt(k.a(), m)?;
    let rb = gauss_sum_sqrt(k.b(), m)?;
    let rc = (&ra * &rb).scale(&BigRational::new(1.into(), k.d1.into()));
    Ok([ra, rb, rc])
}

/// Image of a biquadratic element in Q(xi_M).
pub fn from_kelement(x: &KElement<BigRational>, m: u64) -> Result<Cyclo> {
    let [ra, rb, rc] = biquadratic_roots(&x.field, m)?;
    let mut acc = Cyclo::from_base(m, x.x[0].clone())?;
    acc = &acc + &ra.scale(&x.x[1]);
    acc = &acc + &rb.scale(&x.x[2]);
    acc = &acc + &rc.scale(&x.x[3]);
    Ok(acc)
}

/// Coordinates of `alpha` in `{1, sqrt a, sqrt b, sqrt c}` when `alpha` lies in `K`.
pub fn subfield_coords(alpha: &Cyclo, k: &BiquadraticField) -> Result<Option<[BigRational; 4]>> {
    let m = alpha.conductor();
    let need = biquadratic_conductor(k);
    if !m.is_multiple_of(need) {
        return Err(Error::AmbientTooSmall { ambient: m, needed: need });
    }
    let [ra, rb, rc] = biquadratic_roots(k, m)?;
    let phi = BigRational::from_integer(alpha.degree().into());
    let t = |x: &Cyclo, g: i64| (alpha * x).trace() / (&phi * BigRational::from_integer(g.into()));
    let x = [alpha.trace() / &phi, t(&ra, k.a()), t(&rb, k.b()), t(&rc, k.c())];
    let back = from_kelement(&KElement::new(*k, x.clone()), m)?;
    Ok(if back == *alpha { Some(x) } else { None })
}

impl Cyclo {
    /// Complex conjugate.
    pub fn conj(&self) -> Self {
        self.galois_apply(-1).expect("-1 is a unit")
    }
}

pub(crate) fn big_to_u64_mod(x: &BigInt, l: u64) -> u64 {
    x.mod_floor(&BigInt::from(l)).to_u64().unwrap()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::biquadratic::normalize_field;

    #[test]
    fn cyclotomic_polynomials() {
        assert_eq!(cyclotomic_poly(1), vec![-1, 1]);
        assert_eq!(cyclotomic_poly(4), vec![1, 0, 1]);
        assert_eq!(cyclotomic_poly(15), vec![1, -1, 0, 1, -1, 1, 0, -1, 1]);
        assert_eq!(cyclo_data(371).unwrap().phi, 312);
        assert_eq!(cyclo_data(221).unwrap().phi, 192);
        assert!(cyclo_data(6).is_err());
    }

    #[test]
    fn galois_action_on_monomials() {
        let x = Cyclo::xi_pow(15, 2).unwrap();
        assert_eq!(x.galois_apply(7).unwrap(), Cyclo::xi_pow(15, 14).unwrap());
        assert_eq!(x.galois_apply(1).unwrap(), x);
        assert!(x.galois_apply(3).is_err());
    }

    #[test]
    fn embeddings() {
        let i = Cyclo::xi_pow(4, 1).unwrap();
        let z = i.embed_numeric(1).unwrap();
        assert!((z - Complex64::new(0.0, 1.0)).norm() < 1e-12);
        let one = Cyclo::one(5).unwrap();
        let a = &one - &Cyclo::xi_pow(5, 1).unwrap();
        let z = a.embed_numeric(1).unwrap();
        assert!((z.norm() - 2.0 * (std::f64::consts::PI / 5.0).sin()).abs() < 1e-12);
    }

    #[test]
    fn gauss_sums_square_to_d() {
        for d in [17i64, -7, 13 * 17, 2, -1, -2, 3, 6, -3, 5] {
            let m = quadratic_conductor(d);
            let g = gauss_sum_sqrt(d, m).unwrap();
            assert_eq!(&g * &g, Cyclo::from_base(m, BigRational::from_integer(d.into())).unwrap(), "d={d}");
            let z = g.embed_numeric(1).unwrap();
            if d > 0 {
                assert!((z.re - (d as f64).sqrt()).abs() < 1e-9);
            } else {
                assert!((z.im - (-d as f64).sqrt()).abs() < 1e-9);
            }
        }
        assert_eq!(gauss_sum_sqrt(1, 7).unwrap(), Cyclo::one(7).unwrap());
        assert!(matches!(gauss_sum_sqrt(3, 3), Err(Error::AmbientTooSmall { .. })));
    }

    #[test]
    fn quad_char_matches_galois_action() {
        for t in [-1i64, 2, -2, 3, 5, -7, 13, 221, -884 / 4, 6] {
            let m = quadratic_conductor(t);
            let g = gauss_sum_sqrt(t, m).unwrap();
            for a in 1..m as i64 {
                if gcd_i64(a, m as i64) != 1 {
                    continue;
                }
                let ga = g.galois_apply(a).unwrap();
                let expect = if ga == g { 1 } else { -1 };
                assert_eq!(quad_char(t, a), expect, "t={t} a={a}");
            }
        }
    }

    #[test]
    fn division_and_norm() {
        let a = Cyclo::from_ints(21, &[1, 2, 0, -1, 3]).unwrap();
        let b = Cyclo::from_ints(21, &[2, 0, 1, 1]).unwrap();
        let q = a.div(&b).unwrap();
        assert_eq!(&q * &b, a);
        let one = Cyclo::one(5).unwrap();
        let x = &one - &Cyclo::xi_pow(5, 1).unwrap();
        assert_eq!(x.norm(), BigRational::from_integer(5.into()));
        assert_eq!((&a * &b).norm(), a.norm() * b.norm());
    }

    #[test]
    fn descend_and_subfield() {
        let g = gauss_sum_sqrt(13, 13).unwrap();
        let up = g.lift(221).unwrap();
        assert_eq!(up.descend(13).unwrap(), Some(g.clone()));
        assert_eq!(Cyclo::xi_pow(221, 1).unwrap().descend(13).unwrap(), None);
        let k = normalize_field(13, 17).unwrap();
        let x = gauss_sum_sqrt(221, 221).unwrap().scale(&BigRational::new(3.into(), 2.into()));
        let c = subfield_coords(&x, &k).unwrap().unwrap();
        assert_eq!(c[3], BigRational::new(3.into(), 2.into()));
        assert_eq!(subfield_coords(&Cyclo::xi_pow(221, 1).unwrap(), &k).unwrap(), None);
        let seven = Cyclo::from_ints(221, &[7]).unwrap();
        let c = subfield_coords(&seven, &k).unwrap().unwrap();
        assert_eq!(c[0], BigRational::from_integer(7.into()));
        let ke = KElement::<BigRational>::from_ints(k, [1, -2, 3, 5]);
        let e = from_kelement(&ke, 221).unwrap();
        assert_eq!(subfield_coords(&e, &k).unwrap().unwrap(), ke.x);
    }
}
