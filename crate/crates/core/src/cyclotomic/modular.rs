//! Multi-modular evaluation and interpolation for cyclotomic fields.
//!
//! An element of Q(xi_M) is determined by its values at the primitive M-th
//! roots of unity modulo primes `l = 1 mod M`. Products and quotients are
//! computed pointwise, interpolated back to the power basis, and lifted to
//! Q by CRT plus rational reconstruction.

use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};

use std::collections::HashMap;
use std::sync::{Mutex, OnceLock};

use crate::arith::gcd_i64;
use crate::error::{Error, Result};

pub(crate) fn mulmod(a: u64, b: u64, m: u64) -> u64 {
    ((a as u128 * b as u128) % m as u128) as u64
}

pub(crate) fn powmod(mut a: u64, mut e: u64, m: u64) -> u64 {
    let mut r = 1 % m;
    a %= m;
    while e > 0 {
        if e & 1 == 1 {
            r = mulmod(r, a, m);
        }
        a = mulmod(a, a, m);
        e >>= 1;
    }
    r
}

/// Inverse modulo a prime.
pub(crate) fn invmod(a: u64, p: u64) -> u64 {
    powmod(a, p - 2, p)
}

pub(crate) fn prime_factors_u64(mut n: u64) -> Vec<u64> {
    let mut out = Vec::new();
    let mut d = 2;
    while d * d <= n {
        if n.is_multiple_of(d) {
            out.push(d);
            while n.is_multiple_of(d) {
                n /= d;
            }
        }
        d += 1;
    }
    if n > 1 {
        out.push(n);
    }
    out
}

pub(crate) fn coprime(a: u64, m: u64) -> bool {
    gcd_i64(a as i64, m as i64) == 1
}

/// A prime `l = 1 mod m` with a primitive m-th root of unity `omega`.
#[derive(Clone, Debug)]
pub struct FourierPrime {
    pub ell: u64,
    pub m: u64,
    pub omega: u64,
}

impl FourierPrime {
    /// The same prime viewed at a divisor `d` of `m`.
    pub fn restrict(&self, d: u64) -> FourierPrime {
        FourierPrime { ell: self.ell, m: d, omega: powmod(self.omega, self.m / d, self.ell) }
    }

    pub fn powers(&self) -> Vec<u64> {
        let mut pw = Vec::with_capacity(self.m as usize);
        let mut w = 1u64;
        for _ in 0..self.m {
            pw.push(w);
            w = mulmod(w, self.omega, self.ell);
        }
        pw
    }

    pub fn reduce(&self, x: &BigInt) -> u64 {
        x.mod_floor(&BigInt::from(self.ell)).to_u64().expect("residue fits")
    }

    pub fn reduce_rat(&self, q: &BigRational) -> Option<u64> {
        let d = self.reduce(q.denom());
        if d == 0 {
            return None;
        }
        Some(mulmod(self.reduce(q.numer()), invmod(d, self.ell), self.ell))
    }
}

/// Deterministic Miller-Rabin for 64-bit integers.
pub fn is_prime_word(n: u64) -> bool {
    if n < 2 {
        return false;
    }
    const BASES: [u64; 12] = [2, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37];
    for &p in &BASES {
        if n.is_multiple_of(p) {
            return n == p;
        }
    }
    let s = (n - 1).trailing_zeros();
    let d = (n - 1) >> s;
    'outer: for &a in &BASES {
        let mut x = powmod(a, d, n);
        if x == 1 || x == n - 1 {
            continue;
        }
        for _ in 1..s {
            x = mulmod(x, x, n);
            if x == n - 1 {
                continue 'outer;
            }
        }
        return false;
    }
    true
}

fn next_fourier_prime(m: u64, k: &mut u64, factors: &[u64]) -> Option<FourierPrime> {
    while *k > 1 {
        let ell = *k * m + 1;
        *k -= 1;
        if !is_prime_word(ell) {
            continue;
        }
        let e = (ell - 1) / m;
        for g in 2..ell {
            let w = powmod(g, e, ell);
            if factors.iter().all(|q| powmod(w, m / q, ell) != 1) {
                return Some(FourierPrime { ell, m, omega: w });
            }
        }
    }
    None
}

struct PrimeList {
    k: u64,
    factors: Vec<u64>,
    primes: Vec<FourierPrime>,
}

fn prime_cache() -> &'static Mutex<HashMap<u64, PrimeList>> {
    static CACHE: OnceLock<Mutex<HashMap<u64, PrimeList>>> = OnceLock::new();
    CACHE.get_or_init(|| Mutex::new(HashMap::new()))
}

/// The `i`-th Fourier prime for conductor `m` (descending from 2^62, cached).
pub fn fourier_prime(m: u64, i: usize) -> Option<FourierPrime> {
    let mut cache = prime_cache().lock().unwrap_or_else(|e| e.into_inner());
    let list = cache.entry(m).or_insert_with(|| PrimeList {
        k: (1u64 << 62) / m,
        factors: prime_factors_u64(m),
        primes: Vec::new(),
    });
    while list.primes.len() <= i {
        let fp = next_fourier_prime(m, &mut list.k, &list.factors)?;
        list.primes.push(fp);
    }
    Some(list.primes[i].clone())
}

/// A Fourier prime for `m` just below `2^bits`, outside the cached sequence
/// (used for independent spot checks).
pub fn fourier_prime_below(m: u64, bits: u32) -> Option<FourierPrime> {
    let mut k = (1u64 << bits) / m;
    next_fourier_prime(m, &mut k, &prime_factors_u64(m))
}

/// Deterministic sequence of Fourier primes for conductor `m`.
pub struct FourierPrimes {
    m: u64,
    i: usize,
}

pub fn fourier_primes(m: u64) -> FourierPrimes {
    FourierPrimes { m, i: 0 }
}

impl Iterator for FourierPrimes {
    type Item = FourierPrime;
    fn next(&mut self) -> Option<FourierPrime> {
        let fp = fourier_prime(self.m, self.i)?;
        self.i += 1;
        Some(fp)
    }
}

/// Values of `sum c_k x^k` at `omega^j` for all `j` coprime to `m`
/// (other slots are zero).
pub fn eval_primitive(coords: &[u64], fp: &FourierPrime) -> Vec<u64> {
    let m = fp.m;
    if m == 1 {
        return vec![coords.iter().fold(0, |a, &c| (a + c) % fp.ell)];
    }
    let pw = fp.powers();
    let mut out = vec![0u64; m as usize];
    for j in 1..m {
        if !coprime(j, m) {
            continue;
        }
        let mut acc: u128 = 0;
        let mut idx = 0u64;
        for &c in coords {
            if c != 0 {
                acc = (acc + c as u128 * pw[idx as usize] as u128) % fp.ell as u128;
            }
            idx += j;
            if idx >= m {
                idx -= m;
            }
        }
        out[j as usize] = acc as u64;
    }
    out
}

/// Reduce a polynomial modulo the monic `phi` over F_l.
pub fn reduce_mod_phi(mut v: Vec<u64>, phi: &[u64], ell: u64) -> Vec<u64> {
    let d = phi.len() - 1;
    for i in (d..v.len()).rev() {
        let c = v[i];
        if c == 0 {
            continue;
        }
        for j in 0..d {
            let t = mulmod(c, phi[j], ell);
            let slot = &mut v[i - d + j];
            *slot = (*slot + ell - t) % ell;
        }
        v[i] = 0;
    }
    v.truncate(d);
    v.resize(d, 0);
    v
}

/// Inverse of [`eval_primitive`]: the unique polynomial of degree below
/// `phi(m)` with the given values at the primitive roots.
pub fn interpolate(values: &[u64], fp: &FourierPrime, phi: &[u64]) -> Vec<u64> {
    let m = fp.m;
    if m == 1 {
        return vec![values[0]];
    }
    let pw = fp.powers();
    let minv = invmod(m % fp.ell, fp.ell);
    let mut g = vec![0u64; m as usize];
    for (k, slot) in g.iter_mut().enumerate() {
        let mut acc: u128 = 0;
        for j in 1..m {
            let v = values[j as usize];
            if v == 0 || !coprime(j, m) {
                continue;
            }
            let e = (m - (j * k as u64) % m) % m;
            acc = (acc + v as u128 * pw[e as usize] as u128) % fp.ell as u128;
        }
        *slot = mulmod(acc as u64, minv, fp.ell);
    }
    reduce_mod_phi(g, phi, fp.ell)
}

/// Incremental CRT over word-size primes.
#[derive(Clone, Debug)]
pub struct Crt {
    pub modulus: BigInt,
    pub res: Vec<BigInt>,
}

impl Crt {
    pub fn new(len: usize) -> Self {
        Crt { modulus: BigInt::one(), res: vec![BigInt::zero(); len] }
    }

    pub fn add(&mut self, r: &[u64], ell: u64) {
        let el = BigInt::from(ell);
        let minv = invmod((&self.modulus % &el).to_u64().unwrap(), ell);
        for (x, &ri) in self.res.iter_mut().zip(r) {
            let xm = (&*x % &el).to_u64().unwrap();
            let t = mulmod((ri + ell - xm) % ell, minv, ell);
            *x += &self.modulus * BigInt::from(t);
        }
        self.modulus *= el;
    }

    pub fn symmetric(&self) -> Vec<BigInt> {
        let half = &self.modulus >> 1;
        self.res.iter().map(|x| if *x > half { x - &self.modulus } else { x.clone() }).collect()
    }

    /// Rational reconstruction of every residue with numerator and
    /// denominator bounded by `sqrt(modulus / 2)`.
    pub fn rational(&self) -> Option<Vec<BigRational>> {
        let bound = num_integer::Roots::sqrt(&(&self.modulus >> 1u32));
        let mut den = BigInt::one();
        let half = &self.modulus >> 1;
        let mut out = Vec::with_capacity(self.res.len());
        for r in &self.res {
            let mut x = (r * &den).mod_floor(&self.modulus);
            if x > half {
                x -= &self.modulus;
            }
            if x.abs() <= bound {
                out.push(BigRational::new(x, den.clone()));
                continue;
            }
            let (n, d) = rational_reconstruct(r, &self.modulus, &bound)?;
            den = den.lcm(&d);
            if den > bound {
                return None;
            }
            out.push(BigRational::new(n, d));
        }
        Some(out)
    }
}

/// `n/d = r mod m` with `|n|, d <= bound`, if it exists.
pub fn rational_reconstruct(r: &BigInt, m: &BigInt, bound: &BigInt) -> Option<(BigInt, BigInt)> {
    let (mut r0, mut r1) = (m.clone(), r.mod_floor(m));
    let (mut t0, mut t1) = (BigInt::zero(), BigInt::one());
    while r1 > *bound {
        let q = &r0 / &r1;
        let r2 = &r0 - &q * &r1;
        let t2 = &t0 - &q * &t1;
        r0 = std::mem::replace(&mut r1, r2);
        t0 = std::mem::replace(&mut t1, t2);
    }
    if t1.is_zero() || t1.abs() > *bound {
        return None;
    }
    if !r1.gcd(&t1).is_one() {
        return None;
    }
    if t1.is_negative() {
        Some((-r1, -t1))
    } else {
        Some((r1, t1))
    }
}

/// Outcome of a reconstruction run.
pub enum Reconstructed {
    Coords(Vec<BigRational>),
    /// The values were not invariant under `j -> j + target` (not in the subfield).
    NotMember,
}

/// Drive evaluation at ambient conductor `ambient`, descend the values to the
/// subfield of conductor `target`, interpolate, and reconstruct until two
/// consecutive prime counts agree and `verify` accepts.
///
/// `values` returns `None` for primes that must be skipped (a zero divisor).
pub fn reconstruct<F, V>(
    target: u64,
    ambient: u64,
    phi_target: &[BigInt],
    mut values: F,
    mut verify: V,
    max_primes: usize,
) -> Result<Reconstructed>
where
    F: FnMut(&FourierPrime) -> Result<Option<Vec<u64>>>,
    V: FnMut(&[BigRational]) -> bool,
{
    let d = phi_target.len() - 1;
    let mut crt = Crt::new(d);
    let mut last: Option<Vec<BigRational>> = None;
    let mut used = 0usize;
    for fp in fourier_primes(ambient) {
        if used >= max_primes {
            break;
        }
        let Some(vals) = values(&fp)? else { continue };
        used += 1;
        let fpt = fp.restrict(target);
        let mut tv = vec![0u64; target as usize];
        let mut seen = vec![false; target as usize];
        for j in 0..ambient {
            if !coprime(j, ambient) && ambient > 1 {
                continue;
            }
            let jt = (j % target) as usize;
            if seen[jt] {
                if tv[jt] != vals[j as usize] {
                    return Ok(Reconstructed::NotMember);
                }
            } else {
                seen[jt] = true;
                tv[jt] = vals[j as usize];
            }
        }
        let phi_mod: Vec<u64> = phi_target.iter().map(|c| fpt.reduce(c)).collect();
        let coords = interpolate(&tv, &fpt, &phi_mod);
        crt.add(&coords, fp.ell);
        if let Some(cand) = crt.rational() {
            if last.as_ref() == Some(&cand) && verify(&cand) {
                return Ok(Reconstructed::Coords(cand));
            }
            last = Some(cand);
        }
    }
    Err(Error::PrecisionExhausted(format!(
        "rational reconstruction unstable after {used} primes"
    )))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn fourier_prime_has_primitive_root() {
        let fp = fourier_primes(371).next().unwrap();
        assert_eq!(fp.ell % 371, 1);
        assert_eq!(powmod(fp.omega, 371, fp.ell), 1);
        assert_ne!(powmod(fp.omega, 53, fp.ell), 1);
        assert_ne!(powmod(fp.omega, 7, fp.ell), 1);
    }

    #[test]
    fn eval_interpolate_roundtrip() {
        // Phi_15 = x^8 - x^7 + x^5 - x^4 + x^3 - x + 1
        let phi: Vec<i64> = vec![1, -1, 0, 1, -1, 1, 0, -1, 1];
        let fp = fourier_primes(15).next().unwrap();
        let phim: Vec<u64> = phi.iter().map(|&c| fp.reduce(&BigInt::from(c))).collect();
        let coords: Vec<u64> = (0..8).map(|k| (k * 7 + 3) % fp.ell).collect();
        let v = eval_primitive(&coords, &fp);
        assert_eq!(interpolate(&v, &fp, &phim), coords);
    }

    #[test]
    fn reconstruct_fraction() {
        let m = BigInt::from(1_000_000_007u64) * BigInt::from(998_244_353u64);
        let inv7 = BigInt::from(7).extended_gcd(&m).x.mod_floor(&m);
        let r = (BigInt::from(-22) * inv7).mod_floor(&m);
        let bound = num_integer::Roots::sqrt(&(&m >> 1u32));
        assert_eq!(rational_reconstruct(&r, &m, &bound), Some((BigInt::from(-22), BigInt::from(7))));
    }
}
