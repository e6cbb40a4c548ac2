//! Integer and rational arithmetic: factorization, residue symbols and the
//! Hilbert symbol over Q_p and R.

use std::collections::BTreeMap;
use std::fmt;
use std::sync::OnceLock;

use num_bigint::{BigInt, Sign};
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};
use serde::{Deserialize, Serialize};

use crate::error::{domain, Error, Result};

/// Signed prime factorization of a nonzero integer.
#[derive(Debug, Clone, PartialEq, Eq, Default)]
pub struct Factorization {
    pub sign: i8,
    pub factors: BTreeMap<BigInt, u32>,
}

impl Factorization {
    pub fn one() -> Self {
        Factorization { sign: 1, factors: BTreeMap::new() }
    }

    pub fn value(&self) -> BigInt {
        let mut v = BigInt::from(self.sign);
        for (p, e) in &self.factors {
            v *= p.pow(*e);
        }
        v
    }

    pub fn exponent(&self, p: &BigInt) -> u32 {
        self.factors.get(p).copied().unwrap_or(0)
    }

    pub fn primes(&self) -> impl Iterator<Item = &BigInt> {
        self.factors.keys()
    }

    fn push(&mut self, p: BigInt, e: u32) {
        *self.factors.entry(p).or_insert(0) += e;
    }
}

impl fmt::Display for Factorization {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.sign < 0 {
            write!(f, "-")?;
        }
        if self.factors.is_empty() {
            return write!(f, "1");
        }
        let parts: Vec<String> = self
            .factors
            .iter()
            .map(|(p, e)| if *e == 1 { p.to_string() } else { format!("{p}^{e}") })
            .collect();
        write!(f, "{}", parts.join("*"))
    }
}

/// Effort limits for [`factor_int`].
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct FactorConfig {
    pub trial_bound: u64,
    pub rho_iterations: u64,
    /// Elliptic curves tried after rho gives up.
    #[serde(default = "default_ecm_curves")]
    pub ecm_curves: u64,
}

fn default_ecm_curves() -> u64 {
    1115
}

impl Default for FactorConfig {
    fn default() -> Self {
        FactorConfig { trial_bound: 1_000_000, rho_iterations: 200_000, ecm_curves: default_ecm_curves() }
    }
}

/// Primes up to `bound`, by the sieve of Eratosthenes.
pub fn primes_up_to(bound: u64) -> Vec<u64> {
    let n = bound as usize;
    if n < 2 {
        return Vec::new();
    }
    let mut composite = vec![false; n + 1];
    let mut out = Vec::new();
    for i in 2..=n {
        if !composite[i] {
            out.push(i as u64);
            let mut j = i * i;
            while j <= n {
                composite[j] = true;
                j += i;
            }
        }
    }
    out
}

fn small_primes(bound: u64) -> &'static [u64] {
    static CACHE: OnceLock<Vec<u64>> = OnceLock::new();
    let all = CACHE.get_or_init(|| primes_up_to(1_000_000));
    let end = all.partition_point(|&p| p <= bound);
    &all[..end]
}

const MR_BASES: [u64; 16] = [2, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37, 41, 43, 47, 53];

/// Miller-Rabin with the first sixteen prime bases: deterministic below
/// 3.3e24, a strong probable-prime test above.
pub fn is_prime(n: &BigInt) -> bool {
    if n < &BigInt::from(2) {
        return false;
    }
    for &p in MR_BASES.iter() {
        let bp = BigInt::from(p);
        if n == &bp {
            return true;
        }
        if (n % &bp).is_zero() {
            return false;
        }
    }
    let one = BigInt::one();
    let nm1 = n - &one;
    let s = nm1.trailing_zeros().unwrap_or(0);
    let d = &nm1 >> s;
    'bases: for &a in MR_BASES.iter() {
        let mut x = BigInt::from(a).modpow(&d, n);
        if x == one || x == nm1 {
            continue;
        }
        for _ in 1..s {
            x = (&x * &x) % n;
            if x == nm1 {
                continue 'bases;
            }
        }
        return false;
    }
    true
}

pub fn is_prime_u64(n: u64) -> bool {
    is_prime(&BigInt::from(n))
}

fn rho_split(n: &BigInt, max_iter: u64) -> Option<BigInt> {
    // Brent's cycle finding with batched gcds.
    let one = BigInt::one();
    for c in 1u64..=8 {
        let c = BigInt::from(c);
        let f = |x: &BigInt| (x * x + &c) % n;
        let mut y = BigInt::from(2);
        let mut r: u64 = 1;
        let mut q = BigInt::one();
        let mut g = BigInt::one();
        let mut x = y.clone();
        let mut ys = y.clone();
        let mut iters = 0u64;
        let m = 128u64;
        while g == one {
            x = y.clone();
            for _ in 0..r {
                y = f(&y);
            }
            let mut k = 0;
            while k < r && g == one {
                ys = y.clone();
                for _ in 0..m.min(r - k) {
                    y = f(&y);
                    q = (q * (&x - &y).abs()) % n;
                }
                g = q.gcd(n);
                k += m;
                iters += m.min(r);
            }
            r *= 2;
            if iters > max_iter {
                return None;
            }
        }
        if &g == n {
            loop {
                ys = f(&ys);
                g = (&x - &ys).abs().gcd(n);
                if g > one {
                    break;
                }
            }
        }
        if &g != n {
            return Some(g);
        }
    }
    None
}

/// `(r, k)` with `n = r^k`, `k >= 2` maximal among primes tried, when one exists.
fn perfect_power(n: &BigInt) -> Option<(BigInt, u32)> {
    let bits = n.bits() as u32;
    for k in (2..=bits).filter(|&k| is_prime_u64(k as u64)) {
        let r = n.nth_root(k);
        if &r.pow(k) == n {
            return Some((r, k));
        }
    }
    None
}

/// Factor a nonzero integer: trial division, Pollard rho, then elliptic curves.
pub fn factor_int(n: &BigInt, cfg: &FactorConfig) -> Result<Factorization> {
    if n.is_zero() {
        return domain("cannot factor zero");
    }
    let mut out = Factorization { sign: if n.is_negative() { -1 } else { 1 }, factors: BTreeMap::new() };
    let mut m = n.abs();
    for &p in small_primes(cfg.trial_bound.min(1_000_000)) {
        let bp = BigInt::from(p);
        if &bp * &bp > m {
            break;
        }
        let mut e = 0;
        while (&m % &bp).is_zero() {
            m /= &bp;
            e += 1;
        }
        if e > 0 {
            out.push(bp, e);
        }
    }
    let mut stack = Vec::new();
    if m > BigInt::one() {
        stack.push(m);
    }
    while let Some(c) = stack.pop() {
        let tb = BigInt::from(cfg.trial_bound);
        if c <= &tb * &tb || is_prime(&c) {
            out.push(c, 1);
            continue;
        }
        if let Some((r, k)) = perfect_power(&c) {
            for _ in 0..k {
                stack.push(r.clone());
            }
            continue;
        }
        let split = rho_split(&c, cfg.rho_iterations).or_else(|| {
            let u = c.to_biguint().expect("positive");
            crate::ecm::ecm_split(&u, cfg.ecm_curves).map(BigInt::from)
        });
        match split {
            Some(d) => {
                let e = &c / &d;
                stack.push(d);
                stack.push(e);
            }
            None => return Err(Error::BoundExceeded(c.to_string())),
        }
    }
    Ok(out)
}

/// Factor numerator and denominator of a nonzero rational.
pub fn factor(n: &BigRational, cfg: &FactorConfig) -> Result<(Factorization, Factorization)> {
    if n.is_zero() {
        return domain("cannot factor zero");
    }
    Ok((factor_int(n.numer(), cfg)?, factor_int(n.denom(), cfg)?))
}

pub fn factor_i64(n: i64) -> Result<Factorization> {
    factor_int(&BigInt::from(n), &FactorConfig::default())
}

/// Jacobi symbol (a/m) for odd positive m.
pub fn jacobi(a: &BigInt, m: &BigInt) -> i8 {
    assert!(m.is_positive() && m.is_odd(), "jacobi needs odd positive modulus");
    let mut a = a.mod_floor(m);
    let mut m = m.clone();
    let mut t = 1i8;
    let three = BigInt::from(3);
    let five = BigInt::from(5);
    let eight = BigInt::from(8);
    let four = BigInt::from(4);
    while !a.is_zero() {
        let tz = a.trailing_zeros().unwrap_or(0);
        if tz > 0 {
            a >>= tz;
            let r = &m % &eight;
            if tz % 2 == 1 && (r == three || r == five) {
                t = -t;
            }
        }
        std::mem::swap(&mut a, &mut m);
        if &a % &four == three && &m % &four == three {
            t = -t;
        }
        a = a.mod_floor(&m);
    }
    if m.is_one() {
        t
    } else {
        0
    }
}

pub fn jacobi_i64(a: i64, m: i64) -> i8 {
    jacobi(&BigInt::from(a), &BigInt::from(m))
}

/// Legendre symbol of a rational number at an odd prime not dividing it.
pub fn legendre_rat(a: &BigRational, p: &BigInt) -> i8 {
    jacobi(&(a.numer() * a.denom()), p)
}

/// Quartic residue symbol a^((p-1)/4) mod p, for p = 1 mod 4 and a a nonzero
/// quadratic residue.
pub fn quartic_symbol(a: &BigInt, p: &BigInt) -> Result<i8> {
    let four = BigInt::from(4);
    if !is_prime(p) || !(p % &four).is_one() {
        return domain(format!("quartic symbol needs a prime p = 1 mod 4, got {p}"));
    }
    if (a % p).is_zero() {
        return domain(format!("{p} divides {a}"));
    }
    if jacobi(a, p) != 1 {
        return domain(format!("{a} is not a square mod {p}"));
    }
    let r = a.mod_floor(p).modpow(&((p - 1) / &four), p);
    Ok(if r.is_one() { 1 } else { -1 })
}

/// Tonelli-Shanks square root modulo an odd prime; `None` for non-residues.
pub fn sqrt_mod_prime(a: &BigInt, p: &BigInt) -> Option<BigInt> {
    let a = a.mod_floor(p);
    if a.is_zero() {
        return Some(a);
    }
    if p == &BigInt::from(2) {
        return Some(a);
    }
    if jacobi(&a, p) != 1 {
        return None;
    }
    let one = BigInt::one();
    let pm1 = p - &one;
    let s = pm1.trailing_zeros().unwrap_or(0);
    let q = &pm1 >> s;
    let mut z = BigInt::from(2);
    while jacobi(&z, p) != -1 {
        z += 1;
    }
    let mut m = s;
    let mut c = z.modpow(&q, p);
    let mut t = a.modpow(&q, p);
    let mut r = a.modpow(&((&q + &one) >> 1), p);
    while !t.is_one() {
        let mut i = 0;
        let mut t2 = t.clone();
        while !t2.is_one() {
            t2 = (&t2 * &t2) % p;
            i += 1;
        }
        let b = c.modpow(&(BigInt::one() << (m - i - 1)), p);
        m = i;
        c = (&b * &b) % p;
        t = (t * &c) % p;
        r = (r * b) % p;
    }
    Some(r)
}

/// Exact integer square root, if `n` is a perfect square.
pub fn exact_sqrt(n: &BigInt) -> Option<BigInt> {
    if n.is_negative() {
        return None;
    }
    let r = n.sqrt();
    if &r * &r == *n {
        Some(r)
    } else {
        None
    }
}

pub fn is_rational_square(q: &BigRational) -> bool {
    !q.is_negative() && exact_sqrt(q.numer()).is_some() && exact_sqrt(q.denom()).is_some()
}

/// p-adic valuation and cofactor of a nonzero integer.
pub fn valuation(n: &BigInt, p: &BigInt) -> (i64, BigInt) {
    assert!(!n.is_zero());
    let mut m = n.clone();
    let mut v = 0;
    loop {
        let (q, r) = m.div_rem(p);
        if !r.is_zero() {
            break;
        }
        m = q;
        v += 1;
    }
    (v, m)
}

pub fn valuation_rat(q: &BigRational, p: &BigInt) -> i64 {
    valuation(q.numer(), p).0 - valuation(q.denom(), p).0
}

/// Squarefree part (sign kept) of a nonzero integer.
pub fn squarefree_part(n: i64) -> i64 {
    let f = factor_i64(n).expect("small integer factors");
    let mut out = i64::from(f.sign);
    for (p, e) in f.factors {
        if e % 2 == 1 {
            out *= p.to_i64().unwrap();
        }
    }
    out
}

pub fn is_squarefree(n: i64) -> bool {
    n != 0 && factor_i64(n).map(|f| f.factors.values().all(|&e| e == 1)).unwrap_or(false)
}

/// A place of Q: the archimedean one or a finite prime.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum PlaceQ {
    Real,
    Finite(BigInt),
}

impl PlaceQ {
    pub fn prime(p: i64) -> Self {
        PlaceQ::Finite(BigInt::from(p))
    }

    pub fn parse(s: &str) -> Result<Self> {
        let s = s.trim();
        if s.eq_ignore_ascii_case("inf") || s.eq_ignore_ascii_case("real") || s == "∞" {
            return Ok(PlaceQ::Real);
        }
        let p: BigInt = s.parse().map_err(|_| Error::Domain(format!("bad place '{s}'")))?;
        if !is_prime(&p) {
            return domain(format!("{p} is not prime"));
        }
        Ok(PlaceQ::Finite(p))
    }
}

impl fmt::Display for PlaceQ {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            PlaceQ::Real => write!(f, "inf"),
            PlaceQ::Finite(p) => write!(f, "{p}"),
        }
    }
}

/// Integer representative of the square class of a nonzero rational.
fn square_class_int(q: &BigRational) -> BigInt {
    q.numer() * q.denom()
}

/// Hilbert symbol of two nonzero integers at `v`.
pub fn hilbert_int(a: &BigInt, b: &BigInt, v: &PlaceQ) -> i8 {
    assert!(!a.is_zero() && !b.is_zero(), "Hilbert symbol of zero");
    match v {
        PlaceQ::Real => {
            if a.is_negative() && b.is_negative() {
                -1
            } else {
                1
            }
        }
        PlaceQ::Finite(p) => {
            let (alpha, u) = valuation(a, p);
            let (beta, w) = valuation(b, p);
            if p == &BigInt::from(2) {
                let r = hilbert2_units(alpha, &u, beta, &w);
                debug_assert_eq!(r, hilbert2_table(alpha, &u, beta, &w));
                r
            } else {
                let mut s = 1i8;
                if alpha % 2 == 1 && beta % 2 == 1 && (p % 4u32) == BigInt::from(3) {
                    s = -s;
                }
                if beta % 2 == 1 {
                    s *= jacobi(&u, p);
                }
                if alpha % 2 == 1 {
                    s *= jacobi(&w, p);
                }
                s
            }
        }
    }
}

fn mod8(u: &BigInt) -> u32 {
    u.mod_floor(&BigInt::from(8)).to_u32().unwrap()
}

fn hilbert2_units(alpha: i64, u: &BigInt, beta: i64, w: &BigInt) -> i8 {
    let (u8_, w8) = (mod8(u), mod8(w));
    let eps = |x: u32| ((x + 7) / 2 % 2) as i64; // (x-1)/2 mod 2 for odd x
    let omega = |x: u32| if x == 3 || x == 5 { 1i64 } else { 0 };
    let e = eps(u8_) * eps(w8) + alpha * omega(w8) + beta * omega(u8_);
    if e % 2 == 0 {
        1
    } else {
        -1
    }
}

/// Exhaustive reference for the 2-adic symbol: does z^2 = a x^2 + b y^2 have a
/// primitive solution modulo 2^8? Indexed by the square-class representative.
fn hilbert2_table(alpha: i64, u: &BigInt, beta: i64, w: &BigInt) -> i8 {
    static TABLE: OnceLock<BTreeMap<(u32, u32), i8>> = OnceLock::new();
    let table = TABLE.get_or_init(|| {
        let reps: Vec<u32> = [1u32, 3, 5, 7].iter().flat_map(|&u| [u, 2 * u]).collect();
        let mut t = BTreeMap::new();
        for &a in &reps {
            for &b in &reps {
                t.insert((a, b), hilbert2_search(a as u64, b as u64, 8));
            }
        }
        t
    });
    let a = mod8(u) * if alpha % 2 == 1 { 2 } else { 1 };
    let b = mod8(w) * if beta % 2 == 1 { 2 } else { 1 };
    table[&(a, b)]
}

/// +1 iff z^2 = a x^2 + b y^2 has a solution modulo 2^k with (x, y, z) not all
/// even.
pub fn hilbert2_search(a: u64, b: u64, k: u32) -> i8 {
    let m = 1u64 << k;
    let mut is_sq = vec![false; m as usize];
    for z in 0..m {
        is_sq[((z * z) % m) as usize] = true;
    }
    for x in 0..m {
        for y in 0..m {
            let r = (a * x % m * x + b * y % m * y) % m;
            if !is_sq[r as usize] {
                continue;
            }
            if x % 2 == 1 || y % 2 == 1 {
                return 1;
            }
            // x, y even: need an odd z with z^2 = r, impossible since r is
            // divisible by 4 and odd squares are 1 mod 8.
        }
    }
    -1
}

/// Hilbert symbol (a, b)_v of two nonzero rationals.
pub fn hilbert_qp(a: &BigRational, b: &BigRational, v: &PlaceQ) -> i8 {
    hilbert_int(&square_class_int(a), &square_class_int(b), v)
}

pub fn hilbert_i64(a: i64, b: i64, v: &PlaceQ) -> i8 {
    hilbert_int(&BigInt::from(a), &BigInt::from(b), v)
}

/// Is the nonzero rational `q` a square in Q_v?
pub fn is_square_local(q: &BigRational, v: &PlaceQ) -> bool {
    let n = square_class_int(q);
    match v {
        PlaceQ::Real => n.is_positive(),
        PlaceQ::Finite(p) => {
            let (e, u) = valuation(&n, p);
            if e % 2 != 0 {
                return false;
            }
            if p == &BigInt::from(2) {
                mod8(&u) == 1
            } else {
                jacobi(&u, p) == 1
            }
        }
    }
}

/// Is the nonzero rational `q` a fourth power in Q_v?
pub fn is_fourth_power_local(q: &BigRational, v: &PlaceQ) -> bool {
    match v {
        PlaceQ::Real => q.is_positive(),
        PlaceQ::Finite(p) => {
            let (e1, u1) = valuation(q.numer(), p);
            let (e2, u2) = valuation(q.denom(), p);
            if (e1 - e2).rem_euclid(4) != 0 {
                return false;
            }
            if p == &BigInt::from(2) {
                let m = BigInt::from(16);
                (u1.mod_floor(&m) - u2.mod_floor(&m)).mod_floor(&m).is_zero()
            } else {
                let pm1: BigInt = p - 1;
                let g = pm1.gcd(&BigInt::from(4));
                let e = &pm1 / g;
                let r = (&u1 * u2.modinv(p).expect("unit")).mod_floor(p);
                r.modpow(&e, p).is_one()
            }
        }
    }
}

/// Sign of a value, as used throughout the symbol code.
pub fn sign_of(n: &BigInt) -> i8 {
    match n.sign() {
        Sign::Minus => -1,
        Sign::NoSign => 0,
        Sign::Plus => 1,
    }
}

/// Distinct prime divisors of a nonzero integer (absolute value).
pub fn prime_support(n: i64) -> Vec<i64> {
    factor_i64(n)
        .map(|f| f.factors.keys().map(|p| p.to_i64().unwrap()).collect())
        .unwrap_or_default()
}

/// Square-class representatives of Q_v^x / Q_v^x^2.
pub fn square_class_reps(v: &PlaceQ) -> Vec<BigInt> {
    match v {
        PlaceQ::Real => vec![BigInt::one(), -BigInt::one()],
        PlaceQ::Finite(p) => {
            if p == &BigInt::from(2) {
                [1, 3, 5, 7, 2, 6, 10, 14].iter().map(|&x| BigInt::from(x)).collect()
            } else {
                let mut u = BigInt::from(2);
                while jacobi(&u, p) != -1 {
                    u += 1;
                }
                vec![BigInt::one(), u.clone(), p.clone(), p * u]
            }
        }
    }
}

pub fn gcd_i64(a: i64, b: i64) -> i64 {
    a.gcd(&b)
}

pub fn lcm_u64(a: u64, b: u64) -> u64 {
    a.lcm(&b)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::scalar::rat;

    fn b(n: i64) -> BigInt {
        BigInt::from(n)
    }

    #[test]
    fn factor_examples() {
        let f = factor_i64(371).unwrap();
        assert_eq!(f.to_string(), "7*53");
        let f = factor_i64(1).unwrap();
        assert_eq!((f.sign, f.factors.len()), (1, 0));
        let f = factor_i64(-884).unwrap();
        assert_eq!(f.sign, -1);
        assert_eq!(f.to_string(), "-2^2*13*17");
        assert_eq!(f.value(), b(-884));
    }

    #[test]
    fn factor_uses_rho_for_large_semiprimes() {
        let p = BigInt::from(1_000_000_007u64);
        let q = BigInt::from(998_244_353u64);
        let n = &p * &q * 12;
        let f = factor_int(&n, &FactorConfig { trial_bound: 1000, rho_iterations: 10_000_000, ecm_curves: 0 }).unwrap();
        assert_eq!(f.value(), n);
        assert_eq!(f.exponent(&p), 1);
        assert_eq!(f.exponent(&q), 1);
    }

    #[test]
    fn factor_reports_bound_exceeded() {
        let p = BigInt::from(1_000_000_007u64);
        let q = BigInt::from(998_244_353u64);
        let err = factor_int(&(p * q), &FactorConfig { trial_bound: 100, rho_iterations: 10, ecm_curves: 0 }).unwrap_err();
        assert!(matches!(err, Error::BoundExceeded(_)));
    }

    #[test]
    fn factor_rational() {
        let (n, d) = factor(&rat(-6, 35), &FactorConfig::default()).unwrap();
        assert_eq!(n.to_string(), "-2*3");
        assert_eq!(d.to_string(), "5*7");
    }

    #[test]
    fn jacobi_examples() {
        assert_eq!(jacobi_i64(2, 7), 1);
        assert_eq!(jacobi_i64(123, 1), 1);
        assert_eq!(jacobi_i64(17, 13), 1);
        assert_eq!(jacobi_i64(13, 39), 0);
        // brute force against Euler's criterion
        for p in [3i64, 5, 7, 11, 13, 101] {
            for a in -30i64..30 {
                let e = BigInt::from(a).mod_floor(&b(p)).modpow(&b((p - 1) / 2), &b(p));
                let want = if e.is_zero() { 0 } else if e.is_one() { 1 } else { -1 };
                assert_eq!(jacobi_i64(a, p), want, "({a}/{p})");
            }
        }
    }

    #[test]
    fn quartic_examples() {
        assert_eq!(quartic_symbol(&b(17), &b(13)).unwrap(), -1);
        assert_eq!(quartic_symbol(&b(1), &b(29)).unwrap(), 1);
        assert!(quartic_symbol(&b(2), &b(13)).is_err());
        assert!(quartic_symbol(&b(4), &b(7)).is_err());
        for p in [5i64, 13, 17, 29, 37, 41] {
            for a in 1i64..20 {
                if a % p == 0 {
                    continue;
                }
                assert_eq!(quartic_symbol(&b(a * a), &b(p)).unwrap(), jacobi_i64(a, p));
            }
        }
    }

    #[test]
    fn sqrt_mod_prime_roundtrip() {
        for p in [7i64, 13, 17, 41, 97, 257] {
            for a in 0..p {
                match sqrt_mod_prime(&b(a), &b(p)) {
                    Some(r) => assert_eq!((&r * &r) % p, b(a)),
                    None => assert_eq!(jacobi_i64(a, p), -1),
                }
            }
        }
    }

    #[test]
    fn hilbert_examples() {
        assert_eq!(hilbert_i64(3, -1, &PlaceQ::prime(2)), -1);
        assert_eq!(hilbert_i64(1, 7, &PlaceQ::prime(2)), 1);
        assert_eq!(hilbert_i64(25, -1, &PlaceQ::prime(2)), 1);
        assert_eq!(hilbert_i64(-1, -1, &PlaceQ::Real), -1);
        assert_eq!(hilbert_i64(-1, -1, &PlaceQ::prime(2)), -1);
        assert_eq!(hilbert_i64(5, 17, &PlaceQ::prime(5)), -1);
        assert_eq!(hilbert_qp(&rat(3, 4), &rat(-1, 9), &PlaceQ::prime(2)), -1);
    }

    #[test]
    fn hilbert2_formula_matches_search_table() {
        for a in [1u64, 3, 5, 7, 2, 6, 10, 14] {
            for c in [1u64, 3, 5, 7, 2, 6, 10, 14] {
                let f = hilbert_i64(a as i64, c as i64, &PlaceQ::prime(2));
                assert_eq!(f, hilbert2_search(a, c, 8), "({a},{c})");
            }
        }
    }

    #[test]
    fn local_power_tests() {
        assert!(is_square_local(&rat(17, 1), &PlaceQ::prime(2)));
        assert!(!is_square_local(&rat(13, 1), &PlaceQ::prime(2)));
        assert!(is_fourth_power_local(&rat(17, 1), &PlaceQ::prime(2)));
        assert!(!is_fourth_power_local(&rat(9, 1), &PlaceQ::prime(2)));
        assert!(is_fourth_power_local(&rat(16 * 81, 1), &PlaceQ::prime(2)));
        assert!(is_fourth_power_local(&rat(16, 1), &PlaceQ::prime(7)));
        assert!(!is_fourth_power_local(&rat(4, 1), &PlaceQ::prime(13)));
    }

    #[test]
    fn primality() {
        let ps = primes_up_to(1000);
        for n in 0..1000u64 {
            assert_eq!(is_prime_u64(n), ps.binary_search(&n).is_ok(), "{n}");
        }
        assert!(is_prime(&BigInt::from(1_000_000_007u64)));
        assert!(!is_prime(&BigInt::from(3_215_031_751u64)));
    }

    #[test]
    fn squarefree_helpers() {
        assert_eq!(squarefree_part(-72), -2);
        assert!(is_squarefree(-30));
        assert!(!is_squarefree(12));
    }
}
