//! Double coverings of cyclotomic fields built from sin monomials.
//!
//! A formal divisor `sum c_a [a]` (with `[a] = [b]` when `a - b` is an
//! integer) maps to the cyclotomic unit `prod (2 sin(pi a))^{c_a}`. The
//! divisors `a_pq` give the elements `u_pq` and the radicand `Delta` of the
//! covering `L = Q(xi_N)(sqrt(Delta))` attached to a biquadratic field.

use std::collections::{BTreeMap, BTreeSet};
use std::fmt;

use num_rational::Ratio;
use num_traits::{ToPrimitive, Zero};
use serde_json::{json, Value};

use crate::arith::{is_prime_u64, jacobi_i64, lcm_u64, prime_support};
use crate::biquadratic::BiquadraticField;
use crate::cyclotomic::modular::{self, coprime, fourier_prime_below, FourierPrime, Reconstructed};
use crate::cyclotomic::{
    check_conductor, cyclo_data, gauss_sum_sqrt, quad_char, sqrt_exact, Cyclo, SqrtConfig,
};
use crate::error::{domain, Error, Result};

/// Rational key of a formal divisor, always reduced into `[0, 1)`.
pub type Fraction = Ratio<i64>;

fn reduce_fraction(a: Fraction) -> Fraction {
    a - a.floor()
}

/// A finite `Z`-combination of symbols `[a]`, `a` in `Q / Z`.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct FormalDivisor {
    terms: BTreeMap<Fraction, i64>,
}

impl FormalDivisor {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn from_terms<I: IntoIterator<Item = (Fraction, i64)>>(it: I) -> Self {
        let mut d = Self::new();
        for (a, c) in it {
            d.add_term(a, c);
        }
        d
    }

    pub fn add_term(&mut self, a: Fraction, c: i64) {
        let key = reduce_fraction(a);
        let e = self.terms.entry(key).or_insert(0);
        *e += c;
        if *e == 0 {
            self.terms.remove(&key);
        }
    }

    /// Nonzero terms, keyed by representatives in `[0, 1)`.
    pub fn terms(&self) -> &BTreeMap<Fraction, i64> {
        &self.terms
    }

    pub fn coefficient(&self, a: Fraction) -> i64 {
        self.terms.get(&reduce_fraction(a)).copied().unwrap_or(0)
    }

    /// Sum of the coefficients.
    pub fn augmentation(&self) -> i64 {
        self.terms.values().sum()
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn scale(&self, k: i64) -> Self {
        Self::from_terms(self.terms.iter().map(|(a, c)| (*a, c * k)))
    }

    /// Least common multiple of the denominators of the nonzero terms.
    pub fn denominator(&self) -> u64 {
        self.terms.keys().fold(1u64, |acc, a| lcm_u64(acc, *a.denom() as u64))
    }

    /// Canonical JSON: keys `"n/d"` in sorted order, coefficients as strings.
    pub fn to_json(&self) -> Value {
        let map: serde_json::Map<String, Value> =
            self.terms.iter().map(|(a, c)| (fraction_key(a), Value::String(c.to_string()))).collect();
        json!({ "terms": map })
    }

    pub fn from_json(v: &Value) -> Result<Self> {
        let obj = v["terms"].as_object().ok_or_else(|| Error::Domain("missing terms".into()))?;
        let mut d = Self::new();
        for (k, c) in obj {
            let a: Fraction = k.parse().map_err(|_| Error::Domain(format!("bad key {k}")))?;
            let c: i64 = match c {
                Value::String(s) => s.parse().map_err(|_| Error::Domain(format!("bad coefficient {s}")))?,
                other => other.as_i64().ok_or_else(|| Error::Domain(format!("bad coefficient {other}")))?,
            };
            d.add_term(a, c);
        }
        Ok(d)
    }
}

fn fraction_key(a: &Fraction) -> String {
    format!("{}/{}", a.numer(), a.denom())
}

impl std::ops::Add for &FormalDivisor {
    type Output = FormalDivisor;
    fn add(self, o: &FormalDivisor) -> FormalDivisor {
        let mut d = self.clone();
        for (a, c) in &o.terms {
            d.add_term(*a, *c);
        }
        d
    }
}

impl std::ops::Neg for &FormalDivisor {
    type Output = FormalDivisor;
    fn neg(self) -> FormalDivisor {
        self.scale(-1)
    }
}

impl fmt::Display for FormalDivisor {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.terms.is_empty() {
            return write!(f, "0");
        }
        let parts: Vec<String> = self.terms.iter().map(|(a, c)| format!("{c}[{}]", fraction_key(a))).collect();
        write!(f, "{}", parts.join(" + "))
    }
}

fn frac(n: i64, d: i64) -> Fraction {
    Ratio::new(n, d)
}

/// The defining double sums of `a_pq` term by term, before any cancellation.
///
/// `p` may be 2 (the `a_2q` variant); `q` must be an odd prime above `p`.
pub fn a_pq_terms(p: i64, q: i64) -> Result<Vec<(Fraction, i64)>> {
    if p == q {
        return domain(format!("a_pq needs distinct primes, got {p} twice"));
    }
    if q == 2 {
        return domain("a_pq needs an odd q");
    }
    if p > q {
        return domain(format!("a_pq needs p < q, got ({p}, {q})"));
    }
    if p < 2 || !is_prime_u64(p as u64) || !is_prime_u64(q as u64) {
        return domain(format!("a_pq needs primes, got ({p}, {q})"));
    }
    let mut out = Vec::new();
    if p == 2 {
        out.push((frac(1, 4), 1));
        for k in 0..=(q - 1) / 2 {
            out.push((frac(k, q) + frac(1, 4 * q), -1));
        }
        for j in 1..=(q - 1) / 2 {
            out.push((frac(j, q), -1));
            out.push((frac(j, q) - frac(1, 2 * q), -1));
            out.push((frac(j, 2 * q), 1));
            out.push((frac(j, 2 * q) - frac(1, 4 * q), 1));
        }
    } else {
        for i in 1..=(p - 1) / 2 {
            out.push((frac(i, p), 1));
            for k in 0..=(q - 1) / 2 {
                out.push((frac(i, p * q) + frac(k, q), -1));
            }
        }
        for j in 1..=(q - 1) / 2 {
            out.push((frac(j, q), -1));
            for l in 0..=(p - 1) / 2 {
                out.push((frac(j, p * q) + frac(l, p), 1));
            }
        }
    }
    Ok(out)
}

/// The divisor `a_pq` for primes `p < q`, `q` odd.
pub fn a_pq(p: i64, q: i64) -> Result<FormalDivisor> {
    Ok(FormalDivisor::from_terms(a_pq_terms(p, q)?))
}

/// `a_pq` with the symmetric extension `a_pq = a_qp`.
fn a_sym(p: i64, q: i64) -> Result<FormalDivisor> {
    a_pq(p.min(q), p.max(q))
}

/// Values of `sin(D)` at every primitive `j` modulo `fp.m`, which must be a
/// multiple of `lcm(4, 2 den(D))`. Uses `2 sin(pi k/n) = i xi_{2n}^{-k} (1 - xi_n^k)`.
fn sin_values(d: &FormalDivisor, fp: &FourierPrime) -> Vec<u64> {
    let a = fp.m;
    let ell = fp.ell;
    let pw = fp.powers();
    let mut out = vec![0u64; a as usize];
    for j in 0..a {
        if !coprime(j, a) {
            continue;
        }
        let (mut num, mut den) = (1u64, 1u64);
        for (x, &c) in &d.terms {
            if x.is_zero() {
                continue;
            }
            let (k, n) = (*x.numer() as u64, *x.denom() as u64);
            let shift = (a / 4 + a - (k * (a / (2 * n))) % a) % a;
            let rot = pw[((j * shift) % a) as usize];
            let one_minus = (1 + ell - pw[((j * k * (a / n)) % a) as usize]) % ell;
            let v = modular::powmod(modular::mulmod(rot, one_minus, ell), c.unsigned_abs(), ell);
            if c > 0 {
                num = modular::mulmod(num, v, ell);
            } else {
                den = modular::mulmod(den, v, ell);
            }
        }
        out[j as usize] = modular::mulmod(num, modular::invmod(den, ell), ell);
    }
    out
}

/// Floating-point value of the real number `sin(D)` (embedding 1).
pub fn sin_divisor_numeric(d: &FormalDivisor) -> f64 {
    d.terms
        .iter()
        .filter(|(a, _)| !a.is_zero())
        .map(|(a, &c)| c as f64 * (2.0 * (std::f64::consts::PI * a.to_f64().unwrap()).sin()).ln())
        .sum::<f64>()
        .exp()
}

/// Embedding 1 matches the positive real `numeric`, whenever double
/// precision can resolve it (large coordinates are left to the exact checks).
fn numeric_agrees(c: &Cyclo, numeric: f64) -> bool {
    let err = c.embed_error_bound() + 1e-12 * numeric;
    if err > 1e-3 * numeric {
        return true;
    }
    match c.embed_numeric(1) {
        Ok(z) => (z.re - numeric).abs() <= err && z.im.abs() <= err,
        Err(_) => false,
    }
}

/// Exact image of `D` under the sin homomorphism, as an element of Q(xi_M).
///
/// Computed multi-modularly in the ambient conductor `lcm(4, 2 den(D), M)`,
/// then descended to `M` (or `M/2` when `M = 2 mod 4`).
pub fn sin_divisor(d: &FormalDivisor, m: u64) -> Result<Cyclo> {
    if m == 0 {
        return domain("conductor 0");
    }
    let den = d.denominator();
    if !m.is_multiple_of(den) {
        return Err(Error::AmbientTooSmall { ambient: m, needed: den });
    }
    let target = if m % 4 == 2 { m / 2 } else { m };
    check_conductor(target)?;
    if d.terms.keys().all(|a| a.is_zero()) {
        return Cyclo::one(target);
    }
    let ambient = lcm_u64(lcm_u64(4, 2 * den), target);
    let data = cyclo_data(target)?;
    let check = fourier_prime_below(ambient, 61)
        .ok_or_else(|| Error::PrecisionExhausted("no check prime".into()))?;
    let expect = sin_values(d, &check);
    let numeric = sin_divisor_numeric(d);
    let out = modular::reconstruct(
        target,
        ambient,
        &data.poly_big,
        |fp| Ok(Some(sin_values(d, fp))),
        |cand| {
            let c = match Cyclo::from_coords(target, cand.to_vec()) {
                Ok(c) => c,
                Err(_) => return false,
            };
            let Some(got) = c.values_at(&check) else { return false };
            let agrees = (0..ambient).all(|j| !coprime(j, ambient) || got[j as usize] == expect[j as usize]);
            agrees && numeric_agrees(&c, numeric)
        },
        400,
    )?;
    let value = match out {
        Reconstructed::Coords(c) => Cyclo::from_coords(target, c)?,
        Reconstructed::NotMember => return Err(Error::AmbientTooSmall { ambient: target, needed: ambient }),
    };
    if !value.is_real() || !numeric_agrees(&value, numeric) {
        return Err(Error::EvaluationUnsupported(format!("sin({d}) is not real and positive")));
    }
    Ok(value)
}

/// The symbol set `S_n`: `-1` and `2` as dictated by the 2-part of `n`, then
/// the odd prime factors, in increasing order.
pub fn s_set(n: u64) -> Result<Vec<i64>> {
    if n == 0 || n % 4 == 2 {
        return domain(format!("S_n needs n not 2 mod 4, got {n}"));
    }
    let mut out = Vec::new();
    if n.is_multiple_of(4) {
        out.push(-1);
    }
    if n.is_multiple_of(8) {
        out.push(2);
    }
    out.extend(prime_support(n as i64).into_iter().filter(|&p| p != 2));
    Ok(out)
}

/// `d (d - 1) / 2` with `d = |S_m|`.
pub fn two_rank(m: u64) -> Result<u64> {
    let d = s_set(m)?.len() as u64;
    Ok(d * d.saturating_sub(1) / 2)
}

/// The element `u_pq` of Q(xi_n) for symbols `p < q` in `S_n`.
pub fn u_pq(p: i64, q: i64, n: u64) -> Result<Cyclo> {
    let s = s_set(n)?;
    if !s.contains(&p) || !s.contains(&q) {
        return domain(format!("({p}, {q}) not in S_{n} = {s:?}"));
    }
    if p >= q {
        return domain(format!("u_pq needs p < q, got ({p}, {q})"));
    }
    if n.is_multiple_of(4) {
        if p == -1 {
            return gauss_sum_sqrt(q, n);
        }
        return sin_divisor(&a_pq(p, q)?, n);
    }
    let sin = sin_divisor(&a_pq(p, q)?, n)?;
    let root = match (p % 4, q % 4) {
        (1, 1) => return Ok(sin),
        (1, 3) => p,
        (3, 1) => q,
        _ => p * q,
    };
    Ok(&gauss_sum_sqrt(root, n)? * &sin)
}

/// All `u_pq`, `p < q` in `S_m`.
pub fn covering_generators_cyclotomic(m: u64) -> Result<Vec<Cyclo>> {
    let s = s_set(m)?;
    let mut out = Vec::new();
    for (i, &p) in s.iter().enumerate() {
        for &q in &s[i + 1..] {
            out.push(u_pq(p, q, m)?);
        }
    }
    Ok(out)
}

/// The covering `L = Q(xi_N)(sqrt(Delta))` attached to a biquadratic field.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct CoveringSpec {
    pub field: BiquadraticField,
    pub conductor: u64,
    pub delta: Cyclo,
    /// Pairs `(p, q)` whose `sin a_pq` entered the product.
    pub pairs: Vec<(i64, i64)>,
    /// `d1 d2` when the factor `sqrt(d1 d2)` entered.
    pub sqrt_factor: Option<i64>,
}

impl CoveringSpec {
    /// Canonical JSON with sorted keys and rational coordinates as strings.
    pub fn to_json(&self) -> Value {
        json!({
            "conductor": self.conductor,
            "delta": self.delta.to_json(),
            "field": [self.field.d1, self.field.d2, self.field.d3],
            "pairs": self.pairs,
            "sqrt_factor": self.sqrt_factor,
        })
    }

    pub fn from_json(v: &Value) -> Result<Self> {
        let bad = |what: &str| Error::Domain(format!("covering JSON: bad {what}"));
        let f: Vec<i64> = serde_json::from_value(v["field"].clone()).map_err(|_| bad("field"))?;
        if f.len() != 3 {
            return Err(bad("field"));
        }
        let field = BiquadraticField::from_triple(f[0], f[1], f[2])?;
        let conductor = v["conductor"].as_u64().ok_or_else(|| bad("conductor"))?;
        let delta = Cyclo::from_json(&v["delta"])?;
        let pairs = serde_json::from_value(v["pairs"].clone()).map_err(|_| bad("pairs"))?;
        let sqrt_factor = serde_json::from_value(v["sqrt_factor"].clone()).map_err(|_| bad("sqrt_factor"))?;
        if delta.conductor() != conductor || delta.is_zero() {
            return Err(bad("delta"));
        }
        Ok(CoveringSpec { field, conductor, delta, pairs, sqrt_factor })
    }
}

/// `N = |d1 d2 d3|` when `d1 d2 = d1 d3 = 1 mod 4`, else `4 |d1 d2 d3|`.
pub fn covering_conductor(k: &BiquadraticField) -> u64 {
    let n = (k.d1 * k.d2 * k.d3).unsigned_abs();
    if k.a().rem_euclid(4) == 1 && k.b().rem_euclid(4) == 1 {
        n
    } else {
        4 * n
    }
}

/// `R`: pairs of primes taken from two different `d_i`, each ordered `p < q`.
pub fn pair_set(k: &BiquadraticField) -> Vec<(i64, i64)> {
    let s = [prime_support(k.d1), prime_support(k.d2), prime_support(k.d3)];
    let mut out = Vec::new();
    for i in 0..3 {
        for j in i + 1..3 {
            for &p in &s[i] {
                for &q in &s[j] {
                    out.push((p.min(q), p.max(q)));
                }
            }
        }
    }
    out.sort();
    out
}

pub fn delta_for_biquadratic(d1: i64, d2: i64, d3: i64) -> Result<CoveringSpec> {
    let k = BiquadraticField::from_triple(d1, d2, d3)?;
    covering_for_field(&k)
}

/// `Delta = prod_R sin a_pq`, times `sqrt(d1 d2)` when `d1 d3 < 0`, in Q(xi_N).
pub fn covering_for_field(k: &BiquadraticField) -> Result<CoveringSpec> {
    let n = covering_conductor(k);
    let pairs = pair_set(k);
    let mut total = FormalDivisor::new();
    for &(p, q) in &pairs {
        total = &total + &a_sym(p, q)?;
    }
    let mut delta = sin_divisor(&total, n)?;
    let sqrt_factor = if k.b() < 0 { Some(k.a()) } else { None };
    if let Some(a) = sqrt_factor {
        delta = &delta * &gauss_sum_sqrt(a, n)?;
    }
    Ok(CoveringSpec { field: *k, conductor: n, delta, pairs, sqrt_factor })
}

fn crt_pair(r1: i128, m1: i128, r2: i128, m2: i128) -> (i128, i128) {
    // moduli are coprime
    let (g, u, _) = ext_gcd(m1, m2);
    debug_assert_eq!(g, 1);
    let m = m1 * m2;
    let x = (r1 + (r2 - r1) * u % m2 * m1).rem_euclid(m);
    (x, m)
}

fn ext_gcd(a: i128, b: i128) -> (i128, i128, i128) {
    if b == 0 {
        (a, 1, 0)
    } else {
        let (g, x, y) = ext_gcd(b, a % b);
        (g, y, x - (a / b) * y)
    }
}

fn primitive_root_prime_power(p: i64, e: u32) -> i64 {
    let pe = p.pow(e);
    let order = p - 1;
    let fs = prime_support(order);
    let g = (2..p)
        .find(|&g| fs.iter().all(|&f| modular::powmod(g as u64, (order / f) as u64, p as u64) != 1))
        .unwrap_or(1);
    if e >= 2 && modular::powmod(g as u64, order as u64, (p * p) as u64) == 1 {
        (g + p) % pe
    } else {
        g
    }
}

/// A generating set of `(Z/N)^x`, one or two generators per prime-power
/// component, each `1` on the other components.
pub fn unit_group_generators(n: u64) -> Vec<i64> {
    let n = n as i64;
    let mut gens = Vec::new();
    let f = crate::arith::factor_i64(n).expect("small");
    let comps: Vec<(i64, u32)> = f.factors.iter().map(|(p, e)| (p.to_i64().unwrap(), *e)).collect();
    for (idx, &(p, e)) in comps.iter().enumerate() {
        let pe = p.pow(e);
        let locals: Vec<i64> = if p == 2 {
            match e {
                1 => vec![],
                2 => vec![3],
                _ => vec![pe - 1, 5],
            }
        } else {
            vec![primitive_root_prime_power(p, e)]
        };
        for g in locals {
            let (mut r, mut m) = (g as i128, pe as i128);
            for (j, &(q, k)) in comps.iter().enumerate() {
                if j != idx {
                    (r, m) = crt_pair(r, m, 1, q.pow(k) as i128);
                }
            }
            gens.push(r as i64);
        }
    }
    gens
}

/// True iff `L = F(sqrt(Delta))`, `F = Q(xi_N)`, is a quadratic extension of
/// `F` that is Galois over Q but not abelian over Q.
///
/// Galois: every `sigma_a(Delta) / Delta` is a square `gamma_a^2` in `F`.
/// Non-abelian: some pair of lifts `sqrt(Delta) -> gamma_a sqrt(Delta)` fails
/// to commute, i.e. `sigma_a(gamma_b) gamma_a != sigma_b(gamma_a) gamma_b`.
pub fn is_galois_double_cover(spec: &CoveringSpec, cfg: &SqrtConfig) -> Result<bool> {
    let delta = &spec.delta;
    if delta.is_zero() || sqrt_exact(delta, cfg)?.is_square() {
        return Ok(false);
    }
    let gens = unit_group_generators(spec.conductor);
    let mut gammas = Vec::with_capacity(gens.len());
    for &a in &gens {
        let ratio = delta.galois_apply(a)?.div(delta)?;
        match sqrt_exact(&ratio, cfg)?.root() {
            Some(g) => gammas.push(g),
            None => return Ok(false),
        }
    }
    for i in 0..gens.len() {
        for j in i + 1..gens.len() {
            let lhs = &gammas[j].galois_apply(gens[i])? * &gammas[i];
            let rhs = &gammas[i].galois_apply(gens[j])? * &gammas[j];
            if lhs != rhs {
                return Ok(true);
            }
        }
    }
    Ok(false)
}

/// A vector of mod-2 exponents with respect to the generators `sigma_s`:
/// complex conjugation for `s = -1`, `5` in `1 + 4 Z_2` for `s = 2`, and a
/// generator of `Z_p^x` for odd `s = p`, each trivial at the other symbols.
#[derive(Clone, Debug, Default, PartialEq, Eq, Hash)]
pub struct GaloisVectorF2 {
    pub support: BTreeMap<i64, bool>,
}

impl GaloisVectorF2 {
    pub fn bit(&self, s: i64) -> bool {
        self.support.get(&s).copied().unwrap_or(false)
    }

    pub fn set(&mut self, s: i64, v: bool) {
        if v {
            self.support.insert(s, true);
        } else {
            self.support.remove(&s);
        }
    }

    pub fn unit(s: i64) -> Self {
        let mut v = Self::default();
        v.set(s, true);
        v
    }

    pub fn add(&self, o: &Self) -> Self {
        let mut v = self.clone();
        for (&s, &b) in &o.support {
            let x = v.bit(s) ^ b;
            v.set(s, x);
        }
        v
    }

    pub fn dot(&self, o: &Self) -> bool {
        self.support.keys().filter(|s| o.bit(**s)).count() % 2 == 1
    }
}

/// Coordinates of the integer `a` (prime to `n`) viewed in `Z^^x`; only the
/// symbols `-1`, `2` and the odd primes of `n` are recorded.
///
/// `a = c^{i_{-1}} * rest`: `i_{-1}` is the sign in `a = +-5^t mod 2^k`,
/// `i_2 = t mod 2`, and `i_p` is the nonresidue bit of `(-1)^{i_{-1}} a mod p`.
pub fn parity_coords(a: i64, n: u64) -> Result<GaloisVectorF2> {
    if !coprime(a.rem_euclid(n as i64) as u64, n) {
        return domain(format!("{a} is not prime to {n}"));
    }
    let mut v = GaloisVectorF2::default();
    let neg = a.rem_euclid(4) == 3;
    v.set(-1, neg);
    let unit2 = if neg { -a } else { a };
    v.set(2, unit2.rem_euclid(8) == 5);
    for p in prime_support(n as i64) {
        if p != 2 {
            v.set(p, jacobi_i64(unit2.rem_euclid(p), p) == -1);
        }
    }
    Ok(v)
}

/// An integer representative of `sigma_s` modulo `8 * prod(odd primes of t)`.
fn generator_rep(s: i64, t: i64) -> i64 {
    let odd: Vec<i64> = prime_support(t).into_iter().filter(|&p| p != 2).collect();
    let (mut r, mut m): (i128, i128) = match s {
        -1 => (7, 8),
        2 => (5, 8),
        _ => (1, 8),
    };
    for &p in &odd {
        let local = match s {
            -1 => p - 1,
            _ if s == p => (2..p).find(|&g| jacobi_i64(g, p) == -1).unwrap(),
            _ => 1,
        };
        (r, m) = crt_pair(r, m, local as i128, p as i128);
    }
    r as i64
}

/// Bits `chi_t(sigma_s)` of the quadratic character of Q(sqrt t).
pub fn character_vector(t: i64, symbols: &[i64]) -> GaloisVectorF2 {
    let mut v = GaloisVectorF2::default();
    for &s in symbols {
        v.set(s, quad_char(t, generator_rep(s, t)) == -1);
    }
    v
}

/// Alternating F_2 form `sum v_s w_t` over a set of ordered monomials.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct StarForm {
    pub monomials: BTreeSet<(i64, i64)>,
}

impl StarForm {
    /// Adds `delta_{p,q} = v_p w_q + v_q w_p`.
    pub fn add_delta(&mut self, p: i64, q: i64) {
        for m in [(p, q), (q, p)] {
            if !self.monomials.remove(&m) {
                self.monomials.insert(m);
            }
        }
    }

    /// The form with a single monomial `v_s w_t` removed.
    pub fn without_monomial(&self, s: i64, t: i64) -> Self {
        let mut f = self.clone();
        f.monomials.remove(&(s, t));
        f
    }

    pub fn eval(&self, v: &GaloisVectorF2, w: &GaloisVectorF2) -> bool {
        self.monomials.iter().filter(|(s, t)| v.bit(*s) && w.bit(*t)).count() % 2 == 1
    }
}

/// The commutator form of `Delta`: `delta_{p,q}` over `R`, plus
/// `delta_{-1,p}` for `p | d1 d2` when `d1 d3 < 0`.
pub fn star_form(k: &BiquadraticField) -> StarForm {
    let mut f = StarForm::default();
    for (p, q) in pair_set(k) {
        f.add_delta(p, q);
    }
    if k.b() < 0 {
        for p in prime_support(k.a()) {
            f.add_delta(-1, p);
        }
    }
    f
}

/// Symbols that can carry a nonzero coordinate for the field.
pub fn field_symbols(k: &BiquadraticField) -> Vec<i64> {
    let mut s = vec![-1, 2];
    for d in [k.d1, k.d2, k.d3] {
        s.extend(prime_support(d));
    }
    s.sort();
    s.dedup();
    s
}

/// Basis of `{v : chi . v = 0}` inside the span of `symbols`.
pub fn fixing_subspace_basis(chi: &GaloisVectorF2, symbols: &[i64]) -> Vec<GaloisVectorF2> {
    let pivot = symbols.iter().copied().find(|&s| chi.bit(s));
    symbols
        .iter()
        .filter(|&&s| Some(s) != pivot)
        .map(|&s| match pivot {
            Some(p) if chi.bit(s) => GaloisVectorF2::unit(s).add(&GaloisVectorF2::unit(p)),
            _ => GaloisVectorF2::unit(s),
        })
        .collect()
}

/// Whether `form` vanishes on `V_K' x V_K'` for all three quadratic subfields `K'`.
pub fn star_holds(k: &BiquadraticField, form: &StarForm) -> bool {
    let symbols = field_symbols(k);
    k.generators().iter().all(|&t| {
        let basis = fixing_subspace_basis(&character_vector(t, &symbols), &symbols);
        basis.iter().all(|v| basis.iter().all(|w| !form.eval(v, w)))
    })
}

/// Condition (*) for the covering of `Q(sqrt(d1 d2), sqrt(d1 d3))`.
pub fn condition_star(d1: i64, d2: i64, d3: i64) -> Result<bool> {
    let k = BiquadraticField::from_triple(d1, d2, d3)?;
    Ok(star_holds(&k, &star_form(&k)))
}

/// Fields with `2 | d1 d2 d3` fall outside the cases whose commutator form
/// is displayed in closed form; their condition (*) result is unverified.
pub fn star_case_verified(k: &BiquadraticField) -> bool {
    (k.d1 * k.d2 * k.d3) % 2 != 0
}

#[cfg(test)]
mod tests {
    use super::*;

    fn expand(p: i64, q: i64) -> i64 {
        // independent count of signed terms
        if p == 2 {
            // the q-part cancels pairwise, leaving 1 - ((q - 1) / 2 + 1)
            (1 - q) / 2
        } else {
            (p - 1) / 2 * (1 - (q + 1) / 2) - (q - 1) / 2 * (1 - (p + 1) / 2)
        }
    }

    #[test]
    fn a_pq_shapes() {
        assert_eq!(a_pq_terms(3, 5).unwrap().len(), 10);
        assert_eq!(a_pq(3, 5).unwrap().augmentation(), 0);
        assert_eq!(a_pq(2, 5).unwrap().augmentation(), expand(2, 5));
        assert!(a_pq(5, 5).is_err());
        assert!(a_pq(3, 2).is_err());
    }

    #[test]
    fn sin_small_values() {
        let one = |a: Fraction| FormalDivisor::from_terms([(a, 1)]);
        assert_eq!(sin_divisor(&one(frac(1, 6)), 6).unwrap(), Cyclo::one(3).unwrap());
        assert_eq!(sin_divisor(&one(frac(1, 2)), 2).unwrap(), Cyclo::from_ints(1, &[2]).unwrap());
        let five = FormalDivisor::from_terms((1..5).map(|k| (frac(k, 5), 1)));
        assert_eq!(sin_divisor(&five, 5).unwrap(), Cyclo::from_base(5, num_rational::BigRational::from_integer(5.into())).unwrap());
        // 2 sin(pi/3) = sqrt 3
        let s3 = sin_divisor(&one(frac(1, 3)), 12).unwrap();
        assert_eq!(s3, gauss_sum_sqrt(3, 12).unwrap());
        assert!(matches!(sin_divisor(&one(frac(1, 3)), 3), Err(Error::AmbientTooSmall { .. })));
    }

    #[test]
    fn symbol_sets() {
        assert_eq!(s_set(371).unwrap(), vec![7, 53]);
        assert_eq!(s_set(12).unwrap(), vec![-1, 3]);
        assert_eq!(s_set(24).unwrap(), vec![-1, 2, 3]);
        assert!(s_set(6).is_err());
        assert_eq!(two_rank(371).unwrap(), 1);
        assert_eq!(two_rank(105).unwrap(), 3);
        assert_eq!(two_rank(13).unwrap(), 0);
    }

    #[test]
    fn unit_generators_generate() {
        for n in [221u64, 884, 68, 24, 105] {
            let gens = unit_group_generators(n);
            let mut seen = BTreeSet::from([1i64]);
            let mut frontier = vec![1i64];
            while let Some(x) = frontier.pop() {
                for &g in &gens {
                    let y = (x * g).rem_euclid(n as i64);
                    if seen.insert(y) {
                        frontier.push(y);
                    }
                }
            }
            assert_eq!(seen.len() as u64, crate::cyclotomic::euler_phi(n), "n = {n}");
        }
    }

    #[test]
    fn characters_match_parity_coordinates() {
        let n = 8 * 3 * 5 * 7 * 13;
        let symbols = [-1, 2, 3, 5, 7, 13];
        for t in [-1, 2, -2, 3, -3, 5, 13, -7, 15, -35, 2 * 13, -3 * 5 * 13] {
            let chi = character_vector(t, &symbols);
            for a in (1..400).filter(|a| coprime(*a as u64, n)) {
                let v = parity_coords(a, n).unwrap();
                let s = if chi.dot(&v) { -1 } else { 1 };
                assert_eq!(s, quad_char(t, a), "t = {t}, a = {a}");
            }
        }
    }

    #[test]
    fn characters_match_galois_action() {
        let symbols = [-1, 2, 3, 5, 7];
        for t in [-1, 2, 3, -5, 7, -15] {
            let m = crate::cyclotomic::quadratic_conductor(t);
            let r = gauss_sum_sqrt(t, m).unwrap();
            let chi = character_vector(t, &symbols);
            for &s in &symbols {
                let a = generator_rep(s, t).rem_euclid(m as i64);
                let img = r.galois_apply(a).unwrap();
                assert_eq!(img == r, !chi.bit(s), "t = {t}, s = {s}");
            }
        }
    }

    #[test]
    fn condition_star_examples() {
        assert!(condition_star(1, 13, 17).unwrap());
        assert!(condition_star(1, 13, -17).unwrap());
        let k = BiquadraticField::from_triple(1, 13, 17).unwrap();
        let mutated = star_form(&k).without_monomial(13, 17);
        assert!(!star_holds(&k, &mutated));
    }

    #[test]
    fn json_roundtrip() {
        let d = a_pq(3, 7).unwrap();
        let back = FormalDivisor::from_json(&d.to_json()).unwrap();
        assert_eq!(d, back);
    }
}
