//! Deliberately naive oracles for cross-checking the engine: bounded global
//! search, seeded random true norms and an exhaustive p-adic residue search.
//!
//! Random draws use `XorShiftRng` (Marsaglia's xorshift128 with shifts
//! 11, 8, 19) seeded through `SeedableRng::seed_from_u64`, so corpora
//! replay across runs and platforms.

use std::thread;

use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{ToPrimitive, Zero};
use rand_core::{RngCore, SeedableRng};
use rand_xorshift::XorShiftRng;
use serde_json::{json, Value};

use crate::arith::is_prime;
use crate::biquadratic::{norm_form_i128, BiquadraticField, KElement};
use crate::cyclotomic::Cyclo;
use crate::error::{domain, Error, Result};
use crate::normtorus::{NormEquation, NormField};
use crate::scalar::rat;

/// Bounds of [`search_global`].
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct SearchConfig {
    /// Coordinates of `d x` lie in `[-bound, bound]`.
    pub bound: i64,
    /// Denominators `d = 1..=denominator`.
    pub denominator: i64,
    pub seed: u64,
    /// Maximal number of candidate points.
    pub effort: u64,
}

impl Default for SearchConfig {
    fn default() -> Self {
        SearchConfig { bound: 10, denominator: 1, seed: 0, effort: 2_000_000_000 }
    }
}

/// Result of a bounded search. Running out of candidates proves nothing.
#[derive(Clone, Debug, PartialEq)]
pub enum SearchOutcome {
    Found(KElement<BigRational>),
    NotFoundWithinBounds,
}

fn scan_partition(k: &BiquadraticField, target: i128, d: i64, b: i64, x1s: &[i64]) -> Option<[i64; 4]> {
    for &x1 in x1s {
        for x2 in 0..=b {
            for x3 in 0..=b {
                for x4 in -b..=b {
                    let x = [x1, x2, x3, x4];
                    if d > 1 && x1.gcd(&x2).gcd(&x3).gcd(&x4).gcd(&d) != 1 {
                        continue;
                    }
                    if norm_form_i128(k, x) == Some(target) && x != [0; 4] {
                        return Some(x);
                    }
                }
            }
        }
    }
    None
}

/// First `x / d` with `N(x / d) = n`, in the order `d` ascending, then
/// `x1, x2, x3` over `0..=B` and `x4` over `-B..=B`. The sign conventions
/// lose nothing: negation and the Galois group act by sign changes that can
/// make `x1, x2, x3` nonnegative without changing the norm.
pub fn search_global(eq: &NormEquation, cfg: &SearchConfig) -> Result<SearchOutcome> {
    let NormField::Biquadratic(k) = eq.field else {
        return domain("global search needs a biquadratic field");
    };
    if cfg.bound < 1 || cfg.denominator < 1 {
        return domain("search bounds must be positive");
    }
    let b = cfg.bound;
    let per_level = ((b + 1) as u64).pow(3) * (2 * b + 1) as u64;
    let workers = thread::available_parallelism().map(|n| n.get()).unwrap_or(1).min(b as usize + 1);
    let mut spent = 0u64;
    for d in 1..=cfg.denominator {
        let scaled = &eq.n * BigRational::from_integer(BigInt::from(d).pow(4));
        if !scaled.is_integer() {
            continue;
        }
        spent += per_level;
        if spent > cfg.effort {
            return Err(Error::EffortExceeded(spent));
        }
        let Some(target) = scaled.numer().to_i128() else { continue };
        let parts: Vec<Vec<i64>> =
            (0..workers).map(|w| (0..=b).filter(|x| (*x as usize) % workers == w).collect()).collect();
        let found: Vec<[i64; 4]> = thread::scope(|sc| {
            let hs: Vec<_> = parts.iter().map(|p| sc.spawn(move || scan_partition(&k, target, d, b, p))).collect();
            hs.into_iter().filter_map(|h| h.join().expect("search worker panicked")).collect()
        });
        // each partition returns its first hit; the global first has the least x1
        if let Some(x) = found.into_iter().min_by_key(|x| x[0]) {
            return Ok(SearchOutcome::Found(KElement::new(k, x.map(|v| rat(v, d)))));
        }
    }
    Ok(SearchOutcome::NotFoundWithinBounds)
}

/// An element drawn by [`random_norm`].
#[derive(Clone, Debug, PartialEq)]
pub enum RandomElement {
    Biquadratic(KElement<BigRational>),
    Cyclotomic(Cyclo),
}

#[derive(Clone, Debug, PartialEq)]
pub struct RandomNorm {
    pub xi: RandomElement,
    pub n: BigRational,
}

fn uniform(rng: &mut XorShiftRng, lo: i64, hi: i64) -> i64 {
    lo + (rng.next_u64() % (hi - lo + 1) as u64) as i64
}

/// A seeded element with nonzero norm and its norm. Biquadratic draws have
/// integer coordinates in `[-bound, bound]`; cyclotomic draws are sums of
/// `bound` terms `+-xi^j`.
pub fn random_norm(field: &NormField, bound: u64, seed: u64) -> Result<RandomNorm> {
    if bound == 0 {
        return domain("bound must be at least 1");
    }
    let mut rng = XorShiftRng::seed_from_u64(seed);
    for _ in 0..100 {
        match field {
            NormField::Biquadratic(k) => {
                let b = bound as i64;
                let x: [i64; 4] = std::array::from_fn(|_| uniform(&mut rng, -b, b));
                let xi = KElement::<BigRational>::from_ints(*k, x);
                let n = xi.norm();
                if !n.is_zero() {
                    return Ok(RandomNorm { xi: RandomElement::Biquadratic(xi), n });
                }
            }
            NormField::Cyclotomic(m) => {
                let mut v = vec![BigRational::zero(); *m as usize];
                for _ in 0..bound {
                    let j = uniform(&mut rng, 0, *m as i64 - 1) as usize;
                    let s = if rng.next_u64() & 1 == 0 { 1 } else { -1 };
                    v[j] += rat(s, 1);
                }
                let xi = Cyclo::from_cyclic(*m, v)?;
                let n = xi.norm();
                if !n.is_zero() {
                    return Ok(RandomNorm { xi: RandomElement::Cyclotomic(xi), n });
                }
            }
        }
    }
    Err(Error::BudgetExceeded("100 draws with norm zero".into()))
}

/// Norm form and its gradient with coefficients reduced modulo `modulus`.
struct NormPoly {
    a: i128,
    b: i128,
    c: i128,
    d3: i128,
    n: i128,
}

impl NormPoly {
    fn eval(&self, z: &[i128; 5], m: i128) -> i128 {
        let [x1, x2, x3, x4, y] = *z;
        let p = (x1 * x1 + self.a * x2 % m * x2 - self.b * x3 % m * x3 - self.c * x4 % m * x4).rem_euclid(m);
        let q = (2 * (x1 * x2 - self.d3 * x3 % m * x4)).rem_euclid(m);
        let y4 = (y * y % m) * (y * y % m) % m;
        (p * p % m - self.a * (q * q % m) % m - self.n * y4 % m).rem_euclid(m)
    }

    fn gradient(&self, z: &[i128; 5], m: i128) -> [i128; 5] {
        let [x1, x2, x3, x4, y] = *z;
        let p = (x1 * x1 + self.a * x2 % m * x2 - self.b * x3 % m * x3 - self.c * x4 % m * x4).rem_euclid(m);
        let q = (2 * (x1 * x2 - self.d3 * x3 % m * x4)).rem_euclid(m);
        // N = P^2 - a Q^2, dN = 2 P dP - 2 a Q dQ
        let dp = [2 * x1, 2 * self.a * x2 % m, -2 * self.b * x3 % m, -2 * self.c * x4 % m];
        let dq = [2 * x2, 2 * x1, -2 * self.d3 * x4 % m, -2 * self.d3 * x3 % m];
        let mut g = [0i128; 5];
        for i in 0..4 {
            g[i] = (2 * p % m * dp[i].rem_euclid(m) % m - 2 * self.a * q % m * dq[i].rem_euclid(m) % m).rem_euclid(m);
        }
        g[4] = (-4 * self.n % m * ((y * y % m) * y % m)).rem_euclid(m);
        g
    }
}

fn val(x: i128, p: i128, cap: u32) -> u32 {
    if x == 0 {
        return cap;
    }
    let mut x = x;
    let mut v = 0;
    while v < cap && x % p == 0 {
        x /= p;
        v += 1;
    }
    v
}

/// Does `N(x) = n y^4` have a primitive solution over `Z_p` certified from
/// residues mod `p^k`?
///
/// Plain residue search over cosets `z + p^j Z_p^5` of primitive vectors,
/// normalized so the first unit coordinate is 1. With `e = v(grad f(z))`, a
/// coset with `e < j` is decided at once: it contains a solution iff
/// `v(f(z)) >= 2e + 1` (Hensel). A coset with `e >= j` is empty when
/// `v(f(z)) < 2j`, since `f` is constant mod `p^(2j)` on it; the rest are
/// refined, up to `j = k`. Returns `false` when no coset certifies by then.
pub fn exhaustive_local(eq: &NormEquation, p: u64, k: u32) -> Result<bool> {
    exhaustive_local_budget(eq, p, k, 50_000_000)
}

pub fn exhaustive_local_budget(eq: &NormEquation, p: u64, k: u32, budget: u64) -> Result<bool> {
    let NormField::Biquadratic(field) = eq.field else {
        return domain("exhaustive local search needs a biquadratic field");
    };
    if !is_prime(&BigInt::from(p)) || k == 0 {
        return domain(format!("need a prime and k >= 1, got p = {p}, k = {k}"));
    }
    let pi = p as i128;
    let pk = pi.checked_pow(k).filter(|&v| v <= 1 << 20).ok_or_else(|| {
        Error::BudgetExceeded(format!("{p}^{k} exceeds the residue budget"))
    })?;
    // valuations beyond 2k never matter
    let m = pk * pk;
    let red = |v: i64| (v as i128).rem_euclid(m);
    let nm = BigInt::from(m);
    let poly = NormPoly {
        a: red(field.a()),
        b: red(field.b()),
        c: red(field.c()),
        d3: red(field.d3),
        n: eq.n_normalized.mod_floor(&nm).to_i128().expect("reduced"),
    };
    let cap = 2 * k + 2;
    let mut spent = 0u64;
    // level 1: projective points mod p with first nonzero coordinate 1;
    // a smooth hit is cheap, so scan all of them before refining any
    let mut deferred: Vec<([i128; 5], u32)> = Vec::new();
    let starts = (0..5usize).flat_map(|lead| (0..pi.pow(4 - lead as u32)).map(move |idx| (lead, idx)));
    for (lead, idx) in starts {
        let mut z = [0i128; 5];
        z[lead] = 1;
        let mut r = idx;
        for c in z.iter_mut().skip(lead + 1) {
            *c = r % pi;
            r /= pi;
        }
        spent += 1;
        match classify(&poly, &z, 1, k, m, pi, cap) {
            Coset::Hit => return Ok(true),
            Coset::Dead => {}
            Coset::Refine => deferred.push((z, 1)),
        }
    }
    // stack of (z, j): cosets z + p^j Z_p^5 still undecided
    let mut stack = deferred;
    while let Some((z, j)) = stack.pop() {
        let lead = z.iter().position(|&c| c % pi != 0).unwrap();
        let pj = pi.pow(j);
        let free: Vec<usize> = (0..5).filter(|&i| i != lead).collect();
        for t in 0..pi.pow(4) {
            spent += 1;
            if spent > budget {
                return Err(Error::BudgetExceeded(format!("{budget} cosets at p = {p}")));
            }
            let mut w = z;
            let mut r = t;
            for &i in &free {
                w[i] += pj * (r % pi);
                r /= pi;
            }
            match classify(&poly, &w, j + 1, k, m, pi, cap) {
                Coset::Hit => return Ok(true),
                Coset::Dead => {}
                Coset::Refine => stack.push((w, j + 1)),
            }
        }
    }
    Ok(false)
}

enum Coset {
    Hit,
    Dead,
    Refine,
}

fn classify(poly: &NormPoly, z: &[i128; 5], j: u32, k: u32, m: i128, pi: i128, cap: u32) -> Coset {
    let fv = val(poly.eval(z, m), pi, cap);
    let e = poly.gradient(z, m).iter().map(|&g| val(g, pi, cap)).min().unwrap();
    if e < j {
        return if fv > 2 * e { Coset::Hit } else { Coset::Dead };
    }
    // f is constant mod p^(2j) on the coset
    if fv < 2 * j || j >= k {
        Coset::Dead
    } else {
        Coset::Refine
    }
}

/// One regression record: `{expected, field, n, xi?}`.
#[derive(Clone, Debug, PartialEq)]
pub struct CorpusRecord {
    pub field: NormField,
    pub n: BigRational,
    pub xi: Option<Vec<BigRational>>,
    pub expected: String,
}

impl CorpusRecord {
    pub fn to_json(&self) -> Value {
        json!({
            "expected": self.expected,
            "field": self.field.to_json(),
            "n": self.n.to_string(),
            "xi": self.xi.as_ref().map(|v| v.iter().map(|c| c.to_string()).collect::<Vec<_>>()),
        })
    }

    pub fn from_json(v: &Value) -> Result<Self> {
        let bad = |what: &str| Error::Domain(format!("corpus record: bad {what}"));
        let f = &v["field"];
        let field = match f["type"].as_str() {
            Some("biquadratic") => {
                let g = |key: &str| f[key].as_i64().ok_or_else(|| bad(key));
                NormField::Biquadratic(BiquadraticField::from_triple(g("d1")?, g("d2")?, g("d3")?)?)
            }
            Some("cyclotomic") => NormField::Cyclotomic(f["m"].as_u64().ok_or_else(|| bad("m"))?),
            _ => return Err(bad("field")),
        };
        let parse = |s: &Value| -> Result<BigRational> { s.as_str().ok_or_else(|| bad("rational"))?.parse().map_err(|_| bad("rational")) };
        let n = parse(&v["n"])?;
        let xi = match &v["xi"] {
            Value::Null => None,
            Value::Array(a) => Some(a.iter().map(parse).collect::<Result<Vec<_>>>()?),
            _ => return Err(bad("xi")),
        };
        let expected = v["expected"].as_str().ok_or_else(|| bad("expected"))?.to_string();
        Ok(CorpusRecord { field, n, xi, expected })
    }
}

/// One JSON record per line.
pub fn write_corpus(records: &[CorpusRecord]) -> String {
    records.iter().map(|r| r.to_json().to_string() + "\n").collect()
}

pub fn read_corpus(text: &str) -> Result<Vec<CorpusRecord>> {
    text.lines()
        .filter(|l| !l.trim().is_empty())
        .map(|l| {
            let v: Value = serde_json::from_str(l).map_err(|e| Error::Domain(format!("corpus line: {e}")))?;
            CorpusRecord::from_json(&v)
        })
        .collect()
}
