//! Dense polynomials over a small prime field F_l (coefficients low first).

use num_bigint::BigUint;
use num_traits::{One, Zero};
use rand_core::RngCore;

use super::modular::{invmod, mulmod};

pub type Poly = Vec<u64>;

pub fn trim(mut a: Poly) -> Poly {
    while a.last() == Some(&0) {
        a.pop();
    }
    a
}

pub fn deg(a: &Poly) -> isize {
    a.len() as isize - 1
}

pub fn sub(a: &Poly, b: &Poly, l: u64) -> Poly {
    let n = a.len().max(b.len());
    let mut out = vec![0; n];
    for (i, o) in out.iter_mut().enumerate() {
        let x = a.get(i).copied().unwrap_or(0);
        let y = b.get(i).copied().unwrap_or(0);
        *o = (x + l - y) % l;
    }
    trim(out)
}

pub fn add(a: &Poly, b: &Poly, l: u64) -> Poly {
    let n = a.len().max(b.len());
    let mut out = vec![0; n];
    for (i, o) in out.iter_mut().enumerate() {
        *o = (a.get(i).copied().unwrap_or(0) + b.get(i).copied().unwrap_or(0)) % l;
    }
    trim(out)
}

pub fn scale(a: &Poly, c: u64, l: u64) -> Poly {
    trim(a.iter().map(|&x| mulmod(x, c, l)).collect())
}

pub fn mul(a: &Poly, b: &Poly, l: u64) -> Poly {
    if a.is_empty() || b.is_empty() {
        return Vec::new();
    }
    // l < 2^32 keeps products below 2^64; accumulate in u128 and reduce late
    let mut acc = vec![0u128; a.len() + b.len() - 1];
    for (i, &x) in a.iter().enumerate() {
        if x == 0 {
            continue;
        }
        for (j, &y) in b.iter().enumerate() {
            acc[i + j] += (x * y) as u128;
        }
    }
    trim(acc.into_iter().map(|v| (v % l as u128) as u64).collect())
}

pub fn divrem(a: &Poly, b: &Poly, l: u64) -> (Poly, Poly) {
    let b = trim(b.clone());
    assert!(!b.is_empty(), "division by zero polynomial");
    let mut r = trim(a.clone());
    if r.len() < b.len() {
        return (Vec::new(), r);
    }
    let db = b.len() - 1;
    let inv = invmod(b[db], l);
    let mut q = vec![0; r.len() - db];
    while r.len() > db && !r.is_empty() {
        let k = r.len() - 1 - db;
        let c = mulmod(*r.last().unwrap(), inv, l);
        q[k] = c;
        for (j, &bj) in b.iter().enumerate() {
            let t = mulmod(c, bj, l);
            r[k + j] = (r[k + j] + l - t) % l;
        }
        r = trim(r);
    }
    (trim(q), r)
}

pub fn rem(a: &Poly, b: &Poly, l: u64) -> Poly {
    divrem(a, b, l).1
}

pub fn monic(a: &Poly, l: u64) -> Poly {
    match a.last() {
        Some(&c) => scale(a, invmod(c, l), l),
        None => Vec::new(),
    }
}

pub fn gcd(a: &Poly, b: &Poly, l: u64) -> Poly {
    let (mut x, mut y) = (trim(a.clone()), trim(b.clone()));
    while !y.is_empty() {
        let r = rem(&x, &y, l);
        x = y;
        y = r;
    }
    monic(&x, l)
}

/// Inverse of `a` modulo `m`, if coprime.
pub fn inv_mod(a: &Poly, m: &Poly, l: u64) -> Option<Poly> {
    let (mut r0, mut r1) = (m.clone(), rem(a, m, l));
    let (mut t0, mut t1): (Poly, Poly) = (Vec::new(), vec![1]);
    while !r1.is_empty() {
        let (q, r2) = divrem(&r0, &r1, l);
        let t2 = sub(&t0, &mul(&q, &t1, l), l);
        r0 = std::mem::replace(&mut r1, r2);
        t0 = std::mem::replace(&mut t1, t2);
    }
    if r0.len() != 1 {
        return None;
    }
    let c = invmod(r0[0], l);
    Some(rem(&scale(&t0, c, l), m, l))
}

pub fn mulmod_poly(a: &Poly, b: &Poly, m: &Poly, l: u64) -> Poly {
    rem(&mul(a, b, l), m, l)
}

pub fn powmod_poly(a: &Poly, e: &BigUint, m: &Poly, l: u64) -> Poly {
    let mut r: Poly = rem(&vec![1], m, l);
    let base = rem(a, m, l);
    for i in (0..e.bits()).rev() {
        r = mulmod_poly(&r, &r, m, l);
        if e.bit(i) {
            r = mulmod_poly(&r, &base, m, l);
        }
    }
    r
}

fn random_poly(d: usize, l: u64, rng: &mut impl RngCore) -> Poly {
    trim((0..d).map(|_| ((rng.next_u64() as u128 * l as u128) >> 64) as u64).collect())
}

/// Split a squarefree product of irreducibles of common degree `d` (odd `l`).
pub fn equal_degree_factor(f: &Poly, d: usize, l: u64, rng: &mut impl RngCore) -> Vec<Poly> {
    let f = monic(f, l);
    let n = f.len() - 1;
    if n == d {
        return vec![f];
    }
    let e = (BigUint::from(l).pow(d as u32) - BigUint::one()) >> 1;
    loop {
        let r = random_poly(n, l, rng);
        if r.len() < 2 {
            continue;
        }
        let h = sub(&powmod_poly(&r, &e, &f, l), &vec![1], l);
        let g = gcd(&h, &f, l);
        let dg = g.len() - 1;
        if dg > 0 && dg < n {
            let (q, _) = divrem(&f, &g, l);
            let mut out = equal_degree_factor(&g, d, l, rng);
            out.extend(equal_degree_factor(&q, d, l, rng));
            return out;
        }
    }
}

/// Square root in F_q = F_l[x]/(h), q = l^deg h, by Tonelli-Shanks.
/// `Err(())` when `a` is a nonsquare.
pub fn sqrt_in_field(a: &Poly, h: &Poly, l: u64, rng: &mut impl RngCore) -> Result<Poly, ()> {
    let a = rem(a, h, l);
    if a.is_empty() {
        return Ok(Vec::new());
    }
    let f = h.len() - 1;
    let q1 = BigUint::from(l).pow(f as u32) - BigUint::one();
    let one: Poly = vec![1];
    let half = &q1 >> 1;
    if powmod_poly(&a, &half, h, l) != one {
        return Err(());
    }
    let s = q1.trailing_zeros().unwrap_or(0);
    let t = &q1 >> s;
    let minus_one: Poly = vec![l - 1];
    let z = loop {
        let z = random_poly(f, l, rng);
        if !z.is_empty() && powmod_poly(&z, &half, h, l) == minus_one {
            break z;
        }
    };
    let mut m = s;
    let mut c = powmod_poly(&z, &t, h, l);
    let mut x = powmod_poly(&a, &((&t + BigUint::one()) >> 1), h, l);
    let mut b = powmod_poly(&a, &t, h, l);
    while b != one {
        let mut i = 0;
        let mut bb = b.clone();
        while bb != one {
            bb = mulmod_poly(&bb, &bb, h, l);
            i += 1;
        }
        let mut w = c.clone();
        for _ in 0..(m - i - 1) {
            w = mulmod_poly(&w, &w, h, l);
        }
        x = mulmod_poly(&x, &w, h, l);
        c = mulmod_poly(&w, &w, h, l);
        b = mulmod_poly(&b, &c, h, l);
        m = i;
    }
    Ok(x)
}

pub fn is_zero(a: &Poly) -> bool {
    a.iter().all(|c| c.is_zero())
}
