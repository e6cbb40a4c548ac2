//! Lenstra's elliptic curve method on Montgomery curves, x-only arithmetic.
//! Curves come from Suyama's parametrization with sigma = 7, 8, 9, ...

use num_bigint::BigUint;
use num_integer::Integer;
use num_traits::One;

use crate::arith::primes_up_to;

/// (B1, curves) per level; B2 = 100 B1.
const SCHEDULE: [(u64, u64); 4] = [(2_000, 25), (11_000, 90), (50_000, 300), (250_000, 700)];
const WHEEL: u64 = 2310;

#[derive(Clone)]
struct Pt {
    x: BigUint,
    z: BigUint,
}

struct Curve<'a> {
    n: &'a BigUint,
    a24: BigUint,
}

enum Setup<'a> {
    Curve(Curve<'a>, Pt),
    Factor(BigUint),
    Skip,
}

impl<'a> Curve<'a> {
    fn new(n: &'a BigUint, sigma: u64) -> Setup<'a> {
        let s = BigUint::from(sigma);
        let u = (&s * &s + n - 5u32) % n;
        let v = (&s * 4u32) % n;
        let u3 = u.modpow(&BigUint::from(3u32), n);
        let v3 = v.modpow(&BigUint::from(3u32), n);
        let vu = (&v + n - &u) % n;
        let num = (vu.modpow(&BigUint::from(3u32), n) * ((&u * 3u32 + &v) % n)) % n;
        let den = (&u3 * &v * 16u32) % n;
        let g = den.gcd(n);
        if g == *n {
            return Setup::Skip;
        }
        if !g.is_one() {
            return Setup::Factor(g);
        }
        let Some(inv) = den.modinv(n) else { return Setup::Skip };
        Setup::Curve(Curve { n, a24: num * inv % n }, Pt { x: u3, z: v3 })
    }

    fn mul(&self, a: &BigUint, b: &BigUint) -> BigUint {
        a * b % self.n
    }

    fn sub(&self, a: &BigUint, b: &BigUint) -> BigUint {
        if a >= b {
            a - b
        } else {
            a + self.n - b
        }
    }

    fn add(&self, a: &BigUint, b: &BigUint) -> BigUint {
        let s = a + b;
        if &s >= self.n {
            s - self.n
        } else {
            s
        }
    }

    fn dbl(&self, p: &Pt) -> Pt {
        let s = self.add(&p.x, &p.z);
        let d = self.sub(&p.x, &p.z);
        let t1 = self.mul(&s, &s);
        let t2 = self.mul(&d, &d);
        let t3 = self.sub(&t1, &t2);
        let x = self.mul(&t1, &t2);
        let z = self.mul(&t3, &self.add(&t2, &self.mul(&self.a24, &t3)));
        Pt { x, z }
    }

    /// p + q given p - q.
    fn dadd(&self, p: &Pt, q: &Pt, diff: &Pt) -> Pt {
        let u = self.mul(&self.sub(&p.x, &p.z), &self.add(&q.x, &q.z));
        let v = self.mul(&self.add(&p.x, &p.z), &self.sub(&q.x, &q.z));
        let s = self.add(&u, &v);
        let d = self.sub(&u, &v);
        Pt { x: self.mul(&diff.z, &self.mul(&s, &s)), z: self.mul(&diff.x, &self.mul(&d, &d)) }
    }

    fn ladder(&self, p: &Pt, k: u64) -> Pt {
        if k == 1 {
            return p.clone();
        }
        let mut r0 = p.clone();
        let mut r1 = self.dbl(p);
        for i in (0..63 - k.leading_zeros()).rev() {
            if (k >> i) & 1 == 1 {
                r0 = self.dadd(&r1, &r0, p);
                r1 = self.dbl(&r1);
            } else {
                r1 = self.dadd(&r1, &r0, p);
                r0 = self.dbl(&r0);
            }
        }
        r0
    }
}

fn check(g: BigUint, n: &BigUint) -> Option<BigUint> {
    (!g.is_one() && &g != n).then_some(g)
}

/// Run one curve with bounds b1, b2. `primes` covers b2 + WHEEL, `is_p` is its sieve.
fn run_curve(n: &BigUint, sigma: u64, b1: u64, b2: u64, primes: &[u64], is_p: &[bool]) -> Option<BigUint> {
    let (c, mut q) = match Curve::new(n, sigma) {
        Setup::Curve(c, p) => (c, p),
        Setup::Factor(g) => return check(g, n),
        Setup::Skip => return None,
    };
    for &p in primes.iter().take_while(|&&p| p <= b1) {
        let mut pe = p;
        while pe <= b1 / p {
            pe *= p;
        }
        q = c.ladder(&q, pe);
    }
    let g = q.z.gcd(n);
    if &g == n {
        return None;
    }
    if !g.is_one() {
        return Some(g);
    }
    // stage 2: q' = m W + j or m W - j with j coprime to W, j < W/2
    let baby_j: Vec<u64> = (1..WHEEL / 2).filter(|j| j.gcd(&WHEEL) == 1).collect();
    let mut baby = vec![None; (WHEEL / 2) as usize];
    let q2 = c.dbl(&q);
    let mut prev = q.clone();
    let mut cur = c.dadd(&q2, &q, &q);
    baby[1] = Some(q.clone());
    let mut j = 3;
    while j < WHEEL / 2 {
        baby[j as usize] = Some(cur.clone());
        let next = c.dadd(&cur, &q2, &prev);
        prev = cur;
        cur = next;
        j += 2;
    }
    let w = c.ladder(&q, WHEEL);
    let m0 = (b1 / WHEEL).max(1);
    let m1 = b2 / WHEEL + 1;
    let mut gm = c.ladder(&w, m0);
    let mut g_prev: Option<Pt> = None;
    let mut acc = BigUint::one();
    let mut m = m0;
    loop {
        let base = m * WHEEL;
        for &jj in &baby_j {
            let up = base + jj;
            let hit = (up > b1 && up <= b2 && is_p[up as usize])
                || (base > jj && base - jj > b1 && base - jj <= b2 && is_p[(base - jj) as usize]);
            if hit {
                let b = baby[jj as usize].as_ref().expect("odd baby step");
                let t = c.sub(&c.mul(&gm.x, &b.z), &c.mul(&b.x, &gm.z));
                acc = c.mul(&acc, &t);
            }
        }
        m += 1;
        if m > m1 {
            break;
        }
        let next = match &g_prev {
            Some(gp) => c.dadd(&gm, &w, gp),
            None if m == 2 => c.dbl(&w),
            None => c.ladder(&w, m),
        };
        g_prev = Some(std::mem::replace(&mut gm, next));
        if m.is_multiple_of(64) {
            if let Some(g) = check(acc.gcd(n), n) {
                return Some(g);
            }
        }
    }
    check(acc.gcd(n), n)
}

/// Look for a nontrivial factor of the odd composite `n`, trying at most `max_curves` curves.
pub(crate) fn ecm_split(n: &BigUint, max_curves: u64) -> Option<BigUint> {
    let mut sigma = 7u64;
    let mut spent = 0u64;
    for &(b1, curves) in SCHEDULE.iter() {
        let b2 = 100 * b1;
        let primes = primes_up_to(b2 + WHEEL);
        let mut is_p = vec![false; (b2 + WHEEL + 1) as usize];
        for &p in &primes {
            is_p[p as usize] = true;
        }
        for _ in 0..curves {
            if spent >= max_curves {
                return None;
            }
            spent += 1;
            if let Some(g) = run_curve(n, sigma, b1, b2, &primes, &is_p) {
                return Some(g);
            }
            sigma += 1;
        }
    }
    None
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn splits_semiprimes() {
        let p: BigUint = "1000000000000000003".parse().unwrap();
        let q: BigUint = "1000000000000000009".parse().unwrap();
        let n = &p * &q;
        let g = ecm_split(&n, 500).unwrap();
        assert!(g == p || g == q);
    }
}
