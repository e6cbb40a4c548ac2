//! Exact square roots in Q(xi_M).
//!
//! Nonsquares are certified by a quadratic nonresidue among the values of
//! the element at the primitive roots modulo a prime `l = 1 mod M`. Roots
//! are found l-adically: a prime whose Frobenius has maximal order splits
//! Phi_M into few factors, Tonelli-Shanks runs in each residue field, and a
//! coupled Newton iteration lifts the root. The symmetric lift of the
//! correct sign pattern is the integral root, confirmed by exact squaring.

use std::time::Instant;

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Signed, Zero};
use rand_core::SeedableRng;
use rand_xorshift::XorShiftRng;
use serde::{Deserialize, Serialize};

use super::fpoly::{self, Poly};
use super::modular::{coprime, fourier_prime, powmod, prime_factors_u64};
use super::{big_to_u64_mod, cyclo_data, int_mul_mod_phi, CycloData, Cyclo};
use crate::arith::{exact_sqrt, lcm_u64};
use crate::error::{domain, Error, Result};

/// Tuning for [`sqrt_exact`].
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct SqrtConfig {
    /// l-adic precision (in bits) at which the first reconstruction is tried.
    pub precision_bits: u32,
    /// Number of times the precision is multiplied by 4 before giving up.
    pub escalations: u32,
    /// Largest number of sign patterns tried per precision level.
    pub max_patterns: u64,
    /// Fourier primes scanned for a nonresidue certificate.
    pub certificate_primes: usize,
    #[serde(skip)]
    pub deadline: Option<Instant>,
}

impl Default for SqrtConfig {
    fn default() -> Self {
        SqrtConfig { precision_bits: 256, escalations: 3, max_patterns: 1 << 14, certificate_primes: 32, deadline: None }
    }
}

/// Result of a square-root attempt.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum SqrtOutcome {
    Root(Cyclo),
    /// The element is a nonresidue modulo a prime above `prime`; `index` is
    /// the embedding (Fourier primes) or factor (lifting prime) that shows it.
    /// `prime == 0` marks a negative or non-square rational.
    NotASquare { prime: u64, index: u64 },
}

impl SqrtOutcome {
    pub fn root(self) -> Option<Cyclo> {
        match self {
            SqrtOutcome::Root(r) => Some(r),
            SqrtOutcome::NotASquare { .. } => None,
        }
    }

    pub fn is_square(&self) -> bool {
        matches!(self, SqrtOutcome::Root(_))
    }
}

fn check_deadline(cfg: &SqrtConfig) -> Result<()> {
    match cfg.deadline {
        Some(d) if Instant::now() >= d => Err(Error::Cancelled),
        _ => Ok(()),
    }
}

/// Exponent of the unit group modulo `m`.
pub fn carmichael(m: u64) -> u64 {
    let mut out = 1u64;
    for p in prime_factors_u64(m) {
        let mut k = 0;
        let mut r = m;
        while r.is_multiple_of(p) {
            r /= p;
            k += 1;
        }
        let l = if p == 2 {
            match k {
                1 => 1,
                2 => 2,
                _ => 1u64 << (k - 2),
            }
        } else {
            p.pow(k - 1) * (p - 1)
        };
        out = lcm_u64(out, l);
    }
    out
}

/// Multiplicative order of `a` modulo `m`.
pub fn unit_order(a: u64, m: u64) -> u64 {
    let lam = carmichael(m);
    let mut divs: Vec<u64> = (1..=lam).filter(|d| lam.is_multiple_of(*d)).collect();
    divs.sort();
    divs.into_iter().find(|&d| powmod(a, d, m) == 1 % m).unwrap_or(lam)
}

fn is_small_prime(n: u64) -> bool {
    n >= 2 && (2..).take_while(|d| d * d <= n).all(|d| !n.is_multiple_of(d))
}

fn mod_vec(v: &[BigInt], modulus: &BigInt) -> Vec<BigInt> {
    v.iter().map(|x| x.mod_floor(modulus)).collect()
}

fn mulmod_big(a: &[BigInt], b: &[BigInt], data: &CycloData, modulus: &BigInt) -> Vec<BigInt> {
    mod_vec(&int_mul_mod_phi(a, b, data), modulus)
}

fn poly_to_big(p: &Poly, len: usize) -> Vec<BigInt> {
    let mut v: Vec<BigInt> = p.iter().map(|&c| BigInt::from(c)).collect();
    v.resize(len, BigInt::zero());
    v
}

/// Square root of `alpha`, or a certificate that none exists.
pub fn sqrt_exact(alpha: &Cyclo, cfg: &SqrtConfig) -> Result<SqrtOutcome> {
    if alpha.is_zero() {
        return domain("square root of zero requested");
    }
    let m = alpha.conductor();
    let data = cyclo_data(m)?;
    let (a, den) = alpha.to_integer_coords();
    // sqrt(A / d) = sqrt(A d) / d, and sqrt(A d) is integral
    let t: Vec<BigInt> = a.iter().map(|x| x * &den).collect();
    if data.phi == 1 {
        return Ok(match (!t[0].is_negative()).then(|| exact_sqrt(&t[0])).flatten() {
            Some(r) => SqrtOutcome::Root(Cyclo::from_int_coords(m, vec![r], &den)?),
            None => SqrtOutcome::NotASquare { prime: 0, index: 0 },
        });
    }
    let tc = Cyclo::from_int_coords(m, t.clone(), &BigInt::one())?;

    for i in 0..cfg.certificate_primes {
        check_deadline(cfg)?;
        let Some(fp) = fourier_prime(m, i) else { break };
        let Some(vals) = tc.values_at(&fp) else { continue };
        for j in 1..m {
            let v = vals[j as usize];
            if v != 0 && coprime(j, m) && powmod(v, (fp.ell - 1) / 2, fp.ell) == fp.ell - 1 {
                return Ok(SqrtOutcome::NotASquare { prime: fp.ell, index: j });
            }
        }
    }

    let lam = carmichael(m);
    let mut tried = 0;
    let mut ell = 2u64;
    while tried < 24 {
        ell += 1;
        if !is_small_prime(ell) || m.is_multiple_of(ell) || unit_order(ell % m, m) != lam {
            continue;
        }
        tried += 1;
        match lift_with_prime(&t, &data, ell, lam as usize, cfg)? {
            Lift::Root(r) => return Ok(SqrtOutcome::Root(Cyclo::from_int_coords(m, r, &den)?)),
            Lift::NonResidue(i) => return Ok(SqrtOutcome::NotASquare { prime: ell, index: i }),
            Lift::BadPrime => continue,
            Lift::Exhausted(msg) => return Err(Error::PrecisionExhausted(msg)),
        }
    }
    Err(Error::PrecisionExhausted(format!("no usable lifting prime for conductor {m}")))
}

enum Lift {
    Root(Vec<BigInt>),
    NonResidue(u64),
    BadPrime,
    Exhausted(String),
}

fn lift_with_prime(t: &[BigInt], data: &CycloData, ell: u64, f: usize, cfg: &SqrtConfig) -> Result<Lift> {
    let phi_l: Poly = data.poly_big.iter().map(|c| big_to_u64_mod(c, ell)).collect();
    let t_l: Poly = fpoly::trim(t.iter().map(|c| big_to_u64_mod(c, ell)).collect());
    let mut rng = XorShiftRng::seed_from_u64(ell);
    let factors = fpoly::equal_degree_factor(&phi_l, f, ell, &mut rng);
    let g = factors.len();
    if g > 63 || (1u64 << (g - 1)) > cfg.max_patterns {
        return Ok(Lift::Exhausted(format!("{} sign patterns exceed the cap", 1u128 << (g - 1))));
    }
    let mut roots = Vec::with_capacity(g);
    for (i, h) in factors.iter().enumerate() {
        check_deadline(cfg)?;
        let ti = fpoly::rem(&t_l, h, ell);
        if ti.is_empty() {
            return Ok(Lift::BadPrime);
        }
        match fpoly::sqrt_in_field(&ti, h, ell, &mut rng) {
            Ok(r) => roots.push(r),
            Err(()) => return Ok(Lift::NonResidue(i as u64)),
        }
    }
    // idempotents and the initial root / inverse modulo l
    let mut idem = Vec::with_capacity(g);
    let mut beta0: Poly = Vec::new();
    let mut y0: Poly = Vec::new();
    for (h, r) in factors.iter().zip(&roots) {
        let (cof, _) = fpoly::divrem(&phi_l, h, ell);
        let inv = fpoly::inv_mod(&fpoly::rem(&cof, h, ell), h, ell).expect("coprime factors");
        let e = fpoly::rem(&fpoly::mul(&cof, &inv, ell), &phi_l, ell);
        let two_r = fpoly::scale(r, 2, ell);
        let ir = fpoly::inv_mod(&two_r, h, ell).expect("unit root");
        beta0 = fpoly::add(&beta0, &fpoly::mulmod_poly(r, &e, &phi_l, ell), ell);
        y0 = fpoly::add(&y0, &fpoly::mulmod_poly(&ir, &e, &phi_l, ell), ell);
        idem.push(e);
    }
    let n = data.phi;
    let lb = BigInt::from(ell);
    let mut beta = poly_to_big(&beta0, n);
    let mut y = poly_to_big(&y0, n);
    let mut es: Vec<Vec<BigInt>> = idem.iter().map(|e| poly_to_big(e, n)).collect();
    let mut digits: u32 = 1;
    let mut modulus = lb.clone();
    let two = BigInt::from(2);
    let three = BigInt::from(3);
    let bits_per_digit = (ell as f64).log2();
    for level in 0..=cfg.escalations {
        let want_bits = cfg.precision_bits as f64 * 4f64.powi(level as i32);
        while (digits as f64) * bits_per_digit < want_bits {
            check_deadline(cfg)?;
            digits *= 2;
            modulus = num_traits::pow(lb.clone(), digits as usize);
            let tm = mod_vec(t, &modulus);
            let b2 = mulmod_big(&beta, &beta, data, &modulus);
            let diff: Vec<BigInt> = b2.iter().zip(&tm).map(|(x, y)| x - y).collect();
            let corr = mulmod_big(&diff, &y, data, &modulus);
            beta = beta.iter().zip(&corr).map(|(b, c)| (b - c).mod_floor(&modulus)).collect();
            let by = mulmod_big(&beta, &y, data, &modulus);
            let mut two_minus: Vec<BigInt> = by.iter().map(|v| -(v * &two)).collect();
            two_minus[0] += &two;
            y = mulmod_big(&y, &two_minus, data, &modulus);
            for e in es.iter_mut() {
                let e2 = mulmod_big(e, e, data, &modulus);
                let mut three_minus: Vec<BigInt> = e.iter().map(|v| -(v * &two)).collect();
                three_minus[0] += &three;
                *e = mulmod_big(&e2, &three_minus, data, &modulus);
            }
        }
        if let Some(r) = scan_patterns(&beta, &es, t, data, &modulus, cfg)? {
            return Ok(Lift::Root(r));
        }
    }
    Ok(Lift::Exhausted(format!(
        "no small sign pattern at {} l-adic bits (l = {ell})",
        (digits as f64 * bits_per_digit) as u64
    )))
}

fn scan_patterns(
    beta: &[BigInt],
    es: &[Vec<BigInt>],
    t: &[BigInt],
    data: &CycloData,
    modulus: &BigInt,
    cfg: &SqrtConfig,
) -> Result<Option<Vec<BigInt>>> {
    let g = es.len();
    let w: Vec<Vec<BigInt>> = es.iter().map(|e| mulmod_big(beta, e, data, modulus)).collect();
    let limit_bits = modulus.bits() / 2;
    let half = modulus >> 1;
    let mut cand: Vec<BigInt> = beta.to_vec();
    let count = 1u64 << (g.saturating_sub(1));
    let mut prev_gray = 0u64;
    for k in 0..count {
        if k % 256 == 0 {
            check_deadline(cfg)?;
        }
        let gray = k ^ (k >> 1);
        if k > 0 {
            // flip one component; component 0 is never flipped
            let bit = (gray ^ prev_gray).trailing_zeros() as usize + 1;
            let sign_now_negative = gray & (1 << (bit - 1)) != 0;
            for (c, wi) in cand.iter_mut().zip(&w[bit]) {
                let delta = wi * BigInt::from(2);
                *c = if sign_now_negative { &*c - delta } else { &*c + delta };
                *c = c.mod_floor(modulus);
            }
        }
        prev_gray = gray;
        let lifted: Vec<BigInt> = cand.iter().map(|c| if *c > half { c - modulus } else { c.clone() }).collect();
        if lifted.iter().all(|c| c.bits() < limit_bits) {
            let sq = int_mul_mod_phi(&lifted, &lifted, data);
            if sq == t {
                return Ok(Some(lifted));
            }
        }
    }
    Ok(None)
}

/// `true` iff `alpha` is a square in its field.
pub fn is_square(alpha: &Cyclo, cfg: &SqrtConfig) -> Result<bool> {
    Ok(sqrt_exact(alpha, cfg)?.is_square())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::cyclotomic::gauss_sum_sqrt;
    use num_rational::BigRational;

    #[test]
    fn carmichael_values() {
        assert_eq!(carmichael(371), 156);
        assert_eq!(carmichael(221), 48);
        assert_eq!(carmichael(884), 48);
        assert_eq!(carmichael(8), 2);
        assert_eq!(unit_order(3, 4), 2);
    }

    #[test]
    fn roots_and_certificates() {
        let cfg = SqrtConfig::default();
        let i = Cyclo::xi_pow(4, 1).unwrap();
        assert!(matches!(sqrt_exact(&i, &cfg).unwrap(), SqrtOutcome::NotASquare { .. }));
        let seventeen = Cyclo::from_ints(17, &[17]).unwrap();
        let r = sqrt_exact(&seventeen, &cfg).unwrap().root().unwrap();
        let g = gauss_sum_sqrt(17, 17).unwrap();
        assert!(r == g || r == -&g);
        let b = Cyclo::from_ints(21, &[1, -2, 0, 3, 1, 0, 0, 5]).unwrap().scale(&BigRational::new(1.into(), 3.into()));
        let sq = &b * &b;
        let r = sqrt_exact(&sq, &cfg).unwrap().root().unwrap();
        assert!(r == b || r == -&b);
        let two = Cyclo::from_ints(5, &[2]).unwrap();
        assert!(!sqrt_exact(&two, &cfg).unwrap().is_square());
    }
}
