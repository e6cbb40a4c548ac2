use std::time::Instant;

use ntlab::coverings::*;
use ntlab::cyclotomic::{gauss_sum_sqrt, sqrt_exact, Cyclo, SqrtConfig};
use ntlab::BigRational;

fn int(n: i64) -> BigRational {
    BigRational::from_integer(n.into())
}

#[test]
fn delta_examples() {
    let s = delta_for_biquadratic(1, 13, 17).unwrap();
    assert_eq!(s.conductor, 221);
    assert_eq!(s.delta, sin_divisor(&a_pq(13, 17).unwrap(), 221).unwrap());

    let s = delta_for_biquadratic(1, 17, -1).unwrap();
    assert_eq!(s.conductor, 68);
    assert_eq!(s.delta, gauss_sum_sqrt(17, 68).unwrap());

    let s = delta_for_biquadratic(1, 13, -17).unwrap();
    assert_eq!(s.conductor, 884);
    let expect = &gauss_sum_sqrt(13, 884).unwrap() * &sin_divisor(&a_pq(13, 17).unwrap(), 884).unwrap();
    assert_eq!(s.delta, expect);
}

#[test]
fn galois_examples() {
    let cfg = SqrtConfig::default();
    for t in [(1, 13, 17), (1, 13, -17), (1, 17, -1)] {
        let t0 = Instant::now();
        let s = delta_for_biquadratic(t.0, t.1, t.2).unwrap();
        assert!(is_galois_double_cover(&s, &cfg).unwrap(), "{t:?}");
        eprintln!("{t:?}: {:?}", t0.elapsed());
    }
    let mut bad = delta_for_biquadratic(1, 13, -17).unwrap();
    bad.delta = Cyclo::xi_pow(884, 1).unwrap();
    assert!(!is_galois_double_cover(&bad, &cfg).unwrap());
    bad.delta = Cyclo::from_base(884, int(9)).unwrap();
    assert!(!is_galois_double_cover(&bad, &cfg).unwrap());
}

#[test]
fn u_7_53_square_class() {
    let u = u_pq(7, 53, 371).unwrap();
    let s = gauss_sum_sqrt(-7, 371).unwrap();
    let cfg = SqrtConfig::default();
    for sign in [2, -2] {
        let w = &Cyclo::from_base(371, int(5)).unwrap() + &s.scale(&int(sign));
        let r = u.div(&w).unwrap();
        assert!(!sqrt_exact(&r, &cfg).unwrap().is_square());
        let neg = -&r;
        let root = sqrt_exact(&neg, &cfg).unwrap().root().expect("-u/w is a square");
        assert_eq!(&root * &root, neg);
    }
}

#[test]
fn sin_a_7_53_matches_exact_product() {
    let d = a_pq(7, 53).unwrap();
    let sin = sin_divisor(&d, 371).unwrap();
    let amb = 1484i64;
    let (mut num, mut den) = (Cyclo::one(1484).unwrap(), Cyclo::one(1484).unwrap());
    for (x, &c) in d.terms() {
        let (k, n) = (*x.numer(), *x.denom());
        let one_minus = &Cyclo::one(1484).unwrap() - &Cyclo::xi_pow(1484, k * (amb / n)).unwrap();
        let f = &one_minus * &Cyclo::xi_pow(1484, amb / 4 - k * (amb / (2 * n))).unwrap();
        for _ in 0..c.abs() {
            if c > 0 {
                num = &num * &f;
            } else {
                den = &den * &f;
            }
        }
    }
    assert_eq!(&sin.lift(1484).unwrap() * &den, num);
    assert!(sin.is_real());
    assert!(sin_divisor_numeric(&d) > 0.0);
}

#[test]
fn generators_for_small_conductors() {
    assert_eq!(covering_generators_cyclotomic(371).unwrap().len(), 1);
    assert!(covering_generators_cyclotomic(13).unwrap().is_empty());
    let g = covering_generators_cyclotomic(15).unwrap();
    assert_eq!(g.len(), 1);
    let expect = &gauss_sum_sqrt(5, 15).unwrap() * &sin_divisor(&a_pq(3, 5).unwrap(), 15).unwrap();
    assert_eq!(g[0], expect);
    let u = u_pq(13, 17, 221).unwrap();
    assert_eq!(u, sin_divisor(&a_pq(13, 17).unwrap(), 221).unwrap());
    assert_eq!(u_pq(-1, 3, 12).unwrap(), gauss_sum_sqrt(3, 12).unwrap());
    assert!(u_pq(3, 7, 15).is_err());
}

#[test]
fn augmentation_vanishes_for_odd_pairs() {
    let primes: Vec<i64> = (3..50).filter(|&p| ntlab::arith::is_prime_u64(p as u64)).collect();
    for (i, &p) in primes.iter().enumerate() {
        for &q in &primes[i + 1..] {
            assert_eq!(a_pq(p, q).unwrap().augmentation(), 0, "({p}, {q})");
        }
    }
}

#[test]
fn u_pq_independent_mod_squares() {
    let cfg = SqrtConfig::default();
    for m in [105u64, 231] {
        let us = covering_generators_cyclotomic(m).unwrap();
        assert_eq!(us.len(), 3);
        for mask in 1u32..8 {
            let mut x = Cyclo::one(m).unwrap();
            for (i, u) in us.iter().enumerate() {
                if mask >> i & 1 == 1 {
                    x = &x * u;
                }
            }
            assert!(!sqrt_exact(&x, &cfg).unwrap().is_square(), "m = {m}, mask = {mask}");
        }
    }
}

#[test]
fn covering_json_roundtrip() {
    let s = delta_for_biquadratic(1, 17, -1).unwrap();
    let j = s.to_json();
    assert_eq!(CoveringSpec::from_json(&j).unwrap(), s);
    let text = serde_json::to_string(&j).unwrap();
    assert!(text.find("\"conductor\"").unwrap() < text.find("\"delta\"").unwrap());
}
