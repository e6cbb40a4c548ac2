use ntlab::arith::*;
use ntlab::scalar::{rat, rat_int};
use ntlab::{BigInt, BigRational};
use proptest::prelude::*;

fn big(n: i64) -> BigInt {
    BigInt::from(n)
}

#[test]
fn factor_examples() {
    let cfg = FactorConfig::default();
    let f = factor_int(&big(371), &cfg).unwrap();
    assert_eq!(f.to_string(), "7*53");
    let f = factor_int(&big(1), &cfg).unwrap();
    assert_eq!((f.sign, f.factors.len()), (1, 0));
    let f = factor_int(&big(-884), &cfg).unwrap();
    assert_eq!(f.sign, -1);
    assert_eq!(f.exponent(&big(2)), 2);
    assert_eq!(f.exponent(&big(13)), 1);
    assert_eq!(f.exponent(&big(17)), 1);
    assert_eq!(f.value(), big(-884));
    let (num, den) = factor(&rat(-50, 21), &cfg).unwrap();
    assert_eq!((num.value(), den.value()), (big(-50), big(21)));
}

#[test]
fn factor_handles_prime_powers_and_large_factors() {
    let cfg = FactorConfig::default();
    let p: BigInt = "1000000000000000003".parse().unwrap();
    let q: BigInt = "1000000000000000009".parse().unwrap();
    let f = factor_int(&(&p * &p * &q), &cfg).unwrap();
    assert_eq!(f.exponent(&p), 2);
    assert_eq!(f.exponent(&q), 1);
    let rho_only = FactorConfig { ecm_curves: 0, ..cfg };
    assert!(matches!(factor_int(&(&p * &q), &rho_only), Err(ntlab::Error::BoundExceeded(_))));
}

#[test]
fn symbol_examples() {
    assert_eq!(jacobi(&big(2), &big(7)), 1);
    assert_eq!(jacobi(&big(12345), &big(1)), 1);
    assert_eq!(jacobi(&big(17), &big(13)), 1);
    assert_eq!(jacobi(&big(21), &big(15)), 0);
    assert_eq!(quartic_symbol(&big(17), &big(13)).unwrap(), -1);
    assert_eq!(quartic_symbol(&big(1), &big(29)).unwrap(), 1);
    assert!(quartic_symbol(&big(2), &big(13)).is_err());
    assert!(quartic_symbol(&big(17), &big(7)).is_err());
}

#[test]
fn hilbert_examples() {
    let two = PlaceQ::prime(2);
    assert_eq!(hilbert_i64(3, -1, &two), -1);
    assert_eq!(hilbert_i64(1, -7, &PlaceQ::prime(7)), 1);
    assert_eq!(hilbert_i64(1, -1, &PlaceQ::Real), 1);
    assert_eq!(hilbert_i64(25, -1, &two), 1);
    assert_eq!(hilbert_i64(-1, -1, &PlaceQ::Real), -1);
}

#[test]
fn dyadic_symbol_matches_search() {
    for a in 1..64u64 {
        for b in 1..64u64 {
            if a % 4 == 0 || b % 4 == 0 {
                continue;
            }
            let v = hilbert_int(&BigInt::from(a), &BigInt::from(b), &PlaceQ::prime(2));
            assert_eq!(v, hilbert2_search(a, b, 8), "({a}, {b})");
        }
    }
}

fn nonzero_rat() -> impl Strategy<Value = BigRational> {
    (-2000i64..2000, 1i64..200).prop_filter_map("nonzero", |(n, d)| (n != 0).then(|| rat(n, d)))
}

fn place() -> impl Strategy<Value = PlaceQ> {
    prop_oneof![Just(PlaceQ::Real), prop::sample::select(vec![2i64, 3, 5, 7, 11, 13, 17, 53]).prop_map(PlaceQ::prime)]
}

fn odd_prime() -> impl Strategy<Value = i64> {
    prop::sample::select(primes_up_to(2000).into_iter().skip(1).map(|p| p as i64).collect::<Vec<_>>())
}

fn places_for(a: &BigRational, b: &BigRational) -> Vec<PlaceQ> {
    let mut ps = vec![PlaceQ::Real, PlaceQ::prime(2)];
    let cfg = FactorConfig::default();
    for x in [a, b] {
        let (n, d) = factor(x, &cfg).unwrap();
        for p in n.primes().chain(d.primes()) {
            let v = PlaceQ::Finite(p.clone());
            if !ps.contains(&v) {
                ps.push(v);
            }
        }
    }
    ps
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(10_000))]

    #[test]
    fn hilbert_bilinear(a in nonzero_rat(), a2 in nonzero_rat(), b in nonzero_rat(), v in place()) {
        let lhs = hilbert_qp(&(&a * &a2), &b, &v);
        prop_assert_eq!(lhs, hilbert_qp(&a, &b, &v) * hilbert_qp(&a2, &b, &v));
        prop_assert_eq!(hilbert_qp(&a, &b, &v), hilbert_qp(&b, &a, &v));
    }

    #[test]
    fn hilbert_product_formula(a in nonzero_rat(), b in nonzero_rat()) {
        let prod: i8 = places_for(&a, &b).iter().map(|v| hilbert_qp(&a, &b, v)).product();
        prop_assert_eq!(prod, 1);
    }
}

proptest! {
    #[test]
    fn jacobi_multiplicative(a in -5000i64..5000, b in -5000i64..5000, m in 0i64..2000, n in 0i64..2000) {
        let (m, n) = (2 * m + 1, 2 * n + 1);
        prop_assert_eq!(jacobi_i64(a * b, m), jacobi_i64(a, m) * jacobi_i64(b, m));
        prop_assert_eq!(jacobi_i64(a, m * n), jacobi_i64(a, m) * jacobi_i64(a, n));
    }

    #[test]
    fn quartic_of_square_is_legendre(a in 1i64..100_000, p in odd_prime()) {
        prop_assume!(p % 4 == 1 && a % p != 0);
        prop_assert_eq!(quartic_symbol(&big(a * a), &big(p)).unwrap(), jacobi(&big(a), &big(p)));
    }

    #[test]
    fn factorization_reconstructs(n in prop::num::i64::ANY) {
        prop_assume!(n != 0);
        let f = factor_int(&big(n), &FactorConfig::default()).unwrap();
        prop_assert_eq!(f.value(), big(n));
        prop_assert!(f.primes().all(is_prime));
    }

    #[test]
    fn sqrt_mod_prime_squares_back(a in 0i64..1_000_000, p in odd_prime()) {
        let r = sqrt_mod_prime(&big(a), &big(p));
        prop_assert_eq!(r.is_some(), jacobi_i64(a, p) >= 0);
        if let Some(r) = r {
            prop_assert_eq!((&r * &r - big(a)) % big(p), BigInt::from(0));
        }
    }
}

#[test]
fn rational_square_classes() {
    assert!(is_rational_square(&rat(9, 4)));
    assert!(!is_rational_square(&rat_int(-1)));
    assert!(is_square_local(&rat_int(17), &PlaceQ::prime(2)));
    assert!(!is_square_local(&rat_int(5), &PlaceQ::prime(2)));
}
