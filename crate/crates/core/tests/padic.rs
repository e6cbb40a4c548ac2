use ntlab::arith::{hilbert_qp, is_prime_u64, jacobi_i64, PlaceQ};
use ntlab::biquadratic::normalize_field;
use ntlab::padic::*;
use ntlab::quadratic::QuadElement;
use ntlab::scalar::rat;
use ntlab::{BigInt, BigRational, Error};
use proptest::prelude::*;

fn bi(v: &[i64]) -> Vec<BigInt> {
    v.iter().map(|&x| BigInt::from(x)).collect()
}

fn qe(t: i64, a: i64, b: i64) -> QuadElement<BigRational> {
    QuadElement::new(t, rat(a, 1), rat(b, 1))
}

#[test]
fn hensel_examples() {
    let two = BigInt::from(2);
    let f = bi(&[-17, 0, 1]);
    assert_eq!(hensel_root(&f, &BigInt::from(1), 1, &two, 30), Err(Error::Inconclusive));
    let r = hensel_root(&f, &BigInt::from(1), 3, &two, 30).unwrap();
    assert_eq!(&r % 8, BigInt::from(1));
    assert_eq!((&r * &r - 17) % (BigInt::from(1) << 30), BigInt::from(0));

    let p = BigInt::from(17);
    let r = hensel_root(&bi(&[-13, 0, 1]), &BigInt::from(8), 1, &p, 12).unwrap();
    assert_eq!(&r % &p, BigInt::from(8));
    assert_eq!((&r * &r - 13) % p.pow(12), BigInt::from(0));

    let r = hensel_root(&bi(&[-41, 1]), &BigInt::from(1), 1, &BigInt::from(5), 6).unwrap();
    assert_eq!(r, BigInt::from(41));
}

#[test]
fn hensel_refinement_keeps_digits() {
    let p = BigInt::from(7);
    let f = bi(&[-2, 0, 1]);
    let lo = hensel_root(&f, &BigInt::from(3), 1, &p, 5).unwrap();
    let hi = hensel_root(&f, &BigInt::from(3), 1, &p, 20).unwrap();
    assert_eq!(&hi % p.pow(5), lo);
}

#[test]
fn splitting_examples() {
    let k = normalize_field(13, 17).unwrap();
    let t = |p| {
        let d = splitting_type(&k, &PlaceQ::prime(p));
        (d.e, d.f, d.g)
    };
    assert_eq!(t(13), (2, 1, 2));
    assert_eq!(t(43), (1, 1, 4));
    assert_eq!(t(5), (1, 2, 2));
}

/// Roots mod p of the minimal polynomial of sqrt(a) + sqrt(b).
fn root_count(a: i64, b: i64, p: i64) -> usize {
    (0..p)
        .filter(|&x| {
            let x2 = x * x % p;
            let v = (x2 * x2 - 2 * (a + b).rem_euclid(p) * x2 + (a - b).pow(2)).rem_euclid(p);
            v == 0
        })
        .count()
}

#[test]
fn splitting_matches_root_count() {
    let fields = [(13, 17), (-1, 17), (2, -1), (6, 15), (5, 29), (-3, 7), (-11, -19)];
    for (x, y) in fields {
        let k = normalize_field(x, y).unwrap();
        let (a, b) = (k.a(), k.b());
        for p in (3..400).filter(|&p| is_prime_u64(p as u64)) {
            let d = splitting_type(&k, &PlaceQ::prime(p));
            assert_eq!(d.e * d.f * d.g, 4);
            if (a * b * (a - b)) % p == 0 {
                continue;
            }
            assert_eq!(d.e, 1, "{k} at {p}");
            let roots = root_count(a, b, p);
            assert_eq!((d.f, d.g), if roots == 4 { (1, 4) } else { (2, 2) }, "{k} at {p}");
            assert!(roots == 0 || roots == 4);
        }
        for p in [2i64, 3, 5, 7, 13, 17, 29] {
            let d = splitting_type(&k, &PlaceQ::prime(p));
            assert!([1, 2, 4].contains(&d.e) && [1, 2].contains(&d.f));
        }
    }
}

#[test]
fn local_symbol_examples() {
    // Q(sqrt 13) is inert at 5 and 1 + sqrt 13 reduces to a nonsquare of F_25,
    // since its norm -12 is a nonsquare mod 5
    let w = QuadPlace::Field { v: PlaceQ::prime(5) };
    assert_eq!(jacobi_i64(-12, 5), -1);
    assert_eq!(hilbert_local(&qe(13, 5, 0), &qe(13, 1, 1), &w).unwrap(), -1);
    assert_eq!(hilbert_local(&qe(13, 5, 0), &qe(13, 2, 0), &w).unwrap(), 1);
    let sq = qe(13, 2, 1);
    let sq = &sq * &sq;
    for p in [2i64, 3, 5, 13] {
        for w in places_above(13, &PlaceQ::prime(p)) {
            assert_eq!(hilbert_local(&qe(13, 7, 3), &sq, &w).unwrap(), 1);
        }
    }
}

#[test]
fn degenerate_places_agree_with_rational_symbol() {
    // a split place of Q(sqrt t) is a copy of Q_p; rational inputs then give hilbert_qp
    for (t, p) in [(17i64, 2i64), (13, 3), (-7, 2), (13, 17), (-1, 5)] {
        let v = PlaceQ::prime(p);
        assert_eq!(quad_type(t, &v), LocalQuadType::Split);
        for a in -20i64..20 {
            for b in [-7i64, -3, -2, -1, 2, 3, 5, 6, 10, 17] {
                if a == 0 {
                    continue;
                }
                for w in places_above(t, &v) {
                    let s = hilbert_local(&qe(t, a, 0), &qe(t, b, 0), &w).unwrap();
                    assert_eq!(s, hilbert_qp(&rat(a, 1), &rat(b, 1), &v));
                }
            }
        }
    }
}

fn field_place() -> impl Strategy<Value = (i64, QuadPlace)> {
    let ts = vec![13i64, 17, -7, -1, 2, 221, 5, -3];
    let ps = vec![2i64, 3, 5, 7, 13, 17];
    (prop::sample::select(ts), prop::sample::select(ps), any::<bool>()).prop_map(|(t, p, s)| {
        let ws = places_above(t, &PlaceQ::prime(p));
        let w = if s { ws[0].clone() } else { ws[ws.len() - 1].clone() };
        (t, w)
    })
}

fn coords() -> impl Strategy<Value = (i64, i64)> {
    (-60i64..60, -60i64..60).prop_filter("nonzero", |(a, b)| *a != 0 || *b != 0)
}

fn uniformizer_or_unit() -> impl Strategy<Value = (i64, i64)> {
    prop_oneof![coords(), prop::sample::select(vec![(2, 0), (3, 0), (5, 0), (7, 0), (13, 0), (17, 0), (0, 1), (1, 1)])]
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(1000))]

    #[test]
    fn local_symbol_symmetric_bilinear((t, w) in field_place(), a in uniformizer_or_unit(), a2 in coords(), b in uniformizer_or_unit()) {
        let (x, x2, y) = (qe(t, a.0, a.1), qe(t, a2.0, a2.1), qe(t, b.0, b.1));
        prop_assume!(!x.is_zero() && !x2.is_zero() && !y.is_zero());
        let s = hilbert_local(&x, &y, &w).unwrap();
        prop_assert_eq!(s, hilbert_local(&y, &x, &w).unwrap());
        let prod = hilbert_local(&(&x * &x2), &y, &w).unwrap();
        prop_assert_eq!(prod, s * hilbert_local(&x2, &y, &w).unwrap());
    }

    #[test]
    fn square_class_stable_under_precision(n in -100_000i64..100_000, d in 1i64..1000, p in prop::sample::select(vec![2i64, 3, 5, 7, 13])) {
        prop_assume!(n != 0);
        let q = rat(n, d);
        let pb = BigInt::from(p);
        let m = 10;
        let classes: Vec<_> = [m, m + 4, m + 8]
            .iter()
            .map(|&prec| PadicNumber::from_rational(&q, &pb, prec).unwrap().square_class_rep().unwrap())
            .collect();
        prop_assert_eq!(&classes[0], &classes[1]);
        prop_assert_eq!(&classes[1], &classes[2]);
        let roots: Vec<_> = [m, m + 4, m + 8].iter().map(|&prec| sqrt_rational(&q, &pb, prec).unwrap()).collect();
        prop_assert!(roots.iter().all(|r| r.is_some() == roots[0].is_some()));
    }

    #[test]
    fn splitting_degrees_multiply_to_four(x in -200i64..200, y in -200i64..200, p in prop::sample::select(vec![2i64, 3, 5, 7, 11, 13, 17, 19, 23])) {
        let Ok(k) = normalize_field(x, y) else { return Ok(()) };
        let d = splitting_type(&k, &PlaceQ::prime(p));
        prop_assert_eq!(d.e * d.f * d.g, 4);
    }
}
