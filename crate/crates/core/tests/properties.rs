use ntlab::arith::FactorConfig;
use ntlab::biquadratic::BiquadraticField;
use ntlab::coverings::*;
use ntlab::cyclotomic::SqrtConfig;
use ntlab::normtorus::*;
use ntlab::oracle::{random_norm, search_global, RandomElement, SearchConfig, SearchOutcome};
use ntlab::scalar::rat_int;
use ntlab::{BigInt, BigRational};
use proptest::prelude::*;

const SMALL_PRIMES: [i64; 10] = [2, 3, 5, 7, 11, 13, 17, 19, 23, 29];

fn k(d1: i64, d2: i64, d3: i64) -> BiquadraticField {
    BiquadraticField::from_triple(d1, d2, d3).unwrap()
}

fn fields() -> Vec<BiquadraticField> {
    vec![k(1, 13, 17), k(1, 17, -1), k(1, 2, -1), k(3, 2, 5), k(1, 5, 29)]
}

fn eq(f: BiquadraticField, n: &BigRational) -> NormEquation {
    NormEquation::biquadratic(f, n.clone(), &FactorConfig::default()).unwrap()
}

/// Signed integer with prime support in `SMALL_PRIMES`, exponents at most 3.
fn small_support_n() -> impl Strategy<Value = BigInt> {
    (prop::collection::vec((0..SMALL_PRIMES.len(), 1u32..4), 0..4), any::<bool>()).prop_map(|(ps, neg)| {
        let mut n = BigInt::from(if neg { -1 } else { 1 });
        for (i, e) in ps {
            n *= BigInt::from(SMALL_PRIMES[i]).pow(e);
        }
        n
    })
}

fn divisor_15() -> impl Strategy<Value = FormalDivisor> {
    prop::collection::vec((1i64..15, -2i64..3), 1..5)
        .prop_map(|ts| FormalDivisor::from_terms(ts.into_iter().map(|(a, c)| (Fraction::new(a, 15), c))))
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(100))]

    #[test]
    fn sin_is_a_homomorphism(d1 in divisor_15(), d2 in divisor_15()) {
        let sum = &d1 + &d2;
        let lhs = sin_divisor(&sum, 60).unwrap();
        let rhs = &sin_divisor(&d1, 60).unwrap() * &sin_divisor(&d2, 60).unwrap();
        prop_assert_eq!(lhs, rhs);
    }

    #[test]
    fn fourth_power_invariance(fi in 0usize..5, n in small_support_n(), t in 2i64..7) {
        let f = fields()[fi];
        let cfg = DecideConfig::default();
        let n = rat_int(n);
        let t4 = rat_int(BigInt::from(t).pow(4));
        let a = decide(&eq(f, &n), &cfg).unwrap().verdict;
        let b = decide(&eq(f, &(&n * &t4)), &cfg).unwrap().verdict;
        let c = decide(&eq(f, &(&n / &t4)), &cfg).unwrap().verdict;
        prop_assert_eq!(&a, &b);
        prop_assert_eq!(&a, &c);
    }

    #[test]
    fn generators_agree_on_verdicts(fi in 0usize..5, n in small_support_n()) {
        let f = fields()[fi];
        let cfg = DecideConfig::default();
        let gens = brauer_generators(&f, &cfg).unwrap();
        let e = eq(f, &rat_int(n));
        let verdicts: Vec<Verdict> = gens.iter().map(|g| decide_with(&e, g, &cfg).unwrap().verdict).collect();
        prop_assert!(verdicts.windows(2).all(|w| w[0] == w[1]), "{}: {:?}", f, verdicts);
    }

    #[test]
    fn search_is_sound_and_deterministic(fi in 0usize..5, n in -300i64..300, d in 1i64..3) {
        prop_assume!(n != 0);
        let e = eq(fields()[fi], &rat_int(n));
        let cfg = SearchConfig { bound: 4, denominator: d, ..SearchConfig::default() };
        let first = search_global(&e, &cfg).unwrap();
        prop_assert_eq!(&first, &search_global(&e, &cfg).unwrap());
        if let SearchOutcome::Found(x) = first {
            prop_assert_eq!(x.norm(), e.n.clone());
            prop_assert_eq!(decide(&e, &DecideConfig::default()).unwrap().verdict, Verdict::Solvable);
        }
    }
}

#[test]
fn true_norms_are_solvable_and_reciprocal() {
    let cfg = DecideConfig::default();
    for f in fields() {
        let gens = brauer_generators(&f, &cfg).unwrap();
        assert!(!gens.is_empty(), "{f}");
        for seed in 0..60 {
            let r = random_norm(&NormField::Biquadratic(f), 20, seed).unwrap();
            let RandomElement::Biquadratic(x) = &r.xi else { unreachable!() };
            assert_eq!(x.norm(), r.n);
            let e = eq(f, &r.n);
            assert_eq!(decide(&e, &cfg).unwrap().verdict, Verdict::Solvable, "{f}, seed {seed}");
            for g in &gens {
                let total = bad_places(&e, Some(g), &cfg.factor)
                    .unwrap()
                    .iter()
                    .fold(0u8, |acc, v| acc ^ local_invariant(g, v, x).unwrap());
                assert_eq!(total, 0, "{f}, seed {seed}, {:?}", g.route);
            }
        }
    }
}

#[test]
fn star_implies_galois() {
    let cfg = SqrtConfig::default();
    let mut checked = 0;
    for (d1, d2, d3) in [(1, 13, 17), (1, 17, -1), (1, 5, -1), (1, 13, -1), (1, 5, 29)] {
        let f = k(d1, d2, d3);
        if !condition_star(d1, d2, d3).unwrap() {
            continue;
        }
        let spec = covering_for_field(&f).unwrap();
        assert!(is_galois_double_cover(&spec, &cfg).unwrap(), "{f}");
        checked += 1;
    }
    assert!(checked >= 2);
}
