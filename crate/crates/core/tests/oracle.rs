use std::time::Instant;

use ntlab::arith::{FactorConfig, PlaceQ};
use ntlab::biquadratic::BiquadraticField;
use ntlab::normtorus::{local_solvable, NormEquation, NormField};
use ntlab::oracle::*;
use ntlab::scalar::rat_int;

fn k(d1: i64, d2: i64, d3: i64) -> BiquadraticField {
    BiquadraticField::from_triple(d1, d2, d3).unwrap()
}

fn eq(f: BiquadraticField, n: i64) -> NormEquation {
    NormEquation::biquadratic(f, rat_int(n), &FactorConfig::default()).unwrap()
}

#[test]
fn exhaustive_examples() {
    let t = Instant::now();
    assert!(exhaustive_local(&eq(k(1, 13, 17), 1), 2, 6).unwrap());
    assert!(!exhaustive_local(&eq(k(1, 17, -1), 7), 2, 8).unwrap());
    eprintln!("2-adic: {:?}", t.elapsed());
    assert!(exhaustive_local(&eq(k(1, 13, 17), 25), 13, 4).unwrap());
    eprintln!("13-adic: {:?}", t.elapsed());
}

fn precision(p: u64) -> u32 {
    match p {
        2 => 8,
        3 => 6,
        5 | 7 => 3,
        11 => 3,
        _ => 2,
    }
}

fn curated() -> Vec<NormEquation> {
    let fields = [k(1, 13, 17), k(1, 17, -1), k(1, 2, -1), k(3, 2, 5), k(1, 5, 3)];
    let ns = [1, -1, 2, 7, 25, 13];
    let mut out = Vec::new();
    for f in fields {
        for n in ns {
            out.push(eq(f, n));
        }
    }
    out
}

#[test]
fn exhaustive_agrees_with_engine() {
    let t = Instant::now();
    let eqs = curated();
    assert_eq!(eqs.len(), 30);
    for e in &eqs {
        for p in ntlab::arith::primes_up_to(50) {
            let engine = local_solvable(e, &PlaceQ::prime(p as i64)).unwrap().solvable;
            let brute = exhaustive_local(e, p, precision(p)).unwrap();
            assert_eq!(engine, brute, "{} n={} p={p}", e.field, e.n);
        }
    }
    eprintln!("cross-check: {:?}", t.elapsed());
}

#[test]
fn search_examples() {
    let f = k(1, 13, 17);
    let cfg = SearchConfig { bound: 5, denominator: 1, seed: 0, effort: 1 << 40 };
    match search_global(&eq(f, 9), &cfg).unwrap() {
        SearchOutcome::Found(x) => {
            assert_eq!(x.norm(), rat_int(9));
            eprintln!("norm 9: {:?}", x.x);
        }
        other => panic!("{other:?}"),
    }
    match search_global(&eq(f, 1), &cfg).unwrap() {
        SearchOutcome::Found(x) => assert_eq!(x.norm(), rat_int(1)),
        other => panic!("{other:?}"),
    }
    let again = search_global(&eq(f, 9), &cfg).unwrap();
    assert_eq!(again, search_global(&eq(f, 9), &cfg).unwrap());
    let tiny = SearchConfig { effort: 10, ..cfg };
    assert!(matches!(search_global(&eq(f, 9), &tiny), Err(ntlab::Error::EffortExceeded(_))));
}

#[test]
fn random_norm_examples() {
    let f = NormField::Biquadratic(k(1, 13, 17));
    let a = random_norm(&f, 20, 7).unwrap();
    assert_eq!(a, random_norm(&f, 20, 7).unwrap());
    if let RandomElement::Biquadratic(x) = &a.xi {
        assert_eq!(x.norm(), a.n);
    }
    let c = random_norm(&NormField::Cyclotomic(5), 3, 1).unwrap();
    match &c.xi {
        RandomElement::Cyclotomic(x) => assert_eq!(x.norm(), c.n),
        other => panic!("{other:?}"),
    }
    let x = ntlab::biquadratic::KElement::<ntlab::BigRational>::from_ints(k(1, 13, 17), [15, 4, 0, 0]);
    assert_eq!(x.norm(), rat_int(289));
    let one = ntlab::cyclotomic::Cyclo::one(5).unwrap();
    let z = ntlab::cyclotomic::Cyclo::xi_pow(5, 1).unwrap();
    assert_eq!((&one - &z).norm(), rat_int(5));
}

#[test]
fn corpus_roundtrip() {
    let recs = vec![
        CorpusRecord { field: NormField::Biquadratic(k(1, 13, 17)), n: rat_int(25), xi: None, expected: "bm_obstructed".into() },
        CorpusRecord {
            field: NormField::Biquadratic(k(1, 13, 17)),
            n: rat_int(289),
            xi: Some(vec![rat_int(15), rat_int(4), rat_int(0), rat_int(0)]),
            expected: "solvable".into(),
        },
        CorpusRecord { field: NormField::Cyclotomic(371), n: rat_int(7), xi: None, expected: "solvable".into() },
    ];
    let text = write_corpus(&recs);
    assert_eq!(read_corpus(&text).unwrap(), recs);
}

#[test]
fn search_respects_obstruction() {
    let t = Instant::now();
    let cfg = SearchConfig { bound: 50, denominator: 20, seed: 0, effort: 1 << 40 };
    let r = search_global(&eq(k(1, 13, 17), 25), &cfg).unwrap();
    assert_eq!(r, SearchOutcome::NotFoundWithinBounds);
    eprintln!("B=50 D=20 search: {:?}", t.elapsed());
}
