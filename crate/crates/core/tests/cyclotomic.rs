use ntlab::arith::{gcd_i64, is_squarefree};
use ntlab::biquadratic::normalize_field;
use ntlab::cyclotomic::*;
use ntlab::scalar::{rat, rat_int};
use proptest::prelude::*;

#[test]
fn galois_examples() {
    let x = Cyclo::from_ints(15, &[1, -2, 0, 3, 5, 0, 1, 7]).unwrap();
    assert_eq!(x.galois_apply(1).unwrap(), x);
    assert_eq!(Cyclo::xi_pow(15, 4).unwrap().galois_apply(7).unwrap(), Cyclo::xi_pow(15, 28).unwrap());
    assert!(x.galois_apply(5).is_err());
}

#[test]
fn embedding_examples() {
    let i = Cyclo::xi_pow(4, 1).unwrap().embed_numeric(1).unwrap();
    assert!((i.re).abs() < 1e-12 && (i.im - 1.0).abs() < 1e-12);
    let one = Cyclo::one(5).unwrap();
    let a = &one - &Cyclo::xi_pow(5, 1).unwrap();
    let z = a.embed_numeric(1).unwrap();
    assert!((z.norm() - 2.0 * (std::f64::consts::PI / 5.0).sin()).abs() < 1e-12);
    let g = gauss_sum_sqrt(17, 17).unwrap().embed_numeric(1).unwrap();
    assert!(g.im.abs() < 1e-9 && (g.re.abs() - 17f64.sqrt()).abs() < 1e-9);
}

#[test]
fn gauss_sum_examples() {
    let g = gauss_sum_sqrt(17, 17).unwrap();
    assert_eq!(&g * &g, Cyclo::from_base(17, rat_int(17)).unwrap());
    let g = gauss_sum_sqrt(-7, 7).unwrap();
    assert_eq!(&g * &g, Cyclo::from_base(7, rat_int(-7)).unwrap());
    assert_eq!(gauss_sum_sqrt(1, 5).unwrap(), Cyclo::one(5).unwrap());
    assert!(gauss_sum_sqrt(3, 3).is_err());
    // the sign is pinned to the first embedding
    let z = gauss_sum_sqrt(-7, 28).unwrap().embed_numeric(1).unwrap();
    assert!(z.im > 0.0);
}

#[test]
fn gauss_sums_square_exactly() {
    for d in (-60i64..=60).filter(|&d| d != 0 && is_squarefree(d)) {
        let m = quadratic_conductor(d);
        let g = gauss_sum_sqrt(d, m).unwrap();
        assert_eq!(&g * &g, Cyclo::from_base(m, rat_int(d)).unwrap(), "d = {d}");
    }
}

#[test]
fn sqrt_examples() {
    let cfg = SqrtConfig::default();
    let beta = Cyclo::from_ints(12, &[1, 2, -1, 3]).unwrap();
    let root = sqrt_exact(&(&beta * &beta), &cfg).unwrap().root().unwrap();
    assert!(root == beta || root == -&beta);
    assert!(!sqrt_exact(&Cyclo::xi_pow(4, 1).unwrap(), &cfg).unwrap().is_square());
    let root = sqrt_exact(&Cyclo::from_base(17, rat_int(17)).unwrap(), &cfg).unwrap().root().unwrap();
    let g = gauss_sum_sqrt(17, 17).unwrap();
    assert!(root == g || root == -&g);
}

#[test]
fn subfield_examples() {
    let k = normalize_field(13, 17).unwrap();
    let x = gauss_sum_sqrt(221, 221).unwrap().scale(&rat(3, 2));
    let c = subfield_coords(&x, &k).unwrap().expect("in K");
    assert_eq!(c.iter().filter(|v| **v != rat_int(0)).count(), 1);
    assert!(subfield_coords(&Cyclo::xi_pow(221, 1).unwrap(), &k).unwrap().is_none());
    let seven = subfield_coords(&Cyclo::from_base(221, rat_int(7)).unwrap(), &k).unwrap().unwrap();
    assert_eq!(seven, [rat_int(7), rat_int(0), rat_int(0), rat_int(0)]);
}

fn conductor() -> impl Strategy<Value = u64> {
    prop::sample::select(vec![3u64, 4, 5, 7, 8, 12, 15, 20, 21, 35])
}

fn element(m: u64) -> impl Strategy<Value = Cyclo> {
    let phi = euler_phi(m) as usize;
    prop::collection::vec(-9i64..10, phi).prop_map(move |c| Cyclo::from_ints(m, &c).unwrap())
}

fn pair_with_unit() -> impl Strategy<Value = (Cyclo, Cyclo, i64)> {
    conductor().prop_flat_map(|m| {
        let units: Vec<i64> = (1..m as i64).filter(|&a| gcd_i64(a, m as i64) == 1).collect();
        (element(m), element(m), prop::sample::select(units))
    })
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(300))]

    #[test]
    fn galois_is_multiplicative((x, y, a) in pair_with_unit()) {
        let lhs = &x.galois_apply(a).unwrap() * &y.galois_apply(a).unwrap();
        prop_assert_eq!(lhs, (&x * &y).galois_apply(a).unwrap());
    }

    #[test]
    fn galois_composes((x, _y, a) in pair_with_unit(), b in 1i64..200) {
        let m = x.conductor() as i64;
        prop_assume!(gcd_i64(b, m) == 1);
        let twice = x.galois_apply(b).unwrap().galois_apply(a).unwrap();
        prop_assert_eq!(twice, x.galois_apply((a * b) % m).unwrap());
    }

    #[test]
    fn embedding_respects_products((x, y, j) in pair_with_unit()) {
        let zx = x.embed_numeric(j).unwrap();
        let zy = y.embed_numeric(j).unwrap();
        let xy = &x * &y;
        let err = x.embed_error_bound() * y.embed_error_bound() + xy.embed_error_bound();
        prop_assert!((zx * zy - xy.embed_numeric(j).unwrap()).norm() <= err);
    }

    #[test]
    fn sqrt_roots_square_back((x, y, _a) in pair_with_unit()) {
        prop_assume!(!x.is_zero());
        let cfg = SqrtConfig::default();
        for alpha in [&x * &x, &x * &y, x.clone()] {
            if alpha.is_zero() {
                continue;
            }
            if let Some(r) = sqrt_exact(&alpha, &cfg).unwrap().root() {
                prop_assert_eq!(&r * &r, alpha);
            }
        }
        prop_assert!(sqrt_exact(&(&x * &x), &cfg).unwrap().is_square());
    }
}
