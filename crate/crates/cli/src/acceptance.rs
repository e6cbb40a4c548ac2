//! The acceptance suite behind `ntlab verify-paper` and the `acceptance`
//! test target. Sample sizes, seeds and time budgets are fixed here.

use std::time::{Duration, Instant};

use ntlab::arith::{factor, hilbert_qp, primes_up_to, FactorConfig, PlaceQ};
use ntlab::biquadratic::{normalize_field, BiquadraticField};
use ntlab::coverings::{
    a_pq, condition_star, covering_conductor, covering_for_field, is_galois_double_cover, star_form, star_holds,
    two_rank, u_pq,
};
use ntlab::cyclotomic::{euler_phi, gauss_sum_sqrt, sqrt_exact, Cyclo, SqrtConfig, SqrtOutcome};
use ntlab::normtorus::{
    bad_places, brauer_generator, closed_form_criterion, closed_form_criterion_with, cyclotomic_local_norm, decide,
    local_invariant, local_solvable, DecideConfig, Family, NormEquation, NormField, Variant, Verdict,
};
use ntlab::oracle::{random_norm, search_global, RandomElement, SearchConfig, SearchOutcome};
use ntlab::scalar::rat_int;
use ntlab::{BigInt, BigRational};
use rand_core::{RngCore, SeedableRng};
use rand_xorshift::XorShiftRng;
use serde_json::{json, Value};

pub const CRITERIA: [u32; 8] = [1, 2, 3, 4, 5, 6, 7, 8];

const TRUE_NORM_SAMPLES: u64 = 1000;
const TRUE_NORM_BOUND: u64 = 20;
const AGREEMENT_SAMPLES: usize = 500;
const CYCLOTOMIC_SAMPLES: u64 = 100;
const CYCLOTOMIC_TERMS: u64 = 3;
const STAR_TRIPLES_PER_SIGN: usize = 10;
const STAR_MAX_PHI: u64 = 800;
const HILBERT_PAIRS: usize = 10_000;
const RECIPROCITY_POINTS: u64 = 100;
const FOURTH_POWER_SAMPLES: usize = 200;
const AUGMENTATION_LIMIT: u64 = 50;

fn budget(id: u32) -> Duration {
    Duration::from_secs(match id {
        1 | 2 => 30,
        3 | 8 => 5 * 60,
        4 | 6 => 10 * 60,
        5 => 30 * 60,
        _ => 20 * 60,
    })
}

fn title(id: u32) -> &'static str {
    match id {
        1 => "Hasse failure, Q(sqrt 13, sqrt 17), n = 25",
        2 => "Hasse failure, Q(sqrt -1, sqrt 17), n = 13",
        3 => "true-norm fuzz on both biquadratic example fields",
        4 => "closed form against engine on random n",
        5 => "u_{7,53} / (5 + 2 sqrt -7) is a square in Q(xi_371)",
        6 => "cyclotomic closed form on true norms from Z[xi_371]",
        7 => "condition (*) and Galois test on seeded triples, plus mutation",
        _ => "property suites",
    }
}

#[derive(Clone, Debug)]
pub struct Config {
    /// l-adic precision for the exact square root of criterion 5.
    pub precision_bits: u32,
    /// Base seed of every random draw.
    pub seed: u64,
}

impl Default for Config {
    fn default() -> Self {
        Config { precision_bits: 512, seed: 0 }
    }
}

/// A criterion that cannot pass as stated, with the corrected check that runs instead.
#[derive(Clone, Debug)]
pub struct Gap {
    pub reason: &'static str,
    pub corrected_passed: bool,
    pub corrected_detail: String,
}

#[derive(Clone, Debug)]
pub struct CriterionResult {
    pub id: u32,
    pub title: &'static str,
    /// Checks held and the time budget was met.
    pub passed: bool,
    pub checks_passed: bool,
    pub detail: String,
    pub elapsed: Duration,
    pub budget: Duration,
    pub gap: Option<Gap>,
}

impl CriterionResult {
    pub fn line(&self) -> String {
        let status = if self.passed { "PASS" } else { "FAIL" };
        let mut s = format!(
            "criterion {}: {status} | {} | {} | {:.1}s of {}s",
            self.id,
            self.title,
            self.detail,
            self.elapsed.as_secs_f64(),
            self.budget.as_secs()
        );
        if let Some(g) = &self.gap {
            let c = if g.corrected_passed { "PASS" } else { "FAIL" };
            s += &format!(" | known gap: {} | corrected check: {c} ({})", g.reason, g.corrected_detail);
        }
        s
    }

    /// Stable across runs: elapsed time is reduced to the budget verdict.
    pub fn to_json(&self) -> Value {
        json!({
            "budget_seconds": self.budget.as_secs(),
            "checks_passed": self.checks_passed,
            "detail": self.detail,
            "gap": self.gap.as_ref().map(|g| json!({
                "corrected_detail": g.corrected_detail,
                "corrected_passed": g.corrected_passed,
                "reason": g.reason,
            })),
            "id": self.id,
            "passed": self.passed,
            "title": self.title,
            "within_budget": self.elapsed <= self.budget,
        })
    }
}

struct Outcome {
    ok: bool,
    detail: String,
    gap: Option<Gap>,
}

impl Outcome {
    fn new(ok: bool, detail: impl Into<String>) -> Self {
        Outcome { ok, detail: detail.into(), gap: None }
    }
}

pub fn run_selected(cfg: &Config, only: &[u32], mut progress: impl FnMut(&CriterionResult)) -> Vec<CriterionResult> {
    let ids: Vec<u32> = if only.is_empty() { CRITERIA.to_vec() } else { only.to_vec() };
    let mut out = Vec::new();
    for id in ids {
        let r = run_criterion(id, cfg);
        progress(&r);
        out.push(r);
    }
    out
}

pub fn run_criterion(id: u32, cfg: &Config) -> CriterionResult {
    let start = Instant::now();
    let outcome = match id {
        1 => criterion_1(),
        2 => criterion_2(),
        3 => criterion_3(cfg),
        4 => criterion_4(cfg),
        5 => criterion_5(cfg),
        6 => criterion_6(cfg),
        7 => criterion_7(cfg),
        8 => criterion_8(cfg),
        _ => Ok(Outcome::new(false, format!("no criterion {id}"))),
    };
    let elapsed = start.elapsed();
    let outcome = outcome.unwrap_or_else(|e| Outcome::new(false, format!("error: {e}")));
    let b = budget(id);
    CriterionResult {
        id,
        title: title(id),
        passed: outcome.ok && elapsed <= b,
        checks_passed: outcome.ok,
        detail: outcome.detail,
        elapsed,
        budget: b,
        gap: outcome.gap,
    }
}

fn field(d1: i64, d2: i64, d3: i64) -> BiquadraticField {
    BiquadraticField::from_triple(d1, d2, d3).expect("normalized triple")
}

fn example_field(f: Family) -> BiquadraticField {
    match f {
        Family::Example1 => field(1, 17, -1),
        _ => field(1, 13, 17),
    }
}

fn biquadratic_eq(k: BiquadraticField, n: &BigRational) -> ntlab::Result<NormEquation> {
    NormEquation::biquadratic(k, n.clone(), &FactorConfig::default())
}

fn uniform(rng: &mut XorShiftRng, lo: i64, hi: i64) -> i64 {
    lo + (rng.next_u64() % (hi - lo + 1) as u64) as i64
}

/// All bad places locally solvable, and the verdict.
fn hasse_exhibit(k: BiquadraticField, n: i64) -> ntlab::Result<(bool, Verdict, usize)> {
    let eq = biquadratic_eq(k, &rat_int(n))?;
    let cfg = DecideConfig::default();
    let gen = brauer_generator(&k, &cfg)?;
    let places = bad_places(&eq, Some(&gen), &cfg.factor)?;
    let mut local = true;
    for v in &places {
        local &= local_solvable(&eq, v)?.solvable;
    }
    Ok((local, decide(&eq, &cfg)?.verdict, places.len()))
}

fn criterion_1() -> ntlab::Result<Outcome> {
    let k = field(1, 13, 17);
    let (local, verdict, places) = hasse_exhibit(k, 25)?;
    let cf = closed_form_criterion(Family::Example2, &rat_int(25), &FactorConfig::default())?;
    let search = SearchConfig { bound: 50, denominator: 20, seed: 0, effort: 1 << 40 };
    let found = search_global(&biquadratic_eq(k, &rat_int(25))?, &search)?;
    let ok = local && verdict == Verdict::BMObstructed && !cf.holds && found == SearchOutcome::NotFoundWithinBounds;
    Ok(Outcome::new(
        ok,
        format!(
            "local at {places} bad places: {local}; verdict {}; closed form {}; search B=50 D=20: {}",
            verdict.label(),
            cf.holds,
            if found == SearchOutcome::NotFoundWithinBounds { "nothing" } else { "found a point" }
        ),
    ))
}

fn criterion_2() -> ntlab::Result<Outcome> {
    let (local, verdict, places) = hasse_exhibit(field(1, 17, -1), 13)?;
    let cf = closed_form_criterion(Family::Example1, &rat_int(13), &FactorConfig::default())?;
    let ok = local && verdict == Verdict::BMObstructed && !cf.holds;
    Ok(Outcome::new(
        ok,
        format!("local at {places} bad places: {local}; verdict {}; closed form {}", verdict.label(), cf.holds),
    ))
}

const EXAMPLE1_GAP: &str = "the stated second condition for Q(sqrt -1, sqrt 17) disagrees with the engine exactly when s1 is odd \
     (18 is a norm but is rejected); the corrected variant multiplies the right-hand side by (-1)^s1";

fn criterion_3(cfg: &Config) -> ntlab::Result<Outcome> {
    let fcfg = FactorConfig::default();
    let dcfg = DecideConfig::default();
    let mut parts = Vec::new();
    let mut stated_ok = true;
    let mut corrected_ok = true;
    let mut corrected_parts = Vec::new();
    for fam in [Family::Example1, Family::Example2] {
        let k = example_field(fam);
        let (mut solvable, mut stated, mut corrected) = (0u64, 0u64, 0u64);
        for i in 0..TRUE_NORM_SAMPLES {
            let r = random_norm(&NormField::Biquadratic(k), TRUE_NORM_BOUND, cfg.seed + i)?;
            if decide(&biquadratic_eq(k, &r.n)?, &dcfg)?.verdict == Verdict::Solvable {
                solvable += 1;
            }
            stated += u64::from(closed_form_criterion(fam, &r.n, &fcfg)?.holds);
            corrected += u64::from(closed_form_criterion_with(fam, &r.n, Variant::Corrected, &fcfg)?.holds);
        }
        let all = TRUE_NORM_SAMPLES;
        stated_ok &= solvable == all && stated == all;
        corrected_ok &= solvable == all && corrected == all;
        parts.push(format!("{k}: decide {solvable}/{all}, closed form {stated}/{all}"));
        corrected_parts.push(format!("{k}: corrected closed form {corrected}/{all}"));
    }
    Ok(Outcome {
        ok: stated_ok,
        detail: parts.join("; "),
        gap: Some(Gap { reason: EXAMPLE1_GAP, corrected_passed: corrected_ok, corrected_detail: corrected_parts.join("; ") }),
    })
}

/// `n` with 1 to 3 distinct prime factors below 100, exponents 1 to 3.
fn random_support_n(rng: &mut XorShiftRng, primes: &[u64], signed: bool) -> BigInt {
    let count = uniform(rng, 1, 3);
    let mut chosen: Vec<u64> = Vec::new();
    while chosen.len() < count as usize {
        let p = primes[uniform(rng, 0, primes.len() as i64 - 1) as usize];
        if !chosen.contains(&p) {
            chosen.push(p);
        }
    }
    let mut n = BigInt::from(1);
    for p in chosen {
        n *= BigInt::from(p).pow(uniform(rng, 1, 3) as u32);
    }
    if signed && rng.next_u64() & 1 == 1 {
        n = -n;
    }
    n
}

fn criterion_4(cfg: &Config) -> ntlab::Result<Outcome> {
    let fcfg = FactorConfig::default();
    let dcfg = DecideConfig::default();
    let primes = primes_up_to(100);
    let mut stated_ok = true;
    let mut corrected_ok = true;
    let mut parts = Vec::new();
    let mut corrected_parts = Vec::new();
    for (tag, fam) in [(1u64, Family::Example1), (2, Family::Example2)] {
        let k = example_field(fam);
        // the first family is totally imaginary: only positive n can be norms
        let signed = fam == Family::Example2;
        let mut rng = XorShiftRng::seed_from_u64(cfg.seed ^ (tag << 32));
        let (mut agree, mut agree_corrected, mut cond1) = (0usize, 0usize, 0usize);
        for _ in 0..AGREEMENT_SAMPLES {
            let n = rat_int(random_support_n(&mut rng, &primes, signed));
            let verdict = decide(&biquadratic_eq(k, &n)?, &dcfg)?.verdict;
            let stated = closed_form_criterion(fam, &n, &fcfg)?;
            let corrected = closed_form_criterion_with(fam, &n, Variant::Corrected, &fcfg)?;
            let check = |holds: bool, c1: bool| {
                if c1 {
                    holds == (verdict == Verdict::Solvable)
                } else {
                    matches!(verdict, Verdict::LocallyUnsolvable(_))
                }
            };
            cond1 += usize::from(stated.condition1);
            agree += usize::from(check(stated.holds, stated.condition1));
            agree_corrected += usize::from(check(corrected.holds, corrected.condition1));
        }
        stated_ok &= agree == AGREEMENT_SAMPLES;
        corrected_ok &= agree_corrected == AGREEMENT_SAMPLES;
        parts.push(format!("{k}: {agree}/{AGREEMENT_SAMPLES} agree ({cond1} with condition (1))"));
        corrected_parts.push(format!("{k}: corrected {agree_corrected}/{AGREEMENT_SAMPLES}"));
    }
    Ok(Outcome {
        ok: stated_ok,
        detail: parts.join("; "),
        gap: Some(Gap { reason: EXAMPLE1_GAP, corrected_passed: corrected_ok, corrected_detail: corrected_parts.join("; ") }),
    })
}

fn square_check(x: &Cyclo, scfg: &SqrtConfig) -> ntlab::Result<(bool, String)> {
    Ok(match sqrt_exact(x, scfg)? {
        SqrtOutcome::Root(r) => {
            let exact = &r * &r == *x;
            (exact, format!("root found, re-squares exactly: {exact}"))
        }
        SqrtOutcome::NotASquare { prime, index } => {
            (false, format!("not a square: nonresidue at the embedding xi -> w^{index} mod {prime}"))
        }
    })
}

fn criterion_5(cfg: &Config) -> ntlab::Result<Outcome> {
    let scfg = SqrtConfig { precision_bits: cfg.precision_bits, ..SqrtConfig::default() };
    let u = u_pq(7, 53, 371)?;
    let s = gauss_sum_sqrt(-7, 371)?;
    let w = &Cyclo::from_base(371, rat_int(5))? + &s.scale(&rat_int(2));
    let ratio = u.div(&w)?;
    let (ok, detail) = square_check(&ratio, &scfg)?;
    let (neg_ok, neg_detail) = square_check(&-&ratio, &scfg)?;
    Ok(Outcome {
        ok,
        detail: format!("u/(5 + 2 sqrt -7): {detail}"),
        gap: Some(Gap {
            reason: "u_{7,53}/(5 + 2 sqrt -7) is -1 times a square in Q(xi_371), and sqrt(-1) is not in Q(xi_371); \
                     the identification of the two fields only holds up to the twist by -1",
            corrected_passed: !ok && neg_ok,
            corrected_detail: format!("-u/(5 + 2 sqrt -7): {neg_detail}"),
        }),
    })
}

fn criterion_6(cfg: &Config) -> ntlab::Result<Outcome> {
    let fcfg = FactorConfig::default();
    let (mut closed, mut local) = (0u64, 0u64);
    for i in 0..CYCLOTOMIC_SAMPLES {
        let r = random_norm(&NormField::Cyclotomic(371), CYCLOTOMIC_TERMS, cfg.seed + i)?;
        closed += u64::from(closed_form_criterion(Family::Example3, &r.n, &fcfg)?.holds);
        let eq = NormEquation::cyclotomic(371, r.n.clone())?;
        let mut places = bad_places(&eq, None, &fcfg)?;
        if !places.contains(&PlaceQ::Real) {
            places.push(PlaceQ::Real);
        }
        local += u64::from(places.iter().all(|v| cyclotomic_local_norm(&r.n, v, 371)));
    }
    let all = CYCLOTOMIC_SAMPLES;
    Ok(Outcome::new(closed == all && local == all, format!("closed form {closed}/{all}; local norms {local}/{all}")))
}

fn carmichael(n: u64) -> u64 {
    let mut m = n;
    let mut lam = 1u64;
    let mut p = 2;
    while p * p <= m || m > 1 {
        if p * p > m {
            p = m;
        }
        if m.is_multiple_of(p) {
            let mut pk = 1;
            while m.is_multiple_of(p) {
                m /= p;
                pk *= p;
            }
            let l = if p == 2 && pk >= 8 { pk / 4 } else { pk / p * (p - 1) };
            lam = lam / gcd(lam, l) * l;
        }
        p += 1;
    }
    lam
}

fn gcd(a: u64, b: u64) -> u64 {
    if b == 0 {
        a
    } else {
        gcd(b, a % b)
    }
}

/// Seeded triples with odd prime support below 30, `STAR_TRIPLES_PER_SIGN`
/// for each sign of `d1 d3`. The conductor is kept where the exact square
/// roots fit the default sign-pattern cap: `phi(N) / lambda(N) <= 15`.
pub fn star_triples(seed: u64) -> Vec<BiquadraticField> {
    let primes = [3i64, 5, 7, 11, 13, 17, 19, 23, 29];
    let cap = SqrtConfig::default().max_patterns;
    let mut rng = XorShiftRng::seed_from_u64(seed ^ 0x7);
    let mut out: Vec<BiquadraticField> = Vec::new();
    let mut counts = [0usize; 2];
    let draw = |rng: &mut XorShiftRng| {
        let a = primes[uniform(rng, 0, 8) as usize];
        let b = primes[uniform(rng, 0, 8) as usize];
        let v = if a == b || uniform(rng, 0, 2) == 0 { a } else { a * b };
        if rng.next_u64() & 1 == 1 {
            -v
        } else {
            v
        }
    };
    for _ in 0..100_000 {
        if counts.iter().all(|&c| c == STAR_TRIPLES_PER_SIGN) {
            break;
        }
        let (x, y) = (draw(&mut rng), draw(&mut rng));
        let Ok(k) = normalize_field(x, y) else { continue };
        let side = usize::from(k.d1 * k.d3 < 0);
        if counts[side] == STAR_TRIPLES_PER_SIGN || out.contains(&k) {
            continue;
        }
        let n = covering_conductor(&k);
        let phi = euler_phi(n);
        let g = phi / carmichael(n);
        if phi > STAR_MAX_PHI || g == 0 || (1u64 << (g - 1)) > cap {
            continue;
        }
        counts[side] += 1;
        out.push(k);
    }
    out
}

fn criterion_7(cfg: &Config) -> ntlab::Result<Outcome> {
    let triples = star_triples(cfg.seed);
    let scfg = SqrtConfig::default();
    let mut star = 0;
    let mut galois = 0;
    let mut failures = Vec::new();
    for k in &triples {
        let s = condition_star(k.d1, k.d2, k.d3)?;
        let g = is_galois_double_cover(&covering_for_field(k)?, &scfg)?;
        star += usize::from(s);
        galois += usize::from(g);
        if !(s && g) {
            failures.push(format!("({}, {}, {})", k.d1, k.d2, k.d3));
        }
    }
    let negative = triples.iter().filter(|k| k.d1 * k.d3 < 0).count();
    let base = field(1, 13, 17);
    let form = star_form(&base);
    let mutation_flips = star_holds(&base, &form) && !star_holds(&base, &form.without_monomial(13, 17));
    let n = triples.len();
    let ok = n == 2 * STAR_TRIPLES_PER_SIGN && star == n && galois == n && mutation_flips;
    let mut detail = format!(
        "{n} triples ({negative} with d1 d3 < 0): condition (*) {star}/{n}, Galois {galois}/{n}; mutation flips (1, 13, 17): {mutation_flips}"
    );
    if !failures.is_empty() {
        detail += &format!("; failing: {}", failures.join(" "));
    }
    Ok(Outcome::new(ok, detail))
}

fn places_for(a: &BigRational, b: &BigRational, cfg: &FactorConfig) -> ntlab::Result<Vec<PlaceQ>> {
    let mut ps = vec![PlaceQ::Real, PlaceQ::prime(2)];
    for x in [a, b] {
        let (n, d) = factor(x, cfg)?;
        for p in n.primes().chain(d.primes()) {
            let v = PlaceQ::Finite(p.clone());
            if !ps.contains(&v) {
                ps.push(v);
            }
        }
    }
    Ok(ps)
}

fn criterion_8(cfg: &Config) -> ntlab::Result<Outcome> {
    let fcfg = FactorConfig::default();
    let dcfg = DecideConfig::default();
    let mut rng = XorShiftRng::seed_from_u64(cfg.seed ^ 0x8);

    let mut violations = 0;
    for _ in 0..HILBERT_PAIRS {
        let mut r = || loop {
            let n = uniform(&mut rng, -1_000_000, 1_000_000);
            if n != 0 {
                return BigRational::new(n.into(), uniform(&mut rng, 1, 1000).into());
            }
        };
        let (a, b) = (r(), r());
        let prod: i8 = places_for(&a, &b, &fcfg)?.iter().map(|v| hilbert_qp(&a, &b, v)).product();
        violations += usize::from(prod != 1);
    }

    let primes = primes_up_to(AUGMENTATION_LIMIT);
    let mut odd_pairs = 0;
    let mut aug_bad = Vec::new();
    for (i, &p) in primes.iter().enumerate().skip(1) {
        for &q in &primes[i + 1..] {
            odd_pairs += 1;
            let aug = a_pq(p as i64, q as i64)?.augmentation();
            if aug != 0 {
                aug_bad.push(format!("({p}, {q}) -> {aug}"));
            }
        }
    }
    let two: Vec<String> = primes
        .iter()
        .skip(1)
        .map(|&q| a_pq(2, q as i64).map(|d| format!("{q}:{}", d.augmentation())))
        .collect::<ntlab::Result<_>>()?;

    let mut reciprocity_bad = 0;
    for i in 0..RECIPROCITY_POINTS {
        let fam = if i % 2 == 0 { Family::Example1 } else { Family::Example2 };
        let k = example_field(fam);
        let r = random_norm(&NormField::Biquadratic(k), TRUE_NORM_BOUND, cfg.seed + 10_000 + i)?;
        let RandomElement::Biquadratic(x) = &r.xi else { unreachable!("biquadratic draw") };
        let eq = biquadratic_eq(k, &r.n)?;
        let gen = brauer_generator(&k, &dcfg)?;
        let mut total = 0u8;
        for v in bad_places(&eq, Some(&gen), &fcfg)? {
            total ^= local_invariant(&gen, &v, x)?;
        }
        reciprocity_bad += usize::from(total != 0);
    }

    let prim = primes_up_to(100);
    let mut fourth_bad = 0;
    for i in 0..FOURTH_POWER_SAMPLES {
        let fam = if i % 2 == 0 { Family::Example1 } else { Family::Example2 };
        let k = example_field(fam);
        let n = rat_int(random_support_n(&mut rng, &prim, true));
        let t4 = rat_int(BigInt::from(uniform(&mut rng, 2, 9)).pow(4));
        let a = decide(&biquadratic_eq(k, &n)?, &dcfg)?.verdict;
        let b = decide(&biquadratic_eq(k, &(&n * &t4))?, &dcfg)?.verdict;
        fourth_bad += usize::from(a != b);
    }

    let rank = two_rank(371)?;
    let ok = violations == 0 && aug_bad.is_empty() && reciprocity_bad == 0 && fourth_bad == 0 && rank == 1;
    Ok(Outcome::new(
        ok,
        format!(
            "product formula violations {violations}/{HILBERT_PAIRS}; augmentation nonzero on {}/{odd_pairs} odd pairs{}; \
             reciprocity failures {reciprocity_bad}/{RECIPROCITY_POINTS}; fourth-power changes {fourth_bad}/{FOURTH_POWER_SAMPLES}; \
             two_rank(371) = {rank}; augmentation of a_2q by q (information): {}",
            aug_bad.len(),
            if aug_bad.is_empty() { String::new() } else { format!(" [{}]", aug_bad.join(", ")) },
            two.join(" ")
        ),
    ))
}
