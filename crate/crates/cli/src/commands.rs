use std::ffi::OsString;
use std::io::Write;
use std::path::PathBuf;

use clap::{Args, Parser, Subcommand};
use ntlab::arith::{factor_int, hilbert_qp, jacobi, quartic_symbol, FactorConfig, PlaceQ};
use ntlab::biquadratic::{normalize_field, BiquadraticField};
use ntlab::coverings::{
    covering_for_field, covering_generators_cyclotomic, is_galois_double_cover, s_set, star_case_verified,
    star_form, star_holds, two_rank,
};
use ntlab::normtorus::{decide, local_solvable, DecideConfig, NormEquation, NormField};
use ntlab::oracle::{
    exhaustive_local, random_norm, search_global, write_corpus, CorpusRecord, RandomElement, SearchConfig,
    SearchOutcome,
};
use ntlab::{BigInt, BigRational, Error};
use serde_json::{json, Value};

use crate::acceptance;
use crate::cache::{factorization_to_json, Cache};
use crate::config::{resolve_precision, OutputMode, PrecisionSource, RunConfig, SearchBounds, CACHE_ENV, PRECISION_ENV};

pub const EXIT_OK: i32 = 0;
pub const EXIT_USAGE: i32 = 2;
pub const EXIT_RESOURCE: i32 = 3;

#[derive(Parser, Debug)]
#[command(name = "ntlab", version, about = "Norm equations over biquadratic and cyclotomic fields")]
struct Cli {
    /// Print canonical JSON instead of text.
    #[arg(long, global = true)]
    json: bool,
    /// l-adic precision for exact square roots; overrides NTLAB_PRECISION_BITS.
    #[arg(long, global = true, value_name = "BITS")]
    precision_bits: Option<u32>,
    #[command(subcommand)]
    command: Command,
}

#[derive(Args, Debug, Clone)]
#[group(required = true, multiple = false)]
struct FieldArgs {
    /// Q(sqrt a, sqrt b), written "a,b".
    #[arg(long, allow_hyphen_values = true, value_name = "A,B")]
    field: Option<String>,
    /// Q(xi_M).
    #[arg(long, value_name = "M")]
    cyclotomic: Option<u64>,
}

#[derive(Args, Debug, Clone)]
struct Triple {
    #[arg(long, allow_negative_numbers = true)]
    d1: i64,
    #[arg(long, allow_negative_numbers = true)]
    d2: i64,
    #[arg(long, allow_negative_numbers = true)]
    d3: i64,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Decide whether N(x) = n has a rational solution.
    Decide {
        #[command(flatten)]
        field: FieldArgs,
        #[arg(long, allow_hyphen_values = true)]
        n: String,
    },
    /// Local solvability of N(x) = n at one place.
    Local {
        #[command(flatten)]
        field: FieldArgs,
        #[arg(long, allow_hyphen_values = true)]
        n: String,
        /// "inf" or a prime.
        #[arg(long)]
        place: String,
    },
    /// Jacobi, quartic and Hilbert symbols.
    #[command(subcommand)]
    Symbols(SymbolsCmd),
    /// Cyclotomic double coverings.
    #[command(subcommand)]
    Covering(CoveringCmd),
    /// Brute-force cross-checks.
    #[command(subcommand)]
    Oracle(OracleCmd),
    /// Run the acceptance suite.
    VerifyPaper {
        /// Comma-separated criterion numbers; all when omitted.
        #[arg(long, value_delimiter = ',')]
        only: Vec<u32>,
    },
}

#[derive(Subcommand, Debug)]
enum SymbolsCmd {
    /// (a/m) for odd positive m.
    Jacobi {
        #[arg(long, allow_hyphen_values = true)]
        a: String,
        #[arg(long, allow_hyphen_values = true)]
        m: String,
    },
    /// (a/p)_4 for a prime p = 1 mod 4 with (a/p) = 1.
    Quartic {
        #[arg(long, allow_hyphen_values = true)]
        a: String,
        #[arg(long, allow_hyphen_values = true)]
        p: String,
    },
    /// (a, b)_v over Q.
    Hilbert {
        #[arg(long, allow_hyphen_values = true)]
        a: String,
        #[arg(long, allow_hyphen_values = true)]
        b: String,
        #[arg(long)]
        place: String,
    },
}

#[derive(Subcommand, Debug)]
enum CoveringCmd {
    /// The element Delta and its conductor.
    Delta {
        #[command(flatten)]
        triple: Triple,
    },
    /// Condition (*), optionally after deleting one monomial, and the Galois test.
    CheckStar {
        #[command(flatten)]
        triple: Triple,
        /// Delete the monomial v_p w_q, written "p,q".
        #[arg(long, value_name = "P,Q")]
        drop: Option<String>,
        /// Also run the exact Galois test on L = Q(xi_N)(sqrt Delta).
        #[arg(long)]
        galois: bool,
    },
    /// The generators u_pq of Q(xi_M).
    Cyclotomic {
        #[arg(long)]
        m: u64,
    },
}

#[derive(Subcommand, Debug)]
enum OracleCmd {
    /// Bounded search for a global solution.
    Search {
        #[arg(long, allow_hyphen_values = true)]
        field: String,
        #[arg(long, allow_hyphen_values = true)]
        n: String,
        #[arg(long, default_value_t = 10)]
        bound: i64,
        #[arg(long, default_value_t = 1)]
        denominator: i64,
        #[arg(long, default_value_t = SearchConfig::default().effort)]
        effort: u64,
    },
    /// Decide on norms of seeded random elements; every verdict must be solvable.
    Fuzz {
        #[command(flatten)]
        field: FieldArgs,
        #[arg(long, default_value_t = 100)]
        count: u64,
        /// Coordinate bound (biquadratic) or number of terms (cyclotomic).
        #[arg(long)]
        bound: Option<u64>,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        /// Write the samples as a JSON-lines corpus.
        #[arg(long)]
        corpus: Option<PathBuf>,
    },
    /// Residue enumeration mod p^k against the engine.
    Local {
        #[arg(long, allow_hyphen_values = true)]
        field: String,
        #[arg(long, allow_hyphen_values = true)]
        n: String,
        #[arg(long)]
        p: u64,
        #[arg(long, default_value_t = 4)]
        k: u32,
    },
}

/// A failed command and its exit code.
#[derive(Debug)]
pub struct Failure {
    pub code: i32,
    pub message: String,
}

impl Failure {
    fn usage(message: impl Into<String>) -> Self {
        Failure { code: EXIT_USAGE, message: message.into() }
    }
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        let code = match e {
            Error::BoundExceeded(_)
            | Error::PrecisionExhausted(_)
            | Error::EffortExceeded(_)
            | Error::BudgetExceeded(_)
            | Error::Inconclusive
            | Error::Cancelled => EXIT_RESOURCE,
            Error::Domain(_) | Error::DegenerateField(_) | Error::AmbientTooSmall { .. } | Error::EvaluationUnsupported(_) => {
                EXIT_USAGE
            }
        };
        Failure { code, message: e.to_string() }
    }
}

type Outcome = Result<Report, Failure>;

/// A command result: JSON payload plus its text rendering.
struct Report {
    result: Value,
    text: String,
}

/// Run with process arguments, writing to stdout and stderr.
pub fn run<I, T>(argv: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let env = Env {
        precision: std::env::var(PRECISION_ENV).ok(),
        cache: std::env::var_os(CACHE_ENV).map(PathBuf::from),
    };
    let stdout = std::io::stdout();
    let stderr = std::io::stderr();
    run_with(argv, &env, &mut stdout.lock(), &mut stderr.lock())
}

/// The environment variables the CLI reads.
#[derive(Clone, Debug, Default)]
pub struct Env {
    pub precision: Option<String>,
    pub cache: Option<PathBuf>,
}

pub fn run_with<I, T>(argv: I, env: &Env, out: &mut dyn Write, err: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let argv: Vec<OsString> = argv.into_iter().map(Into::into).collect();
    let cli = match Cli::try_parse_from(&argv) {
        Ok(c) => c,
        Err(e) => {
            let code = if e.use_stderr() { EXIT_USAGE } else { EXIT_OK };
            let text = e.render().to_string();
            let _ = if e.use_stderr() { write!(err, "{text}") } else { write!(out, "{text}") };
            return code;
        }
    };
    let (bits, source) = match resolve_precision(cli.precision_bits, env.precision.clone()) {
        Ok(p) => p,
        Err(msg) => {
            let _ = writeln!(err, "error: {msg}");
            return EXIT_USAGE;
        }
    };
    let mut cfg = RunConfig {
        command: command_name(&cli.command),
        args: argv.iter().skip(1).map(|a| a.to_string_lossy().into_owned()).collect(),
        precision_bits: bits,
        precision_source: source,
        search: None,
        seed: None,
        cache: env.cache.clone(),
        output: if cli.json { OutputMode::Json } else { OutputMode::Human },
    };
    match &cli.command {
        Command::Oracle(OracleCmd::Search { bound, denominator, effort, .. }) => {
            cfg.search = Some(SearchBounds { bound: *bound, denominator: *denominator, effort: *effort });
        }
        Command::Oracle(OracleCmd::Fuzz { seed, .. }) => cfg.seed = Some(*seed),
        _ => {}
    }
    let cache = Cache::new(cfg.cache.clone());
    match execute(&cli.command, &cfg, &cache, err) {
        Ok(report) => {
            let text = match cfg.output {
                OutputMode::Json => {
                    let doc = json!({
                        "command": cfg.command,
                        "result": report.result,
                        "run_config": cfg.to_json(),
                        "version": ntlab::VERSION,
                    });
                    serde_json::to_string_pretty(&doc).expect("JSON values serialize") + "\n"
                }
                OutputMode::Human => format!(
                    "{}# ntlab {} | {}\n",
                    report.text,
                    ntlab::VERSION,
                    cfg.to_json()
                ),
            };
            match out.write_all(text.as_bytes()) {
                Ok(()) => EXIT_OK,
                Err(_) => EXIT_RESOURCE,
            }
        }
        Err(f) => {
            let _ = writeln!(err, "error: {}", f.message);
            f.code
        }
    }
}

fn command_name(c: &Command) -> String {
    match c {
        Command::Decide { .. } => "decide".into(),
        Command::Local { .. } => "local".into(),
        Command::Symbols(s) => match s {
            SymbolsCmd::Jacobi { .. } => "symbols jacobi",
            SymbolsCmd::Quartic { .. } => "symbols quartic",
            SymbolsCmd::Hilbert { .. } => "symbols hilbert",
        }
        .into(),
        Command::Covering(c) => match c {
            CoveringCmd::Delta { .. } => "covering delta",
            CoveringCmd::CheckStar { .. } => "covering check-star",
            CoveringCmd::Cyclotomic { .. } => "covering cyclotomic",
        }
        .into(),
        Command::Oracle(o) => match o {
            OracleCmd::Search { .. } => "oracle search",
            OracleCmd::Fuzz { .. } => "oracle fuzz",
            OracleCmd::Local { .. } => "oracle local",
        }
        .into(),
        Command::VerifyPaper { .. } => "verify-paper".into(),
    }
}

fn parse_int(what: &str, s: &str) -> Result<BigInt, Failure> {
    s.trim().parse().map_err(|_| Failure::usage(format!("{what}: {s:?} is not an integer")))
}

fn parse_rational(what: &str, s: &str) -> Result<BigRational, Failure> {
    s.trim().parse().map_err(|_| Failure::usage(format!("{what}: {s:?} is not a rational number")))
}

fn parse_pair(what: &str, s: &str) -> Result<(i64, i64), Failure> {
    let bad = || Failure::usage(format!("{what}: expected \"a,b\", got {s:?}"));
    let (a, b) = s.split_once(',').ok_or_else(bad)?;
    Ok((a.trim().parse().map_err(|_| bad())?, b.trim().parse().map_err(|_| bad())?))
}

fn parse_biquadratic(s: &str) -> Result<BiquadraticField, Failure> {
    let (a, b) = parse_pair("--field", s)?;
    Ok(normalize_field(a, b)?)
}

fn parse_field(f: &FieldArgs) -> Result<NormField, Failure> {
    match (&f.field, f.cyclotomic) {
        (Some(s), None) => Ok(NormField::Biquadratic(parse_biquadratic(s)?)),
        (None, Some(m)) => Ok(NormField::Cyclotomic(m)),
        _ => Err(Failure::usage("give exactly one of --field and --cyclotomic")),
    }
}

fn equation(field: NormField, n: BigRational) -> Result<NormEquation, Failure> {
    Ok(match field {
        NormField::Biquadratic(k) => NormEquation::biquadratic(k, n, &FactorConfig::default())?,
        NormField::Cyclotomic(m) => NormEquation::cyclotomic(m, n)?,
    })
}

fn field_echo(input: &FieldArgs, field: &NormField) -> Value {
    let mut v = field.to_json();
    if let Some(s) = &input.field {
        v["input"] = json!(s);
    }
    v
}

fn sign_label(s: i8) -> &'static str {
    match s {
        1 => "+1",
        -1 => "-1",
        _ => "0",
    }
}

fn execute(c: &Command, cfg: &RunConfig, cache: &Cache, err: &mut dyn Write) -> Outcome {
    match c {
        Command::Decide { field, n } => cmd_decide(field, n, cache),
        Command::Local { field, n, place } => cmd_local(field, n, place),
        Command::Symbols(s) => cmd_symbols(s),
        Command::Covering(cv) => cmd_covering(cv, cfg, cache),
        Command::Oracle(o) => cmd_oracle(o),
        Command::VerifyPaper { only } => cmd_verify(only, cfg, err),
    }
}

fn cmd_decide(field: &FieldArgs, n: &str, cache: &Cache) -> Outcome {
    let nf = parse_field(field)?;
    let n = parse_rational("--n", n)?;
    let eq = equation(nf, n.clone())?;
    let report = decide(&eq, &DecideConfig::default())?;
    let fcfg = FactorConfig::default();
    let num = cache.factorization(n.numer(), || factor_int(n.numer(), &fcfg))?;
    let den = cache.factorization(n.denom(), || factor_int(n.denom(), &fcfg))?;
    let mut result = report.to_json();
    result["field"] = field_echo(field, &nf);
    result["n_factorization"] = json!({
        "denominator": factorization_to_json(&den),
        "numerator": factorization_to_json(&num),
    });
    let mut text = match nf {
        NormField::Biquadratic(k) => format!("field: {k} = (d1, d2, d3) = ({}, {}, {})\n", k.d1, k.d2, k.d3),
        NormField::Cyclotomic(m) => format!("field: Q(xi_{m})\n"),
    };
    text += &format!("n: {n}\nverdict: {}\n", report.verdict.label());
    if let ntlab::normtorus::Verdict::LocallyUnsolvable(v) = &report.verdict {
        text += &format!("failed place: {v}\n");
    }
    for p in &report.places {
        let img = p.image.as_ref().map(|s| {
            let labels: Vec<&str> = s.iter().map(|&b| ntlab::normtorus::invariant_label(b)).collect();
            format!(", invariants {{{}}}", labels.join(", "))
        });
        text += &format!(
            "  place {}: {}{}\n",
            p.certificate.place,
            if p.certificate.solvable { "locally solvable" } else { "not locally solvable" },
            img.unwrap_or_default()
        );
    }
    Ok(Report { result, text })
}

fn cmd_local(field: &FieldArgs, n: &str, place: &str) -> Outcome {
    let nf = parse_field(field)?;
    let eq = equation(nf, parse_rational("--n", n)?)?;
    let v = PlaceQ::parse(place)?;
    let cert = local_solvable(&eq, &v)?;
    let mut result = cert.to_json();
    result["field"] = field_echo(field, &nf);
    result["n"] = json!(eq.n.to_string());
    let text = format!("{}: {}\n", v, if cert.solvable { "locally solvable" } else { "not locally solvable" });
    Ok(Report { result, text })
}

fn cmd_symbols(s: &SymbolsCmd) -> Outcome {
    let (sym, inputs) = match s {
        SymbolsCmd::Jacobi { a, m } => {
            let (a, m) = (parse_int("--a", a)?, parse_int("--m", m)?);
            if m <= BigInt::from(0) || (&m % 2u32) == BigInt::from(0) {
                return Err(Failure::usage(format!("--m must be odd and positive, got {m}")));
            }
            (jacobi(&a, &m), json!({ "a": a.to_string(), "m": m.to_string() }))
        }
        SymbolsCmd::Quartic { a, p } => {
            let (a, p) = (parse_int("--a", a)?, parse_int("--p", p)?);
            (quartic_symbol(&a, &p)?, json!({ "a": a.to_string(), "p": p.to_string() }))
        }
        SymbolsCmd::Hilbert { a, b, place } => {
            let (a, b) = (parse_rational("--a", a)?, parse_rational("--b", b)?);
            if a == BigRational::from_integer(0.into()) || b == BigRational::from_integer(0.into()) {
                return Err(Failure::usage("Hilbert symbol needs nonzero arguments"));
            }
            let v = PlaceQ::parse(place)?;
            (hilbert_qp(&a, &b, &v), json!({ "a": a.to_string(), "b": b.to_string(), "place": v.to_string() }))
        }
    };
    Ok(Report { result: json!({ "inputs": inputs, "symbol": sym }), text: format!("{}\n", sign_label(sym)) })
}

fn triple_field(t: &Triple) -> Result<BiquadraticField, Failure> {
    Ok(BiquadraticField::from_triple(t.d1, t.d2, t.d3)?)
}

fn cmd_covering(c: &CoveringCmd, cfg: &RunConfig, cache: &Cache) -> Outcome {
    match c {
        CoveringCmd::Delta { triple } => {
            let k = triple_field(triple)?;
            let (spec, state) = cache.covering((k.d1, k.d2, k.d3), || covering_for_field(&k))?;
            let text = format!(
                "field: {k}\nconductor: {}\npairs: {:?}\nsqrt factor: {}\ncache: {}\n",
                spec.conductor,
                spec.pairs,
                spec.sqrt_factor.map_or("none".to_string(), |d| format!("sqrt({d})")),
                state.label()
            );
            Ok(Report { result: json!({ "cache": state.label(), "covering": spec.to_json() }), text })
        }
        CoveringCmd::CheckStar { triple, drop, galois } => {
            let k = triple_field(triple)?;
            let mut form = star_form(&k);
            if let Some(d) = drop {
                let (s, t) = parse_pair("--drop", d)?;
                form = form.without_monomial(s, t);
            }
            let star = star_holds(&k, &form);
            let verified = star_case_verified(&k);
            let mut result = json!({
                "case_verified": verified,
                "condition_star": star,
                "dropped": drop,
                "field": { "d1": k.d1, "d2": k.d2, "d3": k.d3 },
            });
            let mut text = format!("field: {k}\ncondition (*): {star}\ncase verified: {verified}\n");
            if *galois {
                let (spec, state) = cache.covering((k.d1, k.d2, k.d3), || covering_for_field(&k))?;
                let g = is_galois_double_cover(&spec, &cfg.sqrt_config())?;
                result["galois"] = json!(g);
                result["cache"] = json!(state.label());
                text += &format!("Galois over Q: {g}\n");
            }
            Ok(Report { result, text })
        }
        CoveringCmd::Cyclotomic { m } => {
            let s = s_set(*m)?;
            let gens = covering_generators_cyclotomic(*m)?;
            let mut pairs = Vec::new();
            for (i, &p) in s.iter().enumerate() {
                for &q in &s[i + 1..] {
                    pairs.push((p, q));
                }
            }
            let rank = two_rank(*m)?;
            let items: Vec<Value> =
                pairs.iter().zip(&gens).map(|(pq, u)| json!({ "pair": [pq.0, pq.1], "u": u.to_json() })).collect();
            let text = format!("conductor: {m}\nS: {s:?}\n2-rank: {rank}\npairs: {pairs:?}\n");
            Ok(Report { result: json!({ "conductor": m, "generators": items, "s_set": s, "two_rank": rank }), text })
        }
    }
}

fn cmd_oracle(o: &OracleCmd) -> Outcome {
    match o {
        OracleCmd::Search { field, n, bound, denominator, effort } => {
            let k = parse_biquadratic(field)?;
            let eq = equation(NormField::Biquadratic(k), parse_rational("--n", n)?)?;
            let sc = SearchConfig { bound: *bound, denominator: *denominator, seed: 0, effort: *effort };
            let out = search_global(&eq, &sc)?;
            let (result, text) = match out {
                SearchOutcome::Found(x) => {
                    let xs: Vec<String> = x.x.iter().map(|c| c.to_string()).collect();
                    let text = format!("found: ({})\n", xs.join(", "));
                    (json!({ "n": eq.n.to_string(), "status": "found", "xi": xs }), text)
                }
                SearchOutcome::NotFoundWithinBounds => (
                    json!({ "n": eq.n.to_string(), "status": "not_found_within_bounds", "xi": null }),
                    "not found within bounds (this proves nothing)\n".to_string(),
                ),
            };
            Ok(Report { result, text })
        }
        OracleCmd::Fuzz { field, count, bound, seed, corpus } => {
            let nf = parse_field(field)?;
            let bound = bound.unwrap_or(match nf {
                NormField::Biquadratic(_) => 20,
                NormField::Cyclotomic(_) => 3,
            });
            let dcfg = DecideConfig::default();
            let mut records = Vec::new();
            let mut failures = Vec::new();
            for i in 0..*count {
                let r = random_norm(&nf, bound, seed + i)?;
                let eq = equation(nf, r.n.clone())?;
                let verdict = decide(&eq, &dcfg)?.verdict;
                let xi = match &r.xi {
                    RandomElement::Biquadratic(x) => x.x.to_vec(),
                    RandomElement::Cyclotomic(c) => c.coords().to_vec(),
                };
                if verdict != ntlab::normtorus::Verdict::Solvable {
                    failures.push(json!({ "n": r.n.to_string(), "seed": seed + i, "verdict": verdict.label() }));
                }
                records.push(CorpusRecord { field: nf, n: r.n, xi: Some(xi), expected: verdict.label().into() });
            }
            if let Some(path) = corpus {
                std::fs::write(path, write_corpus(&records))
                    .map_err(|e| Failure { code: EXIT_RESOURCE, message: format!("{}: {e}", path.display()) })?;
            }
            let text = format!("samples: {count}\nnot solvable: {}\n", failures.len());
            Ok(Report {
                result: json!({
                    "bound": bound,
                    "failures": failures,
                    "field": field_echo(field, &nf),
                    "samples": count,
                }),
                text,
            })
        }
        OracleCmd::Local { field, n, p, k } => {
            let kf = parse_biquadratic(field)?;
            let eq = equation(NormField::Biquadratic(kf), parse_rational("--n", n)?)?;
            let brute = exhaustive_local(&eq, *p, *k)?;
            let engine = local_solvable(&eq, &PlaceQ::prime(*p as i64))?.solvable;
            let text = format!("enumeration mod {p}^{k}: {brute}\nengine: {engine}\nagree: {}\n", brute == engine);
            Ok(Report {
                result: json!({ "agree": brute == engine, "engine": engine, "exhaustive": brute, "k": k, "n": eq.n.to_string(), "p": p }),
                text,
            })
        }
    }
}

fn cmd_verify(only: &[u32], cfg: &RunConfig, err: &mut dyn Write) -> Outcome {
    let mut acfg = acceptance::Config::default();
    if cfg.precision_source != PrecisionSource::Default {
        acfg.precision_bits = cfg.precision_bits;
    }
    let results = acceptance::run_selected(&acfg, only, |r| {
        let _ = writeln!(err, "{}", r.line());
    });
    let text: String = results.iter().map(|r| r.line() + "\n").collect();
    let items: Vec<Value> = results.iter().map(|r| r.to_json()).collect();
    let all = results.iter().all(|r| r.passed || r.gap.as_ref().is_some_and(|g| g.corrected_passed));
    Ok(Report { result: json!({ "all_expected": all, "criteria": items }), text })
}
