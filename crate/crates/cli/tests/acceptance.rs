//! Acceptance suite. Each criterion prints one `criterion N: PASS|FAIL` line
//! and the target exits nonzero if any criterion fails.
//!
//! Run with `cargo test -p tsl-cli --test acceptance`.

use std::panic::{catch_unwind, AssertUnwindSafe};
use std::process::Command;
use std::time::{Duration, Instant};

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use tsl_core::algebra::{denominator_pair, discriminant, numerators, relation_holds, stratum_classify, stratum_sample, StratumLabel};
use tsl_core::corpus::{duality_corpus, random_rational};
use tsl_core::duality::{verify_duality, DualityConfig, DualityVerdict};
use tsl_core::field::{q, qi, ExactGauss, Field, Gauss, Q};
use tsl_core::groups::{bfs_counts, growth_series, FreeProductSpec};
use tsl_core::hp::{dist_f64, Complex, Real};
use tsl_core::operators::{operator_identity_suite, section_rational};
use tsl_core::opposite::{detect_accumulation, rotated_match, AccumulationReport, DetectionConfig, Verdict};
use tsl_core::poly::Poly;
use tsl_core::ratfn::RationalFunctionRep;
use tsl_core::sequence::{CoefficientStream, IndexSet, SeriesSpec};
use tsl_core::subsets::RationalSubset;
use tsl_core::Error;

const PREC: usize = 256;
const RESIDUAL_TOL: f64 = 1e-30;
const DUALITY_TOL: f64 = 1e-20;
const MACHI_LIMIT: Duration = Duration::from_secs(2);
const ORACLE_LIMIT: Duration = Duration::from_secs(30);
const CORPUS_LIMIT: Duration = Duration::from_secs(60);

type Outcome = Result<String, String>;

fn ensure(cond: bool, msg: impl FnOnce() -> String) -> Result<(), String> {
    if cond {
        Ok(())
    } else {
        Err(msg())
    }
}

fn gauss(x: Q) -> Gauss {
    Gauss::new(x, qi(0))
}

fn machi() -> SeriesSpec {
    SeriesSpec::FreeProduct { orders: vec![2, 3] }
}

fn detect(spec: SeriesSpec) -> AccumulationReport {
    detect_accumulation(&CoefficientStream::new(spec).unwrap(), &DetectionConfig::default()).unwrap()
}

fn values(r: &AccumulationReport) -> Vec<Complex> {
    r.initials.iter().map(|l| l.exact.as_ref().map_or_else(|| l.value.clone(), |x| x.0.to_complex(PREC))).collect()
}

fn real(x: Q) -> Complex {
    gauss(x).to_complex(PREC)
}

fn criterion_1() -> Outcome {
    let start = Instant::now();
    let out =
        Command::new(env!("CARGO_BIN_EXE_tsl")).args(["duality", "--group", "2,3"]).env_remove("TSL_PRECISION_BITS").output().unwrap();
    let cli_time = start.elapsed();
    ensure(out.status.code() == Some(0), || format!("exit {:?}", out.status.code()))?;
    ensure(cli_time < MACHI_LIMIT, || format!("took {cli_time:?}"))?;

    let r = verify_duality(&machi(), &DualityConfig::default()).map_err(|e| e.to_string())?;
    ensure(r.verdict == DualityVerdict::Pass, || format!("verdict {:?}: {:?}", r.verdict, r.failures))?;
    ensure(r.h_p == Some(2), || format!("h_P = {:?}", r.h_p))?;
    let acc = r.accumulation.as_ref().unwrap();
    let initials = acc.exact_initials();
    ensure(initials == Some(vec![gauss(q(5, 7)), gauss(q(7, 10))]), || format!("initials {initials:?}"))?;
    let a = acc.a_p.as_ref().and_then(|l| l.exact_value().cloned());
    ensure(a == Some(gauss(q(1, 2))), || format!("A = {a:?}"))?;
    let want_op = Poly::new(vec![gauss(qi(1)), gauss(qi(0)), gauss(q(-1, 2))]);
    ensure(r.delta_op.as_ref() == Some(&want_op), || format!("delta_op {:?}", r.delta_op))?;
    let top = r.delta_top.as_ref().and_then(|p| p.exact.clone());
    ensure(top == Some(Poly::new(vec![q(-1, 2), qi(0), qi(1)])), || format!("delta_top {top:?}"))?;
    let res = r.reversal_residual.unwrap();
    ensure(res < RESIDUAL_TOL, || format!("reversal residual {res:e}"))?;

    // entry (e, x) is 1 + a_e/x at the top poles x = ±1/√2
    let m = r.pole_matrix.as_ref().unwrap();
    let s2 = Real::from_i64(2, PREC).sqrt();
    for (e, c) in [q(5, 7), q(7, 10)].into_iter().enumerate() {
        for (j, x) in m.roots.iter().enumerate() {
            let sign = if x.to_f64_pair().0 > 0.0 { 1 } else { -1 };
            let want = &real(qi(1)) + &Complex::from_real(Real::from_rational(&(c.clone() * qi(sign)), PREC) * &s2);
            let got = &m.entries[e][j];
            ensure(dist_f64(got, &want) < DUALITY_TOL, || format!("entry ({e},{j}) = {got}, want {want}"))?;
        }
    }
    let det = r.determinant.clone().unwrap();
    let want_det = Complex::from_real(s2 / Real::from_i64(35, PREC));
    ensure(dist_f64(&det, &want_det) < DUALITY_TOL, || format!("det {det}"))?;
    Ok(format!("h_P=2, residual {res:e}, cli {cli_time:?}"))
}

fn criterion_2() -> Outcome {
    let start = Instant::now();
    let mut specs: Vec<Vec<u32>> = (2..=6).map(|p| vec![p]).collect();
    for a in 2..=6u32 {
        for b in 2..=6u32 {
            specs.push(vec![a, b]);
            specs.extend((2..=6u32).map(|c| vec![a, b, c]));
        }
    }
    ensure(specs.len() >= 60, || format!("{} specs", specs.len()))?;
    for orders in &specs {
        let spec = FreeProductSpec::new(orders.clone()).unwrap();
        let series = growth_series(&spec).taylor(13);
        let counts: Vec<Q> = bfs_counts(&spec, 12).unwrap().into_iter().map(|c| Q::from_integer(c.into())).collect();
        ensure(series == counts, || format!("{orders:?}: series {series:?} counts {counts:?}"))?;
    }
    let t = start.elapsed();
    ensure(t < ORACLE_LIMIT, || format!("took {t:?}"))?;
    Ok(format!("{} specs in {t:?}", specs.len()))
}

fn criterion_3() -> Outcome {
    let rep = growth_series(&FreeProductSpec::new(vec![2, 3]).unwrap());
    let den = &Poly::new(vec![qi(1), qi(0), qi(-2)]) * &Poly::new(vec![qi(1), qi(0), qi(-1)]);
    let even = RationalFunctionRep::new(Poly::new(vec![qi(1), qi(0), qi(5)]), den.clone()).unwrap();
    let odd = RationalFunctionRep::new(Poly::new(vec![qi(0), qi(4), qi(0), qi(2)]), den).unwrap();
    for (e, want) in [(0, even), (1, odd)] {
        let got = section_rational(&rep, 2, e).result;
        ensure(got.same_function(&want), || format!("section {e}: {got:?}"))?;
    }
    Ok("both sections match".into())
}

fn criterion_4() -> Outcome {
    let mut checked = 0;
    for seed in 0..100u64 {
        let rep = random_rational(seed, 6);
        ensure(rep.denominator.degree().unwrap_or(0) <= 6, || format!("seed {seed}: degree"))?;
        let h = 1 + (seed as usize % 5);
        let report = operator_identity_suite(&rep, h).map_err(|e| format!("seed {seed}: {e}"))?;
        let broken: Vec<String> = report.checks.iter().filter(|c| !c.holds).map(|c| c.name.clone()).collect();
        ensure(report.all_hold, || format!("seed {seed} h {h}: {broken:?}"))?;
        checked += report.checks.len();
    }
    let rep = growth_series(&FreeProductSpec::new(vec![2, 3]).unwrap());
    for h in 1..=5 {
        let report = operator_identity_suite(&rep, h).map_err(|e| e.to_string())?;
        ensure(report.all_hold, || format!("machi h {h}"))?;
        checked += report.checks.len();
    }
    Ok(format!("{checked} identities"))
}

fn criterion_5() -> Outcome {
    let start = Instant::now();
    let corpus = duality_corpus(50, 1);
    for e in &corpus {
        let r = verify_duality(&SeriesSpec::from_rep(&e.rep), &DualityConfig::default()).map_err(|x| format!("seed {}: {x}", e.seed))?;
        ensure(r.verdict == DualityVerdict::Pass && r.threshold <= DUALITY_TOL, || {
            format!("seed {}: {:?} {:?}", e.seed, r.verdict, r.failures)
        })?;
        let res = r.reversal_residual.unwrap_or(f64::INFINITY);
        ensure(res < DUALITY_TOL, || format!("seed {}: residual {res:e}", e.seed))?;
        let want: Vec<Gauss> = e.expected_initials().into_iter().map(gauss).collect();
        let got = r.accumulation.as_ref().and_then(|a| a.exact_initials());
        ensure(got.as_ref() == Some(&want), || format!("seed {}: initials {got:?}", e.seed))?;
    }
    let t = start.elapsed();
    ensure(t < CORPUS_LIMIT, || format!("took {t:?}"))?;
    Ok(format!("{} entries in {t:?}", corpus.len()))
}

fn criterion_6() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(6);
    let mut tuple = |max_h: usize| -> Vec<Q> {
        let h = rng.gen_range(1..=max_h);
        (0..h).map(|_| Q::new(rng.gen_range(1..=12i64).into(), rng.gen_range(1..=12i64).into())).collect()
    };
    for _ in 0..200 {
        let a = tuple(6);
        let nums = numerators(&a).map_err(|e| e.to_string())?;
        ensure(relation_holds(&a, &nums), || format!("relation fails for {a:?}"))?;
        let pair = denominator_pair(&a, &nums).map_err(|e| e.to_string())?;
        ensure(pair.rank_m == pair.d_p, || format!("{a:?}: rank {} vs degree {}", pair.rank_m, pair.d_p))?;
    }
    let mut rng = ChaCha8Rng::seed_from_u64(66);
    for _ in 0..200 {
        let h = rng.gen_range(1..=5usize);
        let a: Vec<Q> = (0..h).map(|_| Q::new(rng.gen_range(1..=12i64).into(), rng.gen_range(1..=12i64).into())).collect();
        let d = discriminant(&a).map_err(|e| e.to_string())?;
        let mut rotated = a.clone();
        rotated.rotate_left(1);
        let sign = if h % 2 == 1 { qi(1) } else { qi(-1) };
        ensure(discriminant(&rotated).unwrap() == &sign * &d, || format!("shift sign fails for {a:?}"))?;
        let lam = Q::new(rng.gen_range(1..=9i64).into(), rng.gen_range(1..=9i64).into());
        let scaled: Vec<Q> = a.iter().map(|x| x * &lam).collect();
        ensure(discriminant(&scaled).unwrap() == &d * lam.pow_f(h * (h - 1) / 2), || format!("homogeneity fails for {a:?}"))?;
    }
    Ok("200 rank tuples, 200 discriminant tuples".into())
}

fn criterion_7() -> Outcome {
    let mut n = 0;
    for h in 1..=6 {
        for label in StratumLabel::all(h) {
            let sample = stratum_sample(&label, &qi(1), h as u64).map_err(|e| format!("{label:?}: {e}"))?;
            let back = stratum_classify(&sample).map_err(|e| format!("{label:?}: {e}"))?;
            ensure(back == label, || format!("{label:?} classified as {back:?}"))?;
            n += 1;
        }
    }
    Ok(format!("{n} labels"))
}

fn criterion_8() -> Outcome {
    let mut subjects = vec![("machi".to_string(), machi())];
    subjects.extend(duality_corpus(10, 1).into_iter().map(|e| (format!("seed {}", e.seed), SeriesSpec::from_rep(&e.rep))));
    let far = SeriesSpec::rational(Poly::one(), Poly::new(vec![qi(1), q(-1, 4)]));
    for (name, spec) in &subjects {
        let base = detect(spec.clone());
        let h = base.h_p.ok_or_else(|| format!("{name}: no period"))?;
        let v = values(&base);
        for m in 1..=2 {
            let d = detect(spec.clone().derivative(m));
            ensure(d.h_p == Some(h) && rotated_match(&v, &values(&d), m % h, DUALITY_TOL), || format!("{name}: derivative {m}"))?;
        }
        let p = detect(spec.clone().plus(far.clone()));
        ensure(p.h_p == Some(h) && rotated_match(&v, &values(&p), 0, DUALITY_TOL), || format!("{name}: perturbation"))?;
        for c in [qi(2), q(-3, 2)] {
            let r = detect(spec.clone().rescaled(c.clone()));
            let cc = real(c.clone());
            let want: Vec<Complex> = v.iter().map(|x| x / &cc).collect();
            ensure(r.h_p == Some(h) && rotated_match(&want, &values(&r), 0, DUALITY_TOL), || format!("{name}: rescale {c}"))?;
        }
    }
    Ok(format!("{} subjects", subjects.len()))
}

fn criterion_9() -> Outcome {
    let r = detect(SeriesSpec::SqrtFixture);
    ensure(r.h_p == Some(1), || format!("sqrt h_P = {:?}", r.h_p))?;
    let omega = r.omega1.as_ref().ok_or("no omega1")?;
    let ones: Vec<Option<&ExactGauss>> = omega.values.iter().map(|v| v.exact.as_ref()).collect();
    ensure(ones == vec![Some(&ExactGauss(gauss(qi(1))))], || format!("omega1 {ones:?}"))?;

    match verify_duality(&SeriesSpec::SqrtFixture, &DualityConfig::default()) {
        Err(Error::NonMeromorphic(_)) => {}
        other => return Err(format!("duality on sqrt: {:?}", other.map(|r| r.verdict))),
    }
    let out = Command::new(env!("CARGO_BIN_EXE_tsl")).args(["duality", "--fixture", "sqrt"]).output().unwrap();
    ensure(out.status.code() == Some(2), || format!("cli refusal exit {:?}", out.status.code()))?;

    let squares = SeriesSpec::OscillatingModel { set: IndexSet::Squares, a: ExactGauss(gauss(q(1, 2))), b: ExactGauss(gauss(qi(2))) };
    let r = detect(squares);
    ensure(r.verdict == Verdict::Inconclusive && r.h_p.is_none(), || format!("squares {:?}", r.verdict))?;
    let out = Command::new(env!("CARGO_BIN_EXE_tsl")).args(["analyze", "--model", "set=squares;a=1/2;b=2"]).output().unwrap();
    ensure(out.status.code() == Some(3), || format!("cli squares exit {:?}", out.status.code()))?;

    // a rational index set with the same parameters does accumulate
    let subset = RationalSubset::new(4, vec![0, 1], vec![], vec![]).unwrap();
    let r = detect(SeriesSpec::OscillatingModel {
        set: IndexSet::Rational { subset },
        a: ExactGauss(gauss(q(1, 2))),
        b: ExactGauss(gauss(qi(2))),
    });
    ensure(r.is_finite_rational(), || "rational model inconclusive".into())?;
    Ok("sqrt h_P=1 with {1}, refused; squares inconclusive".into())
}

fn main() {
    let criteria: [(u32, fn() -> Outcome); 9] = [
        (1, criterion_1),
        (2, criterion_2),
        (3, criterion_3),
        (4, criterion_4),
        (5, criterion_5),
        (6, criterion_6),
        (7, criterion_7),
        (8, criterion_8),
        (9, criterion_9),
    ];
    let mut failed = Vec::new();
    for (n, f) in criteria {
        let start = Instant::now();
        let outcome = catch_unwind(AssertUnwindSafe(f)).unwrap_or_else(|p| {
            Err(p
                .downcast_ref::<String>()
                .cloned()
                .or_else(|| p.downcast_ref::<&str>().map(|s| s.to_string()))
                .unwrap_or_else(|| "panic".into()))
        });
        match outcome {
            Ok(detail) => println!("criterion {n}: PASS ({detail}; {:?})", start.elapsed()),
            Err(why) => {
                println!("criterion {n}: FAIL ({why})");
                failed.push(n);
            }
        }
    }
    if !failed.is_empty() {
        eprintln!("failed criteria: {failed:?}");
        std::process::exit(1);
    }
}
